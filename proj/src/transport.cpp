#include "recbias/transport.hpp"

#include <httplib.h>

#include "recbias/errors.hpp"

namespace recbias {

namespace {

/// Split an endpoint URL into the httplib client base ("scheme://host:port")
/// and the request path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    raise(Errc::InvalidConfig, "endpoint URL missing scheme: " + url);
  auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

class HttplibTransport final : public Transport {
 public:
  HttpResponse post_json(const std::string& url,
                         const std::vector<std::pair<std::string, std::string>>& headers,
                         const std::string& body, std::chrono::milliseconds timeout) override {
    auto [base, path] = split_url(url);
    httplib::Client client(base);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
    httplib::Headers hl;
    for (const auto& [k, v] : headers) hl.emplace(k, v);
    auto res = client.Post(path, hl, body, "application/json");
    if (!res) {
      auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
          err == httplib::Error::Write)
        raise(Errc::Timeout, "request to " + url + " timed out (" + httplib::to_string(err) + ")");
      raise(Errc::TransportFailure, "request to " + url + " failed (" + httplib::to_string(err) + ")");
    }
    return HttpResponse{res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<Transport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace recbias
