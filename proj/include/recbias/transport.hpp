#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace recbias {

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Seam between the chat client and the network so tests can script
/// responses. Implementations throw Error(Timeout/TransportFailure) for
/// connection-level problems.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post_json(const std::string& url,
                                 const std::vector<std::pair<std::string, std::string>>& headers,
                                 const std::string& body,
                                 std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib based implementation; supports http and https endpoints.
std::shared_ptr<Transport> make_http_transport();

}  // namespace recbias
