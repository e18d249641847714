#include <algorithm>
#include <numeric>

#include "recbias/backend.hpp"
#include "recbias/errors.hpp"
#include "recbias/hash.hpp"
#include "recbias/rng.hpp"
#include "recbias/strings.hpp"

namespace recbias {

MockKind mock_kind_from_string(const std::string& name) {
  if (name == "identity") return MockKind::identity;
  if (name == "reverse") return MockKind::reverse;
  if (name == "lexical_overlap") return MockKind::lexical_overlap;
  if (name == "recency_greedy") return MockKind::recency_greedy;
  if (name == "date_blind") return MockKind::date_blind;
  if (name == "fresh_preferring") return MockKind::fresh_preferring;
  if (name == "coin_flip") return MockKind::coin_flip;
  raise(Errc::InvalidConfig, "unknown mock backend kind: " + name);
}

const char* mock_kind_name(MockKind kind) {
  switch (kind) {
    case MockKind::identity: return "identity";
    case MockKind::reverse: return "reverse";
    case MockKind::lexical_overlap: return "lexical_overlap";
    case MockKind::recency_greedy: return "recency_greedy";
    case MockKind::date_blind: return "date_blind";
    case MockKind::fresh_preferring: return "fresh_preferring";
    case MockKind::coin_flip: return "coin_flip";
  }
  return "?";
}

void MockSpec::validate() const {
  if (kind == MockKind::recency_greedy) {
    if (lambda < 0.0 || lambda > 1.0)
      raise(Errc::InvalidConfig, "recency_greedy lambda must be in [0, 1]");
  } else if (lambda != 0.0) {
    raise(Errc::InvalidConfig, "lambda only applies to recency_greedy");
  }
}

nlohmann::json MockSpec::signature() const {
  nlohmann::json sig = {
      {"kind", "mock"},
      {"mock", mock_kind_name(kind)},
      {"prompt_template", std::string(kPromptTemplateVersion)},
  };
  if (kind == MockKind::recency_greedy) sig["lambda"] = lambda;
  if (kind == MockKind::coin_flip) sig["seed"] = seed;
  return sig;
}

namespace {

/// Distinct query terms found in the text's token set.
int overlap_count(const std::string& query, const std::string& text) {
  auto q = tokenize(query);
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  auto t = tokenize(text);
  std::sort(t.begin(), t.end());
  int count = 0;
  for (const auto& term : q)
    if (std::binary_search(t.begin(), t.end(), term)) ++count;
  return count;
}

std::pair<int, int> window_year_range(const WindowContext& context) {
  int mn = 0, mx = 0;
  bool any = false;
  for (const auto& item : context.items) {
    if (!item.year) continue;
    if (!any) {
      mn = mx = *item.year;
      any = true;
    } else {
      mn = std::min(mn, *item.year);
      mx = std::max(mx, *item.year);
    }
  }
  return any ? std::pair{mn, mx} : std::pair{0, 0};
}

}  // namespace

double mock_score(const MockSpec& spec, const WindowItem& item, const WindowContext& context,
                  int position) {
  if (spec.kind != MockKind::recency_greedy)
    raise(Errc::InvalidArgument, "mock_score is defined for recency_greedy");
  if (position < 1) raise(Errc::InvalidArgument, "position is 1-based");
  auto [mn, mx] = window_year_range(context);
  double year_norm = 0.0;
  if (item.year && mx > mn)
    year_norm = static_cast<double>(*item.year - mn) / static_cast<double>(mx - mn);
  double base = 1.0 / static_cast<double>(position);
  return (1.0 - spec.lambda) * base + spec.lambda * year_norm;
}

namespace {

class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockSpec spec) : spec_(spec) { spec_.validate(); }

  std::string name() const override { return std::string("mock:") + mock_kind_name(spec_.kind); }
  nlohmann::json signature() const override { return spec_.signature(); }

  std::string complete(const PromptBundle& bundle, bool) override {
    if (bundle.window) return render_ranking(rank(*bundle.window, bundle.cache_text));
    if (bundle.pair) return std::string(1, preference_letter(choose(*bundle.pair, bundle.cache_text)));
    raise(Errc::InvalidArgument, "mock backend needs a window or pair context");
  }

 private:
  Permutation rank(const WindowContext& context, const std::string& cache_text) const {
    const int n = static_cast<int>(context.items.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    switch (spec_.kind) {
      case MockKind::identity:
      case MockKind::date_blind:  // ignores dates entirely: keeps presented order
        break;
      case MockKind::reverse:
        std::reverse(order.begin(), order.end());
        break;
      case MockKind::lexical_overlap:
        sort_by_score(order, [&](int id) {
          return static_cast<double>(
              overlap_count(context.query, context.items[static_cast<std::size_t>(id - 1)].text));
        });
        break;
      case MockKind::fresh_preferring:
        sort_by_score(order, [&](int id) {
          const auto& item = context.items[static_cast<std::size_t>(id - 1)];
          return item.year ? static_cast<double>(*item.year) : 0.0;
        });
        break;
      case MockKind::recency_greedy:
        sort_by_score(order, [&](int id) {
          return mock_score(spec_, context.items[static_cast<std::size_t>(id - 1)], context, id);
        });
        break;
      case MockKind::coin_flip: {
        SplitMix64 rng(sha256_u64(std::to_string(spec_.seed) + "\x1f" + cache_text));
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          std::size_t j = i + static_cast<std::size_t>(rng.bounded(order.size() - i));
          std::swap(order[i], order[j]);
        }
        break;
      }
    }
    return Permutation{std::move(order)};
  }

  /// Stable sort by descending score; ties keep presented order.
  template <class ScoreFn>
  static void sort_by_score(std::vector<int>& order, ScoreFn&& score) {
    std::vector<double> scores(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) scores[i] = score(order[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[static_cast<std::size_t>(a - 1)] >
                                                scores[static_cast<std::size_t>(b - 1)]; });
  }

  Preference choose(const PairContext& pair, const std::string& cache_text) const {
    switch (spec_.kind) {
      case MockKind::identity:
        return Preference::A;
      case MockKind::reverse:
        return Preference::B;
      case MockKind::lexical_overlap: {
        int a = overlap_count(pair.query, pair.a.text);
        int b = overlap_count(pair.query, pair.b.text);
        return b > a ? Preference::B : Preference::A;
      }
      case MockKind::date_blind: {
        // Scores the date-free text, so its choice cannot move across rounds.
        int a = overlap_count(pair.query, pair.a.plain_text);
        int b = overlap_count(pair.query, pair.b.plain_text);
        return b > a ? Preference::B : Preference::A;
      }
      case MockKind::fresh_preferring: {
        int ya = pair.a.year.value_or(0);
        int yb = pair.b.year.value_or(0);
        return yb > ya ? Preference::B : Preference::A;
      }
      case MockKind::recency_greedy: {
        WindowContext context{pair.query, {pair.a, pair.b}};
        double a = mock_score(spec_, pair.a, context, 1);
        double b = mock_score(spec_, pair.b, context, 2);
        return b > a ? Preference::B : Preference::A;
      }
      case MockKind::coin_flip:
        return (sha256_u64(std::to_string(spec_.seed) + "\x1f" + cache_text) & 1)
                   ? Preference::B
                   : Preference::A;
    }
    return Preference::A;
  }

  MockSpec spec_;
};

}  // namespace

std::shared_ptr<Backend> make_mock_backend(const MockSpec& spec) {
  return std::make_shared<MockBackend>(spec);
}

}  // namespace recbias
