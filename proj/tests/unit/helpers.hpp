#pragma once

// Test-only utilities: scratch directories, fixture writers, permutation
// generators, and brute-force metric oracles kept deliberately independent
// of the library implementations they check.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "recbias/corpus.hpp"
#include "recbias/serps.hpp"

namespace testutil {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / ("recbias-" + tag + "-" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                        const std::string& content) {
  auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

/// perm[i] = after-rank of the item at before-rank i+1.
using RankPermutation = std::vector<int>;

inline RankPermutation random_permutation(int n, std::mt19937_64& rng) {
  RankPermutation perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
  for (int i = n - 1; i > 0; --i) {
    auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

/// Build the PairedSerps a run over this rank permutation would produce,
/// with the canonical year schedule (newest at the deepest before-rank).
inline recbias::PairedSerps serps_from_permutation(const RankPermutation& perm, int newest_year = 2025,
                                                   int step = 1) {
  const int n = static_cast<int>(perm.size());
  recbias::PairedSerps serps;
  serps.topic_id = "t";
  serps.before.topic_id = "t";
  serps.after.topic_id = "t";
  serps.after.entries.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    std::string id = "p" + std::to_string(i);
    serps.before.entries.push_back(recbias::RunEntry{id, i, 0.0});
    int after_rank = perm[static_cast<std::size_t>(i - 1)];
    serps.after.entries[static_cast<std::size_t>(after_rank - 1)] =
        recbias::RunEntry{id, after_rank, 0.0};
    serps.injected_year[id] = newest_year - (n - i) * step;
  }
  return serps;
}

inline RankPermutation reversal(int n) {
  RankPermutation perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = n - i;
  return perm;
}

// ---------------------------------------------------------------------------
// Brute-force oracles, straight from the metric definitions.

namespace oracle {

inline double aars(const RankPermutation& perm) {
  double sum = 0;
  for (int i = 1; i <= static_cast<int>(perm.size()); ++i)
    sum += std::abs(perm[static_cast<std::size_t>(i - 1)] - i);
  return sum / static_cast<double>(perm.size());
}

inline int alrs(const RankPermutation& perm) {
  int best = 0;
  for (int i = 1; i <= static_cast<int>(perm.size()); ++i)
    best = std::max(best, std::abs(perm[static_cast<std::size_t>(i - 1)] - i));
  return best;
}

/// O(n^2) concordant/discordant counting.
inline double kendall_tau(const RankPermutation& perm) {
  const int n = static_cast<int>(perm.size());
  long long concordant = 0, discordant = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      (perm[static_cast<std::size_t>(i)] < perm[static_cast<std::size_t>(j)] ? concordant
                                                                             : discordant)++;
  return static_cast<double>(concordant - discordant) /
         (static_cast<double>(n) * (n - 1) / 2.0);
}

inline int year_at_before_rank(int rank, int n, int newest, int step) {
  return newest - (n - rank) * step;
}

/// Mean year change across after-ranks 1..k: occupant's year minus the year
/// that sat at the same rank before.
inline double year_shift_topk(const RankPermutation& perm, int k, int newest = 2025, int step = 1) {
  const int n = static_cast<int>(perm.size());
  std::vector<int> occupant(static_cast<std::size_t>(n) + 1);  // after-rank -> before-rank
  for (int i = 1; i <= n; ++i) occupant[static_cast<std::size_t>(perm[static_cast<std::size_t>(i - 1)])] = i;
  double sum = 0;
  for (int r = 1; r <= k; ++r)
    sum += year_at_before_rank(occupant[static_cast<std::size_t>(r)], n, newest, step) -
           year_at_before_rank(r, n, newest, step);
  return sum / static_cast<double>(k);
}

inline std::vector<double> year_shift_groups(const RankPermutation& perm, int newest = 2025,
                                             int step = 1) {
  const int n = static_cast<int>(perm.size());
  std::vector<int> occupant(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) occupant[static_cast<std::size_t>(perm[static_cast<std::size_t>(i - 1)])] = i;
  std::vector<double> out;
  for (int start = 1; start <= n; start += 10) {
    int end = std::min(start + 9, n);
    double sum = 0;
    for (int r = start; r <= end; ++r)
      sum += year_at_before_rank(occupant[static_cast<std::size_t>(r)], n, newest, step) -
             year_at_before_rank(r, n, newest, step);
    out.push_back(sum / static_cast<double>(end - start + 1));
  }
  return out;
}

}  // namespace oracle

}  // namespace testutil
