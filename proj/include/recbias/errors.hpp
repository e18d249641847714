#pragma once

#include <stdexcept>
#include <string>

namespace recbias {

/// Categorized error codes surfaced by the harness. Names match the
/// per-operation error contracts so tests can assert on them.
enum class Errc {
  // input parsing
  MalformedLine,
  DuplicateEntry,
  DuplicateJudgment,
  DuplicatePassage,
  EmptyInput,
  GradeOutOfRange,
  InvalidUtf8,
  MissingPassage,
  EmptyIntersection,
  // injection
  RankOutOfBounds,
  NonPositiveYear,
  PrefixMismatch,
  BadTemplate,
  IdenticalIds,
  // model-output parsing
  NoMatch,
  DuplicateId,
  OutOfRange,
  Incomplete,
  NoIdentifiersFound,
  NoPreferenceFound,
  AmbiguousPreference,
  // backend transport
  Timeout,
  RateLimited,
  AuthFailure,
  MalformedResponse,
  TransportFailure,
  BudgetExhausted,
  // metrics
  IdSetMismatch,
  ZeroVariance,
  TooFewSamples,
  KOutOfRange,
  EmptyMetricInput,
  // configuration / io
  InvalidArgument,
  InvalidConfig,
  IoError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace recbias
