#include "recbias/errors.hpp"

namespace recbias {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::DuplicateEntry: return "DuplicateEntry";
    case Errc::DuplicateJudgment: return "DuplicateJudgment";
    case Errc::DuplicatePassage: return "DuplicatePassage";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::GradeOutOfRange: return "GradeOutOfRange";
    case Errc::InvalidUtf8: return "InvalidUtf8";
    case Errc::MissingPassage: return "MissingPassage";
    case Errc::EmptyIntersection: return "EmptyIntersection";
    case Errc::RankOutOfBounds: return "RankOutOfBounds";
    case Errc::NonPositiveYear: return "NonPositiveYear";
    case Errc::PrefixMismatch: return "PrefixMismatch";
    case Errc::BadTemplate: return "BadTemplate";
    case Errc::IdenticalIds: return "IdenticalIds";
    case Errc::NoMatch: return "NoMatch";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::Incomplete: return "Incomplete";
    case Errc::NoIdentifiersFound: return "NoIdentifiersFound";
    case Errc::NoPreferenceFound: return "NoPreferenceFound";
    case Errc::AmbiguousPreference: return "AmbiguousPreference";
    case Errc::Timeout: return "Timeout";
    case Errc::RateLimited: return "RateLimited";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::TransportFailure: return "TransportFailure";
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::IdSetMismatch: return "IdSetMismatch";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::EmptyMetricInput: return "EmptyMetricInput";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace recbias
