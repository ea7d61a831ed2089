#include "odscale/error.hpp"

namespace odscale {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingReference: return "MissingReference";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidSegment: return "InvalidSegment";
    case ErrorCode::NegativeDemand: return "NegativeDemand";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::XOutOfBounds: return "XOutOfBounds";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::UnknownPath: return "UnknownPath";
    case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::EmptyCollection: return "EmptyCollection";
    case ErrorCode::ZeroGroundTruthSum: return "ZeroGroundTruthSum";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::ZeroBenchmark: return "ZeroBenchmark";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnitError: return "UnitError";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::NoSensors: return "NoSensors";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace odscale
