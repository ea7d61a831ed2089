#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace odscale {

enum class ErrorCode {
  // network-core
  MissingReference,
  DuplicateId,
  InvalidSegment,
  NegativeDemand,
  InvalidProbability,
  // flow-model
  InvalidParams,
  XOutOfBounds,
  NonFiniteResult,
  // estimator
  UnknownPath,
  EmptyGroundTruth,
  EmptyGrid,
  // metrics
  EmptyCollection,
  ZeroGroundTruthSum,
  ZeroBaseline,
  ZeroBenchmark,
  // scenario-io
  ParseError,
  SchemaError,
  UnitError,
  InfeasibleSpec,
  NoSensors,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace odscale
