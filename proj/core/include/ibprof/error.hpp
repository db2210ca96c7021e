#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ibprof {

enum class ErrorCode {
  NegativeWeight,
  NodeIdOutOfRange,
  EmptyGraph,
  NonConvergence,
  PartitionSizeMismatch,
  InvalidPartition,
  RoleMismatch,
  ZeroDenominator,
  DegenerateMarginals,
  EmptyIntraGroupStrata,
  NoBtoIArcs,
  MissingInteriorOrBoundary,
  TrivialSet,
  ZeroMass,
  TooLarge,
  ZeroStationaryMass,
  NotSymmetric,
  Disconnected,
  NotUndirected,
  StateOutOfRange,
  InvarianceViolation,
  UnknownFixture,
  InvalidArgument,
  ParseError,
  MissingNode,
  DuplicateNode,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ibprof
