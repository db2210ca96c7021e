#include "ibprof/error.hpp"

namespace ibprof {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NodeIdOutOfRange: return "NodeIdOutOfRange";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::PartitionSizeMismatch: return "PartitionSizeMismatch";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::RoleMismatch: return "RoleMismatch";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::DegenerateMarginals: return "DegenerateMarginals";
    case ErrorCode::EmptyIntraGroupStrata: return "EmptyIntraGroupStrata";
    case ErrorCode::NoBtoIArcs: return "NoBtoIArcs";
    case ErrorCode::MissingInteriorOrBoundary: return "MissingInteriorOrBoundary";
    case ErrorCode::TrivialSet: return "TrivialSet";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ZeroStationaryMass: return "ZeroStationaryMass";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NotUndirected: return "NotUndirected";
    case ErrorCode::StateOutOfRange: return "StateOutOfRange";
    case ErrorCode::InvarianceViolation: return "InvarianceViolation";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingNode: return "MissingNode";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace ibprof
