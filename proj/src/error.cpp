#include "ipursuit/error.hpp"

namespace ipursuit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidDim: return "InvalidDim";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ZeroCoefficient: return "ZeroCoefficient";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::RankTooLow: return "RankTooLow";
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::NotInSpan: return "NotInSpan";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace ipursuit
