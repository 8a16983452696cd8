#include "grouptc/error.hpp"

namespace gtc {

const char* error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonSquareTable: return "NonSquareTable";
    case ErrorKind::ClosureViolation: return "ClosureViolation";
    case ErrorKind::AssociativityViolation: return "AssociativityViolation";
    case ErrorKind::NoIdentity: return "NoIdentity";
    case ErrorKind::NoInverse: return "NoInverse";
    case ErrorKind::InvalidOrder: return "InvalidOrder";
    case ErrorKind::UnsupportedGroup: return "UnsupportedGroup";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidAction: return "InvalidAction";
    case ErrorKind::HomomorphismViolation: return "HomomorphismViolation";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::DimensionSumMismatch: return "DimensionSumMismatch";
    case ErrorKind::MissingTrivialRep: return "MissingTrivialRep";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::BlockShapeMismatch: return "BlockShapeMismatch";
    case ErrorKind::NonIntegerMultiplicity: return "NonIntegerMultiplicity";
    case ErrorKind::DecompositionFailure: return "DecompositionFailure";
    case ErrorKind::ZeroDCComponent: return "ZeroDCComponent";
    case ErrorKind::SingularAnchor: return "SingularAnchor";
    case ErrorKind::InfeasiblePlan: return "InfeasiblePlan";
    case ErrorKind::GaugeResolutionFailure: return "GaugeResolutionFailure";
    case ErrorKind::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnknownCommand: return "UnknownCommand";
    case ErrorKind::BadFlag: return "BadFlag";
  }
  return "Unknown";
}

}  // namespace gtc
