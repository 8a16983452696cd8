#pragma once

#include <stdexcept>
#include <string>

namespace gtc {

// Every failure mode the library reports. The CLI maps these onto exit codes.
enum class ErrorKind {
  // group_core
  NonSquareTable,
  ClosureViolation,
  AssociativityViolation,
  NoIdentity,
  NoInverse,
  InvalidOrder,
  // action / gconv / tc
  UnsupportedGroup,
  LengthMismatch,
  InvalidAction,
  // spectral
  HomomorphismViolation,
  NotUnitary,
  DimensionSumMismatch,
  MissingTrivialRep,
  NotIrreducible,
  BlockShapeMismatch,
  NonIntegerMultiplicity,
  DecompositionFailure,
  ZeroDCComponent,
  SingularAnchor,
  InfeasiblePlan,
  GaugeResolutionFailure,
  // completeness
  SearchSpaceTooLarge,
  // train
  ShapeMismatch,
  BadMagic,
  TruncatedFile,
  DimensionMismatch,
  // io / cli
  ParseError,
  IoError,
  UnknownCommand,
  BadFlag,
};

const char* error_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const char* name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace gtc
