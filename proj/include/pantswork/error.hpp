#pragma once

#include <stdexcept>
#include <string>

namespace pw {

enum class ErrorKind {
  MalformedEncoding,
  EmptySet,
  RankOverflow,
  PerfectKernel,
  Parse,
  InvalidParameters,
  SlotOccupied,
  SelectorOutOfRange,
  NotSeparating,
  UnknownEdge,
  NotABiflute,
  NoBoundarySlot,
  NoGluingSite,
  EmbeddingFailure,
  NonPositiveLength,
  PathNotCarried,
  CurveNotCarried,
  MapUndefinedOnCurve,
  UnboundedFamily,
  NoWitness,
  FiniteGenusComplement,
};

const char* to_string(ErrorKind kind);

// Single exception type; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pw
