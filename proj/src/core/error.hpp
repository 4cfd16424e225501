#pragma once

#include <stdexcept>
#include <string>

namespace vpk {

enum class Err {
  ZeroMass,
  UnresolvableKernel,
  OutOfDomain,
  UnresolvedBump,
  PoleOutsideDomain,
  NonFiniteSample,
  InvalidSpec,
  GridMismatch,
  NoConvergence,
  RootCollapsedToRealAxis,
  TargetNotReachable,
  NotSymmetric,
  OutOfTabulatedRange,
  NotACenter,
  OrbitEscapesWell,
  BracketNotFound,
  UnstableMode,
  DenominatorNearZero,
  StepTooLarge,
  InsufficientPoints,
  NeutralityViolated,
  BadArgument,
  Io,
};

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

} // namespace vpk
