#pragma once

#include <stdexcept>
#include <string>

namespace p2asym {

// Validity errors map to CLI exit code 2, numerical errors to exit code 3.
enum class ErrorKind { Validity, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& name, const std::string& what)
      : std::runtime_error(name + ": " + what), kind_(kind), name_(name) {}
  ErrorKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

#define P2ASYM_ERROR(Type, Kind)                                       \
  class Type : public Error {                                          \
   public:                                                             \
    explicit Type(const std::string& what)                             \
        : Error(ErrorKind::Kind, #Type, what) {}                       \
  };

P2ASYM_ERROR(OutOfValidity, Validity)
P2ASYM_ERROR(NoValidRegime, Validity)
P2ASYM_ERROR(DegenerateBranch, Validity)
P2ASYM_ERROR(SeedOutOfRange, Validity)
P2ASYM_ERROR(NearPole, Validity)
P2ASYM_ERROR(BracketFailure, Numerical)
P2ASYM_ERROR(RootStructureError, Numerical)
P2ASYM_ERROR(QuadratureFailure, Numerical)
P2ASYM_ERROR(ToleranceFailure, Numerical)
P2ASYM_ERROR(StepUnderflow, Numerical)
P2ASYM_ERROR(PoleFitFailure, Numerical)
P2ASYM_ERROR(ProjectionIllConditioned, Numerical)
P2ASYM_ERROR(FrameIncomplete, Numerical)
P2ASYM_ERROR(RegularizationFailure, Numerical)
P2ASYM_ERROR(EmptyWindow, Numerical)
P2ASYM_ERROR(IOFailure, Numerical)

#undef P2ASYM_ERROR

}  // namespace p2asym
