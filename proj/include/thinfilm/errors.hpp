#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

/// Coarse failure category, used by the command-line tool to pick an exit code.
enum class ErrorKind {
  Usage,       // bad input, configuration or data
  Infeasible,  // instance cannot be solved as posed
  Internal,    // a numerical invariant did not hold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define THINFILM_DEFINE_ERROR(Name, Kind)                                          \
  class Name : public Error {                                                      \
   public:                                                                         \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, #Name ": " + what) {} \
  }

// optics
THINFILM_DEFINE_ERROR(InvalidArgument, Usage);
THINFILM_DEFINE_ERROR(NonDielectricIndex, Usage);
THINFILM_DEFINE_ERROR(NonPositiveWavelength, Usage);
THINFILM_DEFINE_ERROR(DegenerateDenominator, Internal);
THINFILM_DEFINE_ERROR(MismatchedSpectrumLength, Usage);
// materials
THINFILM_DEFINE_ERROR(ParseError, Usage);
THINFILM_DEFINE_ERROR(ValidationError, Usage);
THINFILM_DEFINE_ERROR(OutOfRange, Usage);
THINFILM_DEFINE_ERROR(MissingDispersion, Usage);
THINFILM_DEFINE_ERROR(SpectrumCoverage, Usage);
// relaxation
THINFILM_DEFINE_ERROR(EmptyCandidateSet, Internal);
THINFILM_DEFINE_ERROR(SingularSystem, Internal);
THINFILM_DEFINE_ERROR(NoValidHyperplane, Internal);
// models
THINFILM_DEFINE_ERROR(InconsistentBounds, Internal);
THINFILM_DEFINE_ERROR(MissingHyperplanes, Usage);
THINFILM_DEFINE_ERROR(IoError, Usage);
THINFILM_DEFINE_ERROR(InfeasibleAssignment, Infeasible);
// solver
THINFILM_DEFINE_ERROR(InadmissibleDesign, Usage);
THINFILM_DEFINE_ERROR(InstanceTooLarge, Infeasible);

#undef THINFILM_DEFINE_ERROR

}  // namespace thinfilm
