#pragma once

#include <stdexcept>
#include <string>

namespace sensched {

// Coarse error classes; the CLI maps them to exit codes.
enum class ErrorClass {
  kConfig,      // malformed input or model validation failure
  kSolver,      // numerical or algorithmic failure
  kInfeasible,  // infeasible problem or exceeded search caps
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

#define SENSCHED_DEFINE_ERROR(Name, Class)                                   \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what) : Error(ErrorClass::Class, what) {} \
  }

SENSCHED_DEFINE_ERROR(DimensionError, kConfig);
SENSCHED_DEFINE_ERROR(ValidationError, kConfig);
SENSCHED_DEFINE_ERROR(DomainError, kConfig);
SENSCHED_DEFINE_ERROR(RiccatiError, kSolver);
SENSCHED_DEFINE_ERROR(UnstableSystemError, kSolver);
SENSCHED_DEFINE_ERROR(UnstableAssumptionViolated, kSolver);
SENSCHED_DEFINE_ERROR(AbsentSensor, kSolver);
SENSCHED_DEFINE_ERROR(InfiniteCost, kSolver);
SENSCHED_DEFINE_ERROR(ModelError, kSolver);
SENSCHED_DEFINE_ERROR(NoConvergence, kSolver);
SENSCHED_DEFINE_ERROR(NoCycleError, kSolver);
SENSCHED_DEFINE_ERROR(BoundSearchOverflow, kInfeasible);
SENSCHED_DEFINE_ERROR(StateSpaceOverflow, kInfeasible);
SENSCHED_DEFINE_ERROR(WindowOverflow, kInfeasible);
SENSCHED_DEFINE_ERROR(OverflowError, kInfeasible);
SENSCHED_DEFINE_ERROR(InfeasibleError, kInfeasible);

#undef SENSCHED_DEFINE_ERROR

}  // namespace sensched
