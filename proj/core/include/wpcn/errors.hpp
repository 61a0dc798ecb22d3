#pragma once

#include <stdexcept>
#include <string>

namespace wpcn {

// Harvested-power demand at or above the saturation level of the EH curve.
// The inverse curve has no finite answer; callers must lower the demand
// (typically by growing tau0) instead of clamping.
class UnreachableDemandError : public std::runtime_error {
 public:
  explicit UnreachableDemandError(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke an interface contract (non-unit-modulus phases, degenerate
// allocation, ...). Distinct from domain errors on scalar arguments.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace wpcn
