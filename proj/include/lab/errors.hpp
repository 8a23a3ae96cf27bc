#pragma once

#include <stdexcept>
#include <string>

namespace lab {

// Caller-visible precondition failures (bad arguments, infeasible windows).
// The CLI maps these to exit code 2.
struct validation_error : std::invalid_argument {
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Internal invariant violations (a numerical identity that must hold failed).
// The CLI maps these to exit code 3.
struct defect_error : std::runtime_error {
  explicit defect_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lab
