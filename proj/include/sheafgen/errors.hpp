#pragma once

#include <stdexcept>
#include <string>

namespace sheafgen {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct division_by_zero : error {
  division_by_zero() : error("division by zero") {}
};

struct root_order_mismatch : error {
  root_order_mismatch() : error("mismatched root_order; re-base one operand first") {}
};

struct not_polynomial : error {
  using error::error;
};

struct beyond_truncation : error {
  using error::error;
};

struct domain_error : error {
  using error::error;
};

struct pole_error : error {
  using error::error;
};

struct convergence_error : error {
  using error::error;
};

struct pipeline_error : error {
  using error::error;
};

}  // namespace sheafgen
