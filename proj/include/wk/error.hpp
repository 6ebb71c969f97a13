#pragma once

#include <stdexcept>
#include <string>

namespace wk {

// Stable error vocabulary shared by the whole library.  The CLI maps every
// code to exit status 2 except where a subcommand's contract says otherwise,
// and prints the symbolic name, so keep the names stable.
enum class errc {
  division_by_zero,
  precision_exhausted,
  no_root,
  bad_branch,
  ramified_index,
  variable_count_mismatch,
  not_a_unit,
  not_regular,
  regularization_failed,
  non_infinitesimal_argument,
  no_constant_root,
  singular_jacobian,
  wrong_arity,
  zero_input,
  degree_too_high,
  out_of_domain,
  not_a_one_unit_times_power,
  budget_exhausted,
  window_underflow,
  zero_operand_ambiguity,
  not_infinitesimal,
  gamma_pole,
  zero_denominator,
  norm_violation,
  syntax_error,
  arity_error,
  invalid_certificate,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw Error(c, msg); }

}  // namespace wk
