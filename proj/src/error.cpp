#include "wk/error.hpp"

namespace wk {

const char* errc_name(errc c) {
  switch (c) {
    case errc::division_by_zero: return "DivisionByZero";
    case errc::precision_exhausted: return "PrecisionExhausted";
    case errc::no_root: return "NoRoot";
    case errc::bad_branch: return "BadBranch";
    case errc::ramified_index: return "RamifiedIndex";
    case errc::variable_count_mismatch: return "VariableCountMismatch";
    case errc::not_a_unit: return "NotAUnit";
    case errc::not_regular: return "NotRegular";
    case errc::regularization_failed: return "RegularizationFailed";
    case errc::non_infinitesimal_argument: return "NonInfinitesimalArgument";
    case errc::no_constant_root: return "NoConstantRoot";
    case errc::singular_jacobian: return "SingularJacobian";
    case errc::wrong_arity: return "WrongArity";
    case errc::zero_input: return "ZeroInput";
    case errc::degree_too_high: return "DegreeTooHigh";
    case errc::out_of_domain: return "OutOfDomain";
    case errc::not_a_one_unit_times_power: return "NotAOneUnitTimesPower";
    case errc::budget_exhausted: return "BudgetExhausted";
    case errc::window_underflow: return "WindowUnderflow";
    case errc::zero_operand_ambiguity: return "ZeroOperandAmbiguity";
    case errc::not_infinitesimal: return "NotInfinitesimal";
    case errc::gamma_pole: return "GammaPole";
    case errc::zero_denominator: return "ZeroDenominator";
    case errc::norm_violation: return "NormViolation";
    case errc::syntax_error: return "SyntaxError";
    case errc::arity_error: return "ArityError";
    case errc::invalid_certificate: return "InvalidCertificate";
  }
  return "UnknownError";
}

}  // namespace wk
