#pragma once

// Partial evaluation driven by lazy narrowing. Only for comparison tests: the
// output need not be inductively sequential.

#include "nspec/peval.hpp"

namespace nspec::testing {

inline detail::Stepper lazy_stepper(const Program& p) {
  return [&p](const Term& t, FreshVars& f) { return lns(t, p, f); };
}

inline PEResult ln_partial_evaluate(const Program& p, const std::vector<Term>& S, const UnfoldPolicy& policy = {}) {
  return detail::partial_evaluate_with(p, S, lazy_stepper(p), policy);
}

inline PEResult ln_pe_control(const Program& p, const std::vector<Term>& roots, const UnfoldPolicy& policy = {}) {
  return detail::pe_control_with(p, roots, lazy_stepper(p), policy);
}

}  // namespace nspec::testing
