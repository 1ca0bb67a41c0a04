#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace miocp {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // measured numbers backing the verdict
};

/* Acceptance checks.  Each one pins its own tolerances, instance counts and
 * wall-clock limit in the implementation; a check fails rather than loosens
 * them.  The two refinement studies run the shipped presets end to end and
 * are the expensive ones. */
CheckResult check_rounding_bound();       // integral gap of sum-up rounding
CheckResult check_minmax_equivalence();   // branch and bound == brute force
CheckResult check_budget_compliance();    // budget loop never violates caps
CheckResult check_gradients();            // adjoint vs central differences
CheckResult check_scalar_family_bound();  // closed-form family obeys the estimate
CheckResult check_integrator();           // order, decay, mass conservation
CheckResult check_bound_formulas();       // growth constants vs frozen values
CheckResult check_heat_refinement();      // cost trend of the heat study
CheckResult check_lotka_refinement();     // cost trend of the predator-prey study

/* All of the above in a fixed order, streaming one "[PASS]/[FAIL] name: detail"
 * line per check to os as results arrive.  Returns all results. */
std::vector<CheckResult> run_acceptance(std::ostream& os);

}  // namespace miocp
