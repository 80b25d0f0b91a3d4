// Release-gate checks: oracle equivalences, invariants and desk-scale
// behavioural properties of the full pipeline. Each check is independent and
// reports pass/fail with a one-line detail.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plr::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

CheckResult check_assignment_oracle();
CheckResult check_unconstrained_reduction();
CheckResult check_constraint_satisfaction();
CheckResult check_cluster_label_oracle();
CheckResult check_refinement_gain();
CheckResult check_confidence_damping();
CheckResult check_memory_accounting();
CheckResult check_loss_identities();
CheckResult check_prototype_correctness();
CheckResult check_determinism();

// Runs every check in order, printing one line per check to `progress`
// (when non-null).
std::vector<CheckResult> run_all(std::ostream* progress = nullptr);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace plr::verify
