#pragma once

#include <string>
#include <vector>

namespace lightretriever {

// Test-only fault injection for the mutation-sanity check; the CLI always
// passes none.
enum class SelfcheckMutation { none, backward_sign_flip };

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Runs the training-numerics property suite on deterministic random
// instances: reorder equivalence, fused-vs-naive forward, gradient checks
// against finite differences, mask fidelity, loss identities.
std::vector<CheckResult> run_selfcheck(SelfcheckMutation mutation = SelfcheckMutation::none);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace lightretriever
