#pragma once

#include <vector>

#include "whmc/results_csv.hpp"

namespace whmc {

/// Quick self-check of the physical, numerical and determinism invariants,
/// run by `whmc validate`. Takes a few seconds.
std::vector<io::CheckResult> run_invariant_suite();

}  // namespace whmc
