#pragma once

// Oracle-equivalence and invariant suite run by `psq validate`. Every check
// compares two independently computed quantities (or a quantity against a
// closed form) and records the worst discrepancy next to its tolerance.
// The asymptotic bands are not part of it.

#include <string>
#include <vector>

namespace psq {

struct ValidationCheck {
    std::string name;
    double rho = 0.0;
    double value = 0.0;      // worst discrepancy observed, or a p-value
    double tolerance = 0.0;
    // "<=" for discrepancies, ">=" for p-values.
    std::string relation = "<=";
    bool passed = false;
    std::string detail;      // where the worst case occurred, or the error text
};

struct ValidationOptions {
    std::vector<double> rhos{0.2, 0.5, 0.8};
    unsigned long long mc_replications = 200'000;
    unsigned long long mc_seed = 7;
};

// Numerical exceptions inside a check are caught and reported as a failed
// check; DomainError from an invalid load propagates.
std::vector<ValidationCheck> run_validation_suite(const ValidationOptions& options = {});

bool all_passed(const std::vector<ValidationCheck>& checks) noexcept;

}  // namespace psq
