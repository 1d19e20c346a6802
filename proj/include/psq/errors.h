#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace psq {

// %.6g, for error messages (std::to_string prints tiny values as 0.000000).
inline std::string describe(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Parameter and argument violations. The CLI maps these to exit code 2.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// (n0, kappa, nu) triple that no tagged-customer trajectory can produce.
class InconsistentPathError : public DomainError {
public:
    using DomainError::DomainError;
};

class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

class DivergenceError : public DomainError {
public:
    using DomainError::DomainError;
};

// Numerical failures: a tolerance or budget could not be met. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CapacityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureDiagnosticError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PrecisionEscalationError : public NumericalError {
public:
    PrecisionEscalationError(const std::string& what, int first_failing_index)
        : NumericalError(what), first_failing_index_(first_failing_index) {}
    int first_failing_index() const noexcept { return first_failing_index_; }

private:
    int first_failing_index_;
};

class TruncationError : public NumericalError {
public:
    TruncationError(const std::string& what, double achieved)
        : NumericalError(what), achieved_(achieved) {}
    // Tail mass (or relative series remainder) actually reached.
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Truncated chain leaked more probability past its state cap than allowed.
class EnlargeStateCapError : public NumericalError {
public:
    EnlargeStateCapError(const std::string& what, double leak)
        : NumericalError(what), leak_(leak) {}
    double leak() const noexcept { return leak_; }

private:
    double leak_;
};

class DiagnosticsError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace psq
