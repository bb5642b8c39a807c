// Error taxonomy for the control-synthesis library.
//
// Every precondition violation is reported through a typed exception so the
// command-line driver can map failures onto stable process exit codes:
//   math preconditions  -> MathPreconditionError subtree
//   conditioning limits -> ConditioningError subtree
//   configuration       -> ConfigError
// Messages carry the offending quantities; callers should not parse them.

#pragma once

#include <stdexcept>
#include <string>

namespace wavectl {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated mathematical hypotheses (determinant degeneracies, spectral
// coincidences, vanishing normalizers).  CLI exit code 3.
class MathPreconditionError : public Error {
public:
    using Error::Error;
};

// Boundary-form determinant eta = alpha1*beta2 - alpha2*beta1 vanishes.
class DegenerateBoundary : public MathPreconditionError {
public:
    explicit DegenerateBoundary(const std::string& msg) : MathPreconditionError(msg) {}
};

// alpha1 + beta1*(-1)^n vanishes for some parity, so sigma(nu_n) is undefined.
class ParityDegeneracy : public MathPreconditionError {
public:
    ParityDegeneracy(int n, const std::string& msg) : MathPreconditionError(msg), n(n) {}
    int n;
};

class RepeatedEigenvalues : public MathPreconditionError {
public:
    using MathPreconditionError::MathPreconditionError;
};

class NotSymmetric : public MathPreconditionError {
public:
    using MathPreconditionError::MathPreconditionError;
};

// (b, psi_l) = 0: the control direction misses eigenspace l.
class ZeroMoment : public MathPreconditionError {
public:
    ZeroMoment(int l, const std::string& msg) : MathPreconditionError(msg), l(l) {}
    int l;
};

// nu_k^2 + lambda_l = 0: the mode oscillator degenerates.
class ZeroFrequency : public MathPreconditionError {
public:
    ZeroFrequency(int k, int l, const std::string& msg)
        : MathPreconditionError(msg), k(k), l(l) {}
    int k;
    int l;
};

// Negative-exponent weighted norm evaluated with a zero weight.
class ZeroWeight : public MathPreconditionError {
public:
    using MathPreconditionError::MathPreconditionError;
};

// Two family members share a frequency; the moment problem is singular.
class DuplicateFrequency : public MathPreconditionError {
public:
    using MathPreconditionError::MathPreconditionError;
};

// Numerical conditioning beyond the configured cap.  CLI exit code 4.
class ConditioningError : public Error {
public:
    using Error::Error;
};

class IllConditioned : public ConditioningError {
public:
    IllConditioned(double cond, const std::string& msg)
        : ConditioningError(msg), cond(cond) {}
    double cond;
};

// Ridge-free solve left a residual: the requested moments are not attainable
// within the retained family (for example a target on an unreachable mode).
class InconsistentTargets : public Error {
public:
    using Error::Error;
};

// CFL violation in the finite-difference oracle.
class UnstableGrid : public Error {
public:
    using Error::Error;
};

// Malformed or out-of-range experiment configuration.  CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace wavectl
