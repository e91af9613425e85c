#pragma once

#include <stdexcept>
#include <string>

namespace bssdim {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed arguments: wrong shapes, non-finite values, out-of-range knobs.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Lag outside [0, T-2] (or [1, T-2] where a positive lag is required).
class InvalidLag : public Error {
public:
    using Error::Error;
};

// Candidate dimension d outside the range a statistic or resampler supports.
class InvalidDimension : public Error {
public:
    using Error::Error;
};

// Nonstationary ARMA coefficients or an unknown simulation setting.
class InvalidModel : public Error {
public:
    using Error::Error;
};

// Covariance (or another SPD input) is rank deficient past the eps guard.
class SingularCovariance : public Error {
public:
    using Error::Error;
};

// Joint diagonalization ran out of sweeps. Carries the remaining
// off-diagonal Frobenius mass so the caller can decide to accept or abort.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, double off_diagonal_mass)
        : Error(what), off_diagonal_mass_(off_diagonal_mass) {}

    double off_diagonal_mass() const noexcept { return off_diagonal_mass_; }

private:
    double off_diagonal_mass_;
};

// Malformed CSV or config text; message names the offending line.
class ParseError : public Error {
public:
    using Error::Error;
};

// WAV input that is not 16-bit PCM / 32-bit float, or inconsistent files.
class UnsupportedFormat : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bssdim
