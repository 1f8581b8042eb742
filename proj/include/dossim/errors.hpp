#pragma once

#include <stdexcept>
#include <string>

namespace dossim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotHurwitz : public Error {
public:
    using Error::Error;
};

class NotSymmetric : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// alpha_i <= 0 for the given delta; the certificate cannot be formed.
class AlphaNonPositive : public Error {
public:
    AlphaNonPositive(int subsystem, double delta)
        : Error("alpha_" + std::to_string(subsystem) + " <= 0 at delta=" + std::to_string(delta)),
          subsystem_(subsystem), delta_(delta) {}
    int subsystem() const { return subsystem_; }
    double delta() const { return delta_; }

private:
    int subsystem_;
    double delta_;
};

class SmallGainViolated : public Error {
public:
    explicit SmallGainViolated(double radius)
        : Error("small-gain condition violated: r = " + std::to_string(radius)), radius_(radius) {}
    double radius() const { return radius_; }

private:
    double radius_;
};

class SigmaTooLarge : public Error {
public:
    explicit SigmaTooLarge(int subsystem)
        : Error("sigma_" + std::to_string(subsystem) + " exceeds its strict upper bound"),
          subsystem_(subsystem) {}
    int subsystem() const { return subsystem_; }

private:
    int subsystem_;
};

class NonPositiveC : public Error {
public:
    using Error::Error;
};

class NotCertified : public Error {
public:
    using Error::Error;
};

class NoFeasibleDelta : public Error {
public:
    using Error::Error;
};

class OutOfHorizon : public Error {
public:
    using Error::Error;
};

class BadRange : public Error {
public:
    using Error::Error;
};

class InfeasibleSpec : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace dossim
