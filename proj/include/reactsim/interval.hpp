#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace reactsim {

class IntervalError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Endpointwise subtraction produced an inverted pair (second operand wider
// than the first).
class WidthViolation : public IntervalError {
public:
    using IntervalError::IntervalError;
};

class NonPositiveScalar : public IntervalError {
public:
    using IntervalError::IntervalError;
};

class DivisionByNonPositive : public IntervalError {
public:
    using IntervalError::IntervalError;
};

class NonPositiveInterval : public IntervalError {
public:
    using IntervalError::IntervalError;
};

class PiOutOfRange : public IntervalError {
public:
    using IntervalError::IntervalError;
};

// An imprecise scalar stored as the closed interval [lower, upper].
// A degenerate interval [a, a] behaves exactly like the real number a in
// every operation below.
struct IntervalNumber {
    double lower;
    double upper;

    IntervalNumber(double lo, double hi) : lower(lo), upper(hi) {
        if (!(lo <= hi)) {
            throw IntervalError("IntervalNumber: lower (" + std::to_string(lo) +
                                ") must be <= upper (" + std::to_string(hi) + ")");
        }
    }

    static IntervalNumber degenerate(double a) { return {a, a}; }

    bool is_degenerate() const { return lower == upper; }
    double width() const { return upper - lower; }

    bool operator==(const IntervalNumber&) const = default;
};

inline IntervalNumber add(const IntervalNumber& a, const IntervalNumber& b) {
    return {a.lower + b.lower, a.upper + b.upper};
}

// Endpointwise difference [a.lower - b.lower, a.upper - b.upper]. This is the
// rule used by interval-parameterized models, not the classical conservative
// rule; it is only a valid interval when width(a) >= width(b). We surface the
// invalid case as an error instead of reordering endpoints.
inline IntervalNumber sub(const IntervalNumber& a, const IntervalNumber& b) {
    const double lo = a.lower - b.lower;
    const double hi = a.upper - b.upper;
    if (lo > hi) {
        throw WidthViolation("sub: endpointwise difference [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "] is inverted");
    }
    return {lo, hi};
}

// Scaling is defined for strictly positive factors only.
inline IntervalNumber scalar_mul(double alpha, const IntervalNumber& a) {
    if (!(alpha > 0.0)) {
        throw NonPositiveScalar("scalar_mul: alpha must be > 0, got " + std::to_string(alpha));
    }
    return {alpha * a.lower, alpha * a.upper};
}

inline IntervalNumber mul(const IntervalNumber& a, const IntervalNumber& b) {
    const double p1 = a.lower * b.lower;
    const double p2 = a.upper * b.lower;
    const double p3 = a.lower * b.upper;
    const double p4 = a.upper * b.upper;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

// a / b = a * (1/b.lower, 1/b.upper). The reciprocal pair arrives
// order-reversed whenever b is nondegenerate; the four-product min/max
// absorbs that, so it is not normalized first. Requires b.lower > 0.
inline IntervalNumber div(const IntervalNumber& a, const IntervalNumber& b) {
    if (!(b.lower > 0.0)) {
        throw DivisionByNonPositive("div: divisor lower endpoint must be > 0, got " +
                                    std::to_string(b.lower));
    }
    const double rl = 1.0 / b.lower;
    const double ru = 1.0 / b.upper;
    const double p1 = a.lower * rl;
    const double p2 = a.upper * rl;
    const double p3 = a.lower * ru;
    const double p4 = a.upper * ru;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

// Point realization lower^(1-pi) * upper^pi, monotone from lower (pi = 0) to
// upper (pi = 1). The endpoints and the degenerate case short-circuit so they
// are exact (bit-for-bit), not pow-rounded.
inline double interval_value(const IntervalNumber& a, double pi) {
    if (!(a.lower > 0.0)) {
        throw NonPositiveInterval("interval_value: lower endpoint must be > 0, got " +
                                  std::to_string(a.lower));
    }
    if (!(pi >= 0.0 && pi <= 1.0)) {
        throw PiOutOfRange("interval_value: pi must be in [0, 1], got " + std::to_string(pi));
    }
    if (pi == 0.0 || a.is_degenerate()) return a.lower;
    if (pi == 1.0) return a.upper;
    return std::pow(a.lower, 1.0 - pi) * std::pow(a.upper, pi);
}

}  // namespace reactsim
