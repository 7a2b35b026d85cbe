#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "reactsim/interval.hpp"
#include "reactsim/jump_measure.hpp"

namespace reactsim {

// The jump-boundedness assumption |state_bound^p * size_j| <= delta < 1
// failed: some mark can push the state across zero, and none of the
// extinction/persistence bounds apply.
class AssumptionHViolated : public std::domain_error {
public:
    AssumptionHViolated(std::string msg, std::size_t mark_index, double value)
        : std::domain_error(std::move(msg)), mark_index(mark_index), value(value) {}

    explicit AssumptionHViolated(std::string msg)
        : std::domain_error(std::move(msg)),
          mark_index(static_cast<std::size_t>(-1)),
          value(std::numeric_limits<double>::quiet_NaN()) {}

    std::size_t mark_index;
    double value;  // the offending max |state_bound^p * size|
};

// The six imprecise rate parameters plus the fixed feed concentration x0.
struct ImpreciseParams {
    IntervalNumber k1, k2, k3, k4, p, sigma;
    double x0;
};

// Point realization of the model at one imprecision level.
struct CrispParams {
    double k1, k2, k3, k4, p, sigma;
    double x0;
    double upsilon;

    bool operator==(const CrispParams&) const = default;
};

inline void validate(const ImpreciseParams& params) {
    auto require_positive = [](const IntervalNumber& iv, const char* name) {
        if (!(iv.lower > 0.0)) {
            throw std::invalid_argument(std::string("ImpreciseParams: ") + name +
                                        " lower endpoint must be > 0");
        }
    };
    require_positive(params.k1, "k1");
    require_positive(params.k2, "k2");
    require_positive(params.k3, "k3");
    require_positive(params.k4, "k4");
    if (!(params.p.lower >= 1.0)) {
        throw std::invalid_argument("ImpreciseParams: p lower endpoint must be >= 1");
    }
    // sigma = 0 (no diffusion) is representable only as the degenerate [0, 0];
    // a nondegenerate interval touching zero cannot be realized.
    if (!(params.sigma.lower > 0.0) && !(params.sigma.is_degenerate() && params.sigma.lower == 0.0)) {
        throw std::invalid_argument("ImpreciseParams: sigma must have lower > 0 or be exactly [0, 0]");
    }
    if (!(params.x0 > 0.0) || !std::isfinite(params.x0)) {
        throw std::invalid_argument("ImpreciseParams: x0 must be finite and > 0");
    }
}

inline void validate(const CrispParams& c) {
    auto require_positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("CrispParams: ") + name +
                                        " must be finite and > 0");
        }
    };
    require_positive(c.k1, "k1");
    require_positive(c.k2, "k2");
    require_positive(c.k3, "k3");
    require_positive(c.k4, "k4");
    require_positive(c.x0, "x0");
    if (!(c.p >= 1.0)) throw std::invalid_argument("CrispParams: p must be >= 1");
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) {
        throw std::invalid_argument("CrispParams: sigma must be finite and >= 0");
    }
}

// Realize every interval at level upsilon via interval_value. Degenerate
// intervals come back bit-identical for every upsilon, so a crisp model is
// constant across the imprecision grid.
inline CrispParams realize(const ImpreciseParams& params, double upsilon) {
    validate(params);
    auto value = [upsilon](const IntervalNumber& iv) {
        // interval_value rejects lower <= 0; the validated degenerate [0, 0]
        // sigma realizes to 0 directly.
        if (iv.is_degenerate() && iv.lower == 0.0) return 0.0;
        return interval_value(iv, upsilon);
    };
    if (!(upsilon >= 0.0 && upsilon <= 1.0)) {
        throw PiOutOfRange("realize: upsilon must be in [0, 1], got " + std::to_string(upsilon));
    }
    return CrispParams{value(params.k1), value(params.k2), value(params.k3), value(params.k4),
                       value(params.p),  value(params.sigma), params.x0, upsilon};
}

inline double compute_k(const CrispParams& c) { return std::min(c.k2, c.k4); }

// Ceiling of the invariant region: trajectories started with x + y below
// this sum stay below it (up to the scheme's per-step leakage).
inline double compute_state_bound(const CrispParams& c) { return c.k1 * c.x0 / compute_k(c); }

// x^p with fast paths for the common integer exponents.
inline double pow_p(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    return std::pow(x, p);
}

// Tightest constant delta with |state_bound^p * size_j| <= delta over all
// marks (0 for the no-jump model). Values >= 1 mean a single jump can wipe
// out positivity; that is reported as a violation, not clamped.
inline double compute_delta(const CrispParams& c, const JumpMeasureSpec& jumps) {
    const double bp = pow_p(compute_state_bound(c), c.p);
    double max_v = 0.0;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < jumps.marks().size(); ++j) {
        const double v = std::abs(bp * jumps.marks()[j].size);
        if (v > max_v) {
            max_v = v;
            arg = j;
        }
    }
    if (max_v >= 1.0) {
        throw AssumptionHViolated("jump-boundedness violated: |state_bound^p * size| = " +
                                      std::to_string(max_v) + " >= 1 at mark " +
                                      std::to_string(arg),
                                  arg, max_v);
    }
    return max_v;
}

struct SigmaCorrections {
    double prime_sq;   // sigma^2 + integral of size^2/(1+delta)^2
    double dprime_sq;  // sigma^2 + integral of size^2/(1-delta)^2
};

// The two noise intensities corrected for jumps; dprime_sq >= prime_sq, with
// equality exactly when there are no jumps.
inline SigmaCorrections compute_sigma_primes(const CrispParams& c, const JumpMeasureSpec& jumps,
                                             double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) {
        throw std::invalid_argument("compute_sigma_primes: delta must be in [0, 1)");
    }
    const double s2 = c.sigma * c.sigma;
    if (jumps.empty()) return {s2, s2};
    const double up = 1.0 + delta;
    const double dn = 1.0 - delta;
    return {s2 + jumps.integral_gamma_sq_weighted(up * up),
            s2 + jumps.integral_gamma_sq_weighted(dn * dn)};
}

// Deterministic reaction threshold (p*k3/k4) * (k1*x0/k2)^p. Note the base
// uses k2, not min(k2, k4).
inline double compute_r1(const CrispParams& c) {
    return (c.p * c.k3 / c.k4) * pow_p(c.k1 * c.x0 / c.k2, c.p);
}

// Noise-corrected threshold R1 - (sigma_dprime_sq / (2 k4)) * state_bound^(2p).
// Values > 1 guarantee persistence in the mean.
inline double compute_r1s(const CrispParams& c, const JumpMeasureSpec& jumps) {
    const double delta = compute_delta(c, jumps);
    const double dprime_sq = compute_sigma_primes(c, jumps, delta).dprime_sq;
    const double bp = pow_p(compute_state_bound(c), c.p);
    return compute_r1(c) - dprime_sq / (2.0 * c.k4) * (bp * bp);
}

struct ExtinctionConditions {
    bool a1_holds = false;
    bool a2_holds = false;
    // Decay-rate ceiling for ln y(t)/t. When both conditions hold this is the
    // first condition's bound; the second's is then exposed separately.
    std::optional<double> bound;
    std::optional<double> bound_a2;
};

// Extinction conditions on the corrected noise intensity:
//   first:  prime_sq > p^2 k3^2 / (2 k4); bound p^2 k3^2 / (2 prime_sq) - k4
//   second: prime_sq <= p k3 / state_bound^p and
//           (p k3/k4) state_bound^p - prime_sq/(2 k4) state_bound^(2p) < 1;
//           bound is k4 * (that expression - 1).
// The first uses a strict ">", the second a "<="; ties go to the second.
// Either bound is strictly negative whenever its condition holds.
inline ExtinctionConditions evaluate_extinction_conditions(const CrispParams& c,
                                                           const JumpMeasureSpec& jumps) {
    const double delta = compute_delta(c, jumps);
    const double prime_sq = compute_sigma_primes(c, jumps, delta).prime_sq;
    const double bp = pow_p(compute_state_bound(c), c.p);
    const double b2p = bp * bp;

    ExtinctionConditions out;
    out.a1_holds = prime_sq > (c.p * c.p * c.k3 * c.k3) / (2.0 * c.k4);
    const double a2_expr = (c.p * c.k3 / c.k4) * bp - prime_sq / (2.0 * c.k4) * b2p;
    out.a2_holds = (prime_sq <= c.p * c.k3 / bp) && (a2_expr < 1.0);

    if (out.a2_holds) out.bound_a2 = c.k4 * (a2_expr - 1.0);
    if (out.a1_holds) {
        out.bound = (c.p * c.p * c.k3 * c.k3) / (2.0 * prime_sq) - c.k4;
    } else if (out.a2_holds) {
        out.bound = out.bound_a2;
    }
    return out;
}

// Asymptotic floor on the running average of y:
//   -(k2/k4) * [ k4/(p k3) + sigma_dprime_sq/(2 p k3) * state_bound^(2p) ]^(1/p)
//   + k1 x0 / k4.
// Well-defined whenever the jump-boundedness assumption holds; it is
// positive exactly when the corrected threshold exceeds 1.
inline double compute_persistence_bound(const CrispParams& c, const JumpMeasureSpec& jumps) {
    const double delta = compute_delta(c, jumps);
    const double dprime_sq = compute_sigma_primes(c, jumps, delta).dprime_sq;
    const double bp = pow_p(compute_state_bound(c), c.p);
    const double inner = c.k4 / (c.p * c.k3) + dprime_sq / (2.0 * c.p * c.k3) * (bp * bp);
    return -(c.k2 / c.k4) * std::pow(inner, 1.0 / c.p) + c.k1 * c.x0 / c.k4;
}

// Every closed-form quantity for one (params, upsilon, jumps) triple. When
// the jump-boundedness assumption fails, `delta` still records the offending
// max and everything downstream of it is withheld.
struct ThresholdReport {
    CrispParams crisp{};
    double k = 0.0;
    double state_bound = 0.0;
    double delta = 0.0;
    double r1 = 0.0;
    bool h_holds = false;
    std::optional<double> sigma_prime_sq;
    std::optional<double> sigma_dprime_sq;
    std::optional<double> r1s;
    bool a1_holds = false;
    bool a2_holds = false;
    bool l_holds = false;
    std::optional<double> extinction_bound;
    std::optional<double> extinction_bound_a2;
    std::optional<double> persistence_lower_bound;
};

inline ThresholdReport build_threshold_report(const ImpreciseParams& params, double upsilon,
                                              const JumpMeasureSpec& jumps) {
    ThresholdReport rep;
    rep.crisp = realize(params, upsilon);
    rep.k = compute_k(rep.crisp);
    rep.state_bound = compute_state_bound(rep.crisp);
    rep.r1 = compute_r1(rep.crisp);
    try {
        rep.delta = compute_delta(rep.crisp, jumps);
        rep.h_holds = true;
    } catch (const AssumptionHViolated& e) {
        rep.delta = e.value;
        rep.h_holds = false;
        return rep;
    }
    const SigmaCorrections sc = compute_sigma_primes(rep.crisp, jumps, rep.delta);
    rep.sigma_prime_sq = sc.prime_sq;
    rep.sigma_dprime_sq = sc.dprime_sq;
    rep.r1s = compute_r1s(rep.crisp, jumps);
    rep.l_holds = *rep.r1s > 1.0;
    const ExtinctionConditions ec = evaluate_extinction_conditions(rep.crisp, jumps);
    rep.a1_holds = ec.a1_holds;
    rep.a2_holds = ec.a2_holds;
    rep.extinction_bound = ec.bound;
    rep.extinction_bound_a2 = ec.bound_a2;
    rep.persistence_lower_bound = compute_persistence_bound(rep.crisp, jumps);
    return rep;
}

}  // namespace reactsim
