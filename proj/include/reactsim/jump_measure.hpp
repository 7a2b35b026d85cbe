#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "reactsim/rng.hpp"

namespace reactsim {

// One atom of the jump measure: events arrive at `rate` per unit time and
// enter the shared noise channel with coefficient `size`.
struct JumpMark {
    double rate;
    double size;

    bool operator==(const JumpMark&) const = default;
};

// Finite atomic jump measure. Because the mark set is finite, every integral
// against the measure is an exact sum and compound-Poisson sampling is exact
// in law. An empty mark list is the no-jump model.
class JumpMeasureSpec {
public:
    JumpMeasureSpec() : z_bound_(1.0) {}

    JumpMeasureSpec(std::vector<JumpMark> marks, double z_bound)
        : marks_(std::move(marks)), z_bound_(z_bound) {
        if (!(z_bound_ > 0.0) || !std::isfinite(z_bound_)) {
            throw std::invalid_argument("JumpMeasureSpec: z_bound must be finite and > 0");
        }
        for (std::size_t j = 0; j < marks_.size(); ++j) {
            const JumpMark& m = marks_[j];
            if (!(m.rate > 0.0) || !std::isfinite(m.rate)) {
                throw std::invalid_argument("JumpMeasureSpec: mark " + std::to_string(j) +
                                            " rate must be finite and > 0");
            }
            if (!(std::abs(m.size) < z_bound_)) {
                throw std::invalid_argument("JumpMeasureSpec: mark " + std::to_string(j) +
                                            " |size| must be < z_bound");
            }
        }
    }

    static JumpMeasureSpec none() { return JumpMeasureSpec{}; }

    const std::vector<JumpMark>& marks() const { return marks_; }
    double z_bound() const { return z_bound_; }
    bool empty() const { return marks_.empty(); }
    std::size_t size() const { return marks_.size(); }

    // total mass of the measure (finite by construction)
    double total_rate() const {
        double s = 0.0;
        for (const JumpMark& m : marks_) s += m.rate;
        return s;
    }

    // sum_j rate_j * size_j^2 / denom, i.e. the integral of size^2/denom
    // against the measure. Callers pass (1+delta)^2 or (1-delta)^2.
    double integral_gamma_sq_weighted(double denom) const {
        if (!(denom > 0.0)) {
            throw std::invalid_argument("integral_gamma_sq_weighted: denom must be > 0");
        }
        double s = 0.0;
        for (const JumpMark& m : marks_) s += (m.size * m.size / denom) * m.rate;
        return s;
    }

    // sum_j rate_j * size_j: the drift removed per unit time by compensation.
    double compensator_rate() const {
        double s = 0.0;
        for (const JumpMark& m : marks_) s += m.rate * m.size;
        return s;
    }

    // One Poisson count per mark over a window of length dt, independent
    // across marks and across calls.
    std::vector<int> sample_jump_counts(double dt, RngStream& rng) const {
        if (!(dt > 0.0)) throw std::invalid_argument("sample_jump_counts: dt must be > 0");
        std::vector<int> counts(marks_.size(), 0);
        for (std::size_t j = 0; j < marks_.size(); ++j) {
            counts[j] = rng.poisson(marks_[j].rate * dt);
        }
        return counts;
    }

    bool operator==(const JumpMeasureSpec&) const = default;

private:
    std::vector<JumpMark> marks_;
    double z_bound_;
};

}  // namespace reactsim
