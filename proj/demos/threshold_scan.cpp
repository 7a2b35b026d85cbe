// Scan the imprecision level and print how the regime prediction moves from
// persistence to extinction as the realized noise intensity grows.

#include <cstdio>

#include "reactsim/mc_analysis.hpp"
#include "reactsim/thresholds.hpp"

int main() {
    using namespace reactsim;

    const ImpreciseParams params{
        IntervalNumber::degenerate(1.0),  // k1
        IntervalNumber::degenerate(1.0),  // k2
        IntervalNumber::degenerate(2.0),  // k3
        IntervalNumber::degenerate(1.0),  // k4
        IntervalNumber::degenerate(1.0),  // p
        IntervalNumber(0.3, 1.8),         // sigma
        1.0,                              // x0
    };
    const JumpMeasureSpec jumps({{1.0, 0.1}}, 1.0);

    std::printf("%8s %8s %10s %10s %10s  %s\n", "upsilon", "sigma", "r1", "r1s", "sigma'^2",
                "regime");
    for (int i = 0; i <= 10; ++i) {
        const double u = i / 10.0;
        const ThresholdReport rep = build_threshold_report(params, u, jumps);
        std::printf("%8.2f %8.4f %10.5f %10.5f %10.5f  %s\n", u, rep.crisp.sigma, rep.r1,
                    rep.r1s.value(), rep.sigma_prime_sq.value(),
                    to_string(classify_regime(rep)));
    }
    return 0;
}
