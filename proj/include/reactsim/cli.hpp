#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "reactsim/config.hpp"
#include "reactsim/csv.hpp"
#include "reactsim/mc_analysis.hpp"
#include "reactsim/sde_engine.hpp"
#include "reactsim/thresholds.hpp"

// Subcommand implementations. Each writes CSV to the given stream and
// returns the process exit code:
//   0  success
//   1  I/O, config, or engine failure
//   2  jump-boundedness assumption violated at some grid point
//   3  a theory-vs-empirics verdict failed
// Output is byte-identical across runs for a fixed seed and config; the only
// non-data line is the "#" metadata comment, which carries no timestamps.

namespace reactsim {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_assumption_violated = 2;
inline constexpr int exit_verification_failed = 3;

namespace detail {

inline const char* threshold_header() {
    return "upsilon,k1,k2,k3,k4,p,sigma,k,state_bound,delta,sigma_prime_sq,sigma_dprime_sq,"
           "r1,r1s,a1,a2,l_holds,extinction_bound,persistence_lower_bound";
}

inline std::string threshold_columns(const ThresholdReport& rep) {
    std::string row;
    row += csv::real(rep.crisp.upsilon);
    row += ',';
    row += csv::real(rep.crisp.k1);
    row += ',';
    row += csv::real(rep.crisp.k2);
    row += ',';
    row += csv::real(rep.crisp.k3);
    row += ',';
    row += csv::real(rep.crisp.k4);
    row += ',';
    row += csv::real(rep.crisp.p);
    row += ',';
    row += csv::real(rep.crisp.sigma);
    row += ',';
    row += csv::real(rep.k);
    row += ',';
    row += csv::real(rep.state_bound);
    row += ',';
    row += csv::real(rep.delta);
    row += ',';
    row += csv::real(rep.sigma_prime_sq);
    row += ',';
    row += csv::real(rep.sigma_dprime_sq);
    row += ',';
    row += csv::real(rep.r1);
    row += ',';
    row += csv::real(rep.r1s);
    row += ',';
    row += rep.h_holds ? csv::boolean(rep.a1_holds) : std::string();
    row += ',';
    row += rep.h_holds ? csv::boolean(rep.a2_holds) : std::string();
    row += ',';
    row += rep.h_holds ? csv::boolean(rep.l_holds) : std::string();
    row += ',';
    row += csv::real(rep.extinction_bound);
    row += ',';
    row += csv::real(rep.persistence_lower_bound);
    return row;
}

inline std::vector<SweepRow> run_rows(const RunConfig& cfg, int workers) {
    const PathState initial{0.0, cfg.initial.x, cfg.initial.y};
    return sweep(cfg.params, cfg.jumps, cfg.sim, cfg.grid(), cfg.n_paths, initial, workers,
                 cfg.verify);
}

inline int rows_exit_code(const std::vector<SweepRow>& rows) {
    bool any_error = false;
    bool any_h_violation = false;
    bool any_fail = false;
    for (const SweepRow& row : rows) {
        if (row.verdict == Verdict::error) any_error = true;
        if (!row.report.h_holds) any_h_violation = true;
        if (row.verdict == Verdict::fail) any_fail = true;
    }
    if (any_error) return exit_failure;
    if (any_h_violation) return exit_assumption_violated;
    if (any_fail) return exit_verification_failed;
    return exit_ok;
}

inline void write_verify_rows(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << threshold_header()
        << ",n_paths,mean_ly,se_ly,mean_avg_y,se_avg_y,extinct_fraction,regime_theory,verdict\n";
    for (const SweepRow& row : rows) {
        out << threshold_columns(row.report) << ',';
        if (row.ensemble) {
            const EnsembleReport& e = *row.ensemble;
            out << e.n_paths << ',' << csv::real(e.mean_ly) << ',' << csv::real(e.se_ly) << ','
                << csv::real(e.mean_avg_y) << ',' << csv::real(e.se_avg_y) << ','
                << csv::real(e.extinct_fraction) << ',';
        } else {
            out << ",,,,,,";
        }
        out << (row.regime ? to_string(*row.regime) : "") << ',';
        std::string verdict = to_string(row.verdict);
        if (row.verdict == Verdict::error) verdict += ": " + row.error_message;
        out << csv::field(verdict) << '\n';
    }
}

}  // namespace detail

// One threshold row per grid point; no simulation.
inline int cmd_thresholds(const RunConfig& cfg, std::ostream& out) {
    out << "# reactsim seed=" << cfg.sim.seed << "\n";
    out << detail::threshold_header() << "\n";
    bool any_h_violation = false;
    for (double u : cfg.grid()) {
        const ThresholdReport rep = build_threshold_report(cfg.params, u, cfg.jumps);
        if (!rep.h_holds) any_h_violation = true;
        out << detail::threshold_columns(rep) << "\n";
    }
    return any_h_violation ? exit_assumption_violated : exit_ok;
}

// Single-path trace at record_stride resolution, for inspection or plotting.
inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.upsilon.has_value()) {
        throw ValidationError("'simulate' needs a single 'upsilon', not a grid");
    }
    const CrispParams crisp = realize(cfg.params, *cfg.upsilon);
    const JumpDiffusionEngine engine(crisp, cfg.jumps, cfg.sim);
    const PathRecorder rec = engine.simulate({0.0, cfg.initial.x, cfg.initial.y},
                                             RngStream::derived(cfg.sim.seed, 0));
    out << "# reactsim seed=" << cfg.sim.seed << "\n";
    out << "t,x,y,ln_y_over_t,avg_y,mart_diff_over_t,mart_jump_over_t\n";
    for (const PathSample& s : rec.samples) {
        out << csv::real(s.t) << ',' << csv::real(s.x) << ',' << csv::real(s.y) << ','
            << csv::real(std::log(s.y) / s.t) << ',' << csv::real(s.avg_y) << ','
            << csv::real(s.mart_diff / s.t) << ',' << csv::real(s.mart_jump / s.t) << '\n';
    }
    return exit_ok;
}

// Ensemble verification of the extinction/persistence dichotomy, one row per
// grid point (a single upsilon is a one-row grid).
inline int cmd_verify(const RunConfig& cfg, std::ostream& out, int workers = 0) {
    const std::vector<SweepRow> rows = detail::run_rows(cfg, workers);
    out << "# reactsim seed=" << cfg.sim.seed << "\n";
    detail::write_verify_rows(rows, out);
    return detail::rows_exit_code(rows);
}

// Full imprecision sweep; requires an explicit grid.
inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, int workers = 0) {
    if (cfg.upsilon.has_value()) {
        throw ValidationError("'sweep' needs 'upsilon_grid', not a single 'upsilon'");
    }
    const std::vector<SweepRow> rows = detail::run_rows(cfg, workers);
    out << "# reactsim seed=" << cfg.sim.seed << "\n";
    detail::write_verify_rows(rows, out);
    return detail::rows_exit_code(rows);
}

}  // namespace reactsim
