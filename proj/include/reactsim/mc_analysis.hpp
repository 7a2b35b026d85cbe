#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "reactsim/sde_engine.hpp"
#include "reactsim/thresholds.hpp"

namespace reactsim {

class RegimeMismatch : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class Regime { extinct_a1, extinct_a2, persistent_l, indeterminate };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::extinct_a1: return "extinct_A1";
        case Regime::extinct_a2: return "extinct_A2";
        case Regime::persistent_l: return "persistent_L";
        case Regime::indeterminate: return "indeterminate";
    }
    return "?";
}

struct VerifyOptions {
    double extinction_cutoff = 1e-4;  // y(T) below this counts as extinct
    double se_margin = 3.0;           // standard-error multiplier for verdicts
};

struct EnsembleReport {
    int n_paths = 0;
    double t_end = 0.0;
    double epsilon_floor = 0.0;

    double mean_ly = 0.0;  // of ln y(T)/T
    double se_ly = 0.0;
    double mean_ly_tail_max = 0.0;  // of max ln y(t)/t over the last 10% of samples

    double mean_avg_y = 0.0;
    double se_avg_y = 0.0;
    double mean_avg_x = 0.0;
    double se_avg_x = 0.0;

    double extinct_fraction = 0.0;

    double mean_mart_diff_over_t = 0.0;
    double se_mart_diff_over_t = 0.0;
    double mean_mart_jump_over_t = 0.0;
    double se_mart_jump_over_t = 0.0;

    double phi_residual_max = 0.0;  // max balance-identity residual over paths
    long clamp_events = 0;
    double max_xy_sum = 0.0;
    double max_cancel_residual = 0.0;

    bool operator==(const EnsembleReport&) const = default;
};

// Residual of the exact balance between the running averages and the
// endpoint drift:
//   avg_x = k1 x0 / k2 - (k4/k2) avg_y + phi(t),
//   phi(t) = -[(x(t)-x(0))/t + (y(t)-y(0))/t] / k2.
// This is a discrete identity of the scheme (the noise cancels in x + y), so
// the residual is pure rounding unless a clamp fired.
inline double check_phi_identity(const PathRecorder& rec, const CrispParams& c) {
    if (!(rec.t > 0.0)) throw std::invalid_argument("check_phi_identity: recorder has t = 0");
    const double phi = -((rec.x - rec.x0) / rec.t + (rec.y - rec.y0) / rec.t) / c.k2;
    return std::abs(rec.avg_x() - (c.k1 * c.x0 / c.k2 - (c.k4 / c.k2) * rec.avg_y() + phi));
}

// Theory-side classification. Extinction takes precedence over persistence:
// the decay conclusion is pathwise, so if either extinction condition holds
// the persistent label is never reported. The conditions are not exhaustive;
// the remainder is `indeterminate`.
inline Regime classify_regime(const ThresholdReport& report) {
    if (!report.h_holds) {
        throw AssumptionHViolated("classify_regime: jump-boundedness assumption fails", 0,
                                  report.delta);
    }
    if (report.a1_holds) return Regime::extinct_a1;
    if (report.a2_holds) return Regime::extinct_a2;
    if (report.l_holds) return Regime::persistent_l;
    return Regime::indeterminate;
}

namespace detail {

struct PathSummary {
    double ly_final = 0.0;
    double ly_tail_max = 0.0;
    double avg_x = 0.0;
    double avg_y = 0.0;
    double mart_diff_over_t = 0.0;
    double mart_jump_over_t = 0.0;
    double phi_residual = 0.0;
    bool extinct = false;
    long clamp_events = 0;
    double max_xy_sum = 0.0;
    double max_cancel_residual = 0.0;
};

inline PathSummary summarize_path(const PathRecorder& rec, const CrispParams& crisp,
                                  double extinction_cutoff) {
    PathSummary s;
    s.ly_final = rec.ly_estimate();
    s.ly_tail_max = s.ly_final;
    if (!rec.samples.empty()) {
        const std::size_t n = rec.samples.size();
        const std::size_t tail = std::max<std::size_t>(1, (n + 9) / 10);
        for (std::size_t i = n - tail; i < n; ++i) {
            const PathSample& smp = rec.samples[i];
            s.ly_tail_max = std::max(s.ly_tail_max, std::log(smp.y) / smp.t);
        }
    }
    s.avg_x = rec.avg_x();
    s.avg_y = rec.avg_y();
    s.mart_diff_over_t = rec.mart_diff / rec.t;
    s.mart_jump_over_t = rec.mart_jump / rec.t;
    s.phi_residual = check_phi_identity(rec, crisp);
    s.extinct = rec.y < extinction_cutoff;
    s.clamp_events = rec.clamp_events;
    s.max_xy_sum = rec.max_xy_sum;
    s.max_cancel_residual = rec.max_cancel_residual;
    return s;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

template <typename Getter>
MeanSe mean_se(const std::vector<PathSummary>& v, Getter get) {
    const std::size_t n = v.size();
    double mean = 0.0;
    for (const PathSummary& s : v) mean += get(s);
    mean /= static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const PathSummary& s : v) {
        const double d = get(s) - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, sd / std::sqrt(static_cast<double>(n))};
}

}  // namespace detail

// Simulate n_paths independent trajectories and aggregate. Path i always
// draws from the stream derived from (cfg.seed, i) and aggregation runs in
// index order, so the report is identical for every worker count. A failing
// path aborts the whole ensemble, reporting its index.
inline EnsembleReport run_ensemble(const CrispParams& crisp, const JumpMeasureSpec& jumps,
                                   const SimConfig& cfg, int n_paths, const PathState& initial,
                                   int workers = 0, const VerifyOptions& opts = {}) {
    if (n_paths < 2) throw std::invalid_argument("run_ensemble: n_paths must be >= 2");
    const JumpDiffusionEngine engine(crisp, jumps, cfg);
    engine.check_initial(initial);

    std::vector<detail::PathSummary> summaries(static_cast<std::size_t>(n_paths));
    std::atomic<int> next{0};
    std::mutex err_mutex;
    int err_index = -1;
    std::string err_message;

    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_paths) return;
            try {
                const PathRecorder rec =
                    engine.simulate(initial, RngStream::derived(cfg.seed, static_cast<std::uint64_t>(i)));
                summaries[static_cast<std::size_t>(i)] =
                    detail::summarize_path(rec, crisp, opts.extinction_cutoff);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (err_index < 0 || i < err_index) {
                    err_index = i;
                    err_message = e.what();
                }
            }
        }
    };

    int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::clamp(n_workers, 1, n_paths);
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (err_index >= 0) {
        throw std::runtime_error("run_ensemble: path " + std::to_string(err_index) + ": " +
                                 err_message);
    }

    EnsembleReport rep;
    rep.n_paths = n_paths;
    rep.t_end = cfg.t_end;
    rep.epsilon_floor = cfg.epsilon_floor;

    using detail::mean_se;
    const auto ly = mean_se(summaries, [](const auto& s) { return s.ly_final; });
    rep.mean_ly = ly.mean;
    rep.se_ly = ly.se;
    rep.mean_ly_tail_max = mean_se(summaries, [](const auto& s) { return s.ly_tail_max; }).mean;
    const auto ay = mean_se(summaries, [](const auto& s) { return s.avg_y; });
    rep.mean_avg_y = ay.mean;
    rep.se_avg_y = ay.se;
    const auto ax = mean_se(summaries, [](const auto& s) { return s.avg_x; });
    rep.mean_avg_x = ax.mean;
    rep.se_avg_x = ax.se;
    const auto md = mean_se(summaries, [](const auto& s) { return s.mart_diff_over_t; });
    rep.mean_mart_diff_over_t = md.mean;
    rep.se_mart_diff_over_t = md.se;
    const auto mj = mean_se(summaries, [](const auto& s) { return s.mart_jump_over_t; });
    rep.mean_mart_jump_over_t = mj.mean;
    rep.se_mart_jump_over_t = mj.se;

    int n_extinct = 0;
    for (const auto& s : summaries) {
        if (s.extinct) ++n_extinct;
        rep.phi_residual_max = std::max(rep.phi_residual_max, s.phi_residual);
        rep.clamp_events += s.clamp_events;
        rep.max_xy_sum = std::max(rep.max_xy_sum, s.max_xy_sum);
        rep.max_cancel_residual = std::max(rep.max_cancel_residual, s.max_cancel_residual);
    }
    rep.extinct_fraction = static_cast<double>(n_extinct) / static_cast<double>(n_paths);
    return rep;
}

struct VerdictRecord {
    bool pass = false;
    double observed = 0.0;          // the ensemble statistic being judged
    double bound = 0.0;             // the theoretical reference
    double se_margin = 0.0;         // margin actually applied (multiplier * SE)
    double floor_correction = 0.0;  // extinction only; see verify_extinction
};

// Extinction verdict: the mean decay estimate must sit below the theoretical
// ceiling, up to the SE margin. The positivity clamp truncates ln y at
// ln(epsilon_floor), so the deepest observable decay rate is
// ln(epsilon_floor)/T; when the theoretical bound lies below that, the
// difference is added back as floor_correction.
inline VerdictRecord verify_extinction(const EnsembleReport& ens, const ThresholdReport& report,
                                       double se_margin = 3.0) {
    const Regime regime = classify_regime(report);
    if (regime != Regime::extinct_a1 && regime != Regime::extinct_a2) {
        throw RegimeMismatch("verify_extinction: report regime is not an extinction regime");
    }
    VerdictRecord v;
    v.bound = *report.extinction_bound;
    v.observed = ens.mean_ly;
    v.se_margin = se_margin * ens.se_ly;
    v.floor_correction = std::max(0.0, std::log(ens.epsilon_floor) / ens.t_end - v.bound);
    v.pass = v.observed <= v.bound + v.floor_correction + v.se_margin;
    return v;
}

// Persistence verdict: the mean running average of y must reach the
// theoretical floor, up to the SE margin.
inline VerdictRecord verify_persistence(const EnsembleReport& ens, const ThresholdReport& report,
                                        double se_margin = 3.0) {
    if (classify_regime(report) != Regime::persistent_l) {
        throw RegimeMismatch("verify_persistence: report regime is not persistent");
    }
    VerdictRecord v;
    v.bound = *report.persistence_lower_bound;
    v.observed = ens.mean_avg_y;
    v.se_margin = se_margin * ens.se_avg_y;
    v.pass = v.observed >= v.bound - v.se_margin;
    return v;
}

enum class Verdict { pass, fail, not_applicable, error };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::not_applicable: return "not-applicable";
        case Verdict::error: return "error";
    }
    return "?";
}

struct SweepRow {
    double upsilon = 0.0;
    ThresholdReport report;
    std::optional<Regime> regime;            // absent when the jump assumption fails
    std::optional<EnsembleReport> ensemble;  // absent when nothing was simulated
    std::optional<VerdictRecord> verdict_detail;
    Verdict verdict = Verdict::not_applicable;
    std::string error_message;
};

// One row per imprecision level: thresholds, ensemble statistics, and the
// theory-vs-empirics verdict. Every row runs the same path streams (common
// random numbers across the grid), so a degenerate-interval sweep reproduces
// the same row at every level, and a failing row is recorded rather than
// aborting the sweep. Rows whose jump assumption fails skip simulation:
// there is no applicable theory to verify.
inline std::vector<SweepRow> sweep(const ImpreciseParams& params, const JumpMeasureSpec& jumps,
                                   const SimConfig& cfg, const std::vector<double>& upsilon_grid,
                                   int n_paths, const PathState& initial, int workers = 0,
                                   const VerifyOptions& opts = {}) {
    if (upsilon_grid.empty()) throw std::invalid_argument("sweep: upsilon grid must be nonempty");
    std::vector<SweepRow> rows;
    rows.reserve(upsilon_grid.size());
    for (std::size_t r = 0; r < upsilon_grid.size(); ++r) {
        SweepRow row;
        row.upsilon = upsilon_grid[r];
        try {
            row.report = build_threshold_report(params, row.upsilon, jumps);
            if (!row.report.h_holds) {
                row.verdict = Verdict::not_applicable;
                rows.push_back(std::move(row));
                continue;
            }
            row.regime = classify_regime(row.report);
            row.ensemble =
                run_ensemble(row.report.crisp, jumps, cfg, n_paths, initial, workers, opts);
            switch (*row.regime) {
                case Regime::extinct_a1:
                case Regime::extinct_a2:
                    row.verdict_detail =
                        verify_extinction(*row.ensemble, row.report, opts.se_margin);
                    row.verdict =
                        row.verdict_detail->pass ? Verdict::pass : Verdict::fail;
                    break;
                case Regime::persistent_l:
                    row.verdict_detail =
                        verify_persistence(*row.ensemble, row.report, opts.se_margin);
                    row.verdict =
                        row.verdict_detail->pass ? Verdict::pass : Verdict::fail;
                    break;
                case Regime::indeterminate:
                    row.verdict = Verdict::not_applicable;
                    break;
            }
        } catch (const std::exception& e) {
            row.verdict = Verdict::error;
            row.error_message = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace reactsim
