#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reactsim/jump_measure.hpp"
#include "reactsim/mc_analysis.hpp"
#include "reactsim/sde_engine.hpp"
#include "reactsim/thresholds.hpp"

namespace reactsim {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InitialState {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const InitialState&) const = default;
};

// Everything one run needs, parsed from a single JSON document.
struct RunConfig {
    ImpreciseParams params{IntervalNumber::degenerate(1.0), IntervalNumber::degenerate(1.0),
                           IntervalNumber::degenerate(1.0), IntervalNumber::degenerate(1.0),
                           IntervalNumber::degenerate(1.0), IntervalNumber::degenerate(1.0),
                           1.0};
    JumpMeasureSpec jumps;
    SimConfig sim;
    std::optional<double> upsilon;     // exactly one of upsilon / upsilon_grid
    std::vector<double> upsilon_grid;
    int n_paths = 200;
    InitialState initial{0.1, 0.1};
    std::string output_path;           // empty means stdout
    VerifyOptions verify;

    std::vector<double> grid() const {
        return upsilon.has_value() ? std::vector<double>{*upsilon} : upsilon_grid;
    }
};

namespace detail {

using nlohmann::json;

inline IntervalNumber parse_interval(const json& j, const std::string& name) {
    try {
        if (j.is_number()) {
            const double v = j.get<double>();
            return IntervalNumber::degenerate(v);
        }
        if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
            return IntervalNumber(j[0].get<double>(), j[1].get<double>());
        }
    } catch (const IntervalError& e) {
        throw ValidationError("field '" + name + "': " + e.what());
    }
    throw ParseError("field '" + name + "' must be a number or a [lower, upper] pair");
}

inline double require_number(const json& j, const std::string& name) {
    if (!j.contains(name) || !j[name].is_number()) {
        throw ParseError("missing or non-numeric field '" + name + "'");
    }
    return j[name].get<double>();
}

inline const json& require_object(const json& j, const std::string& name) {
    if (!j.contains(name) || !j[name].is_object()) {
        throw ParseError("missing or non-object field '" + name + "'");
    }
    return j[name];
}

}  // namespace detail

// Validation that needs the whole document: the initial state must sit
// strictly inside the invariant region at every grid point, and the
// positivity clamp must be far below the region ceiling.
inline void validate_run_config(const RunConfig& cfg) {
    if (cfg.upsilon.has_value() == !cfg.upsilon_grid.empty()) {
        throw ValidationError("exactly one of 'upsilon' and 'upsilon_grid' must be given");
    }
    const std::vector<double> grid = cfg.grid();
    if (grid.empty()) throw ValidationError("'upsilon_grid' must be nonempty");
    for (double u : grid) {
        if (!(u >= 0.0 && u <= 1.0)) {
            throw ValidationError("upsilon value " + std::to_string(u) + " outside [0, 1]");
        }
    }
    try {
        validate(cfg.params);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    if (cfg.n_paths < 1) throw ValidationError("'n_paths' must be >= 1");
    if (!(cfg.sim.dt > 0.0)) throw ValidationError("'sim.dt' must be > 0");
    if (!(cfg.sim.dt <= cfg.sim.t_end)) throw ValidationError("'sim.dt' must be <= 'sim.t_end'");
    if (cfg.sim.record_stride < 1) throw ValidationError("'sim.record_stride' must be >= 1");
    if (!(cfg.sim.epsilon_floor > 0.0)) throw ValidationError("'sim.epsilon_floor' must be > 0");
    if (!(cfg.initial.x > 0.0) || !(cfg.initial.y > 0.0)) {
        throw ValidationError("'initial' must be strictly positive");
    }
    if (!(cfg.verify.extinction_cutoff > 0.0)) {
        throw ValidationError("'extinction_cutoff' must be > 0");
    }
    if (!(cfg.verify.se_margin >= 0.0)) throw ValidationError("'se_margin' must be >= 0");
    for (double u : grid) {
        const CrispParams crisp = realize(cfg.params, u);
        const double bound = compute_state_bound(crisp);
        if (!(cfg.initial.x + cfg.initial.y < bound)) {
            throw ValidationError("initial state lies outside the invariant region at upsilon = " +
                                  std::to_string(u) + " (x + y must be < " +
                                  std::to_string(bound) + ")");
        }
        if (!(cfg.sim.epsilon_floor < 1e-3 * bound)) {
            throw ValidationError("'sim.epsilon_floor' must be < state_bound/1000 at upsilon = " +
                                  std::to_string(u));
        }
    }
}

inline RunConfig parse_config(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config root must be a JSON object");

    RunConfig cfg;
    const json& params = detail::require_object(doc, "params");
    auto iv = [&params](const char* name) {
        if (!params.contains(name)) {
            throw ParseError(std::string("missing field 'params.") + name + "'");
        }
        return detail::parse_interval(params[name], std::string("params.") + name);
    };
    cfg.params = ImpreciseParams{iv("k1"), iv("k2"), iv("k3"), iv("k4"), iv("p"), iv("sigma"),
                                 detail::require_number(params, "x0")};

    if (doc.contains("jumps")) {
        const json& jj = doc["jumps"];
        if (!jj.is_object()) throw ParseError("'jumps' must be an object");
        std::vector<JumpMark> marks;
        if (jj.contains("marks")) {
            if (!jj["marks"].is_array()) throw ParseError("'jumps.marks' must be an array");
            for (const json& m : jj["marks"]) {
                if (!m.is_object()) throw ParseError("'jumps.marks' entries must be objects");
                marks.push_back(
                    {detail::require_number(m, "rate"), detail::require_number(m, "gamma")});
            }
        }
        double z_bound;
        if (jj.contains("z_bound")) {
            z_bound = detail::require_number(jj, "z_bound");
        } else {
            // default: comfortably above the largest mark
            double max_size = 0.0;
            for (const JumpMark& m : marks) max_size = std::max(max_size, std::abs(m.size));
            z_bound = std::max(1.0, 2.0 * max_size);
        }
        try {
            cfg.jumps = JumpMeasureSpec(std::move(marks), z_bound);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("'jumps': ") + e.what());
        }
    }

    const json& sim = detail::require_object(doc, "sim");
    cfg.sim.dt = detail::require_number(sim, "dt");
    cfg.sim.t_end = detail::require_number(sim, "t_end");
    if (!sim.contains("seed") || !sim["seed"].is_number_unsigned()) {
        throw ParseError("missing or non-unsigned field 'sim.seed'");
    }
    cfg.sim.seed = sim["seed"].get<std::uint64_t>();
    if (sim.contains("epsilon_floor")) {
        cfg.sim.epsilon_floor = detail::require_number(sim, "epsilon_floor");
    }
    if (sim.contains("record_stride")) {
        if (!sim["record_stride"].is_number_integer()) {
            throw ParseError("'sim.record_stride' must be an integer");
        }
        cfg.sim.record_stride = sim["record_stride"].get<int>();
    }

    if (doc.contains("upsilon")) {
        if (!doc["upsilon"].is_number()) throw ParseError("'upsilon' must be a number");
        cfg.upsilon = doc["upsilon"].get<double>();
    }
    if (doc.contains("upsilon_grid")) {
        if (!doc["upsilon_grid"].is_array()) throw ParseError("'upsilon_grid' must be an array");
        for (const json& u : doc["upsilon_grid"]) {
            if (!u.is_number()) throw ParseError("'upsilon_grid' entries must be numbers");
            cfg.upsilon_grid.push_back(u.get<double>());
        }
    }

    if (doc.contains("n_paths")) {
        if (!doc["n_paths"].is_number_integer()) throw ParseError("'n_paths' must be an integer");
        cfg.n_paths = doc["n_paths"].get<int>();
    }

    const json& init = detail::require_object(doc, "initial");
    cfg.initial.x = detail::require_number(init, "x");
    cfg.initial.y = detail::require_number(init, "y");

    if (doc.contains("output")) {
        if (!doc["output"].is_string()) throw ParseError("'output' must be a string");
        cfg.output_path = doc["output"].get<std::string>();
    }
    if (doc.contains("extinction_cutoff")) {
        cfg.verify.extinction_cutoff = detail::require_number(doc, "extinction_cutoff");
    }
    if (doc.contains("se_margin")) {
        cfg.verify.se_margin = detail::require_number(doc, "se_margin");
    }

    validate_run_config(cfg);
    return cfg;
}

// Canonical re-emission: parse_config(to_json(cfg).dump()) reproduces cfg.
inline nlohmann::json to_json(const RunConfig& cfg) {
    using nlohmann::json;
    auto iv = [](const IntervalNumber& i) { return json::array({i.lower, i.upper}); };
    json doc;
    doc["params"] = {{"k1", iv(cfg.params.k1)}, {"k2", iv(cfg.params.k2)},
                     {"k3", iv(cfg.params.k3)}, {"k4", iv(cfg.params.k4)},
                     {"p", iv(cfg.params.p)},   {"sigma", iv(cfg.params.sigma)},
                     {"x0", cfg.params.x0}};
    json marks = json::array();
    for (const JumpMark& m : cfg.jumps.marks()) {
        marks.push_back({{"rate", m.rate}, {"gamma", m.size}});
    }
    doc["jumps"] = {{"marks", marks}, {"z_bound", cfg.jumps.z_bound()}};
    doc["sim"] = {{"dt", cfg.sim.dt},
                  {"t_end", cfg.sim.t_end},
                  {"seed", cfg.sim.seed},
                  {"epsilon_floor", cfg.sim.epsilon_floor},
                  {"record_stride", cfg.sim.record_stride}};
    if (cfg.upsilon.has_value()) {
        doc["upsilon"] = *cfg.upsilon;
    } else {
        doc["upsilon_grid"] = cfg.upsilon_grid;
    }
    doc["n_paths"] = cfg.n_paths;
    doc["initial"] = {{"x", cfg.initial.x}, {"y", cfg.initial.y}};
    if (!cfg.output_path.empty()) doc["output"] = cfg.output_path;
    doc["extinction_cutoff"] = cfg.verify.extinction_cutoff;
    doc["se_margin"] = cfg.verify.se_margin;
    return doc;
}

}  // namespace reactsim
