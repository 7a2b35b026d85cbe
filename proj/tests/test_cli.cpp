#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "reactsim/cli.hpp"
#include "reactsim/config.hpp"

using namespace reactsim;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

// strip the first column (upsilon) from a data row
std::string drop_first_column(const std::string& line) {
    const auto pos = line.find(',');
    return pos == std::string::npos ? std::string() : line.substr(pos + 1);
}

const char* k_minimal = R"({
  "params": {"k1": 1.0, "k2": 1.0, "k3": 2.0, "k4": 1.0, "p": 1.0, "sigma": 0.5, "x0": 1.0},
  "sim": {"dt": 0.001, "t_end": 2.0, "seed": 11},
  "upsilon": 0.5,
  "n_paths": 4,
  "initial": {"x": 0.4, "y": 0.4}
})";

}  // namespace

TEST_CASE("a minimal document with degenerate intervals parses to the crisp model") {
    const RunConfig cfg = parse_config(k_minimal);
    CHECK(cfg.params.k3 == IntervalNumber::degenerate(2.0));
    CHECK(cfg.params.sigma == IntervalNumber::degenerate(0.5));
    CHECK(cfg.jumps.empty());
    CHECK(cfg.sim.dt == 0.001);
    CHECK(cfg.sim.seed == 11);
    CHECK(cfg.sim.epsilon_floor == 1e-12);   // default
    CHECK(cfg.sim.record_stride == 100);     // default
    CHECK(cfg.upsilon == 0.5);
    CHECK(cfg.n_paths == 4);
    CHECK(cfg.verify.extinction_cutoff == 1e-4);
    CHECK(cfg.verify.se_margin == 3.0);

    const CrispParams crisp = realize(cfg.params, 0.7);
    CHECK(crisp.k3 == 2.0);  // degenerate: constant in upsilon
}

TEST_CASE("interval fields accept [lower, upper] pairs") {
    std::string doc = k_minimal;
    doc.replace(doc.find("\"k1\": 1.0"), 9, "\"k1\": [0.9, 1.1]");
    const RunConfig cfg = parse_config(doc);
    CHECK(cfg.params.k1 == IntervalNumber{0.9, 1.1});
}

TEST_CASE("invalid documents are rejected with the right error type") {
    CHECK_THROWS_AS(parse_config("{not json"), ParseError);
    CHECK_THROWS_AS(parse_config("[1,2,3]"), ParseError);

    std::string no_params = k_minimal;
    no_params.replace(no_params.find("params"), 6, "parms!");
    CHECK_THROWS_AS(parse_config(no_params), ParseError);

    // p must not dip below 1
    std::string bad_p = k_minimal;
    bad_p.replace(bad_p.find("\"p\": 1.0"), 8, "\"p\": [0.5, 2]");
    CHECK_THROWS_AS(parse_config(bad_p), ValidationError);

    // exactly one of upsilon / upsilon_grid
    std::string both = k_minimal;
    both.replace(both.find("\"upsilon\": 0.5"), 14,
                 "\"upsilon\": 0.5, \"upsilon_grid\": [0.1]");
    CHECK_THROWS_AS(parse_config(both), ValidationError);
    std::string neither = k_minimal;
    neither.replace(neither.find("\"upsilon\": 0.5,"), 15, "");
    CHECK_THROWS_AS(parse_config(neither), ValidationError);

    std::string empty_grid = k_minimal;
    empty_grid.replace(empty_grid.find("\"upsilon\": 0.5"), 14, "\"upsilon_grid\": []");
    CHECK_THROWS_AS(parse_config(empty_grid), ValidationError);

    // initial state outside the region at some grid point
    std::string outside = k_minimal;
    outside.replace(outside.find("\"x\": 0.4, \"y\": 0.4"), 18, "\"x\": 0.6, \"y\": 0.6");
    CHECK_THROWS_AS(parse_config(outside), ValidationError);

    // inverted interval endpoints
    std::string inverted = k_minimal;
    inverted.replace(inverted.find("\"k1\": 1.0"), 9, "\"k1\": [1.1, 0.9]");
    CHECK_THROWS_AS(parse_config(inverted), ValidationError);
}

TEST_CASE("canonical emission round-trips") {
    std::string doc = k_minimal;
    doc.replace(doc.find("\"k3\": 2.0"), 9, "\"k3\": [1.8, 2.2]");
    const RunConfig cfg = parse_config(doc);
    const std::string canonical = to_json(cfg).dump(2);
    const RunConfig again = parse_config(canonical);
    CHECK(to_json(again).dump(2) == canonical);
    CHECK(again.params.k3 == cfg.params.k3);
    CHECK(again.sim.seed == cfg.sim.seed);
}

TEST_CASE("threshold rows for a degenerate config are constant modulo upsilon") {
    std::string doc = k_minimal;
    doc.replace(doc.find("\"upsilon\": 0.5"), 14, "\"upsilon_grid\": [0.0, 0.5, 1.0]");
    const RunConfig cfg = parse_config(doc);

    std::ostringstream out;
    const int code = cmd_thresholds(cfg, out);
    CHECK(code == exit_ok);

    const std::vector<std::string> rows = lines_of(out.str());
    REQUIRE(rows.size() == 5);  // metadata, header, 3 rows
    CHECK(rows[0].starts_with("#"));
    CHECK(rows[1].starts_with("upsilon,k1,"));
    const std::string body = drop_first_column(rows[2]);
    CHECK(drop_first_column(rows[3]) == body);
    CHECK(drop_first_column(rows[4]) == body);
}

TEST_CASE("threshold rows carry the extinction bound for the high-noise set") {
    std::string doc = k_minimal;
    doc.replace(doc.find("\"sigma\": 0.5"), 12, "\"sigma\": 1.6");
    const RunConfig cfg = parse_config(doc);

    std::ostringstream out;
    CHECK(cmd_thresholds(cfg, out) == exit_ok);
    const std::vector<std::string> rows = lines_of(out.str());
    REQUIRE(rows.size() == 3);
    const std::vector<std::string> cells = split_csv(rows[2]);
    REQUIRE(cells.size() == 19);
    CHECK(cells[14] == "true");   // a1
    CHECK(cells[15] == "false");  // a2
    const ThresholdReport rep = build_threshold_report(cfg.params, 0.5, cfg.jumps);
    CHECK(cells[17] == csv::real(*rep.extinction_bound));
    CHECK(*rep.extinction_bound == doctest::Approx(-0.21875).epsilon(1e-12));
}

TEST_CASE("a jump-assumption violation exits 2 with bound columns empty") {
    std::string doc = k_minimal;
    doc.replace(doc.find("\"k1\": 1.0"), 9, "\"k1\": 2.0");  // state_bound = 2
    doc.replace(doc.find("\"sim\""), 5,
                "\"jumps\": {\"marks\": [{\"rate\": 1.0, \"gamma\": 0.6}]}, \"sim\"");
    const RunConfig cfg = parse_config(doc);

    std::ostringstream out;
    CHECK(cmd_thresholds(cfg, out) == exit_assumption_violated);
    const std::vector<std::string> rows = lines_of(out.str());
    REQUIRE(rows.size() == 3);
    const std::vector<std::string> cells = split_csv(rows[2]);
    REQUIRE(cells.size() == 19);
    CHECK(cells[10].empty());  // sigma_prime_sq
    CHECK(cells[13].empty());  // r1s
    CHECK(cells[14].empty());  // a1
    CHECK(cells[17].empty());  // extinction_bound
    CHECK(cells[18].empty());  // persistence_lower_bound
    CHECK(!cells[9].empty());  // delta still reports the offending value
}

TEST_CASE("simulate writes a deterministic stride-resolution trace") {
    std::string doc = k_minimal;
    doc.replace(doc.find("\"t_end\": 2.0"), 12, "\"t_end\": 0.55");
    doc.replace(doc.find("\"sim\": {"), 8, "\"sim\": {\"record_stride\": 100, ");
    const RunConfig cfg = parse_config(doc);

    std::ostringstream a, b;
    CHECK(cmd_simulate(cfg, a) == exit_ok);
    CHECK(cmd_simulate(cfg, b) == exit_ok);
    CHECK(a.str() == b.str());

    const std::vector<std::string> rows = lines_of(a.str());
    CHECK(rows[1] == "t,x,y,ln_y_over_t,avg_y,mart_diff_over_t,mart_jump_over_t");
    // final row lands exactly on t_end
    CHECK(split_csv(rows.back())[0] == "0.55000000000000004");

    // a grid config cannot be simulated
    std::string grid_doc = k_minimal;
    grid_doc.replace(grid_doc.find("\"upsilon\": 0.5"), 14, "\"upsilon_grid\": [0.0, 1.0]");
    std::ostringstream c;
    CHECK_THROWS_AS(cmd_simulate(parse_config(grid_doc), c), ValidationError);
}

TEST_CASE("verify emits one verdict row per level and aggregates exit codes") {
    SUBCASE("persistent set passes") {
        std::string doc = k_minimal;
        doc.replace(doc.find("\"t_end\": 2.0"), 12, "\"t_end\": 60.0");
        doc.replace(doc.find("\"n_paths\": 4"), 12, "\"n_paths\": 8");
        const RunConfig cfg = parse_config(doc);
        std::ostringstream out;
        const int code = cmd_verify(cfg, out, 4);
        const std::vector<std::string> rows = lines_of(out.str());
        REQUIRE(rows.size() == 3);
        const std::vector<std::string> cells = split_csv(rows[2]);
        REQUIRE(cells.size() == 27);
        CHECK(cells[25] == "persistent_L");
        CHECK(cells[26] == "pass");
        CHECK(code == exit_ok);
    }

    SUBCASE("an undersized persistence run fails with exit 3") {
        // starting the product species near zero drags the short-run average
        // far below the asymptotic floor
        std::string doc = k_minimal;
        doc.replace(doc.find("\"x\": 0.4, \"y\": 0.4"), 18, "\"x\": 0.4, \"y\": 0.01");
        const RunConfig cfg = parse_config(doc);
        std::ostringstream out;
        CHECK(cmd_verify(cfg, out, 2) == exit_verification_failed);
        const std::vector<std::string> rows = lines_of(out.str());
        CHECK(split_csv(rows[2])[26] == "fail");
    }

    SUBCASE("assumption violation dominates the exit code") {
        std::string doc = k_minimal;
        doc.replace(doc.find("\"k1\": 1.0"), 9, "\"k1\": 2.0");
        doc.replace(doc.find("\"sim\""), 5,
                    "\"jumps\": {\"marks\": [{\"rate\": 1.0, \"gamma\": 0.6}]}, \"sim\"");
        const RunConfig cfg = parse_config(doc);
        std::ostringstream out;
        CHECK(cmd_verify(cfg, out, 2) == exit_assumption_violated);
        const std::vector<std::string> rows = lines_of(out.str());
        const std::vector<std::string> cells = split_csv(rows[2]);
        CHECK(cells[25].empty());             // no regime
        CHECK(cells[26] == "not-applicable");  // no verdict
        CHECK(cells[19].empty());             // no ensemble columns
    }
}

TEST_CASE("verify output is byte-identical across runs and worker counts") {
    std::string doc = k_minimal;
    doc.replace(doc.find("\"t_end\": 2.0"), 12, "\"t_end\": 5.0");
    doc.replace(doc.find("\"n_paths\": 4"), 12, "\"n_paths\": 8");
    const RunConfig cfg = parse_config(doc);
    std::ostringstream one, eight, again;
    cmd_verify(cfg, one, 1);
    cmd_verify(cfg, eight, 8);
    cmd_verify(cfg, again, 1);
    CHECK(one.str() == eight.str());
    CHECK(one.str() == again.str());
}

TEST_CASE("a single-point sweep equals verify for that level") {
    std::string verify_doc = k_minimal;
    const RunConfig verify_cfg = parse_config(verify_doc);

    std::string sweep_doc = k_minimal;
    sweep_doc.replace(sweep_doc.find("\"upsilon\": 0.5"), 14, "\"upsilon_grid\": [0.5]");
    const RunConfig sweep_cfg = parse_config(sweep_doc);

    std::ostringstream v, s;
    CHECK(cmd_verify(verify_cfg, v, 2) == cmd_sweep(sweep_cfg, s, 2));
    CHECK(v.str() == s.str());

    // sweep refuses a single-upsilon config
    std::ostringstream unused;
    CHECK_THROWS_AS(cmd_sweep(verify_cfg, unused, 1), ValidationError);
}
