#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdq/errors.hpp"
#include "sdq/harness/config.hpp"
#include "sdq/harness/run.hpp"

using namespace sdq;
using namespace sdq::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("sdq_test_harness_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_data_line(const std::string& csv) {
    std::istringstream in(csv_payload(csv));
    std::string line;
    std::getline(in, line);
    return line;
}

// Small fig1 in oscillator units.
json tiny_fig1() {
    return json::parse(R"({
        "experiment": "fig1_sweep",
        "trajectory": {"a_max": {"value": 5, "unit": "alpha_inv"}, "a_min": {"value": 1.8, "unit": "alpha_inv"}},
        "sweep": {"t_r": {"values": [4, 6], "unit": "omega_x^-1"}, "t_i": {"values": [0, 5], "unit": "omega_x^-1"}},
        "numerics": {"n": 128, "dt": {"value": 0.01, "unit": "omega_x^-1"}},
        "threads": 1
    })");
}

}  // namespace

TEST_CASE("config round trip is lossless") {
    for (auto e : {Experiment::fig1_sweep, Experiment::fig2_fidelity_map, Experiment::fig3_entangler,
                   Experiment::fig4_optimize, Experiment::custom}) {
        const auto c = default_config(e);
        const auto j = config_to_json(c);
        const auto back = config_from_json(j);
        CHECK(config_to_json(back) == j);
        CHECK(back.a_t == c.a_t);
        CHECK(back.units == c.units);
        CHECK(back.t_r_grid == c.t_r_grid);
        CHECK(config_from_json(json::parse(j.dump())).numerics.dt == c.numerics.dt);
    }
}

TEST_CASE("figure experiment defaults") {
    const auto f1 = default_config(Experiment::fig1_sweep);
    CHECK(f1.a_max == 5.0);
    CHECK(f1.a_min == 1.8);
    CHECK(f1.t_r_grid.size() == 16);
    CHECK(f1.t_i_grid.size() == 16);
    const auto f3 = default_config(Experiment::fig3_entangler);
    CHECK(f3.a_min == 1.9);
    CHECK(f3.t_r == 80.0);
    CHECK(f3.t_i == 58.0);
    CHECK(f3.a_t == doctest::Approx(106.0 * constants::bohr_radius));
    const auto f4 = default_config(Experiment::fig4_optimize);
    CHECK(f4.shape.kind == TrapKind::gaussian);
    CHECK(f4.shape.v0 == 200.0);
    CHECK(f4.a_max == 70.0);
    CHECK(f4.a_min == 14.35);
    CHECK(f4.units.omega_x() == 6e5);
    CHECK(f4.knots == 8);
}

TEST_CASE("every physical input needs a unit of the right kind") {
    auto j = tiny_fig1();
    j["trajectory"]["a_min"] = 1.8;
    REQUIRE_THROWS_AS(config_from_json(j), ValidationError);
    try {
        config_from_json(j);
    } catch (const ValidationError& e) {
        CHECK(e.field() == "trajectory.a_min");
    }
    j = tiny_fig1();
    j["trajectory"]["t_r"] = {{"value", 3}, {"unit", "nm"}};
    CHECK_THROWS_AS(config_from_json(j), ValidationError);
    j = tiny_fig1();
    j["units"] = {{"omega_x", {{"value", 2e5}, {"unit", "omega_x"}}}};
    CHECK_THROWS_AS(config_from_json(j), ValidationError);
    j = tiny_fig1();
    j["trajectory"]["a_min"] = "1.5 alpha_inv";
    CHECK(config_from_json(j).a_min == 1.5);
    CHECK(parse_quantity("2e5 s^-1") == json{{"value", 2e5}, {"unit", "s^-1"}});
    CHECK_THROWS_AS(parse_quantity("nm 3"), ValidationError);
}

TEST_CASE("SI and oscillator units give the same numbers") {
    const UnitSystem u(2e5, 2e5, 1.1e6);
    const double nm = u.alpha_inv() * 1e9;  // one alpha^-1 in nm
    const double us = 1e6 / u.omega_x();    // one 1/omega_x in us
    json si = tiny_fig1();
    si["units"] = {{"omega_x", {{"value", 2e5}, {"unit", "s^-1"}}},
                   {"omega_y", {{"value", 2e5}, {"unit", "s^-1"}}},
                   {"omega_z", {{"value", 1.1e6}, {"unit", "s^-1"}}},
                   {"mass", {{"value", 86.909180527}, {"unit", "u"}}}};
    si["trajectory"]["a_max"] = {{"value", 5 * nm}, {"unit", "nm"}};
    si["trajectory"]["a_min"] = {{"value", 1.8 * nm * 1e-3}, {"unit", "um"}};
    si["sweep"]["t_r"] = {{"values", {4 * us * 1e-3, 6 * us * 1e-3}}, {"unit", "ms"}};
    si["sweep"]["t_i"] = {{"values", {0.0, 5 * us * 1e-6}}, {"unit", "s"}};
    si["numerics"]["dt"] = {{"value", 0.01 * us}, {"unit", "us"}};

    const auto a = run_pipeline(config_from_json(tiny_fig1()));
    const auto b = run_pipeline(config_from_json(si));
    REQUIRE(a.tables.size() == 1);
    REQUIRE(a.tables[0].rows.size() == b.tables[0].rows.size());
    for (std::size_t r = 0; r < a.tables[0].rows.size(); ++r)
        for (std::size_t k = 0; k < a.tables[0].rows[r].size(); ++k)
            CHECK(std::abs(a.tables[0].rows[r][k] - b.tables[0].rows[r][k]) < 1e-12);
}

TEST_CASE("overrides keep the unit at their key") {
    auto j = with_defaults(json{{"experiment", "fig1"}});
    apply_override(j, "trajectory.a_min=2.0");
    CHECK(j["trajectory"]["a_min"] == json{{"value", 2.0}, {"unit", "alpha_inv"}});
    apply_override(j, "trajectory.t_r=9 us");
    CHECK(j["trajectory"]["t_r"]["unit"] == "us");
    apply_override(j, "sweep.t_i=[0, 10]");
    CHECK(j["sweep"]["t_i"] == json{{"values", {0, 10}}, {"unit", "omega_x^-1"}});
    apply_override(j, "numerics.n=256");
    const auto c = config_from_json(j);
    CHECK(c.a_min == 2.0);
    CHECK(c.numerics.n == 256);
    CHECK(c.t_r == doctest::Approx(9e-6 * 2e5));
    CHECK_THROWS_AS(apply_override(j, "novalue"), ValidationError);
    CHECK_THROWS_AS(apply_override(j, "=3"), ValidationError);
    CHECK_THROWS_AS(apply_override(j, "sweep.t_r=4"), ValidationError);
}

TEST_CASE("partial files are laid over the experiment defaults") {
    const auto j = with_defaults(json::parse(R"({"experiment": "fig3",
        "sweep": {"t_i": {"linspace": {"start": 0, "stop": 10, "count": 3}, "unit": "omega_x^-1"}}})"));
    const auto c = config_from_json(j);
    CHECK(c.t_i_grid == std::vector<double>{0.0, 5.0, 10.0});
    CHECK(c.a_min == 1.9);
}

TEST_CASE("empty sweep grids are rejected before anything is written") {
    auto j = tiny_fig1();
    const auto dir = scratch("empty");
    j["output"] = dir.string();
    j["sweep"]["t_i"]["values"] = json::array();
    CHECK_THROWS_AS(config_from_json(j), ValidationError);

    auto c = config_from_json(tiny_fig1());
    c.output = dir.string();
    c.t_r_grid.clear();
    CHECK_THROWS_AS(run_experiment(c), ValidationError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("fig1 files, manifest and reproducibility") {
    auto c = config_from_json(tiny_fig1());
    const auto d1 = scratch("fig1_a"), d2 = scratch("fig1_b");
    c.output = d1.string();
    const auto m1 = run_experiment(c);
    c.output = d2.string();
    const auto m2 = run_experiment(c);

    const auto csv = slurp(d1 / "fig1.csv");
    CHECK(csv.rfind("# ", 0) == 0);
    CHECK(first_data_line(csv) == "t_r,t_i,rho0,rho1,leakage");
    CHECK(csv.find("# config: ") != std::string::npos);
    CHECK(csv_payload(csv) == csv_payload(slurp(d2 / "fig1.csv")));
    CHECK(m1.config_sha256 == m2.config_sha256);
    CHECK(m1.config_sha256 == config_hash(c));

    REQUIRE(m1.outputs.size() == 1);
    CHECK(m1.outputs[0].rows == 4);
    CHECK(m1.outputs[0].sha256 == sha256_file(d1 / "fig1.csv"));
    CHECK_FALSE(m1.partial);
    const auto manifest = json::parse(slurp(d1 / "manifest.json"));
    CHECK(manifest["outputs"][0]["path"] == "fig1.csv");
    CHECK(manifest["version"] == code_version());
    CHECK(manifest["diagnostics"]["norm_drift"].get<double>() < 1e-9);
}

TEST_CASE("sha256 of known inputs") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv values keep full precision") {
    const Table t{"x", {"a", "b"}, {{0.1, 1.0 / 3.0}}};
    const auto csv = render_csv(t, default_config(Experiment::custom), "now");
    CHECK(csv_payload(csv) == "a,b\n0.10000000000000001,0.33333333333333331\n");
    const Table bad{"x", {"a", "b"}, {{1.0}}};
    CHECK_THROWS_AS(render_csv(bad, default_config(Experiment::custom), "now"), Error);
}

TEST_CASE("fig2 and fig3 schemas") {
    auto f3 = default_config(Experiment::fig3_entangler);
    f3.sample_every = 100;
    const auto out3 = run_pipeline(f3);
    REQUIRE(out3.tables.size() == 1);
    CHECK(out3.tables[0].columns ==
          std::vector<std::string>{"t", "rho00", "rho01", "rho10", "rho11", "rho_dq", "rho_dt", "bell_fidelity"});
    CHECK(out3.tables[0].rows.front()[2] == 1.0);
    CHECK(out3.tables[0].rows.back()[0] == doctest::Approx(218.0));

    auto f2 = default_config(Experiment::fig2_fidelity_map);
    f2.numerics = {64, 2e-2};
    f2.t_r_grid = {6.0};
    f2.t_i_grid = {0.0, 1.0, 2.0};
    const auto out2 = run_pipeline(f2);
    CHECK(out2.tables[0].columns == std::vector<std::string>{"t_r", "t_i", "rho", "phi_c", "fidelity"});
    CHECK(out2.tables[0].rows.size() == 3);
    CHECK(out2.diagnostics.contains("single_atom_returns"));
}

TEST_CASE("fig4 writes trajectory, Rabi curve and optimizer record") {
    auto c = default_config(Experiment::fig4_optimize);
    c.shape = TrapShape::harmonic();
    c.a_max = 5.0;
    c.a_min = 1.8;
    c.t_r = 20.0;
    c.knots = 3;
    c.budget = 2;
    c.numerics = {128, 1e-2};
    c.t_i_grid = {0.0, 10.0};
    const auto dir = scratch("fig4");
    c.output = dir.string();
    const auto m = run_experiment(c);
    REQUIRE(m.outputs.size() == 3);
    CHECK(first_data_line(slurp(dir / "fig4_trajectory.csv")) == "t,a");
    CHECK(first_data_line(slurp(dir / "fig4_rabi.csv")) == "t_i,rho1");
    const auto opt = json::parse(slurp(dir / "fig4_optimization.json"));
    CHECK(opt["knots"].size() == 3);
    CHECK(opt["history"].front() == opt["baseline_infidelity"]);
    CHECK(opt["infidelity"].get<double>() <= opt["baseline_infidelity"].get<double>());
}

TEST_CASE("custom traces a single cycle") {
    auto c = default_config(Experiment::custom);
    c.numerics = {128, 1e-2};
    c.t_r = 10.0;
    c.sample_every = 50;
    const auto out = run_pipeline(c);
    const auto& rows = out.tables[0].rows;
    CHECK(rows.front()[1] == 5.0);
    CHECK(rows.front()[2] == doctest::Approx(1.0));
    CHECK(rows.back()[0] == doctest::Approx(20.0));
    CHECK(rows[rows.size() / 2][1] == doctest::Approx(1.8).epsilon(1e-2));
}

TEST_CASE("unknown experiments and malformed files") {
    CHECK_THROWS_AS(experiment_from_string("fig5"), ValidationError);
    CHECK(experiment_from_string("fig2") == Experiment::fig2_fidelity_map);
    const auto p = scratch("bad.json");
    std::ofstream(p) << "{not json";
    CHECK_THROWS_AS(load_config(p.string()), ValidationError);
    CHECK_THROWS_AS(load_config((fs::temp_directory_path() / "sdq_missing.json").string()), ValidationError);
}
