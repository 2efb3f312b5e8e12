#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdq/gates_single.hpp"
#include "sdq/traps.hpp"
#include "sdq/units.hpp"

namespace sdq::harness {

enum class Experiment { fig1_sweep, fig2_fidelity_map, fig3_entangler, fig4_optimize, custom };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);  // also accepts fig1..fig4

/// Everything is dimensionless here (hbar = m = omega_x = 1); the file format
/// carries explicit units and is converted once on load.
struct ExperimentConfig {
    Experiment experiment = Experiment::fig1_sweep;
    UnitSystem units{2e5, 2e5, 1.1e6};
    TrapShape shape = TrapShape::harmonic();

    double a_max = 5.0;
    double a_min = 1.8;
    double t_r = 40.0;
    double t_i = 0.0;

    std::vector<double> t_r_grid;
    std::vector<double> t_i_grid;

    double a_t = 0.0;  // m
    int flops = 1;     // n of the n 2pi collision pulse

    Numerics numerics = Numerics::one_dimensional();

    // trajectory optimization
    std::size_t knots = 8;
    std::size_t budget = 300;
    std::size_t objective_states = 2;

    // population time series
    double series_dt = 0.01;
    std::size_t sample_every = 10;

    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string output = "out";

    void validate() const;
};

/// Built-in parameters of each figure experiment.
ExperimentConfig default_config(Experiment e);

ExperimentConfig config_from_json(const nlohmann::json& j);
/// Canonical form: dimensionless units, every field present.
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Canonical defaults of the named experiment with `partial` laid over them.
nlohmann::json with_defaults(const nlohmann::json& partial);

/// Starts from the experiment's defaults and applies the file on top.
ExperimentConfig load_config(const std::string& path);

/// key=value, key a dotted path into the JSON form. A bare number keeps the
/// unit already present at that key; "60 nm" style strings carry their own.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Parses "1.5 nm", "40", "2e5 s^-1" into {"value", "unit"}.
nlohmann::json parse_quantity(const std::string& text);

}  // namespace sdq::harness
