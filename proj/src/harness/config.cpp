#include "sdq/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sdq/errors.hpp"

namespace sdq::harness {

using nlohmann::json;

namespace {

enum class Dim { length, time, frequency, energy, mass };

const char* dim_name(Dim d) {
    switch (d) {
        case Dim::length: return "length";
        case Dim::time: return "time";
        case Dim::frequency: return "frequency";
        case Dim::energy: return "energy";
        case Dim::mass: return "mass";
    }
    return "?";
}

// Dimensionless value in oscillator units. Frequencies of the unit system
// itself pass `units == nullptr` and come back in s^-1; masses in kg.
double to_internal(double value, const std::string& unit, Dim dim, const UnitSystem* units, const std::string& field) {
    auto need = [&]() -> const UnitSystem& {
        if (!units) throw ValidationError(field, "unit '" + unit + "' needs the unit system");
        return *units;
    };
    switch (dim) {
        case Dim::length:
            if (unit == "alpha_inv") return value;
            if (unit == "m") return need().length_from_si(value);
            if (unit == "nm") return need().length_from_si(value * 1e-9);
            if (unit == "um") return need().length_from_si(value * 1e-6);
            if (unit == "a0") return need().length_from_si(value * constants::bohr_radius);
            break;
        case Dim::time:
            if (unit == "omega_x^-1") return value;
            if (unit == "s") return need().time_from_si(value);
            if (unit == "ms") return need().time_from_si(value * 1e-3);
            if (unit == "us") return need().time_from_si(value * 1e-6);
            break;
        case Dim::frequency:
            if (!units) {
                if (unit == "s^-1") return value;
                break;
            }
            if (unit == "omega_x") return value;
            if (unit == "s^-1") return value / units->omega_x();
            break;
        case Dim::energy:
            if (unit == "hbar_omega_x") return value;
            if (unit == "J") return need().energy_from_si(value);
            break;
        case Dim::mass:
            if (unit == "kg") return value;
            if (unit == "u") return value * constants::atomic_mass_unit;
            break;
    }
    throw ValidationError(field, "unit '" + unit + "' is not a " + std::string(dim_name(dim)) + " unit");
}

json quantity(double value, const char* unit) { return json{{"value", value}, {"unit", unit}}; }

double read_quantity(const json& j, const std::string& field, Dim dim, const UnitSystem* units) {
    json q = j;
    if (q.is_string()) q = parse_quantity(q.get<std::string>());
    if (q.is_number()) throw ValidationError(field, "physical quantities need an explicit unit");
    if (!q.is_object() || !q.contains("value") || !q.contains("unit"))
        throw ValidationError(field, "expected {\"value\": number, \"unit\": string}");
    if (!q["value"].is_number()) throw ValidationError(field, "value must be a number");
    if (!q["unit"].is_string()) throw ValidationError(field, "unit must be a string");
    const double v = to_internal(q["value"].get<double>(), q["unit"].get<std::string>(), dim, units, field);
    if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
    return v;
}

std::vector<double> read_grid(const json& j, const std::string& field, const UnitSystem& units) {
    if (!j.is_object() || !j.contains("unit")) throw ValidationError(field, "grid needs a unit");
    const std::string unit = j["unit"].get<std::string>();
    std::vector<double> raw;
    if (j.contains("values")) {
        if (!j["values"].is_array()) throw ValidationError(field, "values must be a list");
        for (const auto& v : j["values"]) {
            if (!v.is_number()) throw ValidationError(field, "values must be numbers");
            raw.push_back(v.get<double>());
        }
    } else if (j.contains("linspace") || j.contains("geomspace")) {
        const bool geo = j.contains("geomspace");
        const auto& spec = geo ? j["geomspace"] : j["linspace"];
        const double a = spec.at("start").get<double>(), b = spec.at("stop").get<double>();
        const auto count = spec.at("count").get<long>();
        if (count < 0) throw ValidationError(field, "count must be >= 0");
        if (geo && !(a > 0.0 && b > 0.0)) throw ValidationError(field, "geomspace needs positive endpoints");
        for (long k = 0; k < count; ++k) {
            const double s = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
            raw.push_back(geo ? a * std::pow(b / a, s) : a + (b - a) * s);
        }
    } else {
        throw ValidationError(field, "grid needs values, linspace or geomspace");
    }
    std::vector<double> out;
    out.reserve(raw.size());
    for (double v : raw) out.push_back(to_internal(v, unit, Dim::time, &units, field));
    return out;
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

template <class T>
void read_count(const json& parent, const char* key, const std::string& field, T& out) {
    if (const json* v = find(parent, key)) {
        if (!v->is_number_integer() && !v->is_number_unsigned()) throw ValidationError(field, "must be an integer");
        const auto x = v->get<long long>();
        if (x < 0) throw ValidationError(field, "must be >= 0");
        out = static_cast<T>(x);
    }
}

std::string unit_of(const json& j) {
    if (j.is_object() && j.contains("unit") && j["unit"].is_string()) return j["unit"].get<std::string>();
    return {};
}

}  // namespace

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::fig1_sweep: return "fig1_sweep";
        case Experiment::fig2_fidelity_map: return "fig2_fidelity_map";
        case Experiment::fig3_entangler: return "fig3_entangler";
        case Experiment::fig4_optimize: return "fig4_optimize";
        case Experiment::custom: return "custom";
    }
    return "?";
}

Experiment experiment_from_string(const std::string& name) {
    for (auto e : {Experiment::fig1_sweep, Experiment::fig2_fidelity_map, Experiment::fig3_entangler,
                   Experiment::fig4_optimize, Experiment::custom})
        if (name == to_string(e)) return e;
    if (name == "fig1") return Experiment::fig1_sweep;
    if (name == "fig2") return Experiment::fig2_fidelity_map;
    if (name == "fig3") return Experiment::fig3_entangler;
    if (name == "fig4") return Experiment::fig4_optimize;
    throw ValidationError("experiment", "unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
    shape.validate();
    numerics.validate();
    if (!(a_max > 0.0)) throw ValidationError("trajectory.a_max", "must be > 0");
    if (!(a_min >= 0.0) || a_min > a_max) throw ValidationError("trajectory.a_min", "must lie in [0, a_max]");
    if (!(t_r > 0.0)) throw ValidationError("trajectory.t_r", "must be > 0");
    if (!(t_i >= 0.0)) throw ValidationError("trajectory.t_i", "must be >= 0");
    if (!(a_t >= 0.0)) throw ValidationError("interaction.a_t", "must be >= 0");
    if (flops < 1) throw ValidationError("interaction.flops", "must be >= 1");
    if (!(series_dt > 0.0)) throw ValidationError("series.dt", "must be > 0");
    if (sample_every == 0) throw ValidationError("series.sample_every", "must be >= 1");

    auto check_grid = [](const std::vector<double>& g, const char* field, bool positive) {
        if (g.empty()) throw ValidationError(field, "grid must not be empty");
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!std::isfinite(g[k]) || (positive ? !(g[k] > 0.0) : !(g[k] >= 0.0)))
                throw ValidationError(field, positive ? "entries must be > 0" : "entries must be >= 0");
            if (k > 0 && g[k] < g[k - 1]) throw ValidationError(field, "must be non-decreasing");
        }
    };
    switch (experiment) {
        case Experiment::fig1_sweep:
        case Experiment::fig2_fidelity_map:
            check_grid(t_r_grid, "sweep.t_r", true);
            check_grid(t_i_grid, "sweep.t_i", false);
            break;
        case Experiment::fig4_optimize:
            check_grid(t_i_grid, "sweep.t_i", false);
            if (knots < 3) throw ValidationError("optimizer.knots", "must be >= 3");
            if (budget < 1) throw ValidationError("optimizer.budget", "must be >= 1");
            if (objective_states < 1) throw ValidationError("optimizer.objective_states", "must be >= 1");
            break;
        default: break;
    }
    if (output.empty()) throw ValidationError("output", "must not be empty");
}

ExperimentConfig default_config(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    c.a_t = 106.0 * constants::bohr_radius;
    switch (e) {
        case Experiment::fig1_sweep:
            for (int k = 0; k < 16; ++k) c.t_r_grid.push_back(4.0 * std::pow(16.0, k / 15.0));
            for (int k = 0; k < 16; ++k) c.t_i_grid.push_back(10.0 * k);
            break;
        case Experiment::fig2_fidelity_map:
            c.numerics = Numerics::two_dimensional();
            c.t_r_grid = {10.0, 15.0, 20.0, 25.0};
            for (int k = 0; k <= 40; ++k) c.t_i_grid.push_back(50.0 + k);
            break;
        case Experiment::fig3_entangler:
            c.a_min = 1.9;
            c.t_r = 80.0;
            c.t_i = 58.0;
            break;
        case Experiment::fig4_optimize:
            c.units = UnitSystem(6e5, 6e5, 1.1e6);
            c.shape = TrapShape::gaussian(200.0);
            c.a_max = 70.0;
            c.a_min = 14.35;
            c.t_r = 1100.0;
            c.numerics = {512, 0.05};
            for (int k = 0; k <= 40; ++k) c.t_i_grid.push_back(9.0 * k);
            break;
        case Experiment::custom: break;
    }
    return c;
}

json parse_quantity(const std::string& text) {
    std::istringstream in(text);
    double v;
    if (!(in >> v)) throw ValidationError("quantity", "cannot parse '" + text + "'");
    std::string unit;
    in >> unit;
    std::string rest;
    if (in >> rest) throw ValidationError("quantity", "trailing text in '" + text + "'");
    if (unit.empty()) return v;
    return json{{"value", v}, {"unit", unit}};
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config", "must be a JSON object");
    const std::string name = j.contains("experiment") ? j["experiment"].get<std::string>() : "fig1_sweep";
    ExperimentConfig c = default_config(experiment_from_string(name));

    try {
        if (const json* u = find(j, "units")) {
            double wx = c.units.omega_x(), wy = c.units.omega_y(), wz = c.units.omega_z(), m = c.units.mass();
            if (const json* q = find(*u, "omega_x")) wx = read_quantity(*q, "units.omega_x", Dim::frequency, nullptr);
            if (const json* q = find(*u, "omega_y")) wy = read_quantity(*q, "units.omega_y", Dim::frequency, nullptr);
            if (const json* q = find(*u, "omega_z")) wz = read_quantity(*q, "units.omega_z", Dim::frequency, nullptr);
            if (const json* q = find(*u, "mass")) m = read_quantity(*q, "units.mass", Dim::mass, nullptr);
            c.units = UnitSystem(wx, wy, wz, m);
        }
        const UnitSystem* us = &c.units;

        if (const json* s = find(j, "shape")) {
            if (const json* k = find(*s, "kind")) {
                const auto kind = k->get<std::string>();
                if (kind == "harmonic") c.shape.kind = TrapKind::piecewise_harmonic;
                else if (kind == "gaussian") c.shape.kind = TrapKind::gaussian;
                else throw ValidationError("shape.kind", "expected harmonic or gaussian");
            }
            if (const json* q = find(*s, "omega")) c.shape.omega = read_quantity(*q, "shape.omega", Dim::frequency, us);
            if (const json* q = find(*s, "v0")) c.shape.v0 = read_quantity(*q, "shape.v0", Dim::energy, us);
            if (c.shape.kind == TrapKind::piecewise_harmonic) c.shape.v0 = 0.0;
        }
        if (const json* t = find(j, "trajectory")) {
            if (const json* q = find(*t, "a_max")) c.a_max = read_quantity(*q, "trajectory.a_max", Dim::length, us);
            if (const json* q = find(*t, "a_min")) c.a_min = read_quantity(*q, "trajectory.a_min", Dim::length, us);
            if (const json* q = find(*t, "t_r")) c.t_r = read_quantity(*q, "trajectory.t_r", Dim::time, us);
            if (const json* q = find(*t, "t_i")) c.t_i = read_quantity(*q, "trajectory.t_i", Dim::time, us);
        }
        if (const json* s = find(j, "sweep")) {
            if (const json* g = find(*s, "t_r")) c.t_r_grid = read_grid(*g, "sweep.t_r", *us);
            if (const json* g = find(*s, "t_i")) c.t_i_grid = read_grid(*g, "sweep.t_i", *us);
        }
        if (const json* i = find(j, "interaction")) {
            // kept in metres; lossless when given in metres
            if (const json* q = find(*i, "a_t")) {
                if (unit_of(*q) == "m" && q->at("value").is_number()) c.a_t = q->at("value").get<double>();
                else c.a_t = us->length_to_si(read_quantity(*q, "interaction.a_t", Dim::length, us));
            }
            if (const json* f = find(*i, "flops")) {
                if (!f->is_number_integer()) throw ValidationError("interaction.flops", "must be an integer");
                c.flops = f->get<int>();
            }
        }
        if (const json* n = find(j, "numerics")) {
            read_count(*n, "n", "numerics.n", c.numerics.n);
            if (const json* q = find(*n, "dt")) c.numerics.dt = read_quantity(*q, "numerics.dt", Dim::time, us);
        }
        if (const json* o = find(j, "optimizer")) {
            read_count(*o, "knots", "optimizer.knots", c.knots);
            read_count(*o, "budget", "optimizer.budget", c.budget);
            read_count(*o, "objective_states", "optimizer.objective_states", c.objective_states);
        }
        if (const json* s = find(j, "series")) {
            if (const json* q = find(*s, "dt")) c.series_dt = read_quantity(*q, "series.dt", Dim::time, us);
            read_count(*s, "sample_every", "series.sample_every", c.sample_every);
        }
        read_count(j, "seed", "seed", c.seed);
        read_count(j, "threads", "threads", c.threads);
        if (const json* o = find(j, "output")) c.output = o->get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError("config", e.what());
    }
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    auto grid = [](const std::vector<double>& g) { return json{{"values", g}, {"unit", "omega_x^-1"}}; };
    json j;
    j["experiment"] = to_string(c.experiment);
    j["units"] = {{"omega_x", quantity(c.units.omega_x(), "s^-1")},
                  {"omega_y", quantity(c.units.omega_y(), "s^-1")},
                  {"omega_z", quantity(c.units.omega_z(), "s^-1")},
                  {"mass", quantity(c.units.mass(), "kg")}};
    j["shape"] = {{"kind", c.shape.kind == TrapKind::gaussian ? "gaussian" : "harmonic"},
                  {"omega", quantity(c.shape.omega, "omega_x")},
                  {"v0", quantity(c.shape.v0, "hbar_omega_x")}};
    j["trajectory"] = {{"a_max", quantity(c.a_max, "alpha_inv")},
                       {"a_min", quantity(c.a_min, "alpha_inv")},
                       {"t_r", quantity(c.t_r, "omega_x^-1")},
                       {"t_i", quantity(c.t_i, "omega_x^-1")}};
    j["sweep"] = {{"t_r", grid(c.t_r_grid)}, {"t_i", grid(c.t_i_grid)}};
    j["interaction"] = {{"a_t", quantity(c.a_t, "m")}, {"flops", c.flops}};
    j["numerics"] = {{"n", c.numerics.n}, {"dt", quantity(c.numerics.dt, "omega_x^-1")}};
    j["optimizer"] = {{"knots", c.knots}, {"budget", c.budget}, {"objective_states", c.objective_states}};
    j["series"] = {{"dt", quantity(c.series_dt, "omega_x^-1")}, {"sample_every", c.sample_every}};
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["output"] = c.output;
    return j;
}

json with_defaults(const json& partial) {
    if (!partial.is_object()) throw ValidationError("config", "must be a JSON object");
    const std::string name = partial.contains("experiment") ? partial["experiment"].get<std::string>() : "fig1_sweep";
    json base = config_to_json(default_config(experiment_from_string(name)));
    // objects merge key by key; a quantity or grid (anything with a unit) is replaced whole
    auto overlay = [](auto& self, json& dst, const json& src) -> void {
        for (auto it = src.begin(); it != src.end(); ++it) {
            auto& d = dst[it.key()];
            if (it->is_object() && d.is_object() && !it->contains("unit") && !d.contains("unit")) self(self, d, *it);
            else d = *it;
        }
    };
    overlay(overlay, base, partial);
    return base;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(with_defaults(j));
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override", "expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError("override", "empty path component in '" + key + "'");
        if (!node->is_object()) throw ValidationError(key, "is not an object");
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }

    // JSON literal first (lists, objects, strings in quotes), then quantities.
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        try {
            value = parse_quantity(text);
        } catch (const ValidationError&) {
            value = text;
        }
    }
    if (value.is_number() && node->is_object()) {
        if (node->contains("value")) {
            (*node)["value"] = value;
            return;
        }
        if (node->contains("values")) throw ValidationError(key, "grids take a list");
    }
    if (value.is_array() && node->is_object() && node->contains("unit")) {
        const json unit = (*node)["unit"];
        *node = json{{"values", value}, {"unit", unit}};
        return;
    }
    *node = value;
}

}  // namespace sdq::harness
