#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "sdq/errors.hpp"
#include "sdq/harness/acceptance.hpp"
#include "sdq/harness/config.hpp"
#include "sdq/harness/run.hpp"

using namespace sdq;
using namespace sdq::harness;
using nlohmann::json;

namespace {

enum Exit { ok = 0, validation = 2, pipeline = 3, verification = 4 };

struct RunArgs {
    std::string config_path;
    std::string experiment;
    std::vector<std::string> overrides;
    std::string output;
    int threads = -1;
    bool print_config = false;
};

ExperimentConfig resolve(const RunArgs& a) {
    json j;
    if (!a.config_path.empty()) {
        std::ifstream in(a.config_path);
        if (!in) throw ValidationError("config", "cannot open '" + a.config_path + "'");
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ValidationError("config", std::string("malformed JSON: ") + e.what());
        }
        if (!a.experiment.empty()) j["experiment"] = to_string(experiment_from_string(a.experiment));
    } else {
        j = json{{"experiment", to_string(experiment_from_string(a.experiment.empty() ? "fig1" : a.experiment))}};
    }
    j = with_defaults(j);
    for (const auto& o : a.overrides) apply_override(j, o);
    if (!a.output.empty()) j["output"] = a.output;
    if (a.threads >= 0) j["threads"] = a.threads;
    return config_from_json(j);
}

int do_run(const RunArgs& a) {
    ExperimentConfig c;
    try {
        c = resolve(a);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return validation;
    }
    if (a.print_config) {
        std::cout << config_to_json(c).dump(2) << "\n";
        return ok;
    }
    try {
        const auto m = run_experiment(c);
        std::cout << m.to_json().dump(2) << "\n";
        if (m.partial) std::cerr << m.errors.size() << " cell(s) failed; outputs are partial\n";
        return m.partial ? pipeline : ok;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return validation;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return pipeline;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"double-well quantum gate simulations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", code_version());

    RunArgs run_args;
    auto add_run_options = [&](CLI::App* sub, bool with_config) {
        if (with_config) sub->add_option("config", run_args.config_path, "experiment config (JSON)");
        sub->add_option("--experiment,-e", run_args.experiment, "fig1..fig4, custom, or a full experiment name");
        sub->add_option("--override,-s", run_args.overrides, "key=value on the config, dotted keys")->take_all();
        sub->add_option("--output,-o", run_args.output, "output directory");
        sub->add_option("--threads,-j", run_args.threads, "worker threads, 0 = all cores");
        sub->add_flag("--print-config", run_args.print_config, "print the resolved config and exit");
    };
    auto* run = app.add_subcommand("run", "run one experiment");
    add_run_options(run, true);
    auto* sweep = app.add_subcommand("sweep", "run a figure sweep with overrides");
    add_run_options(sweep, false);

    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    std::vector<std::string> checks;
    double dt_scale = 1.0;
    std::string json_path = "verify.json";
    unsigned verify_threads = 0;
    bool list = false;
    verify->add_option("--check,-c", checks, "run only these checks");
    verify->add_option("--dt-scale", dt_scale, "multiply every time step")->check(CLI::PositiveNumber);
    verify->add_option("--json", json_path, "where to write the JSON report");
    verify->add_option("--threads,-j", verify_threads, "worker threads, 0 = all cores");
    verify->add_flag("--list", list, "list the checks and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : validation;
    }

    if (*run || *sweep) {
        if (*sweep && run_args.experiment.empty()) {
            std::cerr << "validation error: sweep needs --experiment\n";
            return validation;
        }
        return do_run(run_args);
    }

    if (list) {
        for (const auto& c : acceptance_criteria()) std::cout << c.name << "  " << c.title << "\n";
        return ok;
    }
    std::vector<std::string> names = checks;
    if (names.empty())
        for (const auto& c : acceptance_criteria()) names.push_back(c.name);
    AcceptanceOptions options{dt_scale, verify_threads};
    json report = json::array();
    bool all = true;
    for (const auto& n : names) {
        CriterionResult r;
        try {
            r = run_criterion(n, options);
        } catch (const std::out_of_range& e) {
            std::cerr << "validation error: " << e.what() << "\n";
            return validation;
        }
        std::cout << format_text(r) << std::flush;
        report.push_back(to_json(r));
        all = all && r.pass;
    }
    const json doc{{"version", code_version()}, {"dt_scale", dt_scale}, {"pass", all}, {"checks", report}};
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << doc.dump(2) << "\n";
        if (!out) std::cerr << "cannot write " << json_path << "\n";
    }
    std::cout << (all ? "all checks passed" : "some checks failed") << "\n";
    return all ? ok : verification;
}
