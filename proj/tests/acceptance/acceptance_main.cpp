#include <CLI11.hpp>

#include <iostream>

#include "sdq/harness/acceptance.hpp"

using namespace sdq::harness;

// One line per criterion; exit 1 if any fails.
int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<std::string> checks;
    AcceptanceOptions options;
    app.add_option("--check,-c", checks, "criteria to run (default: all)");
    app.add_option("--threads,-j", options.threads, "worker threads, 0 = all cores");
    CLI11_PARSE(app, argc, argv);

    if (checks.empty())
        for (const auto& c : acceptance_criteria()) checks.push_back(c.name);
    bool all = true;
    for (const auto& name : checks) {
        const auto r = run_criterion(name, options);
        std::cout << format_text(r) << std::flush;
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
