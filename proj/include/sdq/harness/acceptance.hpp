#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sdq::harness {

struct AcceptanceOptions {
    double dt_scale = 1.0;  // multiplies every time step; > 1 is a deliberate misconfiguration
    unsigned threads = 0;
};

/// One measured quantity against its pinned threshold.
struct Measurement {
    std::string name;
    double value = 0.0;
    std::string op;  // "<", ">", ">=", "in"
    double threshold = 0.0;
    double upper = 0.0;  // for "in"
    bool pass = false;
};

struct CriterionResult {
    std::string name;
    std::string title;
    std::vector<Measurement> measurements;
    std::vector<std::string> notes;
    std::string error;  // set if the check itself threw
    double runtime = 0.0;
    bool pass = false;
};

struct Criterion {
    std::string name;
    std::string title;
    std::function<CriterionResult(const AcceptanceOptions&)> run;
};

const std::vector<Criterion>& acceptance_criteria();

/// Throws std::out_of_range for an unknown name. Never throws for a failing check.
CriterionResult run_criterion(const std::string& name, const AcceptanceOptions& options = {});

/// "PASS name: m1 = v < t; ..." then indented notes.
std::string format_text(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);

}  // namespace sdq::harness
