#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input; `field()` names the offending parameter.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class GridMismatchError : public Error {
public:
    using Error::Error;
};

class NoBoundStatesError : public Error {
public:
    NoBoundStatesError(std::size_t requested, std::size_t found)
        : Error("requested " + std::to_string(requested) + " bound states, found " +
                std::to_string(found) + " below the boundary potential"),
          requested_(requested), found_(found) {}
    std::size_t requested() const noexcept { return requested_; }
    std::size_t found() const noexcept { return found_; }

private:
    std::size_t requested_;
    std::size_t found_;
};

class PropagationDivergedError : public Error {
public:
    explicit PropagationDivergedError(double t)
        : Error("non-finite amplitudes at t = " + std::to_string(t)), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

struct CalibrationSample {
    double t_i;
    double rho0;
    double rho1;
};

class CalibrationFailedError : public Error {
public:
    CalibrationFailedError(const std::string& what, std::vector<CalibrationSample> trace)
        : Error(what), trace_(std::move(trace)) {}
    const std::vector<CalibrationSample>& trace() const noexcept { return trace_; }

private:
    std::vector<CalibrationSample> trace_;
};

class MiscalibratedPulseError : public Error {
public:
    explicit MiscalibratedPulseError(double single_return)
        : Error("single-particle return probability " + std::to_string(single_return) +
                " < 0.99; trajectory is not an n*2pi pulse"),
          single_return_(single_return) {}
    double single_return() const noexcept { return single_return_; }

private:
    double single_return_;
};

struct StepLeakage {
    std::string step;
    double leakage;
};

class GateLeakageError : public Error {
public:
    GateLeakageError(const std::string& what, std::vector<StepLeakage> steps)
        : Error(what), steps_(std::move(steps)) {}
    const std::vector<StepLeakage>& steps() const noexcept { return steps_; }

private:
    std::vector<StepLeakage> steps_;
};

}  // namespace sdq
