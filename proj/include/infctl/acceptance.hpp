#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infctl/integrals.hpp"
#include "infctl/params.hpp"

namespace infctl {

struct Probe {
    double x;
    double i;
};

/// Everything the acceptance suite needs. Defaults reproduce the reference run.
struct AcceptanceOptions {
    ModelParams params{};
    std::size_t mc_paths = 100000;
    double dt = 1e-4;
    std::uint64_t seed = 20240611;
    Probe probe_waiting{0.5, 0.2};
    Probe probe_d1{1.0, 0.2};
    Probe probe_d2{1.0, 0.7};
    std::vector<double> perturbations{0.8, 1.2};
    std::vector<double> q_ladder{0.5, 0.1, 0.02, 0.004};
    std::vector<double> q_sweep_probes{0.1, 0.3, 0.5};
    double q_sweep_x = 0.7;
    std::size_t support_paths = 1000;
    std::size_t operator_paths = 1000;
    /// Criteria to run (1..11); empty runs all of them.
    std::vector<int> only;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::vector<std::pair<std::string, double>> measures;
    std::vector<std::pair<std::string, double>> timings;  ///< budgeted operations, seconds
    std::string note;  ///< failing sub-check, or an exception message
    double seconds = 0.0;
};

/// One line: "PASS  3 critical level  i_star=0.6175 ... (0.001 s)". Without
/// timings the line depends only on the options, byte for byte.
[[nodiscard]] std::string format_result(const CriterionResult& r, bool with_timings = true);

/// Runs the selected criteria in order, reporting each as soon as it finishes.
/// Exceptions inside a criterion mark it failed; they do not stop the run.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

/// Randomised infimum path with continuous control and jumps of every kind
/// (inside the gap, from the diagonal, hockey-stick). Reproducible from seed.
[[nodiscard]] SamplePath random_controlled_path(std::uint64_t seed, std::size_t n_steps = 60);

}  // namespace infctl
