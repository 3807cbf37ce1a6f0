#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "infctl/acceptance.hpp"
#include "infctl/params.hpp"
#include "infctl/sim.hpp"

namespace infctl {

/// Settings for every CLI command. Zero for boundary.i_max, grid.x_max,
/// grid.i_max and sim.horizon means "derive from the model".
struct ExperimentConfig {
    ModelParams model{};

    struct Boundary {
        double step = 1e-4;
        double i_max = 0.0;
    } boundary;

    struct Grid {
        std::size_t nx = 41;
        std::size_t ni = 41;
        double x_max = 0.0;
        double i_max = 0.0;
    } grid;

    struct Sim {
        std::string policy = "optimal";  ///< optimal | barrier | null | immediate
        double barrier = 0.0;            ///< level for policy = barrier; 0 means b_circ
        double scale = 1.0;              ///< boundary scale for policy = optimal
        double x0 = 0.7;
        double i0 = 0.1;
        double dt = 1e-4;
        double horizon = 0.0;
        std::uint64_t seed = 20240611;
        std::size_t paths = 10;
        std::size_t stride = 100;  ///< write every stride-th node (and the last)
    } sim;

    AcceptanceOptions verify{};

    struct Sweep {
        std::vector<double> q_ladder{0.5, 0.1, 0.02, 0.004};
        std::vector<double> i_probes{0.1, 0.3, 0.5};
        double x_probe = 0.7;
        double step = 1e-4;
    } sweep;

    std::filesystem::path output_dir = "out";

    /// Cross-field checks; throws ConfigError or DomainError.
    void validate() const;
};

/// Parses `section.key = value` lines; `#` starts a comment. Unknown keys and
/// malformed values throw ParseError naming the line.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its effective value, in the format parse_config reads.
[[nodiscard]] std::string render_config(const ExperimentConfig& cfg);

}  // namespace infctl
