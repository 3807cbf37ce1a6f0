#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "infctl/boundary.hpp"
#include "infctl/params.hpp"
#include "infctl/sim.hpp"

namespace infctl {

/// Monte Carlo estimate of the expected payoff.
struct PayoffEstimate {
    double mean = 0.0;
    double std_error = 0.0;  ///< sample standard deviation / sqrt(n_paths)
    std::size_t n_paths = 0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

[[nodiscard]] PayoffEstimate estimate_from(std::span<const double> samples);

/// Worker count from INFCTL_WORKERS, else the hardware concurrency. Only
/// affects wall time: results are reduced in path order.
[[nodiscard]] unsigned worker_count();

/// Dividend payoff of each of n_paths paths (path_index = cfg.path_index + p):
/// the diamond integral of exp(-q i) against D with r = rho, no running or
/// infimum reward.
[[nodiscard]] std::vector<double> mc_payoff_samples(const ModelParams& params,
                                                    const Policy& policy, double x0, double i0,
                                                    std::size_t n_paths, const SimConfig& cfg);

/// Requires n_paths >= 100.
[[nodiscard]] PayoffEstimate mc_payoff(const ModelParams& params, const Policy& policy,
                                       double x0, double i0, std::size_t n_paths,
                                       const SimConfig& cfg);

/// Variational-inequality residuals of the closed-form value on a grid of
/// x in (0, 2 b_circ], i in [0, 2 i_star], using analytic derivatives.
struct ResidualReport {
    double max_pde_residual_waiting = 0.0;  ///< max |(L - rho) v| on C
    double max_vi_slack_action = 0.0;       ///< max (L - rho) v on D1 u D2, should be <= 0
    double min_gradient_gap = 0.0;          ///< min v_x - exp(-q i), should be >= 0
    double max_neumann_deviation = 0.0;     ///< max |v_i(i, i)| on the waiting diagonal
    double dirichlet_value = 0.0;           ///< v(0, 0)
    std::size_t waiting_points = 0;
    std::size_t action_points = 0;
    std::string grid_spec;
};

/// Requires mu > 0, q > 0 and nx, ni >= 50.
[[nodiscard]] ResidualReport hjb_residual_grid(const ModelParams& params,
                                               const BoundaryTable& boundary, std::size_t nx,
                                               std::size_t ni);

struct SmoothFitRow {
    double i = 0.0;
    double vx_dev_coarse = 0.0;   ///< |FD v_x - exp(-q i)| at h = 1e-4
    double vx_dev_fine = 0.0;     ///< same at h = 1e-5
    double vxx_dev_coarse = 0.0;  ///< |FD v_xx| at h = 1e-4
    double vxx_dev_fine = 0.0;
    double vx_order = 0.0;   ///< log10(coarse / fine)
    double vxx_order = 0.0;
};

struct SmoothFitReport {
    std::vector<SmoothFitRow> rows;
    double min_order = 0.0;
    double max_fine_deviation = 0.0;
    static constexpr double kCoarseStep = 1e-4;
    static constexpr double kFineStep = 1e-5;
};

/// Central differences of the waiting-region formula across x = b(i) for
/// n_i levels i in (0, i_star). Evaluated in quad precision so that only
/// the O(h^2) truncation error is measured.
[[nodiscard]] SmoothFitReport smooth_fit_check(const ModelParams& params,
                                               const BoundaryTable& boundary, std::size_t n_i);

struct DominanceRow {
    std::string policy;
    PayoffEstimate estimate;
    bool dominated = false;       ///< mean <= value + 3 se
    bool strictly_below = false;  ///< mean < value - 3 se
};

struct DominanceReport {
    double value = 0.0;
    DominanceRow optimal;
    double optimal_slack = 0.0;  ///< max(3 se, 1.5% of value)
    bool optimal_matches = false;
    std::vector<DominanceRow> perturbed;
    [[nodiscard]] bool all_dominated() const;
    [[nodiscard]] bool some_strictly_below() const;
};

/// Relative slack for Monte Carlo agreement at dt = 1e-4.
inline constexpr double kMcRelativeSlack = 0.015;

/// Compares the optimal policy with constant barriers at c b_circ and with the
/// optimal boundary scaled by c, for each c in `factors`. Common random
/// numbers: every policy uses the same seeds.
[[nodiscard]] DominanceReport dominance_test(const ModelParams& params,
                                             std::shared_ptr<const BoundaryTable> boundary,
                                             double x0, double i0,
                                             std::span<const double> factors,
                                             std::size_t n_paths, const SimConfig& cfg);

struct QSweepRow {
    double q = 0.0;
    double i_star = 0.0;
    std::vector<double> boundary_at_probes;
    std::vector<double> value_at_probes;  ///< v(x_probe, i_probe; q)
    std::string error;                    ///< non-empty if the solve failed for this q
};

struct QSweepTable {
    double b_circ = 0.0;
    double classical_at_probe = 0.0;
    std::vector<double> i_probes;
    double x_probe = 0.0;
    std::vector<QSweepRow> rows;
    bool boundary_converges = false;  ///< |b(i; q) - b_circ| strictly decreasing
    bool value_converges = false;     ///< |v - V_0| strictly decreasing
    bool i_star_increases = false;    ///< i_star(q) increasing, below b_circ
};

/// Solves the boundary for each q of a strictly decreasing ladder and checks
/// convergence to the classical solution. Requires mu > 0 and min q >= 1e-4.
[[nodiscard]] QSweepTable q_sweep(const ModelParams& base, std::span<const double> q_list,
                                  std::span<const double> i_probes, double x_probe,
                                  double step = 1e-4);

}  // namespace infctl
