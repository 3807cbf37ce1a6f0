#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "infctl/params.hpp"

namespace infctl {

/// Right-hand side of the free-boundary ODE b'(i) = flow(b(i), i).
///
/// Stores the roots once so the integrator does not recompute square roots
/// per stage. Evaluation divides numerator and denominator by the dominant
/// exponential, so no argument overflows for any finite (b, i).
class BoundaryFlow {
public:
    explicit BoundaryFlow(const ModelParams& params);

    [[nodiscard]] double operator()(double b, double i) const;

    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double beta() const { return beta_; }

private:
    double alpha_;
    double beta_;
    double q_;
};

/// One-shot evaluation; requires mu > 0 and q > 0.
[[nodiscard]] double flow(double b, double i, const ModelParams& params);

/// Discretised solution i -> b(i) of the boundary ODE plus the level i_star
/// where the boundary meets the diagonal. Immutable after construction.
class BoundaryTable {
public:
    /// Checks every table invariant (b(0) = b_circ, strict decrease,
    /// b(i) < i + b_circ, a sign change of b(i) - i on [0, b_circ]) and
    /// locates i_star. Throws NumericalError on a non-monotone table and
    /// ConfigError when the grid does not reach past b_circ.
    BoundaryTable(const ModelParams& params, std::vector<double> grid,
                  std::vector<double> values, double step);

    [[nodiscard]] const ModelParams& params() const { return params_; }
    [[nodiscard]] std::span<const double> grid() const { return grid_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double i_star() const { return i_star_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] double i_max() const { return grid_.back(); }
    [[nodiscard]] double b_circ() const { return values_.front(); }
    [[nodiscard]] std::uint64_t params_hash() const { return params_hash_; }

    /// Piecewise-linear interpolation; exact at the nodes.
    /// Throws DomainError outside [0, i_max].
    [[nodiscard]] double at(double i) const;

private:
    ModelParams params_;
    std::vector<double> grid_;
    std::vector<double> values_;
    double step_;
    double i_star_ = 0.0;
    std::uint64_t params_hash_;
};

/// Default upper end of the solve, 5 b_circ.
[[nodiscard]] double default_boundary_extent(const ModelParams& params);

/// Classical fourth-order Runge-Kutta from b(0) = b_circ on a fixed grid
/// k * step, with a final partial step landing on i_max.
/// Requires mu > 0, q > 0, i_max > 0 and 0 < step <= i_max / 10.
[[nodiscard]] BoundaryTable solve_boundary(const ModelParams& params, double i_max,
                                           double step);

/// Root of b(i) - i by bisection on the interpolated table, bracketed by
/// [0, b_circ]. Throws ConfigError if the table stops before b_circ.
[[nodiscard]] double critical_infimum(const BoundaryTable& table);

[[nodiscard]] inline double boundary_at(const BoundaryTable& table, double i) {
    return table.at(i);
}

/// Writes `i,b` rows with 17 significant digits and a key = value sidecar
/// holding the parameters, step and i_star.
void write_boundary(const BoundaryTable& table, const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path);

/// Inverse of write_boundary; the result compares bit-identical to the table
/// that was written.
[[nodiscard]] BoundaryTable read_boundary(const std::filesystem::path& csv_path,
                                          const std::filesystem::path& meta_path);

}  // namespace infctl
