#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "infctl/boundary.hpp"
#include "infctl/integrals.hpp"
#include "infctl/params.hpp"

namespace infctl {

struct NullPolicy {};

/// Pay the whole surplus at time zero.
struct ImmediatePayout {};

/// Pay down to `level` at time zero, then reflect X at `level`.
struct ConstantBarrier {
    double level;
};

/// Reflect X at scale * b(I) for the solved boundary b. With scale = 1 this
/// is the optimal policy, including its lump at time zero.
struct OptimalReflection {
    std::shared_ptr<const BoundaryTable> boundary;
    double scale = 1.0;
};

using Policy = std::variant<NullPolicy, ImmediatePayout, ConstantBarrier, OptimalReflection>;

[[nodiscard]] std::string describe(const Policy& policy);

struct SimConfig {
    double dt = 1e-4;
    double horizon = 10.0;
    std::uint64_t seed = 20240611;
    std::uint64_t path_index = 0;

    /// Throws DomainError unless dt > 0 and dt <= horizon / 100.
    void validate() const;
};

/// Horizon after which the discarded tail, bounded by e^{-rho T} mu/rho for a
/// barrier policy, stays below a tenth of the standard error expected from
/// n_paths paths (per-path spread taken as a quarter of mu/rho).
[[nodiscard]] double default_horizon(const ModelParams& params, std::size_t n_paths);

/// Upper bound on the payoff discarded by truncating at `horizon`.
[[nodiscard]] double truncation_bound(const ModelParams& params, double horizon);

/// Lump paid by the optimal policy at time zero: nothing while waiting,
/// x - b(i) in D1 and x - i_star in D2 (the hockey-stick to the diagonal).
[[nodiscard]] double initial_lump(double x, double i, const BoundaryTable& boundary);

/// Euler steps of X' = X + mu dt + eta sqrt(dt) Z, each followed by
/// reflection at the policy barrier, the infimum update and the absorption
/// check X' <= 0, stopping at absorption or the horizon. Z is keyed by
/// (seed, path_index, step) so the path is reproducible in isolation.
[[nodiscard]] SamplePath simulate_path(const ModelParams& params, const Policy& policy, double x0,
                                       double i0, const SimConfig& cfg);

/// Same, reusing the buffers of `out`.
void simulate_path_into(const ModelParams& params, const Policy& policy, double x0, double i0,
                        const SimConfig& cfg, SamplePath& out);

struct SupportReport {
    std::size_t control_steps = 0;     ///< steps with dc > 0
    std::size_t off_barrier_steps = 0; ///< those farther than `tolerance` from b(I)
    double max_violation = 0.0;        ///< largest |X - b(I)| over control steps
    double tolerance = 0.0;            ///< mu dt + 4 eta sqrt(dt)
    bool jumps_ok = true;              ///< at most one jump, at t = 0, of the optimal size
    [[nodiscard]] bool compliant() const { return off_barrier_steps == 0 && jumps_ok; }
};

/// Checks that continuous control is paid only on the barrier b(I) and that
/// the only jump is the optimal initial lump. Report only; never throws on
/// a non-compliant path.
[[nodiscard]] SupportReport path_support_check(const SamplePath& path,
                                               const BoundaryTable& boundary);

}  // namespace infctl
