#pragma once

#include <cstdint>
#include <optional>

namespace infctl {

/// Coefficients of the controlled surplus dX = mu dt + eta dW - dD, discounted
/// by exp(-rho t - q I_t) where I is the running infimum of X.
struct ModelParams {
    double mu = 1.0;   ///< drift per unit time
    double eta = 1.0;  ///< volatility, > 0
    double rho = 1.0;  ///< discount rate, > 0
    double q = 0.5;    ///< time-preference sensitivity per unit decrease of I, >= 0

    /// Throws DomainError unless eta > 0, rho > 0, q >= 0 and all are finite.
    void validate() const;

    [[nodiscard]] ModelParams with_q(double new_q) const {
        ModelParams p = *this;
        p.q = new_q;
        return p;
    }

    bool operator==(const ModelParams&) const = default;
};

/// 64-bit FNV-1a over the bit patterns of the four coefficients.
[[nodiscard]] std::uint64_t params_fingerprint(const ModelParams& p);

/// Roots of (1/2) eta^2 theta^2 + mu theta - rho = 0 with alpha < 0 < beta,
/// and the classical dividend barrier. `b_circ` is empty when mu <= 0: no
/// barrier exists and callers have to branch on the drift sign.
struct CharRoots {
    double alpha;
    double beta;
    std::optional<double> b_circ;
};

[[nodiscard]] CharRoots char_roots(const ModelParams& params);

/// (1/(a - b)) ln(b^2 / a^2). Symmetric in its arguments, so either root
/// ordering gives the same barrier.
[[nodiscard]] double barrier_from_roots(double a, double b);

}  // namespace infctl
