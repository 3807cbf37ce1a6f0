#pragma once

#include <cmath>
#include <string_view>

#include "infctl/boundary.hpp"
#include "infctl/params.hpp"

namespace infctl {

enum class Region { WaitC, ActD1, ActD2, Absorbed };

[[nodiscard]] std::string_view to_string(Region r);

/// Value of the classical (q = 0) dividend problem: x for mu <= 0, otherwise
/// the exponential branch below b_circ and x - b_circ + mu/rho above it.
/// Throws DomainError for x < 0.
[[nodiscard]] double classical_value(double x, const ModelParams& params);

/// First and second x-derivatives of classical_value.
struct ClassicalDerivatives {
    double v;
    double v_x;
    double v_xx;
};
[[nodiscard]] ClassicalDerivatives classical_value_derivatives(double x,
                                                               const ModelParams& params);

/// Region of (x, i) for the solved boundary. Ties go to the action side:
/// x = b(i) with i < i_star is ActD1 and i = i_star is ActD2.
/// Throws DomainError unless x >= i >= 0.
[[nodiscard]] Region classify_region(double x, double i, const BoundaryTable& boundary);

/// Value function and its analytic partial derivatives at one point.
struct ValueDerivatives {
    double v = 0.0;
    double v_x = 0.0;
    double v_xx = 0.0;
    double v_i = 0.0;
    Region region = Region::Absorbed;
};

/// Closed-form value for every drift sign. The boundary is required exactly
/// when mu > 0 and q > 0 (ConfigError otherwise, or when it was solved for
/// different parameters). Throws DomainError unless x >= i >= 0.
[[nodiscard]] ValueDerivatives value_derivatives(double x, double i, const ModelParams& params,
                                                 const BoundaryTable* boundary = nullptr);

[[nodiscard]] inline double value(double x, double i, const ModelParams& params,
                                  const BoundaryTable* boundary = nullptr) {
    return value_derivatives(x, i, params, boundary).v;
}

/// v_x(x, i) - exp(-q i): zero on the action region, nonnegative while waiting.
[[nodiscard]] double gradient_constraint_gap(double x, double i, const ModelParams& params,
                                             const BoundaryTable& boundary);

/// The waiting-region formula evaluated at any x, continued past b(i).
/// Templated so verification can evaluate it in extended precision.
template <typename Real>
Real waiting_branch(const Real& x, const Real& b_of_i, const Real& i, const Real& alpha,
                    const Real& beta, const Real& q) {
    using std::exp;
    const Real s = x - b_of_i;
    return exp(-q * i) / (alpha - beta) *
           (alpha / beta * exp(beta * s) - beta / alpha * exp(alpha * s));
}

}  // namespace infctl
