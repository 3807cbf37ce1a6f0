#include "infctl/params.hpp"

#include <bit>
#include <cmath>
#include <fmt/format.h>

#include "infctl/errors.hpp"

namespace infctl {

void ModelParams::validate() const {
    if (!std::isfinite(mu) || !std::isfinite(eta) || !std::isfinite(rho) ||
        !std::isfinite(q)) {
        throw DomainError("model parameters must be finite");
    }
    if (eta <= 0.0) throw DomainError(fmt::format("eta must be > 0, got {}", eta));
    if (rho <= 0.0) throw DomainError(fmt::format("rho must be > 0, got {}", rho));
    if (q < 0.0) throw DomainError(fmt::format("q must be >= 0, got {}", q));
}

std::uint64_t params_fingerprint(const ModelParams& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double d : {p.mu, p.eta, p.rho, p.q}) {
        auto bits = std::bit_cast<std::uint64_t>(d);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

CharRoots char_roots(const ModelParams& params) {
    params.validate();
    const double eta2 = params.eta * params.eta;
    const double disc = std::sqrt(params.mu * params.mu + 2.0 * params.rho * eta2);
    // Take the root without cancellation from the quadratic formula and the
    // other from the product alpha * beta = -2 rho / eta^2.
    double alpha;
    double beta;
    if (params.mu >= 0.0) {
        alpha = -(params.mu + disc) / eta2;
        beta = 2.0 * params.rho / (params.mu + disc);
    } else {
        beta = (disc - params.mu) / eta2;
        alpha = -2.0 * params.rho / (disc - params.mu);
    }
    CharRoots roots{alpha, beta, std::nullopt};
    if (params.mu > 0.0) roots.b_circ = barrier_from_roots(alpha, beta);
    return roots;
}

double barrier_from_roots(double a, double b) {
    // ln(b^2/a^2) = 2 (ln|b| - ln|a|); both differences flip sign exactly
    // under a <-> b, so the quotient is bit-identical for either ordering.
    return 2.0 * (std::log(std::fabs(b)) - std::log(std::fabs(a))) / (a - b);
}

}  // namespace infctl
