#include "infctl/model.hpp"

#include <cmath>
#include <fmt/format.h>

#include "infctl/errors.hpp"

namespace infctl {

namespace {

void check_state(double x, double i) {
    if (!std::isfinite(x) || !std::isfinite(i) || i < 0.0 || x < i) {
        throw DomainError(fmt::format("({}, {}) is outside the state space x >= i >= 0", x, i));
    }
}

// (alpha e^{beta s} - beta e^{alpha s}) / (alpha - beta) - 1, accurate near s = 0.
double slope_excess(double s, double alpha, double beta) {
    return (alpha * std::expm1(beta * s) - beta * std::expm1(alpha * s)) / (alpha - beta);
}

}  // namespace

std::string_view to_string(Region r) {
    switch (r) {
        case Region::WaitC: return "C";
        case Region::ActD1: return "D1";
        case Region::ActD2: return "D2";
        case Region::Absorbed: return "absorbed";
    }
    return "?";
}

ClassicalDerivatives classical_value_derivatives(double x, const ModelParams& params) {
    params.validate();
    if (!(x >= 0.0)) throw DomainError(fmt::format("surplus must be >= 0, got {}", x));
    if (params.mu <= 0.0) return {x, 1.0, 0.0};

    const CharRoots roots = char_roots(params);
    const double a = roots.alpha;
    const double b = roots.beta;
    const double barrier = *roots.b_circ;
    if (x >= barrier) return {x - barrier + params.mu / params.rho, 1.0, 0.0};

    const double s = x - barrier;
    const double ea = std::exp(a * s);
    const double eb = std::exp(b * s);
    // Absorbed at zero; the formula only vanishes there up to rounding.
    const double v = x == 0.0 ? 0.0 : (a / b * eb - b / a * ea) / (a - b);
    return {v, 1.0 + slope_excess(s, a, b), a * b * (eb - ea) / (a - b)};
}

double classical_value(double x, const ModelParams& params) {
    return classical_value_derivatives(x, params).v;
}

Region classify_region(double x, double i, const BoundaryTable& boundary) {
    check_state(x, i);
    if (x <= 0.0) return Region::Absorbed;
    if (i >= boundary.i_star()) return Region::ActD2;
    return x >= boundary.at(i) ? Region::ActD1 : Region::WaitC;
}

ValueDerivatives value_derivatives(double x, double i, const ModelParams& params,
                                   const BoundaryTable* boundary) {
    params.validate();
    check_state(x, i);
    ValueDerivatives out;
    if (x <= 0.0) return out;  // v(0, 0) = 0

    if (params.mu <= 0.0) {
        // Everything is action region: pay x at once, hockey-stick to the origin.
        out.region = Region::ActD2;
        if (params.q == 0.0) {
            out.v = x;
            out.v_x = 1.0;
            return out;
        }
        const double e = std::exp(-params.q * i);
        out.v = e * (x - i) - std::expm1(-params.q * i) / params.q;
        out.v_x = e;
        out.v_i = -params.q * e * (x - i);
        return out;
    }

    if (params.q == 0.0) {
        const auto c = classical_value_derivatives(x, params);
        out.v = c.v;
        out.v_x = c.v_x;
        out.v_xx = c.v_xx;
        out.region = x >= *char_roots(params).b_circ ? Region::ActD1 : Region::WaitC;
        return out;
    }

    if (boundary == nullptr) {
        throw ConfigError("a solved boundary is required when mu > 0 and q > 0");
    }
    if (!(boundary->params() == params)) {
        throw ConfigError("boundary was solved for different model parameters");
    }

    const CharRoots roots = char_roots(params);
    const double a = roots.alpha;
    const double b = roots.beta;
    const double q = params.q;
    const double e = std::exp(-q * i);
    const double payout_ratio = params.mu / params.rho;

    out.region = classify_region(x, i, *boundary);
    switch (out.region) {
        case Region::WaitC: {
            const double bi = boundary->at(i);
            const double s = x - bi;
            const double ea = std::exp(a * s);
            const double eb = std::exp(b * s);
            const double slope = flow(bi, i, params);
            out.v = e / (a - b) * (a / b * eb - b / a * ea);
            out.v_x = e * (1.0 + slope_excess(s, a, b));
            out.v_xx = e * a * b * (eb - ea) / (a - b);
            out.v_i = -q * out.v - slope * out.v_x;
            break;
        }
        case Region::ActD1: {
            const double bi = boundary->at(i);
            out.v = e * (x - bi + payout_ratio);
            out.v_x = e;
            out.v_i = -q * out.v - e * flow(bi, i, params);
            break;
        }
        case Region::ActD2: {
            const double i_star = boundary->i_star();
            const double e_star = std::exp(-q * i_star);
            // (e^{-q i*} - e^{-q i}) / q without cancellation for small q (i - i*).
            const double diagonal = -e_star * std::expm1(-q * (i - i_star)) / q;
            out.v = e * (x - i) + diagonal + payout_ratio * e_star;
            out.v_x = e;
            out.v_i = -q * e * (x - i);
            break;
        }
        case Region::Absorbed:
            break;
    }
    return out;
}

double gradient_constraint_gap(double x, double i, const ModelParams& params,
                               const BoundaryTable& boundary) {
    const Region r = classify_region(x, i, boundary);
    if (r != Region::WaitC) return 0.0;
    const CharRoots roots = char_roots(params);
    const double s = x - boundary.at(i);
    return std::exp(-params.q * i) * slope_excess(s, roots.alpha, roots.beta);
}

}  // namespace infctl
