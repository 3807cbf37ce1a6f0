#include "infctl/integrals.hpp"

#include <algorithm>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "infctl/errors.hpp"

namespace infctl {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr unsigned kQuadratureDepth = 15;

// Integral of e^{-c u} over [0, length].
double exp_segment(double c, double length) {
    if (c == 0.0) return length;
    return -std::expm1(-c * length) / c;
}

template <typename F>
double integrate(F&& f, double length) {
    if (length <= 0.0) return 0.0;
    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;
    return Quadrature::integrate(std::forward<F>(f), 0.0, length, kQuadratureDepth,
                                 kQuadratureTolerance);
}

// Sorted, deduplicated node indices that carry a jump.
std::vector<std::size_t> jump_nodes(const SamplePath& path) {
    std::vector<std::size_t> nodes;
    nodes.reserve(path.jumps.size());
    for (const auto& j : path.jumps) nodes.push_back(j.time_index);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

void check_discount(const SamplePath& path, std::span<const double> discount) {
    if (discount.size() < path.last_index() + 1) {
        throw PathError("discount stream is shorter than the path");
    }
}

}  // namespace

void SamplePath::clear() {
    times.clear();
    x.clear();
    inf.clear();
    dc.clear();
    jumps.clear();
    discount_log.clear();
    absorbed_at.reset();
}

void validate_path(const SamplePath& path) {
    const std::size_t n = path.x.size();
    if (n == 0) throw PathError("empty path");
    if (path.inf.size() != n || path.dc.size() != n || path.times.size() != n) {
        throw PathError("path arrays have mismatched lengths");
    }
    if (!(path.dt > 0.0)) throw PathError("path time step must be positive");
    if (path.absorbed_at && *path.absorbed_at >= n) {
        throw PathError("absorption index past the end of the path");
    }
    const std::size_t last = path.last_index();
    for (std::size_t k = 0; k <= last; ++k) {
        if (!(path.inf[k] <= path.x[k])) {
            throw PathError(fmt::format("infimum above the state at node {}", k));
        }
        if (!(path.dc[k] >= 0.0)) throw PathError(fmt::format("negative control at node {}", k));
        if (k > 0 && path.inf[k] > path.inf[k - 1]) {
            throw PathError(fmt::format("infimum increases at node {}", k));
        }
    }
    for (const auto& j : path.jumps) {
        if (j.time_index > last) throw PathError("jump after the end of the path");
        if (!(j.delta_d > 0.0)) throw PathError("jump size must be positive");
        if (!(j.x_pre >= j.i_pre)) {
            throw PathError(fmt::format("jump at node {} starts outside the state space",
                                        j.time_index));
        }
        if (path.jump_bound && j.x_pre - j.delta_d < *path.jump_bound) {
            throw PathError(fmt::format("jump at node {} overshoots the absorption level",
                                        j.time_index));
        }
    }
}

SamplePath reflect_path(const SamplePath& path) {
    SamplePath out = path;
    for (double& v : out.x) v = -v;
    for (double& v : out.inf) v = -v;
    for (auto& j : out.jumps) {
        j.x_pre = -j.x_pre;
        j.i_pre = -j.i_pre;
    }
    if (out.jump_bound) out.jump_bound = -*out.jump_bound;
    return out;
}

ScalarField::ScalarField(std::function<double(double, double)> fn) : fn_(std::move(fn)) {
    if (!fn_) throw ConfigError("scalar field needs a callable");
}

ScalarField ScalarField::constant(double c) { return exp_affine(c, 0.0, 0.0); }

ScalarField ScalarField::exp_affine(double scale, double x_rate, double i_rate) {
    ScalarField f;
    f.form_ = ExpAffine{scale, x_rate, i_rate};
    return f;
}

ScalarField ScalarField::reflected() const {
    if (form_) return exp_affine(form_->scale, -form_->x_rate, -form_->i_rate);
    auto fn = fn_;
    return ScalarField([fn](double x, double i) { return fn(-x, -i); });
}

std::vector<double> discount_stream(const SamplePath& path, const ScalarField& r) {
    const std::size_t n = path.x.size();
    std::vector<double> d(n, 0.0);
    if (n == 0) return d;
    if (r.exp_affine_form() && r.exp_affine_form()->x_rate == 0.0 &&
        r.exp_affine_form()->i_rate == 0.0) {
        const double inc = r.exp_affine_form()->scale * path.dt;
        for (std::size_t k = 1; k < n; ++k) d[k] = d[k - 1] + inc;
        return d;
    }
    double prev = r(path.x[0], path.inf[0]);
    for (std::size_t k = 1; k < n; ++k) {
        const double cur = r(path.x[k], path.inf[k]);
        d[k] = d[k - 1] + 0.5 * path.dt * (prev + cur);
        prev = cur;
    }
    return d;
}

JumpSplit split_jump(const JumpEvent& jump, const ScalarField& g) {
    const double gap = jump.x_pre - jump.i_pre;
    const double along_x = std::min(gap, jump.delta_d);
    const double along_diagonal = jump.delta_d > gap ? jump.delta_d - gap : 0.0;
    JumpSplit out;
    if (g.is_zero()) return out;

    if (const auto& form = g.exp_affine_form()) {
        out.off_diagonal = form->scale *
                           std::exp(form->x_rate * jump.x_pre + form->i_rate * jump.i_pre) *
                           exp_segment(form->x_rate, along_x);
        if (along_diagonal > 0.0) {
            const double rate = form->x_rate + form->i_rate;
            out.diagonal = form->scale * std::exp(rate * jump.i_pre) *
                           exp_segment(rate, along_diagonal);
        }
        return out;
    }

    const double x_pre = jump.x_pre;
    const double i_pre = jump.i_pre;
    out.off_diagonal = integrate([&](double u) { return g(x_pre - u, i_pre); }, along_x);
    if (along_diagonal > 0.0) {
        // Substitute u = gap + w so the diagonal segment starts at (i_pre, i_pre).
        out.diagonal =
            integrate([&](double w) { return g(i_pre - w, i_pre - w); }, along_diagonal);
    }
    return out;
}

double diamond_integral(const SamplePath& path, std::span<const double> discount,
                        const ScalarField& g) {
    validate_path(path);
    check_discount(path, discount);
    if (g.is_zero()) return 0.0;
    const std::size_t last = path.last_index();
    double total = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
        if (path.dc[k] > 0.0) {
            total += std::exp(-discount[k]) * g(path.x[k], path.inf[k]) * path.dc[k];
        }
    }
    for (const auto& j : path.jumps) {
        const JumpSplit s = split_jump(j, g);
        total += std::exp(-discount[j.time_index]) * (s.off_diagonal + s.diagonal);
    }
    return total;
}

double box_integral(const SamplePath& path, std::span<const double> discount,
                    const ScalarField& g) {
    validate_path(path);
    check_discount(path, discount);
    if (g.is_zero()) return 0.0;
    const std::size_t last = path.last_index();
    const auto jumped = jump_nodes(path);
    auto next_jump = jumped.begin();
    double total = 0.0;
    for (std::size_t k = 1; k <= last; ++k) {
        while (next_jump != jumped.end() && *next_jump < k) ++next_jump;
        if (next_jump != jumped.end() && *next_jump == k) continue;
        const double decrease = path.inf[k] - path.inf[k - 1];
        // The infimum recursion assigns inf[k] = x[k] exactly when it moves.
        if (decrease < 0.0 && path.x[k] == path.inf[k]) {
            total += std::exp(-discount[k]) * g(path.x[k], path.inf[k]) * decrease;
        }
    }
    for (const auto& j : path.jumps) {
        const JumpSplit s = split_jump(j, g);
        total -= std::exp(-discount[j.time_index]) * s.diagonal;
    }
    return total;
}

double diamond_integral(const SamplePath& path, const ScalarField& r, const ScalarField& g) {
    validate_path(path);
    return diamond_integral(path, discount_stream(path, r), g);
}

double box_integral(const SamplePath& path, const ScalarField& r, const ScalarField& g) {
    validate_path(path);
    return box_integral(path, discount_stream(path, r), g);
}

double diamond_integral_sup(const SamplePath& path_sup, const ScalarField& r,
                            const ScalarField& g) {
    return diamond_integral(reflect_path(path_sup), r.reflected(), g.reflected());
}

double box_integral_sup(const SamplePath& path_sup, const ScalarField& r, const ScalarField& g) {
    // Both terms change sign: dS^c = -dI^c, and the diagonal jump part enters
    // the supremum operator with a plus sign.
    return -box_integral(reflect_path(path_sup), r.reflected(), g.reflected());
}

double payoff_functional(const SamplePath& path, const ScalarField& r, const ScalarField& running,
                         const ScalarField& f, const ScalarField& h) {
    validate_path(path);
    const std::vector<double> discount = discount_stream(path, r);
    double total = 0.0;
    if (!running.is_zero()) {
        const std::size_t last = path.last_index();
        double prev = running(path.x[0], path.inf[0]);
        for (std::size_t k = 1; k <= last; ++k) {
            const double cur = std::exp(-discount[k]) * running(path.x[k], path.inf[k]);
            total += 0.5 * path.dt * (prev + cur);
            prev = cur;
        }
    }
    total += diamond_integral(path, discount, f);
    total += box_integral(path, discount, h);
    return total;
}

}  // namespace infctl
