#include "infctl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "infctl/errors.hpp"
#include "infctl/integrals.hpp"
#include "infctl/model.hpp"

namespace infctl {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

double generator(const ModelParams& p, const ValueDerivatives& d) {
    return 0.5 * p.eta * p.eta * d.v_xx + p.mu * d.v_x - p.rho * d.v;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] < v[k - 1])) return false;
    }
    return true;
}

}  // namespace

PayoffEstimate estimate_from(std::span<const double> samples) {
    PayoffEstimate e;
    e.n_paths = samples.size();
    if (samples.empty()) return e;
    // Welford, in sample order so the result does not depend on threading.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double s : samples) {
        ++n;
        const double delta = s - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (s - mean);
    }
    e.mean = mean;
    if (n > 1) {
        const double var = m2 / static_cast<double>(n - 1);
        e.std_error = std::sqrt(var / static_cast<double>(n));
    }
    e.ci95_low = e.mean - 1.96 * e.std_error;
    e.ci95_high = e.mean + 1.96 * e.std_error;
    return e;
}

unsigned worker_count() {
    if (const char* env = std::getenv("INFCTL_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<double> mc_payoff_samples(const ModelParams& params, const Policy& policy, double x0,
                                      double i0, std::size_t n_paths, const SimConfig& cfg) {
    params.validate();
    cfg.validate();
    std::vector<double> payoffs(n_paths, 0.0);
    const ScalarField discount = ScalarField::constant(params.rho);
    const ScalarField none = ScalarField::constant(0.0);
    const ScalarField reward = ScalarField::exp_affine(1.0, 0.0, -params.q);

    auto work = [&](std::size_t begin, std::size_t end) {
        SamplePath path;
        SimConfig local = cfg;
        for (std::size_t p = begin; p < end; ++p) {
            local.path_index = cfg.path_index + p;
            simulate_path_into(params, policy, x0, i0, local, path);
            payoffs[p] = payoff_functional(path, discount, none, reward, none);
        }
    };

    const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n_paths, 1));
    if (workers <= 1) {
        work(0, n_paths);
        return payoffs;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n_paths + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n_paths, w * chunk);
        const std::size_t end = std::min(n_paths, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return payoffs;
}

PayoffEstimate mc_payoff(const ModelParams& params, const Policy& policy, double x0, double i0,
                         std::size_t n_paths, const SimConfig& cfg) {
    if (n_paths < 100) throw DomainError("mc_payoff needs at least 100 paths");
    const auto samples = mc_payoff_samples(params, policy, x0, i0, n_paths, cfg);
    return estimate_from(samples);
}

ResidualReport hjb_residual_grid(const ModelParams& params, const BoundaryTable& boundary,
                                 std::size_t nx, std::size_t ni) {
    if (params.mu <= 0.0 || params.q <= 0.0) throw ConfigError("residual grid needs mu, q > 0");
    if (nx < 50 || ni < 50) throw DomainError("residual grid needs at least 50 x 50 points");
    const double b_circ = boundary.b_circ();
    const double i_star = boundary.i_star();
    const double x_top = 2.0 * b_circ;
    const double i_top = 2.0 * i_star;

    ResidualReport r;
    r.min_gradient_gap = std::numeric_limits<double>::infinity();
    r.max_vi_slack_action = -std::numeric_limits<double>::infinity();
    r.grid_spec = fmt::format("{}x{} on x in (0, {:.6g}], i in [0, {:.6g}]", nx, ni, x_top, i_top);

    for (std::size_t j = 0; j < ni; ++j) {
        const double i = i_top * static_cast<double>(j) / static_cast<double>(ni - 1);
        for (std::size_t k = 1; k <= nx; ++k) {
            const double x = x_top * static_cast<double>(k) / static_cast<double>(nx);
            if (x < i) continue;
            const ValueDerivatives d = value_derivatives(x, i, params, &boundary);
            const double lv = generator(params, d);
            if (d.region == Region::WaitC) {
                ++r.waiting_points;
                r.max_pde_residual_waiting = std::max(r.max_pde_residual_waiting, std::fabs(lv));
            } else {
                ++r.action_points;
                r.max_vi_slack_action = std::max(r.max_vi_slack_action, lv);
            }
            r.min_gradient_gap = std::min(r.min_gradient_gap, d.v_x - std::exp(-params.q * i));
        }
    }
    // Neumann condition on the waiting part of the diagonal, 0 < i < i_star.
    for (std::size_t j = 1; j <= ni; ++j) {
        const double i = i_star * static_cast<double>(j) / static_cast<double>(ni + 1);
        const ValueDerivatives d = value_derivatives(i, i, params, &boundary);
        r.max_neumann_deviation = std::max(r.max_neumann_deviation, std::fabs(d.v_i));
    }
    r.dirichlet_value = value(0.0, 0.0, params, &boundary);
    return r;
}

SmoothFitReport smooth_fit_check(const ModelParams& params, const BoundaryTable& boundary,
                                 std::size_t n_i) {
    if (params.mu <= 0.0 || params.q <= 0.0) throw ConfigError("smooth fit needs mu, q > 0");
    const CharRoots roots = char_roots(params);
    const Quad alpha = roots.alpha;
    const Quad beta = roots.beta;
    const Quad q = params.q;

    SmoothFitReport report;
    report.min_order = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= n_i; ++j) {
        const double i_d = boundary.i_star() * static_cast<double>(j) / static_cast<double>(n_i + 1);
        const Quad i = i_d;
        const Quad b = boundary.at(i_d);
        const Quad slope_target = exp(-q * i);
        auto v = [&](const Quad& x) { return waiting_branch<Quad>(x, b, i, alpha, beta, q); };
        auto deviations = [&](double h_d) {
            const Quad h = h_d;
            const Quad up = v(b + h);
            const Quad mid = v(b);
            const Quad down = v(b - h);
            const Quad vx = (up - down) / (2 * h);
            const Quad vxx = (up - 2 * mid + down) / (h * h);
            return std::pair{static_cast<double>(abs(vx - slope_target)),
                             static_cast<double>(abs(vxx))};
        };
        const auto [vx_c, vxx_c] = deviations(SmoothFitReport::kCoarseStep);
        const auto [vx_f, vxx_f] = deviations(SmoothFitReport::kFineStep);
        SmoothFitRow row{i_d, vx_c, vx_f, vxx_c, vxx_f, std::log10(vx_c / vx_f),
                         std::log10(vxx_c / vxx_f)};
        report.min_order = std::min({report.min_order, row.vx_order, row.vxx_order});
        report.max_fine_deviation = std::max({report.max_fine_deviation, vx_f, vxx_f});
        report.rows.push_back(row);
    }
    return report;
}

bool DominanceReport::all_dominated() const {
    return std::all_of(perturbed.begin(), perturbed.end(),
                       [](const DominanceRow& r) { return r.dominated; });
}

bool DominanceReport::some_strictly_below() const {
    return std::any_of(perturbed.begin(), perturbed.end(),
                       [](const DominanceRow& r) { return r.strictly_below; });
}

DominanceReport dominance_test(const ModelParams& params,
                               std::shared_ptr<const BoundaryTable> boundary, double x0,
                               double i0, std::span<const double> factors, std::size_t n_paths,
                               const SimConfig& cfg) {
    if (!boundary) throw ConfigError("dominance test needs a solved boundary");
    DominanceReport report;
    report.value = value(x0, i0, params, boundary.get());
    auto row_for = [&](const Policy& policy) {
        DominanceRow row;
        row.policy = describe(policy);
        row.estimate = mc_payoff(params, policy, x0, i0, n_paths, cfg);
        row.dominated = row.estimate.mean <= report.value + 3.0 * row.estimate.std_error;
        row.strictly_below = row.estimate.mean < report.value - 3.0 * row.estimate.std_error;
        return row;
    };
    report.optimal = row_for(OptimalReflection{boundary, 1.0});
    report.optimal_slack =
        std::max(3.0 * report.optimal.estimate.std_error, kMcRelativeSlack * std::fabs(report.value));
    report.optimal_matches =
        std::fabs(report.optimal.estimate.mean - report.value) <= report.optimal_slack;
    const double b_circ = boundary->b_circ();
    for (double c : factors) {
        report.perturbed.push_back(row_for(ConstantBarrier{c * b_circ}));
        if (c != 1.0) report.perturbed.push_back(row_for(OptimalReflection{boundary, c}));
    }
    return report;
}

QSweepTable q_sweep(const ModelParams& base, std::span<const double> q_list,
                    std::span<const double> i_probes, double x_probe, double step) {
    base.validate();
    if (base.mu <= 0.0) throw ConfigError("q sweep needs mu > 0");
    if (q_list.empty()) throw DomainError("q ladder is empty");
    for (std::size_t k = 0; k < q_list.size(); ++k) {
        if (!(q_list[k] >= 1e-4)) throw DomainError("q ladder must stay >= 1e-4");
        if (k > 0 && !(q_list[k] < q_list[k - 1])) {
            throw DomainError("q ladder must be strictly decreasing");
        }
    }
    QSweepTable table;
    table.b_circ = *char_roots(base).b_circ;
    table.classical_at_probe = classical_value(x_probe, base);
    table.i_probes.assign(i_probes.begin(), i_probes.end());
    table.x_probe = x_probe;

    std::vector<std::vector<double>> b_gap(i_probes.size());
    std::vector<std::vector<double>> v_gap(i_probes.size());
    std::vector<double> i_stars;
    bool all_solved = true;
    for (double q : q_list) {
        QSweepRow row;
        row.q = q;
        try {
            const ModelParams p = base.with_q(q);
            const BoundaryTable table_q = solve_boundary(p, default_boundary_extent(p), step);
            row.i_star = table_q.i_star();
            i_stars.push_back(row.i_star);
            for (std::size_t k = 0; k < i_probes.size(); ++k) {
                const double b = table_q.at(i_probes[k]);
                const double v = value(x_probe, i_probes[k], p, &table_q);
                row.boundary_at_probes.push_back(b);
                row.value_at_probes.push_back(v);
                b_gap[k].push_back(std::fabs(b - table.b_circ));
                v_gap[k].push_back(std::fabs(v - table.classical_at_probe));
            }
        } catch (const Error& e) {
            row.error = e.what();
            all_solved = false;
        }
        table.rows.push_back(std::move(row));
    }
    table.boundary_converges = all_solved && std::all_of(b_gap.begin(), b_gap.end(), strictly_decreasing);
    table.value_converges = all_solved && std::all_of(v_gap.begin(), v_gap.end(), strictly_decreasing);
    bool increasing = all_solved;
    for (std::size_t k = 0; k < i_stars.size(); ++k) {
        if (!(i_stars[k] < table.b_circ)) increasing = false;
        if (k > 0 && !(i_stars[k] > i_stars[k - 1])) increasing = false;
    }
    table.i_star_increases = increasing;
    return table;
}

}  // namespace infctl
