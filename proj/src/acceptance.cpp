#include "infctl/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "infctl/boundary.hpp"
#include "infctl/errors.hpp"
#include "infctl/model.hpp"
#include "infctl/sim.hpp"
#include "infctl/verify.hpp"

namespace infctl {

namespace {

// Tolerances of the acceptance criteria, one block per criterion.
constexpr double kRootResidual = 1e-12;
constexpr double kBarrierAgreement = 1e-12;
constexpr double kFirstSlope = 1e-3;
constexpr double kFarSlopeRelative = 0.05;
constexpr double kRatioLow = 12.0;
constexpr double kRatioHigh = 20.0;
constexpr double kCrossing = 1e-10;
constexpr double kPdeResidual = 1e-9;
constexpr double kVariationalSlack = 1e-10;
constexpr double kGradientGap = -1e-10;
constexpr double kNeumann = 1e-8;
constexpr double kSmoothOrder = 1.9;
constexpr double kSmoothDeviation = 1e-6;
constexpr double kOperatorTol = 1e-12;
constexpr double kDualityTol = 1e-14;
constexpr double kNegativeDriftTol = 1e-13;

// Runtime budgets in seconds, measured over the operation under test only.
constexpr double kBudgetRoots = 1e-3;
constexpr double kBudgetBoundary = 1.0;
constexpr double kBudgetCritical = 1e-2;
constexpr double kBudgetGrid = 1.0;
constexpr double kBudgetSmoothFit = 0.1;
constexpr double kBudgetOperators = 5.0;
constexpr double kBudgetNegativeDrift = 0.1;
constexpr double kBudgetSweep = 5.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Collects measurements and the first failing sub-check of one criterion.
class Check {
public:
    explicit Check(CriterionResult& r) : r_(r) { r_.passed = true; }

    void measure(std::string key, double v) { r_.measures.emplace_back(std::move(key), v); }

    void require(bool ok, const std::string& what) {
        if (!ok && r_.passed) {
            r_.passed = false;
            r_.note = what;
        }
    }

    void budget(double elapsed, double limit, const std::string& what) {
        r_.timings.emplace_back(what, elapsed);
        require(elapsed < limit, fmt::format("{} took {:.3g} s, budget {:.3g} s", what, elapsed,
                                             limit));
    }

private:
    CriterionResult& r_;
};

std::shared_ptr<const BoundaryTable> reference_boundary(const ModelParams& p) {
    return std::make_shared<const BoundaryTable>(
        solve_boundary(p, default_boundary_extent(p), 1e-4));
}

SimConfig mc_config(const AcceptanceOptions& o, const ModelParams& p) {
    SimConfig cfg;
    cfg.dt = o.dt;
    cfg.horizon = default_horizon(p, o.mc_paths);
    cfg.seed = o.seed;
    return cfg;
}

double relative_gap(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
}

// --- 1 ---------------------------------------------------------------------
void roots_and_barrier(const AcceptanceOptions& o, Check& c) {
    const ModelParams& p = o.params;
    const auto t0 = Clock::now();
    const CharRoots roots = char_roots(p);
    const double elapsed = seconds_since(t0);

    auto residual = [&](double th) {
        const double a = 0.5 * p.eta * p.eta * th * th;
        const double b = p.mu * th;
        return std::fabs(a + b - p.rho) / std::max({std::fabs(a), std::fabs(b), p.rho});
    };
    using Big = boost::multiprecision::cpp_bin_float_50;
    const Big mu = p.mu;
    const Big eta2 = Big(p.eta) * Big(p.eta);
    const Big disc = sqrt(mu * mu + 2 * Big(p.rho) * eta2);
    const Big alpha = (-mu - disc) / eta2;
    const Big beta = (-mu + disc) / eta2;
    const double b_hp = static_cast<double>(log((beta * beta) / (alpha * alpha)) / (alpha - beta));

    c.measure("alpha", roots.alpha);
    c.measure("beta", roots.beta);
    c.measure("residual_alpha", residual(roots.alpha));
    c.measure("residual_beta", residual(roots.beta));
    c.require(roots.alpha < 0.0 && roots.beta > 0.0, "root ordering alpha < 0 < beta");
    c.require(residual(roots.alpha) <= kRootResidual && residual(roots.beta) <= kRootResidual,
              "quadratic residual");
    c.require(roots.b_circ.has_value(), "barrier exists for mu > 0");
    if (!roots.b_circ) return;
    c.measure("b_circ", *roots.b_circ);
    c.measure("b_circ_error", std::fabs(*roots.b_circ - b_hp));
    c.require(std::fabs(*roots.b_circ - b_hp) <= kBarrierAgreement, "b_circ vs 50-digit value");
    c.require(*roots.b_circ > 0.0, "b_circ > 0");
    c.budget(elapsed, kBudgetRoots, "roots");
}

// --- 2 ---------------------------------------------------------------------
double max_node_error(const BoundaryTable& coarse, const BoundaryTable& ref, double shared_step) {
    const auto stride_c = static_cast<std::size_t>(std::lround(shared_step / coarse.step()));
    const auto stride_r = static_cast<std::size_t>(std::lround(shared_step / ref.step()));
    const auto n = static_cast<std::size_t>(std::floor(coarse.i_max() / shared_step + 1e-9));
    double err = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        err = std::max(err, std::fabs(coarse.values()[k * stride_c] - ref.values()[k * stride_r]));
    }
    return err;
}

void boundary_ode(const AcceptanceOptions& o, Check& c) {
    const ModelParams& p = o.params;
    const double b_circ = *char_roots(p).b_circ;
    const double i_max = default_boundary_extent(p);
    const double step = 1e-4;
    const auto t0 = Clock::now();
    const BoundaryTable table = solve_boundary(p, i_max, step);
    const double elapsed = seconds_since(t0);

    const auto b = table.values();
    const auto grid = table.grid();
    c.require(b.front() == b_circ, "b(0) == b_circ bit for bit");
    bool decreasing = true;
    bool below_shift = true;
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (k > 0 && !(b[k] < b[k - 1])) decreasing = false;
        if (!(b[k] < grid[k] + b_circ) && k > 0) below_shift = false;
    }
    c.require(decreasing, "strictly decreasing");
    c.require(below_shift, "b(i) < i + b_circ");

    const double first_slope = (b[1] - b[0]) / (grid[1] - grid[0]);
    const std::size_t n = b.size() - 1;
    // Last full step: the final one may be a partial step onto i_max.
    const double far_slope = (b[n - 1] - b[n - 2]) / (grid[n - 1] - grid[n - 2]);
    const double far_target = -p.q / char_roots(p).beta;
    c.measure("first_slope", first_slope);
    c.measure("far_slope", far_slope);
    c.measure("far_target", far_target);
    c.require(std::fabs(first_slope) < kFirstSlope, "first-node slope");
    c.require(std::fabs(far_slope - far_target) <= kFarSlopeRelative * std::fabs(far_target),
              "far-field slope");

    // Step halving against a fine reference at the nodes all three grids share.
    const double h = 0.04;
    const BoundaryTable coarse = solve_boundary(p, i_max, h);
    const BoundaryTable half = solve_boundary(p, i_max, h / 2);
    const BoundaryTable ref = solve_boundary(p, i_max, h / 16);
    const double e1 = max_node_error(coarse, ref, h);
    const double e2 = max_node_error(half, ref, h);
    const double ratio = e1 / e2;
    c.measure("error_h", e1);
    c.measure("error_h_over_2", e2);
    c.measure("halving_ratio", ratio);
    c.require(ratio >= kRatioLow && ratio <= kRatioHigh, "step-halving ratio");
    c.budget(elapsed, kBudgetBoundary, "solve");
}

// --- 3 ---------------------------------------------------------------------
void critical_level(const AcceptanceOptions& o, Check& c) {
    const auto table = reference_boundary(o.params);
    const auto t0 = Clock::now();
    const double i_star = critical_infimum(*table);
    const double elapsed = seconds_since(t0);
    const double crossing = std::fabs(table->at(i_star) - i_star);
    c.measure("i_star", i_star);
    c.measure("crossing_error", crossing);
    c.require(i_star > 0.0 && i_star < table->b_circ(), "i_star in (0, b_circ)");
    c.require(crossing <= kCrossing, "|b(i_star) - i_star|");
    c.budget(elapsed, kBudgetCritical, "bisection");
}

// --- 4 ---------------------------------------------------------------------
void variational_inequality(const AcceptanceOptions& o, Check& c) {
    const auto table = reference_boundary(o.params);
    const auto t0 = Clock::now();
    const ResidualReport r = hjb_residual_grid(o.params, *table, 200, 200);
    const double elapsed = seconds_since(t0);
    c.measure("pde_residual_C", r.max_pde_residual_waiting);
    c.measure("vi_slack_D", r.max_vi_slack_action);
    c.measure("min_gradient_gap", r.min_gradient_gap);
    c.measure("neumann", r.max_neumann_deviation);
    c.measure("v00", r.dirichlet_value);
    c.measure("waiting_points", static_cast<double>(r.waiting_points));
    c.measure("action_points", static_cast<double>(r.action_points));
    c.require(r.waiting_points > 0 && r.action_points > 0, "grid covers both regions");
    c.require(r.max_pde_residual_waiting <= kPdeResidual, "PDE residual on C");
    c.require(r.max_vi_slack_action <= kVariationalSlack, "(L - rho) v on D");
    c.require(r.min_gradient_gap >= kGradientGap, "gradient gap");
    c.require(r.max_neumann_deviation <= kNeumann, "Neumann condition");
    c.require(r.dirichlet_value == 0.0, "v(0, 0) == 0");
    c.budget(elapsed, kBudgetGrid, "grid");
}

// --- 5 ---------------------------------------------------------------------
void smooth_fit(const AcceptanceOptions& o, Check& c) {
    const auto table = reference_boundary(o.params);
    const auto t0 = Clock::now();
    const SmoothFitReport r = smooth_fit_check(o.params, *table, 20);
    const double elapsed = seconds_since(t0);
    c.measure("levels", static_cast<double>(r.rows.size()));
    c.measure("min_order", r.min_order);
    c.measure("max_deviation_h1e-5", r.max_fine_deviation);
    c.require(r.rows.size() == 20, "20 levels");
    c.require(r.min_order >= kSmoothOrder, "observed order");
    c.require(r.max_fine_deviation <= kSmoothDeviation, "deviation at h = 1e-5");
    c.budget(elapsed, kBudgetSmoothFit, "smooth_fit");
}

// --- 6 ---------------------------------------------------------------------
double total_mass(const SamplePath& path) {
    double m = 0.0;
    for (std::size_t k = 0; k <= path.last_index(); ++k) m += path.dc[k];
    for (const auto& j : path.jumps) m += j.delta_d;
    return m;
}

// Integral of an x-only field against D, jumps taken through the
// antiderivative G of g: int_0^d g(x - u) du = G(x) - G(x - d).
double x_only_oracle(const SamplePath& path, double rate, double (*g)(double),
                     double (*antiderivative)(double)) {
    double total = 0.0;
    for (std::size_t k = 0; k <= path.last_index(); ++k) {
        if (path.dc[k] > 0.0) total += std::exp(-rate * path.times[k]) * g(path.x[k]) * path.dc[k];
    }
    for (const auto& j : path.jumps) {
        total += std::exp(-rate * path.times[j.time_index]) *
                 (antiderivative(j.x_pre) - antiderivative(j.x_pre - j.delta_d));
    }
    return total;
}

double wave(double x) { return 2.0 + std::sin(x); }
double wave_antiderivative(double x) { return 2.0 * x - std::cos(x); }

double mixed_field(double y, double s) { return 1.0 + 0.5 * std::sin(y) * std::cos(0.7 * s); }

SamplePath two_node_path(double x, double i, double delta) {
    SamplePath p;
    p.dt = 0.01;
    p.times = {0.0, 0.01};
    const double x_post = x - delta;
    p.x = {x_post, x_post};
    p.inf = {std::min(i, x_post), std::min(i, x_post)};
    p.dc = {0.0, 0.0};
    p.jumps.push_back({0, x, i, delta});
    return p;
}

void operators(const AcceptanceOptions& o, Check& c) {
    const auto t0 = Clock::now();
    const ScalarField zero_rate = ScalarField::constant(0.0);
    const ScalarField one = ScalarField::constant(1.0);
    const double rate = 0.3;
    const ScalarField r = ScalarField::constant(rate);
    const ScalarField wave_field([](double x, double) { return wave(x); });
    const ScalarField g_sup(mixed_field);
    const ScalarField g_pulled([](double x, double i) { return mixed_field(-x, -i); });
    const ScalarField r_sup([](double y, double s) { return 0.2 + 0.05 * std::tanh(y + s); });
    const ScalarField r_pulled([](double x, double i) { return 0.2 + 0.05 * std::tanh(-x - i); });

    double mass_err = 0.0;
    double zhu_err = 0.0;
    double dual_diamond = 0.0;
    double dual_box = 0.0;
    double stieltjes_err = 0.0;
    std::size_t hockey = 0;
    for (std::size_t p = 0; p < o.operator_paths; ++p) {
        const SamplePath path = random_controlled_path(o.seed + p);
        for (const auto& j : path.jumps) hockey += j.delta_d > j.x_pre - j.i_pre ? 1 : 0;

        mass_err = std::max(mass_err, relative_gap(diamond_integral(path, zero_rate, one),
                                                   total_mass(path)));
        zhu_err = std::max(zhu_err,
                           relative_gap(diamond_integral(path, r, wave_field),
                                        x_only_oracle(path, rate, wave, wave_antiderivative)));

        const SamplePath sup = reflect_path(path);
        dual_diamond = std::max(dual_diamond,
                                relative_gap(diamond_integral_sup(sup, r_sup, g_sup),
                                             diamond_integral(path, r_pulled, g_pulled)));
        dual_box = std::max(dual_box, relative_gap(box_integral_sup(sup, r_sup, g_sup),
                                                   -box_integral(path, r_pulled, g_pulled)));

        // Uncontrolled path: both operators reduce to Stieltjes sums of the infimum.
        SamplePath free = path;
        free.jumps.clear();
        std::fill(free.dc.begin(), free.dc.end(), 0.0);
        double lowest = free.x[0];
        for (std::size_t k = 0; k < free.size(); ++k) {
            lowest = std::min(lowest, free.x[k]);
            free.inf[k] = std::min(free.inf[0], lowest);
        }
        free.absorbed_at.reset();
        const std::size_t last = free.last_index();
        const double inf_drop = free.inf[last] - free.inf[0];
        stieltjes_err = std::max(stieltjes_err, std::fabs(box_integral(free, zero_rate, one) -
                                                          inf_drop));
        const SamplePath free_sup = reflect_path(free);
        stieltjes_err = std::max(
            stieltjes_err, std::fabs(box_integral_sup(free_sup, zero_rate, one) -
                                     (free_sup.inf[last] - free_sup.inf[0])));
    }

    // Scenario (a): a jump inside the gap never touches the diagonal.
    const JumpEvent inside{0, 1.0, 0.4, 0.35};
    const JumpSplit sa = split_jump(inside, wave_field);
    const double box_a = box_integral(two_node_path(1.0, 0.4, 0.35), zero_rate, wave_field);
    // Scenario (b): a jump from the diagonal runs along it entirely.
    const JumpEvent diagonal{0, 0.6, 0.6, 0.25};
    const JumpSplit sb = split_jump(diagonal, one);
    const double box_b = box_integral(two_node_path(0.6, 0.6, 0.25), zero_rate, one);
    const double elapsed = seconds_since(t0);

    c.measure("paths", static_cast<double>(o.operator_paths));
    c.measure("hockey_stick_jumps", static_cast<double>(hockey));
    c.measure("mass_rel_error", mass_err);
    c.measure("zhu_rel_error", zhu_err);
    c.measure("duality_diamond", dual_diamond);
    c.measure("duality_box", dual_box);
    c.measure("stieltjes_error", stieltjes_err);
    c.require(hockey > 0, "random paths include hockey-stick jumps");
    c.require(mass_err <= kOperatorTol, "mass conservation");
    c.require(zhu_err <= kOperatorTol, "x-only reduction");
    c.require(dual_diamond <= kDualityTol && dual_box <= kDualityTol, "reflection duality");
    c.require(stieltjes_err <= kOperatorTol, "uncontrolled Stieltjes sums");
    c.require(sa.diagonal == 0.0 && box_a == 0.0, "scenario (a) diagonal terms vanish");
    c.require(sb.off_diagonal == 0.0, "scenario (b) off-diagonal term vanishes");
    c.require(std::fabs(sb.diagonal - 0.25) <= 1e-15 && std::fabs(box_b + 0.25) <= 1e-15,
              "scenario (b) whole mass on the diagonal");
    c.budget(elapsed, kBudgetOperators, "operators");
}

// --- 7 ---------------------------------------------------------------------
void negative_drift(const AcceptanceOptions& o, Check& c) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SimConfig cfg;
    cfg.dt = 1e-2;
    cfg.horizon = 1.0;
    double worst = 0.0;
    double worst_value = 0.0;
    const auto t0 = Clock::now();
    for (int n = 0; n < 100; ++n) {
        ModelParams p = o.params;
        p.mu = -(0.05 + 2.0 * u(rng));
        p.q = 0.05 + 2.0 * u(rng);
        const double i = 2.0 * u(rng);
        const double x = i + 3.0 * u(rng) + 1e-3;
        const SamplePath path = simulate_path(p, ImmediatePayout{}, x, i, cfg);
        const double payoff =
            payoff_functional(path, ScalarField::constant(p.rho), ScalarField::constant(0.0),
                              ScalarField::exp_affine(1.0, 0.0, -p.q), ScalarField::constant(0.0));
        const double closed = std::exp(-p.q * i) * (x - i - 1.0 / p.q) + 1.0 / p.q;
        worst = std::max(worst, std::fabs(payoff - closed));
        worst_value = std::max(worst_value, std::fabs(value(x, i, p) - closed));
    }
    const double elapsed = seconds_since(t0);
    c.measure("max_payoff_error", worst);
    c.measure("max_value_error", worst_value);
    c.require(worst <= kNegativeDriftTol, "immediate payout payoff");
    c.require(worst_value <= kNegativeDriftTol, "value function");
    c.budget(elapsed, kBudgetNegativeDrift, "cases");
}

// --- 8 ---------------------------------------------------------------------
void monte_carlo(const AcceptanceOptions& o, Check& c) {
    const ModelParams& p = o.params;
    const auto table = reference_boundary(p);
    const SimConfig cfg = mc_config(o, p);
    c.measure("paths", static_cast<double>(o.mc_paths));
    c.measure("horizon", cfg.horizon);
    c.measure("truncation_bound", truncation_bound(p, cfg.horizon));

    const std::pair<const char*, Probe> probes[] = {
        {"C", o.probe_waiting}, {"D1", o.probe_d1}, {"D2", o.probe_d2}};
    const Region expected[] = {Region::WaitC, Region::ActD1, Region::ActD2};
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& [name, pr] = probes[k];
        c.require(classify_region(pr.x, pr.i, *table) == expected[k],
                  fmt::format("probe {} lies in its region", name));
    }

    const DominanceReport dom =
        dominance_test(p, table, o.probe_waiting.x, o.probe_waiting.i, o.perturbations,
                       o.mc_paths, cfg);
    c.measure("C_value", dom.value);
    c.measure("C_mc", dom.optimal.estimate.mean);
    c.measure("C_se", dom.optimal.estimate.std_error);
    c.require(dom.optimal_matches, "optimal policy matches value on C");

    for (std::size_t k = 1; k < 3; ++k) {
        const auto& [name, pr] = probes[k];
        const double v = value(pr.x, pr.i, p, table.get());
        const PayoffEstimate e = mc_payoff(p, OptimalReflection{table, 1.0}, pr.x, pr.i,
                                           o.mc_paths, cfg);
        const double slack = std::max(3.0 * e.std_error, kMcRelativeSlack * std::fabs(v));
        c.measure(fmt::format("{}_value", name), v);
        c.measure(fmt::format("{}_mc", name), e.mean);
        c.measure(fmt::format("{}_se", name), e.std_error);
        c.require(std::fabs(e.mean - v) <= slack,
                  fmt::format("optimal policy matches value on {}", name));
    }

    for (const auto& row : dom.perturbed) {
        c.measure(row.policy, row.estimate.mean);
    }
    c.require(dom.all_dominated(), "perturbed policies stay below value + 3 se");
    c.require(dom.some_strictly_below(), "a perturbation falls below value - 3 se");
}

// --- 9 ---------------------------------------------------------------------
void zero_sensitivity(const AcceptanceOptions& o, Check& c) {
    const ModelParams p = o.params.with_q(0.0);
    const double b_circ = *char_roots(p).b_circ;
    bool exact = true;
    for (double x : {0.0, 0.1, 0.4, b_circ, 1.0, 2.5}) {
        for (double i : {0.0, 0.5 * x, x}) {
            if (value(x, i, p) != classical_value(x, p)) exact = false;
        }
    }
    c.require(exact, "value(x, i; 0) == classical_value(x)");

    const Probe pr = o.probe_waiting;
    const SimConfig cfg = mc_config(o, p);
    const PayoffEstimate e = mc_payoff(p, ConstantBarrier{b_circ}, pr.x, pr.i, o.mc_paths, cfg);
    const double v = classical_value(pr.x, p);
    const double slack = std::max(3.0 * e.std_error, kMcRelativeSlack * std::fabs(v));
    c.measure("classical_value", v);
    c.measure("mc", e.mean);
    c.measure("se", e.std_error);
    c.require(std::fabs(e.mean - v) <= slack, "constant barrier matches classical value");
}

// --- 10 --------------------------------------------------------------------
void stability(const AcceptanceOptions& o, Check& c) {
    const auto t0 = Clock::now();
    const QSweepTable t = q_sweep(o.params, o.q_ladder, o.q_sweep_probes, o.q_sweep_x);
    const double elapsed = seconds_since(t0);
    for (const auto& row : t.rows) {
        c.measure(fmt::format("i_star(q={})", row.q), row.i_star);
        c.require(row.error.empty(), fmt::format("solve at q = {}: {}", row.q, row.error));
    }
    c.measure("b_circ", t.b_circ);
    c.require(t.boundary_converges, "|b(i; q) - b_circ| decreasing");
    c.require(t.value_converges, "|v - V0| decreasing");
    c.require(t.i_star_increases, "i_star increasing below b_circ");
    c.budget(elapsed, kBudgetSweep, "sweep");
}

// --- 11 --------------------------------------------------------------------
void policy_support(const AcceptanceOptions& o, Check& c) {
    const auto table = reference_boundary(o.params);
    SimConfig cfg = mc_config(o, o.params);
    const Probe starts[] = {o.probe_waiting, o.probe_d1, o.probe_d2};
    std::size_t compliant = 0;
    std::size_t control_steps = 0;
    std::size_t jumps = 0;
    double worst = 0.0;
    SamplePath path;
    for (std::size_t n = 0; n < o.support_paths; ++n) {
        const Probe pr = starts[n % 3];
        cfg.path_index = n;
        simulate_path_into(o.params, OptimalReflection{table, 1.0}, pr.x, pr.i, cfg, path);
        const SupportReport rep = path_support_check(path, *table);
        compliant += rep.compliant() ? 1 : 0;
        control_steps += rep.control_steps;
        jumps += path.jumps.size();
        worst = std::max(worst, rep.max_violation);
    }
    c.measure("paths", static_cast<double>(o.support_paths));
    c.measure("compliant", static_cast<double>(compliant));
    c.measure("control_steps", static_cast<double>(control_steps));
    c.measure("initial_jumps", static_cast<double>(jumps));
    c.measure("max_violation", worst);
    c.require(control_steps > 0, "paths exercise the control");
    c.require(compliant == o.support_paths, "every path compliant");
}

struct Entry {
    int id;
    const char* title;
    void (*run)(const AcceptanceOptions&, Check&);
};

constexpr Entry kCriteria[] = {
    {1, "roots and barrier", roots_and_barrier},
    {2, "boundary ODE", boundary_ode},
    {3, "critical level", critical_level},
    {4, "variational inequality", variational_inequality},
    {5, "smooth fit", smooth_fit},
    {6, "path operators", operators},
    {7, "non-positive drift", negative_drift},
    {8, "Monte Carlo optimality", monte_carlo},
    {9, "q = 0 benchmark", zero_sensitivity},
    {10, "q -> 0 stability", stability},
    {11, "policy support", policy_support},
};

}  // namespace

std::string format_result(const CriterionResult& r, bool with_timings) {
    std::string line = fmt::format("{} {:>2} {}", r.passed ? "PASS" : "FAIL", r.id, r.title);
    for (const auto& [k, v] : r.measures) line += fmt::format("  {}={:.6g}", k, v);
    if (with_timings) {
        for (const auto& [k, v] : r.timings) line += fmt::format("  {}_s={:.3g}", k, v);
        line += fmt::format("  ({:.3f} s)", r.seconds);
    }
    if (!r.note.empty()) line += fmt::format("  [{}]", r.note);
    return line;
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> results;
    for (const Entry& e : kCriteria) {
        if (!options.only.empty() &&
            std::find(options.only.begin(), options.only.end(), e.id) == options.only.end()) {
            continue;
        }
        CriterionResult r;
        r.id = e.id;
        r.title = e.title;
        const auto t0 = Clock::now();
        try {
            Check c(r);
            e.run(options, c);
        } catch (const std::exception& ex) {
            r.passed = false;
            r.note = ex.what();
        }
        r.seconds = seconds_since(t0);
        if (on_result) on_result(r);
        results.push_back(std::move(r));
    }
    return results;
}

SamplePath random_controlled_path(std::uint64_t seed, std::size_t n_steps) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);

    SamplePath p;
    p.dt = 0.01;
    double x = 0.5 + 1.5 * u(rng);
    double inf = x - 0.5 * u(rng);
    auto push = [&](double t, double dc) {
        p.times.push_back(t);
        p.x.push_back(x);
        p.inf.push_back(inf);
        p.dc.push_back(dc);
    };
    push(0.0, 0.0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        x += 0.01 + 0.1 * z(rng);
        double dc = 0.0;
        if (u(rng) < 0.25) {
            dc = 0.05 * u(rng);
            x -= dc;
        }
        inf = std::min(inf, x);
        const double roll = u(rng);
        if (x > 0.0 && roll < 0.15) {
            // Mix jumps that stay inside the gap, overshoot it, or leave from the diagonal.
            const double gap = x - inf;
            double delta = gap * u(rng);
            if (gap == 0.0) {
                delta = 0.3 * u(rng);
            } else if (roll < 0.06) {
                delta = gap + 0.3 * u(rng);
            }
            if (delta > 0.0) {
                p.jumps.push_back({k, x, inf, delta});
                x -= delta;
                inf = std::min(inf, x);
            }
        }
        push(static_cast<double>(k) * p.dt, dc);
        if (x <= 0.0) {
            p.absorbed_at = k;
            break;
        }
    }
    p.discount_log.assign(p.size(), 0.0);
    return p;
}

}  // namespace infctl
