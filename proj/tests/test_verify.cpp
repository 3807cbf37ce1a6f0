#include <doctest.h>

#include <cstdlib>
#include <memory>
#include <vector>

#include "infctl/errors.hpp"
#include "infctl/model.hpp"
#include "infctl/verify.hpp"

using namespace infctl;

namespace {

std::shared_ptr<const BoundaryTable> table() {
    static const auto t = std::make_shared<const BoundaryTable>(
        solve_boundary(ModelParams{}, default_boundary_extent(ModelParams{}), 1e-4));
    return t;
}

}  // namespace

TEST_CASE("estimate from samples") {
    const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
    const PayoffEstimate e = estimate_from(s);
    CHECK(e.mean == 2.5);
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(e.ci95_low == doctest::Approx(2.5 - 1.96 * e.std_error));
    CHECK(e.n_paths == 4);
}

TEST_CASE("worker count never changes the samples") {
    SimConfig cfg;
    cfg.horizon = 1.0;
    cfg.dt = 1e-3;
    const Policy policy = OptimalReflection{table()};
    setenv("INFCTL_WORKERS", "1", 1);
    const auto one = mc_payoff_samples(ModelParams{}, policy, 0.5, 0.2, 101, cfg);
    setenv("INFCTL_WORKERS", "3", 1);
    const auto three = mc_payoff_samples(ModelParams{}, policy, 0.5, 0.2, 101, cfg);
    unsetenv("INFCTL_WORKERS");
    CHECK(one == three);
    CHECK_THROWS_AS((void)mc_payoff(ModelParams{}, policy, 0.5, 0.2, 99, cfg), DomainError);
}

TEST_CASE("immediate payout estimate has no variance") {
    SimConfig cfg;
    cfg.horizon = 1.0;
    cfg.dt = 1e-3;
    ModelParams p;
    p.mu = -1.0;
    const PayoffEstimate e = mc_payoff(p, ImmediatePayout{}, 1.2, 0.3, 100, cfg);
    CHECK(e.std_error == 0.0);
    CHECK(e.mean == doctest::Approx(value(1.2, 0.3, p)).epsilon(1e-14));
}

TEST_CASE("residual grid on a coarse mesh") {
    const ResidualReport r = hjb_residual_grid(ModelParams{}, *table(), 60, 60);
    CHECK(r.waiting_points > 0);
    CHECK(r.action_points > 0);
    CHECK(r.max_pde_residual_waiting < 1e-12);
    CHECK(r.max_vi_slack_action <= 1e-12);
    CHECK(r.min_gradient_gap >= -1e-12);
    CHECK(r.dirichlet_value == 0.0);
    CHECK_THROWS_AS((void)hjb_residual_grid(ModelParams{}, *table(), 10, 60), DomainError);
}

TEST_CASE("smooth fit converges at second order") {
    const SmoothFitReport r = smooth_fit_check(ModelParams{}, *table(), 5);
    REQUIRE(r.rows.size() == 5);
    for (const auto& row : r.rows) {
        CHECK(row.i > 0.0);
        CHECK(row.i < table()->i_star());
        CHECK(row.vx_order == doctest::Approx(2.0).epsilon(0.02));
        CHECK(row.vxx_order == doctest::Approx(2.0).epsilon(0.02));
    }
}

TEST_CASE("q sweep") {
    const std::vector<double> ladder{0.5, 0.1, 0.02};
    const std::vector<double> probes{0.1, 0.3};
    const QSweepTable t = q_sweep(ModelParams{}, ladder, probes, 0.7, 1e-3);
    CHECK(t.rows.size() == 3);
    CHECK(t.boundary_converges);
    CHECK(t.value_converges);
    CHECK(t.i_star_increases);
    CHECK(t.classical_at_probe == classical_value(0.7, ModelParams{}));
    const std::vector<double> rising{0.1, 0.5};
    CHECK_THROWS_AS((void)q_sweep(ModelParams{}, rising, probes, 0.7), DomainError);
    const std::vector<double> tiny{1e-5};
    CHECK_THROWS_AS((void)q_sweep(ModelParams{}, tiny, probes, 0.7), DomainError);
}

TEST_CASE("dominance test on a small sample") {
    SimConfig cfg;
    cfg.horizon = 6.0;
    cfg.dt = 1e-3;
    const std::vector<double> factors{0.5};
    const DominanceReport d = dominance_test(ModelParams{}, table(), 0.7, 0.1, factors, 2000, cfg);
    CHECK(d.perturbed.size() == 2);
    CHECK(d.value == doctest::Approx(value(0.7, 0.1, ModelParams{}, table().get())));
    CHECK(d.all_dominated());
    CHECK(d.some_strictly_below());
}
