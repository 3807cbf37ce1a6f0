#include <doctest.h>

#include <cmath>

#include "infctl/errors.hpp"
#include "infctl/model.hpp"
#include "infctl/params.hpp"

using namespace infctl;

namespace {
const double kSqrt3 = std::sqrt(3.0);
// Closed forms for mu = eta = rho = 1: the roots are -1 -+ sqrt(3) and the
// barrier collapses to ln(2 + sqrt 3) / sqrt 3.
const double kAlpha = -1.0 - kSqrt3;
const double kBeta = kSqrt3 - 1.0;
const double kBarrier = std::log(2.0 + kSqrt3) / kSqrt3;
}  // namespace

TEST_CASE("roots of the unit model") {
    const CharRoots r = char_roots(ModelParams{});
    CHECK(r.alpha == doctest::Approx(kAlpha).epsilon(1e-15));
    CHECK(r.beta == doctest::Approx(kBeta).epsilon(1e-15));
    REQUIRE(r.b_circ);
    CHECK(std::fabs(*r.b_circ - kBarrier) < 1e-15);
    CHECK(std::fabs(*r.b_circ - 0.76034599630094634753) < 1e-15);
}

TEST_CASE("roots for negative drift keep their order and drop the barrier") {
    ModelParams p;
    p.mu = -2.0;
    p.eta = 0.5;
    const CharRoots r = char_roots(p);
    CHECK(r.alpha < 0.0);
    CHECK(r.beta > 0.0);
    CHECK_FALSE(r.b_circ);
    for (double th : {r.alpha, r.beta}) {
        CHECK(0.5 * p.eta * p.eta * th * th + p.mu * th - p.rho ==
              doctest::Approx(0.0).scale(10.0).epsilon(1e-13));
    }
}

TEST_CASE("roots stay accurate when the drift dominates") {
    ModelParams p;
    p.mu = 1e4;
    p.eta = 1e-2;
    p.rho = 1e-3;
    const CharRoots r = char_roots(p);
    // beta ~ rho / mu: the naive formula loses every digit here.
    CHECK(r.beta == doctest::Approx(1e-7).epsilon(1e-9));
    CHECK(0.5 * p.eta * p.eta * r.beta * r.beta + p.mu * r.beta - p.rho ==
          doctest::Approx(0.0).scale(1e-3).epsilon(1e-12));
}

TEST_CASE("barrier formula is symmetric in its arguments") {
    CHECK(barrier_from_roots(kAlpha, kBeta) == barrier_from_roots(kBeta, kAlpha));
}

TEST_CASE("parameter validation") {
    ModelParams p;
    p.eta = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = ModelParams{};
    p.q = -0.1;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = ModelParams{};
    p.rho = std::nan("");
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("classical value: smooth pasting at the barrier") {
    const ModelParams p;
    const double b = kBarrier;
    CHECK(classical_value(0.0, p) == 0.0);
    const auto at = classical_value_derivatives(b, p);
    CHECK(at.v == doctest::Approx(p.mu / p.rho).epsilon(1e-14));
    CHECK(at.v_x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::fabs(at.v_xx) < 1e-13);
    // Linear above the barrier.
    CHECK(classical_value(b + 2.0, p) == doctest::Approx(2.0 + p.mu / p.rho).epsilon(1e-14));
    // Below it, (L - rho) V = 0.
    for (double x : {0.05, 0.3, 0.7}) {
        const auto d = classical_value_derivatives(x, p);
        CHECK(std::fabs(0.5 * d.v_xx + d.v_x - d.v) < 1e-14);
    }
    CHECK_THROWS_AS((void)classical_value(-0.1, p), DomainError);
}

TEST_CASE("classical value without positive drift pays out at once") {
    ModelParams p;
    p.mu = -0.5;
    CHECK(classical_value(1.7, p) == 1.7);
    p.mu = 0.0;
    CHECK(classical_value(0.4, p) == 0.4);
}

TEST_CASE("value function against the independent oracle") {
    const ModelParams p;
    const BoundaryTable table = solve_boundary(p, default_boundary_extent(p), 1e-4);
    // Frozen from tests/oracle/boundary_oracle.py (SciPy DOP853 + mpmath).
    struct Case {
        double x, i, v;
        Region region;
    };
    const Case cases[] = {
        {0.5, 0.2, 0.67462566982117647, Region::WaitC},
        {0.7, 0.1, 0.89634815938288834, Region::WaitC},
        {1.0, 0.2, 1.1323481941101042, Region::ActD1},
        {1.0, 0.7, 1.005120283110229, Region::ActD2},
    };
    for (const auto& c : cases) {
        CAPTURE(c.x);
        CAPTURE(c.i);
        CHECK(classify_region(c.x, c.i, table) == c.region);
        // D2 inherits the interpolation error of i_star (~1e-10); the rest is exact.
        const double tol = c.region == Region::ActD2 ? 1e-9 : 1e-12;
        CHECK(std::fabs(value(c.x, c.i, p, &table) - c.v) < tol);
    }
}

TEST_CASE("value function is continuous across region boundaries") {
    const ModelParams p;
    const BoundaryTable table = solve_boundary(p, default_boundary_extent(p), 1e-4);
    const double eps = 1e-9;
    for (double i : {0.05, 0.3, 0.55}) {
        const double b = table.at(i);
        CHECK(value(b - eps, i, p, &table) == doctest::Approx(value(b, i, p, &table)).epsilon(1e-8));
        const double gap = gradient_constraint_gap(b - 0.01, i, p, table);
        CHECK(gap > 0.0);
        CHECK(gradient_constraint_gap(b + 0.01, i, p, table) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    }
    const double is = table.i_star();
    CHECK(value(1.2, is - eps, p, &table) == doctest::Approx(value(1.2, is, p, &table)).epsilon(1e-8));
}

TEST_CASE("value function: drift sign and q = 0 branches") {
    ModelParams p;
    p.mu = -1.0;
    const double x = 1.3, i = 0.4;
    CHECK(value(x, i, p) == doctest::Approx(std::exp(-p.q * i) * (x - i - 1 / p.q) + 1 / p.q));
    CHECK(value_derivatives(x, i, p).region == Region::ActD2);
    const ModelParams zero = ModelParams{}.with_q(0.0);
    CHECK(value(0.6, 0.2, zero) == classical_value(0.6, zero));
}

TEST_CASE("value function preconditions") {
    const ModelParams p;
    CHECK_THROWS_AS((void)value(0.5, 0.2, p), ConfigError);  // no boundary
    const BoundaryTable table = solve_boundary(p, default_boundary_extent(p), 1e-3);
    CHECK_THROWS_AS((void)value(0.1, 0.2, p, &table), DomainError);  // x < i
    CHECK_THROWS_AS((void)value(0.5, 0.2, p.with_q(0.3), &table), ConfigError);
    CHECK(value(0.0, 0.0, p, &table) == 0.0);
}

TEST_CASE("region names") {
    CHECK(to_string(Region::WaitC) == "C");
    CHECK(to_string(Region::ActD1) == "D1");
    CHECK(to_string(Region::ActD2) == "D2");
    CHECK(to_string(Region::Absorbed) == "absorbed");
}
