#include <doctest.h>

#include <cmath>
#include <memory>

#include "infctl/errors.hpp"
#include "infctl/model.hpp"
#include "infctl/rng.hpp"
#include "infctl/sim.hpp"
#include "infctl/verify.hpp"

using namespace infctl;

namespace {

std::shared_ptr<const BoundaryTable> table() {
    static const auto t = std::make_shared<const BoundaryTable>(
        solve_boundary(ModelParams{}, default_boundary_extent(ModelParams{}), 1e-4));
    return t;
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
          C{0x6627e8d5U, 0xe169c58dU, 0xbc57ac4cU, 0x9b00dbd8U});
    CHECK(Philox4x32::generate({0xffffffffU, 0xffffffffU, 0xffffffffU, 0xffffffffU},
                               {0xffffffffU, 0xffffffffU}) ==
          C{0x408f276dU, 0x41c83b0eU, 0xa20bc7c6U, 0x6d5451fdU});
    CHECK(Philox4x32::generate({0x243f6a88U, 0x85a308d3U, 0x13198a2eU, 0x03707344U},
                               {0xa4093822U, 0x299f31d0U}) ==
          C{0xd16cfe09U, 0x94fdccebU, 0x5001e420U, 0x24126ea1U});
}

TEST_CASE("normal stream moments and addressability") {
    NormalStream s(12345, 6);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double z = s.at(static_cast<std::uint64_t>(k));
        sum += z;
        sq += z * z;
    }
    CHECK(std::fabs(sum / n) < 4.0 / std::sqrt(n));
    CHECK(std::fabs(sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    NormalStream fresh(12345, 6);
    CHECK(fresh.at(777) == s.at(777));
    CHECK(NormalStream(12345, 7).at(777) != s.at(777));
}

TEST_CASE("initial lump in each region") {
    const auto& t = *table();
    CHECK(initial_lump(0.5, 0.2, t) == 0.0);
    CHECK(initial_lump(1.0, 0.2, t) == doctest::Approx(1.0 - t.at(0.2)));
    CHECK(initial_lump(1.0, 0.7, t) == doctest::Approx(1.0 - t.i_star()));
    CHECK_THROWS_AS((void)initial_lump(0.0, 0.0, t), DomainError);
}

TEST_CASE("immediate payout jumps everything at once") {
    const SamplePath p = simulate_path(ModelParams{}, ImmediatePayout{}, 1.3, 0.4, SimConfig{});
    REQUIRE(p.jumps.size() == 1);
    CHECK(p.jumps[0].delta_d == 1.3);
    REQUIRE(p.absorbed_at);
    CHECK(*p.absorbed_at == 0);
    CHECK(p.x[0] == 0.0);
    CHECK(p.inf[0] == 0.0);
}

TEST_CASE("deterministic drift crosses zero on schedule") {
    ModelParams p;
    p.mu = -0.5;
    p.eta = 1e-12;
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 10.0;
    const SamplePath path = simulate_path(p, NullPolicy{}, 1.0, 1.0, cfg);
    REQUIRE(path.absorbed_at);
    CHECK(static_cast<double>(*path.absorbed_at) ==
          doctest::Approx(std::ceil((1.0 / 0.5) / cfg.dt)).epsilon(1e-3));
}

TEST_CASE("optimal reflection keeps the state in the waiting region") {
    SimConfig cfg;
    cfg.horizon = 3.0;
    const auto& t = *table();
    for (std::uint64_t n = 0; n < 20; ++n) {
        cfg.path_index = n;
        const SamplePath p = simulate_path(ModelParams{}, OptimalReflection{table()}, 0.5, 0.2, cfg);
        bool inside = true, monotone = true;
        for (std::size_t k = 0; k <= p.last_index(); ++k) {
            inside = inside && p.inf[k] <= p.x[k] && (k == p.last_index() || p.x[k] <= t.at(p.inf[k]));
            monotone = monotone && (k == 0 || p.inf[k] <= p.inf[k - 1]);
        }
        CHECK(inside);
        CHECK(monotone);
        CHECK(path_support_check(p, t).compliant());
    }
}

TEST_CASE("paths are reproducible in isolation") {
    SimConfig cfg;
    cfg.horizon = 1.0;
    cfg.path_index = 41;
    const SamplePath a = simulate_path(ModelParams{}, OptimalReflection{table()}, 1.0, 0.7, cfg);
    const SamplePath b = simulate_path(ModelParams{}, OptimalReflection{table()}, 1.0, 0.7, cfg);
    CHECK(a.x == b.x);
    CHECK(a.inf == b.inf);
    CHECK(a.dc == b.dc);
    REQUIRE(a.jumps.size() == 1);
    CHECK(a.jumps[0].delta_d == doctest::Approx(1.0 - table()->i_star()));
}

TEST_CASE("support check flags a constant barrier") {
    SimConfig cfg;
    cfg.horizon = 2.0;
    const SamplePath p = simulate_path(ModelParams{}, ConstantBarrier{0.5}, 0.45, 0.1, cfg);
    const SupportReport rep = path_support_check(p, *table());
    CHECK(rep.control_steps > 0);
    CHECK_FALSE(rep.compliant());
    CHECK(rep.max_violation > rep.tolerance);
}

TEST_CASE("null policy: mean surplus grows with the drift") {
    ModelParams p;
    p.mu = 0.3;
    SimConfig cfg;
    cfg.dt = 0.02;
    cfg.horizon = 2.0;
    const std::size_t n = 100000;
    double sum = 0.0, sq = 0.0;
    SamplePath path;
    for (std::size_t k = 0; k < n; ++k) {
        cfg.path_index = k;
        simulate_path_into(p, NullPolicy{}, 20.0, 20.0, cfg, path);
        sum += path.x.back();
        sq += path.x.back() * path.x.back();
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::fabs(mean - (20.0 + p.mu * cfg.horizon)) < 3.0 * se);
}

TEST_CASE("simulation preconditions") {
    SimConfig cfg;
    cfg.horizon = 1.0;
    cfg.dt = 0.02;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.dt = 1e-3;
    CHECK_THROWS_AS((void)simulate_path(ModelParams{}, NullPolicy{}, 0.2, 0.5, cfg), DomainError);
    CHECK_THROWS_AS((void)simulate_path(ModelParams{}, OptimalReflection{}, 0.5, 0.2, cfg),
                    PolicyError);
    CHECK_THROWS_AS(
        (void)simulate_path(ModelParams{}.with_q(0.4), OptimalReflection{table()}, 0.5, 0.2, cfg),
        PolicyError);
    CHECK_THROWS_AS((void)simulate_path(ModelParams{}, ConstantBarrier{-1.0}, 0.5, 0.2, cfg),
                    PolicyError);
}

TEST_CASE("horizon and truncation") {
    const ModelParams p;
    const double T = default_horizon(p, 100000);
    CHECK(T == doctest::Approx(std::log(40.0 * std::sqrt(1e5))));
    CHECK(truncation_bound(p, T) == doctest::Approx(std::exp(-T)));
    CHECK(describe(OptimalReflection{table(), 1.2}) == "optimal-scaled(1.2)");
    CHECK(describe(ConstantBarrier{0.5}) == "barrier(0.5)");
}
