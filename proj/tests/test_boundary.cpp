#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "infctl/boundary.hpp"
#include "infctl/errors.hpp"

using namespace infctl;
namespace fs = std::filesystem;

namespace {

// Frozen from tests/oracle/boundary_oracle.py (SciPy DOP853, rtol 1e-13).
constexpr double kIStar = 0.61750270425392451;
constexpr double kB03 = 0.73173556656199001;
constexpr double kB10 = 0.38891490802788298;

const BoundaryTable& reference() {
    static const BoundaryTable t = solve_boundary(ModelParams{}, 5 * 0.76034599630094635, 1e-4);
    return t;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("flow vanishes at the start and tends to its far-field limits") {
    const ModelParams p;
    const BoundaryFlow f(p);
    CHECK(std::fabs(f(*char_roots(p).b_circ, 0.0)) < 1e-14);
    CHECK(f(-50.0, 50.0) == doctest::Approx(-p.q / f.beta()).epsilon(1e-14));
    CHECK(f(50.0, 0.0) == doctest::Approx(-p.q / f.alpha()).epsilon(1e-14));
    // No overflow where the textbook form would evaluate exp(1e3).
    CHECK(std::isfinite(f(-1e3, 1e3)));
    CHECK(std::isfinite(f(1e3, 0.0)));
    CHECK(flow(0.4, 0.1, p) == f(0.4, 0.1));
}

TEST_CASE("solved boundary against the independent oracle") {
    const BoundaryTable& t = reference();
    CHECK(t.values().front() == t.b_circ());
    CHECK(t.b_circ() == *char_roots(ModelParams{}).b_circ);
    CHECK(std::fabs(t.at(0.3) - kB03) < 1e-12);
    CHECK(std::fabs(t.at(1.0) - kB10) < 1e-12);
    // Linear interpolation between nodes limits i_star to about h^2 |b''| / 8.
    CHECK(std::fabs(t.i_star() - kIStar) < 1e-9);
    CHECK(std::fabs(t.at(t.i_star()) - t.i_star()) < 1e-12);
    CHECK(critical_infimum(t) == t.i_star());
    CHECK(boundary_at(t, 0.3) == t.at(0.3));
}

TEST_CASE("grid ends exactly on i_max with a partial last step") {
    const BoundaryTable t = solve_boundary(ModelParams{}, 1.05, 0.1);
    CHECK(t.grid().size() == 12);
    CHECK(t.grid().back() == 1.05);
    CHECK(t.grid()[10] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interpolation is exact at nodes and monotone between them") {
    const BoundaryTable t = solve_boundary(ModelParams{}, 3.9, 0.01);
    for (std::size_t k = 0; k + 1 < t.grid().size(); k += 37) {
        CHECK(t.at(t.grid()[k]) == t.values()[k]);
        const double mid = t.at(0.5 * (t.grid()[k] + t.grid()[k + 1]));
        CHECK(mid < t.values()[k]);
        CHECK(mid > t.values()[k + 1]);
    }
    CHECK_THROWS_AS((void)t.at(-1e-12), DomainError);
    CHECK_THROWS_AS((void)t.at(3.9 + 1e-9), DomainError);
    CHECK(t.at(3.9) == t.values().back());
}

TEST_CASE("preconditions of the solver") {
    ModelParams p;
    CHECK_THROWS_AS((void)solve_boundary(p, 4.0, 0.5), DomainError);  // step > i_max / 10
    CHECK_THROWS_AS((void)solve_boundary(p, 0.5, 0.01), ConfigError);  // stops before b_circ
    CHECK_THROWS((void)solve_boundary(p.with_q(0.0), 4.0, 0.01));
    p.mu = -1.0;
    CHECK_THROWS((void)solve_boundary(p, 4.0, 0.01));
}

TEST_CASE("write and read back bit for bit; identical runs give identical bytes") {
    const fs::path dir = fs::temp_directory_path() / "infctl_boundary_test";
    fs::create_directories(dir);
    const BoundaryTable t = solve_boundary(ModelParams{}, 3.9, 1e-3);
    write_boundary(t, dir / "a.csv", dir / "a.meta");
    write_boundary(solve_boundary(ModelParams{}, 3.9, 1e-3), dir / "b.csv", dir / "b.meta");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.meta") == slurp(dir / "b.meta"));

    const BoundaryTable back = read_boundary(dir / "a.csv", dir / "a.meta");
    CHECK(back.params() == t.params());
    CHECK(back.step() == t.step());
    CHECK(back.i_star() == t.i_star());
    REQUIRE(back.values().size() == t.values().size());
    bool same = true;
    for (std::size_t k = 0; k < t.values().size(); ++k) {
        same = same && back.values()[k] == t.values()[k] && back.grid()[k] == t.grid()[k];
    }
    CHECK(same);

    // A sidecar for other parameters is rejected.
    std::string meta = slurp(dir / "a.meta");
    meta.replace(meta.find("q = 0.5"), 7, "q = 0.4");
    std::ofstream(dir / "c.meta", std::ios::binary) << meta;
    CHECK_THROWS((void)read_boundary(dir / "a.csv", dir / "c.meta"));
    CHECK_THROWS((void)read_boundary(dir / "missing.csv", dir / "a.meta"));
    fs::remove_all(dir);
}
