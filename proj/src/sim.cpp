#include "infctl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "infctl/errors.hpp"
#include "infctl/model.hpp"
#include "infctl/rng.hpp"

namespace infctl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kNoBarrier = std::numeric_limits<double>::infinity();

void check_start(double x0, double i0) {
    if (!std::isfinite(x0) || !std::isfinite(i0) || i0 < 0.0 || x0 < i0) {
        throw DomainError(fmt::format("start ({}, {}) is outside the state space", x0, i0));
    }
}

template <class Barrier>
void run_steps(const ModelParams& params, const SimConfig& cfg, double x, double inf,
               Barrier&& barrier, SamplePath& out) {
    const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
    const double drift = params.mu * cfg.dt;
    const double diffusion = params.eta * std::sqrt(cfg.dt);
    const double discount_step = params.rho * cfg.dt;
    NormalStream normals(cfg.seed, cfg.path_index);
    double discount = 0.0;

    for (std::size_t k = 1; k <= n_steps; ++k) {
        double next = x + drift + diffusion * normals.at(k);
        double paid = 0.0;
        const double level = barrier(inf);
        if (next > level) {
            paid = next - level;
            next = level;
        }
        inf = std::min(inf, next);
        discount += discount_step;
        if (!std::isfinite(next)) {
            throw NumericalError(fmt::format("non-finite surplus at step {}", k));
        }
        out.times.push_back(static_cast<double>(k) * cfg.dt);
        out.x.push_back(next);
        out.inf.push_back(inf);
        out.dc.push_back(paid);
        out.discount_log.push_back(discount);
        if (next <= 0.0) {
            out.absorbed_at = k;
            return;
        }
        x = next;
    }
}

}  // namespace

std::string describe(const Policy& policy) {
    return std::visit(
        Overloaded{
            [](const NullPolicy&) { return std::string("null"); },
            [](const ImmediatePayout&) { return std::string("immediate"); },
            [](const ConstantBarrier& p) { return fmt::format("barrier({:.6g})", p.level); },
            [](const OptimalReflection& p) {
                return p.scale == 1.0 ? std::string("optimal")
                                      : fmt::format("optimal-scaled({:.6g})", p.scale);
            },
        },
        policy);
}

void SimConfig::validate() const {
    if (!(dt > 0.0) || !(horizon > 0.0) || !std::isfinite(horizon)) {
        throw DomainError("dt and horizon must be positive and finite");
    }
    if (dt > horizon / 100.0) {
        throw DomainError(fmt::format("dt = {} exceeds horizon/100 = {}", dt, horizon / 100.0));
    }
}

double default_horizon(const ModelParams& params, std::size_t n_paths) {
    params.validate();
    const double n = static_cast<double>(std::max<std::size_t>(n_paths, 1));
    return std::max(1.0, std::log(40.0 * std::sqrt(n)) / params.rho);
}

double truncation_bound(const ModelParams& params, double horizon) {
    return std::exp(-params.rho * horizon) * std::max(params.mu, 0.0) / params.rho;
}

double initial_lump(double x, double i, const BoundaryTable& boundary) {
    switch (classify_region(x, i, boundary)) {
        case Region::WaitC: return 0.0;
        case Region::ActD1: return x - boundary.at(i);
        case Region::ActD2: return x - boundary.i_star();
        case Region::Absorbed: break;
    }
    throw DomainError("no initial lump from an absorbed state");
}

void simulate_path_into(const ModelParams& params, const Policy& policy, double x0, double i0,
                        const SimConfig& cfg, SamplePath& out) {
    params.validate();
    cfg.validate();
    check_start(x0, i0);

    double lump = 0.0;
    std::visit(
        Overloaded{
            [](const NullPolicy&) {},
            [&](const ImmediatePayout&) { lump = x0; },
            [&](const ConstantBarrier& p) {
                if (!(p.level >= 0.0)) throw PolicyError("barrier level must be >= 0");
                lump = std::max(0.0, x0 - p.level);
            },
            [&](const OptimalReflection& p) {
                if (!p.boundary) throw PolicyError("optimal reflection needs a boundary");
                if (!(p.boundary->params() == params)) {
                    throw PolicyError("boundary was solved for different model parameters");
                }
                if (!(p.scale > 0.0)) throw PolicyError("boundary scale must be positive");
                if (x0 <= 0.0) return;
                if (p.scale == 1.0) {
                    lump = initial_lump(x0, i0, *p.boundary);
                } else {
                    lump = std::max(0.0, x0 - p.scale * p.boundary->at(i0));
                }
            },
        },
        policy);
    if (!(x0 - lump >= 0.0)) throw PolicyError("initial lump overshoots the absorption level");

    out.clear();
    out.dt = cfg.dt;
    out.jump_bound = 0.0;
    double x = x0;
    double inf = i0;
    if (lump > 0.0) {
        out.jumps.push_back({0, x0, i0, lump});
        x = x0 - lump;
        inf = std::min(inf, x);
    }
    out.times.push_back(0.0);
    out.x.push_back(x);
    out.inf.push_back(inf);
    out.dc.push_back(0.0);
    out.discount_log.push_back(0.0);
    if (x <= 0.0) {
        out.absorbed_at = 0;
        return;
    }

    std::visit(
        Overloaded{
            [&](const NullPolicy&) {
                run_steps(params, cfg, x, inf, [](double) { return kNoBarrier; }, out);
            },
            [&](const ImmediatePayout&) {
                // Unreachable for x0 > 0: the lump already absorbed the path.
                run_steps(params, cfg, x, inf, [](double) { return 0.0; }, out);
            },
            [&](const ConstantBarrier& p) {
                run_steps(params, cfg, x, inf, [level = p.level](double) { return level; },
                          out);
            },
            [&](const OptimalReflection& p) {
                const BoundaryTable& table = *p.boundary;
                const double scale = p.scale;
                run_steps(
                    params, cfg, x, inf,
                    [&table, scale](double i) {
                        const double level = scale * table.at(i);
                        if (level < 0.0) throw PolicyError("reflection barrier below zero");
                        return level;
                    },
                    out);
            },
        },
        policy);
}

SamplePath simulate_path(const ModelParams& params, const Policy& policy, double x0, double i0,
                         const SimConfig& cfg) {
    SamplePath out;
    simulate_path_into(params, policy, x0, i0, cfg, out);
    return out;
}

SupportReport path_support_check(const SamplePath& path, const BoundaryTable& boundary) {
    const ModelParams& params = boundary.params();
    SupportReport report;
    report.tolerance = params.mu * path.dt + 4.0 * params.eta * std::sqrt(path.dt);
    if (path.x.empty()) return report;

    const std::size_t last = path.last_index();
    for (std::size_t k = 1; k <= last; ++k) {
        if (!(path.dc[k] > 0.0)) continue;
        ++report.control_steps;
        const double i = path.inf[k];
        const double deviation = (i >= 0.0 && i <= boundary.i_max())
                                     ? std::fabs(path.x[k] - boundary.at(i))
                                     : std::numeric_limits<double>::infinity();
        report.max_violation = std::max(report.max_violation, deviation);
        if (deviation > report.tolerance) ++report.off_barrier_steps;
    }

    if (path.jumps.size() > 1) {
        report.jumps_ok = false;
    } else if (path.jumps.size() == 1) {
        const JumpEvent& j = path.jumps.front();
        const bool at_start = j.time_index == 0 && j.x_pre > 0.0 && j.i_pre >= 0.0 &&
                              j.x_pre >= j.i_pre && j.i_pre <= boundary.i_max();
        report.jumps_ok =
            at_start && std::fabs(j.delta_d - initial_lump(j.x_pre, j.i_pre, boundary)) <=
                            1e-12 * std::max(1.0, j.x_pre);
    } else if (path.x[0] > 0.0 && path.inf[0] <= boundary.i_max()) {
        report.jumps_ok = initial_lump(path.x[0], path.inf[0], boundary) == 0.0;
    }
    return report;
}

}  // namespace infctl
