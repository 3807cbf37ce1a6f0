// infctl: command-line front end for the boundary solver, value tables,
// path simulation, the acceptance suite and the q-sweep.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "infctl/acceptance.hpp"
#include "infctl/boundary.hpp"
#include "infctl/config.hpp"
#include "infctl/errors.hpp"
#include "infctl/model.hpp"
#include "infctl/sim.hpp"
#include "infctl/verify.hpp"

namespace fs = std::filesystem;
using namespace infctl;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    return out;
}

void prepare_output(const ExperimentConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw ConfigError(fmt::format("cannot create '{}': {}", cfg.output_dir.string(),
                                      ec.message()));
    }
    open_output(cfg.output_dir / "effective.cfg") << render_config(cfg);
}

bool needs_boundary(const ModelParams& p) { return p.mu > 0.0 && p.q > 0.0; }

std::shared_ptr<const BoundaryTable> solve(const ExperimentConfig& cfg) {
    const double i_max =
        cfg.boundary.i_max > 0.0 ? cfg.boundary.i_max : default_boundary_extent(cfg.model);
    return std::make_shared<const BoundaryTable>(solve_boundary(cfg.model, i_max, cfg.boundary.step));
}

int cmd_roots(const ExperimentConfig& cfg) {
    const CharRoots r = char_roots(cfg.model);
    fmt::print("alpha = {:.17g}\nbeta = {:.17g}\n", r.alpha, r.beta);
    if (r.b_circ) {
        fmt::print("b_circ = {:.17g}\n", *r.b_circ);
    } else {
        fmt::print("b_circ = none\n");
    }
    return 0;
}

int cmd_boundary(const ExperimentConfig& cfg) {
    prepare_output(cfg);
    const auto table = solve(cfg);
    write_boundary(*table, cfg.output_dir / "boundary.csv", cfg.output_dir / "boundary.meta");
    fmt::print("b_circ = {:.17g}\ni_star = {:.17g}\nnodes = {}\n", table->b_circ(),
               table->i_star(), table->grid().size());
    return 0;
}

int cmd_value_table(const ExperimentConfig& cfg) {
    prepare_output(cfg);
    const ModelParams& p = cfg.model;
    std::shared_ptr<const BoundaryTable> table;
    if (needs_boundary(p)) table = solve(cfg);
    const auto roots = char_roots(p);
    const double x_max = cfg.grid.x_max > 0.0 ? cfg.grid.x_max
                         : roots.b_circ     ? 2.0 * *roots.b_circ
                                            : 2.0;
    const double i_max = cfg.grid.i_max > 0.0 ? cfg.grid.i_max
                         : table            ? 2.0 * table->i_star()
                                            : 1.0;
    auto out = open_output(cfg.output_dir / "value_table.csv");
    out << "x,i,region,value,gradient_gap\n";
    for (std::size_t j = 0; j < cfg.grid.ni; ++j) {
        const double i = i_max * static_cast<double>(j) / static_cast<double>(cfg.grid.ni - 1);
        for (std::size_t k = 0; k < cfg.grid.nx; ++k) {
            const double x = x_max * static_cast<double>(k) / static_cast<double>(cfg.grid.nx - 1);
            if (x < i) continue;
            const ValueDerivatives d = value_derivatives(x, i, p, table.get());
            out << fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g}\n", x, i, to_string(d.region),
                               d.v, d.v_x - std::exp(-p.q * i));
        }
    }
    return 0;
}

Policy make_policy(const ExperimentConfig& cfg) {
    const auto& s = cfg.sim;
    if (s.policy == "null") return NullPolicy{};
    if (s.policy == "immediate") return ImmediatePayout{};
    if (s.policy == "barrier") {
        double level = s.barrier;
        if (level == 0.0) {
            const auto b = char_roots(cfg.model).b_circ;
            if (!b) throw ConfigError("sim.barrier must be set when mu <= 0");
            level = *b;
        }
        return ConstantBarrier{level};
    }
    if (!needs_boundary(cfg.model)) {
        throw ConfigError("the optimal reflection policy needs mu > 0 and q > 0");
    }
    return OptimalReflection{solve(cfg), s.scale};
}

int cmd_simulate(const ExperimentConfig& cfg) {
    prepare_output(cfg);
    const Policy policy = make_policy(cfg);
    SimConfig sc;
    sc.dt = cfg.sim.dt;
    sc.horizon = cfg.sim.horizon > 0.0 ? cfg.sim.horizon
                                       : default_horizon(cfg.model, cfg.sim.paths);
    sc.seed = cfg.sim.seed;

    const ScalarField discount = ScalarField::constant(cfg.model.rho);
    const ScalarField none = ScalarField::constant(0.0);
    const ScalarField reward = ScalarField::exp_affine(1.0, 0.0, -cfg.model.q);

    auto paths = open_output(cfg.output_dir / "paths.csv");
    auto summary = open_output(cfg.output_dir / "payoffs.csv");
    paths << "path,t,X,I,D_cum\n";
    summary << "path,absorbed_at,payoff\n";
    SamplePath path;
    for (std::size_t n = 0; n < cfg.sim.paths; ++n) {
        sc.path_index = n;
        simulate_path_into(cfg.model, policy, cfg.sim.x0, cfg.sim.i0, sc, path);
        std::vector<double> jump_mass(path.size(), 0.0);
        for (const auto& j : path.jumps) jump_mass[j.time_index] += j.delta_d;
        const std::size_t last = path.last_index();
        double cumulative = 0.0;
        for (std::size_t k = 0; k <= last; ++k) {
            cumulative += path.dc[k] + jump_mass[k];
            if (k % cfg.sim.stride == 0 || k == last) {
                paths << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", n, path.times[k],
                                     path.x[k], path.inf[k], cumulative);
            }
        }
        const double payoff = payoff_functional(path, discount, none, reward, none);
        summary << fmt::format("{},{},{:.17g}\n", n,
                               path.absorbed_at ? fmt::format("{}", *path.absorbed_at) : "",
                               payoff);
    }
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
    prepare_output(cfg);
    auto report = open_output(cfg.output_dir / "verify_report.txt");
    bool all = true;
    run_acceptance(cfg.verify, [&](const CriterionResult& r) {
        all = all && r.passed;
        fmt::print("{}\n", format_result(r, true));
        std::fflush(stdout);
        report << format_result(r, false) << '\n';
    });
    report << (all ? "ALL PASS\n" : "SOME FAILED\n");
    return all ? 0 : 1;
}

int cmd_sweep_q(const ExperimentConfig& cfg) {
    prepare_output(cfg);
    const QSweepTable t = q_sweep(cfg.model, cfg.sweep.q_ladder, cfg.sweep.i_probes,
                                  cfg.sweep.x_probe, cfg.sweep.step);
    auto out = open_output(cfg.output_dir / "sweep_q.csv");
    out << "q,i_star";
    for (double i : t.i_probes) out << fmt::format(",b(i={:g})", i);
    for (double i : t.i_probes) out << fmt::format(",v(x={:g};i={:g})", t.x_probe, i);
    out << ",error\n";
    for (const auto& row : t.rows) {
        out << fmt::format("{:.17g},{:.17g}", row.q, row.i_star);
        for (double b : row.boundary_at_probes) out << fmt::format(",{:.17g}", b);
        for (double v : row.value_at_probes) out << fmt::format(",{:.17g}", v);
        out << ',' << row.error << '\n';
    }
    auto meta = open_output(cfg.output_dir / "sweep_q.meta");
    meta << fmt::format("b_circ = {:.17g}\nclassical_at_probe = {:.17g}\n", t.b_circ,
                        t.classical_at_probe);
    meta << fmt::format("boundary_converges = {}\nvalue_converges = {}\ni_star_increases = {}\n",
                        t.boundary_converges, t.value_converges, t.i_star_increases);
    const bool ok = t.boundary_converges && t.value_converges && t.i_star_increases;
    fmt::print("{}\n", ok ? "PASS sweep-q" : "FAIL sweep-q");
    return ok ? 0 : 1;
}

void report_error(const std::string& command, const std::string& kind, const std::string& msg) {
    const nlohmann::json record = {{"command", command}, {"error", kind}, {"message", msg}};
    std::cerr << record.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dividend control with the running infimum"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "flat section.key = value config file");
    app.add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("-s,--set", overrides, "override one key, e.g. --set model.q=0.1");

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const ExperimentConfig&);
    };
    const Command commands[] = {
        {"roots", "print the characteristic roots and the classical barrier", cmd_roots},
        {"boundary", "solve the free boundary, write CSV and metadata", cmd_boundary},
        {"value-table", "write the value function on a grid", cmd_value_table},
        {"simulate", "simulate controlled paths and their payoffs", cmd_simulate},
        {"verify", "run the acceptance suite; exit 0 iff every criterion passes", cmd_verify},
        {"sweep-q", "solve along a decreasing q ladder, check convergence", cmd_sweep_q},
    };
    for (const auto& c : commands) app.add_subcommand(c.name, c.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report_error("", "parse", e.what());
        return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError(fmt::format("cannot read config '{}'", config_path));
            text.assign(std::istreambuf_iterator<char>(in), {});
        }
        for (const auto& o : overrides) text += '\n' + o;
        ExperimentConfig cfg = parse_config(text);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        cfg.validate();
        for (const auto& c : commands) {
            if (name == c.name) return c.run(cfg);
        }
        return 2;
    } catch (const Error& e) {
        report_error(name, e.kind(), e.what());
    } catch (const std::exception& e) {
        report_error(name, "internal", e.what());
    }
    return 2;
}
