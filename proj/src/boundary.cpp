#include "infctl/boundary.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/os.h>

#include "infctl/errors.hpp"

namespace infctl {

namespace {

void require_positive_drift_and_q(const ModelParams& p) {
    p.validate();
    if (p.mu <= 0.0) throw ConfigError("the free boundary exists only for mu > 0");
    if (p.q <= 0.0) throw ConfigError("the free boundary ODE needs q > 0; use b_circ for q = 0");
}

// Interpolated b(i) - i on a raw grid; i must lie in [grid.front(), grid.back()].
double interpolate(std::span<const double> grid, std::span<const double> values, double step,
                   double i) {
    const std::size_t last = grid.size() - 1;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(i / step)));
    k = std::min(k, last - 1);
    while (k > 0 && grid[k] > i) --k;
    while (k + 1 < last && grid[k + 1] < i) ++k;
    const double t = (i - grid[k]) / (grid[k + 1] - grid[k]);
    if (t == 0.0) return values[k];
    if (t == 1.0) return values[k + 1];
    return values[k] + t * (values[k + 1] - values[k]);
}

double find_i_star(std::span<const double> grid, std::span<const double> values, double step) {
    const double b_circ = values.front();
    if (grid.back() < b_circ) {
        throw ConfigError(fmt::format(
            "boundary solved only up to i = {}; the critical level needs i_max >= b_circ = {}",
            grid.back(), b_circ));
    }
    auto g = [&](double i) { return interpolate(grid, values, step, i) - i; };
    double lo = 0.0;
    double hi = b_circ;
    if (!(g(lo) > 0.0 && g(hi) < 0.0)) {
        throw ConfigError("b(i) - i does not change sign on [0, b_circ]");
    }
    // Bisect to the resolution of doubles; far tighter than the 1e-10 target.
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        (gm > 0.0 ? lo : hi) = mid;
    }
    return std::fabs(g(lo)) <= std::fabs(g(hi)) ? lo : hi;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(fmt::format("bad metadata line '{}'", line));
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(fmt::format("'{}' is not a number", s));
    }
    return v;
}

}  // namespace

BoundaryFlow::BoundaryFlow(const ModelParams& params) {
    require_positive_drift_and_q(params);
    const CharRoots roots = char_roots(params);
    alpha_ = roots.alpha;
    beta_ = roots.beta;
    q_ = params.q;
}

double BoundaryFlow::operator()(double b, double i) const {
    const double a = alpha_;
    const double c = beta_;
    const double s = i - b;
    double num;
    double den;
    if (s >= 0.0) {
        // divide through by e^{beta s}
        const double e = std::exp((a - c) * s);
        num = a * a - c * c * e;
        den = c * e - a;
    } else {
        // divide through by e^{alpha s}
        const double e = std::exp((c - a) * s);
        num = a * a * e - c * c;
        den = c - a * e;
    }
    return q_ / (a * c) * num / den;
}

double flow(double b, double i, const ModelParams& params) {
    return BoundaryFlow(params)(b, i);
}

BoundaryTable::BoundaryTable(const ModelParams& params, std::vector<double> grid,
                             std::vector<double> values, double step)
    : params_(params),
      grid_(std::move(grid)),
      values_(std::move(values)),
      step_(step),
      params_hash_(params_fingerprint(params)) {
    require_positive_drift_and_q(params_);
    if (grid_.size() < 2 || grid_.size() != values_.size()) {
        throw ConfigError("boundary table needs at least two nodes and one value per node");
    }
    if (!(step_ > 0.0)) throw ConfigError("boundary step must be positive");
    const double b_circ = *char_roots(params_).b_circ;
    if (grid_.front() != 0.0 || values_.front() != b_circ) {
        throw ConfigError("boundary table must start at (0, b_circ)");
    }
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        if (!(grid_[k] > grid_[k - 1])) throw ConfigError("boundary grid must increase strictly");
        if (!(values_[k] < values_[k - 1]) || !(values_[k] < grid_[k] + b_circ)) {
            throw NumericalError(fmt::format(
                "boundary lost strict monotonicity at i = {}; retry with a smaller step",
                grid_[k]));
        }
    }
    i_star_ = find_i_star(grid_, values_, step_);
}

double BoundaryTable::at(double i) const {
    if (!(i >= 0.0 && i <= grid_.back())) {
        throw DomainError(fmt::format("boundary queried at i = {} outside [0, {}]", i,
                                      grid_.back()));
    }
    return interpolate(grid_, values_, step_, i);
}

double default_boundary_extent(const ModelParams& params) {
    require_positive_drift_and_q(params);
    return 5.0 * *char_roots(params).b_circ;
}

BoundaryTable solve_boundary(const ModelParams& params, double i_max, double step) {
    require_positive_drift_and_q(params);
    if (!(i_max > 0.0) || !std::isfinite(i_max)) throw DomainError("i_max must be positive");
    if (!(step > 0.0) || step > i_max / 10.0) {
        throw DomainError(fmt::format("step must lie in (0, i_max/10], got {}", step));
    }
    const BoundaryFlow f(params);
    const auto full = static_cast<std::size_t>(std::floor(i_max / step * (1.0 + 1e-12)));

    std::vector<double> grid;
    grid.reserve(full + 2);
    for (std::size_t k = 0; k <= full; ++k) grid.push_back(static_cast<double>(k) * step);
    if (grid.back() > i_max) grid.back() = i_max;
    if (i_max - grid.back() > 1e-9 * step) grid.push_back(i_max);

    std::vector<double> values(grid.size());
    values[0] = *char_roots(params).b_circ;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double i = grid[k];
        const double h = grid[k + 1] - grid[k];
        const double b = values[k];
        const double k1 = f(b, i);
        const double k2 = f(b + 0.5 * h * k1, i + 0.5 * h);
        const double k3 = f(b + 0.5 * h * k2, i + 0.5 * h);
        const double k4 = f(b + h * k3, i + h);
        values[k + 1] = b + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(values[k + 1])) {
            throw NumericalError(fmt::format("boundary ODE diverged at i = {}", grid[k + 1]));
        }
    }
    return BoundaryTable(params, std::move(grid), std::move(values), step);
}

double critical_infimum(const BoundaryTable& table) {
    return find_i_star(table.grid(), table.values(), table.step());
}

void write_boundary(const BoundaryTable& table, const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path) {
    {
        auto out = fmt::output_file(csv_path.string());
        out.print("i,b\n");
        const auto grid = table.grid();
        const auto values = table.values();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out.print("{:.17g},{:.17g}\n", grid[k], values[k]);
        }
    }
    auto meta = fmt::output_file(meta_path.string());
    const auto& p = table.params();
    meta.print("mu = {:.17g}\neta = {:.17g}\nrho = {:.17g}\nq = {:.17g}\n", p.mu, p.eta, p.rho,
               p.q);
    meta.print("step = {:.17g}\ni_max = {:.17g}\ni_star = {:.17g}\nb_circ = {:.17g}\n",
               table.step(), table.i_max(), table.i_star(), table.b_circ());
    meta.print("nodes = {}\nparams_hash = {:016x}\n", table.grid().size(), table.params_hash());
}

BoundaryTable read_boundary(const std::filesystem::path& csv_path,
                            const std::filesystem::path& meta_path) {
    const auto kv = read_key_values(meta_path);
    auto get = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(fmt::format("metadata is missing '{}'", key));
        return parse_double(it->second);
    };
    ModelParams p{get("mu"), get("eta"), get("rho"), get("q")};
    const double step = get("step");

    std::ifstream in(csv_path);
    if (!in) throw ParseError(fmt::format("cannot open {}", csv_path.string()));
    std::string line;
    if (!std::getline(in, line) || line != "i,b") {
        throw ParseError("boundary CSV must start with the header 'i,b'");
    }
    std::vector<double> grid;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(fmt::format("bad row '{}'", line));
        grid.push_back(parse_double(std::string_view(line).substr(0, comma)));
        values.push_back(parse_double(std::string_view(line).substr(comma + 1)));
    }
    BoundaryTable table(p, std::move(grid), std::move(values), step);
    const auto hash_it = kv.find("params_hash");
    if (hash_it != kv.end() && hash_it->second != fmt::format("{:016x}", table.params_hash())) {
        throw ParseError("params_hash in metadata does not match the parameters");
    }
    return table;
}

}  // namespace infctl
