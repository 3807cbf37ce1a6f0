#include "infctl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "infctl/errors.hpp"

namespace infctl {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(fmt::format("'{}' is not a number", s));
    }
    return v;
}

template <class T>
std::vector<T> parse_list(std::string_view s) {
    std::vector<T> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (item.empty()) throw ParseError("empty list item");
        out.push_back(parse_number<T>(item));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) s += ", ";
        s += fmt::format("{}", v[k]);  // shortest form that reads back exactly
    }
    return s;
}

struct Field {
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

// Accessors take a non-const config; getters only read through them.
template <class Accessor>
Field scalar(Accessor accessor) {
    using T = std::remove_reference_t<decltype(accessor(std::declval<ExperimentConfig&>()))>;
    return {[accessor](ExperimentConfig& c, std::string_view v) { accessor(c) = parse_number<T>(v); },
            [accessor](const ExperimentConfig& c) {
                return fmt::format("{}", accessor(const_cast<ExperimentConfig&>(c)));
            }};
}

#define NUM(key, expr) {key, scalar([](ExperimentConfig& c) -> auto& { return expr; })}

template <class T>
Field list(auto accessor) {
    return {[accessor](ExperimentConfig& c, std::string_view v) { accessor(c) = parse_list<T>(v); },
            [accessor](const ExperimentConfig& c) {
                return join(accessor(const_cast<ExperimentConfig&>(c)));
            }};
}

const std::map<std::string, Field, std::less<>>& fields() {
    static const std::map<std::string, Field, std::less<>> table = {
        NUM("model.mu", c.model.mu),
        NUM("model.eta", c.model.eta),
        NUM("model.rho", c.model.rho),
        NUM("model.q", c.model.q),
        NUM("boundary.step", c.boundary.step),
        NUM("boundary.i_max", c.boundary.i_max),
        NUM("grid.nx", c.grid.nx),
        NUM("grid.ni", c.grid.ni),
        NUM("grid.x_max", c.grid.x_max),
        NUM("grid.i_max", c.grid.i_max),
        {"sim.policy",
         {[](ExperimentConfig& c, std::string_view v) { c.sim.policy = std::string(v); },
          [](const ExperimentConfig& c) { return c.sim.policy; }}},
        NUM("sim.barrier", c.sim.barrier),
        NUM("sim.scale", c.sim.scale),
        NUM("sim.x0", c.sim.x0),
        NUM("sim.i0", c.sim.i0),
        NUM("sim.dt", c.sim.dt),
        NUM("sim.horizon", c.sim.horizon),
        NUM("sim.seed", c.sim.seed),
        NUM("sim.paths", c.sim.paths),
        NUM("sim.stride", c.sim.stride),
        NUM("verify.mc_paths", c.verify.mc_paths),
        NUM("verify.dt", c.verify.dt),
        NUM("verify.seed", c.verify.seed),
        NUM("verify.probe_c_x", c.verify.probe_waiting.x),
        NUM("verify.probe_c_i", c.verify.probe_waiting.i),
        NUM("verify.probe_d1_x", c.verify.probe_d1.x),
        NUM("verify.probe_d1_i", c.verify.probe_d1.i),
        NUM("verify.probe_d2_x", c.verify.probe_d2.x),
        NUM("verify.probe_d2_i", c.verify.probe_d2.i),
        {"verify.perturbations",
         list<double>([](ExperimentConfig& c) -> auto& { return c.verify.perturbations; })},
        NUM("verify.support_paths", c.verify.support_paths),
        NUM("verify.operator_paths", c.verify.operator_paths),
        {"verify.criteria", list<int>([](ExperimentConfig& c) -> auto& { return c.verify.only; })},
        {"sweep.q_ladder",
         list<double>([](ExperimentConfig& c) -> auto& { return c.sweep.q_ladder; })},
        {"sweep.i_probes",
         list<double>([](ExperimentConfig& c) -> auto& { return c.sweep.i_probes; })},
        NUM("sweep.x_probe", c.sweep.x_probe),
        NUM("sweep.step", c.sweep.step),
        {"output.dir",
         {[](ExperimentConfig& c, std::string_view v) { c.output_dir = std::string(v); },
          [](const ExperimentConfig& c) { return c.output_dir.string(); }}},
    };
    return table;
}

#undef NUM

}  // namespace

void ExperimentConfig::validate() const {
    model.validate();
    if (!(boundary.step > 0.0) || boundary.i_max < 0.0) {
        throw ConfigError("boundary.step must be positive and boundary.i_max >= 0");
    }
    if (grid.nx < 2 || grid.ni < 2) throw ConfigError("grid needs at least 2 x 2 points");
    if (grid.x_max < 0.0 || grid.i_max < 0.0) throw ConfigError("grid extents must be >= 0");
    if (sim.policy != "optimal" && sim.policy != "barrier" && sim.policy != "null" &&
        sim.policy != "immediate") {
        throw ConfigError(fmt::format("unknown sim.policy '{}'", sim.policy));
    }
    if (sim.paths == 0 || sim.stride == 0) throw ConfigError("sim.paths and sim.stride must be > 0");
    if (sim.horizon < 0.0) throw ConfigError("sim.horizon must be >= 0");
    if (verify.mc_paths < 100) throw ConfigError("verify.mc_paths must be >= 100");
    for (int id : verify.only) {
        if (id < 1 || id > 11) throw ConfigError(fmt::format("no acceptance criterion {}", id));
    }
    verify.params.validate();
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(fmt::format("line {}: expected 'section.key = value'", line_no));
        }
        const auto key = trim(line.substr(0, eq));
        const auto val = trim(line.substr(eq + 1));
        const auto it = fields().find(key);
        if (it == fields().end()) {
            throw ParseError(fmt::format("line {}: unknown key '{}'", line_no, key));
        }
        try {
            it->second.set(cfg, val);
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("line {}: {}: {}", line_no, key, e.what()));
        }
    }
    // The acceptance suite always runs on the model of the config.
    cfg.verify.params = cfg.model;
    cfg.verify.q_ladder = cfg.sweep.q_ladder;
    cfg.verify.q_sweep_probes = cfg.sweep.i_probes;
    cfg.verify.q_sweep_x = cfg.sweep.x_probe;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& [key, field] : fields()) {
        out += fmt::format("{} = {}\n", key, field.get(cfg));
    }
    return out;
}

}  // namespace infctl
