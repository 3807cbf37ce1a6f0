#include <doctest.h>

#include "infctl/config.hpp"
#include "infctl/errors.hpp"

using namespace infctl;

TEST_CASE("defaults match the reference model") {
    const ExperimentConfig c = parse_config("");
    CHECK(c.model == ModelParams{});
    CHECK(c.verify.mc_paths == 100000);
    CHECK(c.sweep.q_ladder == std::vector<double>{0.5, 0.1, 0.02, 0.004});
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("parsing keys, comments and lists") {
    const ExperimentConfig c = parse_config(
        "# comment\n"
        "model.q = 0.25   # trailing\n"
        "\n"
        "  sim.policy = barrier\n"
        "sweep.q_ladder = 0.4, 0.2,0.1\n"
        "verify.criteria = 1, 4\n"
        "output.dir = results/run1\n");
    CHECK(c.model.q == 0.25);
    CHECK(c.verify.params.q == 0.25);
    CHECK(c.sim.policy == "barrier");
    CHECK(c.sweep.q_ladder == std::vector<double>{0.4, 0.2, 0.1});
    CHECK(c.verify.only == std::vector<int>{1, 4});
    CHECK(c.output_dir == "results/run1");
}

TEST_CASE("rendered config reads back to the same config") {
    ExperimentConfig c = parse_config("model.mu = 0.3\nsim.x0 = 0.1\nsweep.i_probes = 0.1, 0.2\n");
    const std::string text = render_config(c);
    CHECK(render_config(parse_config(text)) == text);
    CHECK(text.find("model.mu = 0.3\n") != std::string::npos);
}

TEST_CASE("bad configs") {
    CHECK_THROWS_AS((void)parse_config("model.nu = 1\n"), ParseError);
    CHECK_THROWS_AS((void)parse_config("model.mu 1\n"), ParseError);
    CHECK_THROWS_AS((void)parse_config("model.mu = 1x\n"), ParseError);
    CHECK_THROWS_AS((void)parse_config("sweep.q_ladder = 0.1,,0.2\n"), ParseError);
    CHECK_THROWS_AS(parse_config("sim.policy = teleport\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("verify.criteria = 12\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("model.eta = 0\n").validate(), DomainError);
    CHECK_THROWS_AS((void)load_config("/nonexistent/infctl.cfg"), ConfigError);
}
