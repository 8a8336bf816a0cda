#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "carnotflow/runner.hpp"

using namespace carnotflow;

namespace {

const char* kMinimal = R"(
[group]
name = heisenberg:1
[operator]
name = mcf
[game]
epsilon = 0.1
T = 0.02
[grid]
lo = -1,-1,-1
hi = 1,1,1
h = 0.25
[initial_data]
name = constant
value = 2.0
)";

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config_text(kMinimal);
  CHECK(cfg.group_name == "heisenberg:1");
  CHECK(cfg.operator_name == "mcf");
  CHECK(cfg.game.epsilon == 0.1);
  CHECK(cfg.game.horizon == 0.02);
  CHECK(cfg.game.strategy == Strategy::Guided);  // default
  CHECK(cfg.box_h(0) == 0.25);
  CHECK(cfg.box_h(2) == 0.25);  // single h broadcast
  CHECK(cfg.data.value == 2.0);
  CHECK(cfg.output.stride == 1);

  SUBCASE("hash is stable and field-sensitive") {
    const auto h1 = fnv1a64(cfg.canonical());
    const auto h2 = fnv1a64(parse_config_text(kMinimal).canonical());
    CHECK(h1 == h2);
    RunConfig other = cfg;
    other.game.epsilon = 0.05;
    CHECK(fnv1a64(other.canonical()) != h1);
  }
}

TEST_CASE("config rejections") {
  CHECK_THROWS_AS(parse_config_text("[group]\nname = nope\n"), std::exception);
  CHECK_THROWS_AS(parse_config_text(""), ConfigError);
  std::string bad = std::string(kMinimal) + "[extra]\nwhat = 1\n";
  CHECK_THROWS_AS(parse_config_text(bad), ConfigError);
  std::string badnum = kMinimal;
  badnum.replace(badnum.find("0.1"), 3, "abc");
  CHECK_THROWS_AS(parse_config_text(badnum), ConfigError);
  std::string badeps = kMinimal;
  badeps.replace(badeps.find("epsilon = 0.1"), 13, "epsilon = 1.5");
  CHECK_THROWS_AS(parse_config_text(badeps), ConfigError);
  // missing group.name
  CHECK_THROWS_AS(parse_config_text("[operator]\nname = mcf\n"), ConfigError);
}

TEST_CASE("initial data library") {
  const auto g = GroupDescriptor::heisenberg(1);
  Vec p(3);
  p << 0.5, 0.5, 3.0;

  InitialDataSpec s;
  s.name = "quadratic-cylinder";
  s.r0 = 1.0;
  s.cap = 1.0;
  auto d = make_initial_datum(s, g);
  CHECK(d.fn(p) == doctest::Approx(-0.5));
  CHECK(d.far_field == 1.0);
  CHECK(d.r0.has_value());

  s.name = "capped-quadratic";
  s.r0 = 0.0;
  s.cap = 2.0;
  d = make_initial_datum(s, g);
  CHECK(d.fn(p) == doctest::Approx(0.5));

  s.name = "smooth-bump";
  s.amplitude = 2.0;
  s.rho = 4.0;
  d = make_initial_datum(s, g);
  CHECK(d.fn(identity_point(g)) == doctest::Approx(2.0));
  Vec far(3);
  far << 4.0, 0, 0;
  CHECK(d.fn(far) == 0.0);
  CHECK(d.far_field == 0.0);

  s.name = "unknown";
  CHECK_THROWS_AS(make_initial_datum(s, g), ConfigError);
}

TEST_CASE("exact radius selection") {
  RunConfig cfg = parse_config_text(kMinimal);
  const auto g = GroupDescriptor::parse(cfg.group_name);
  CHECK(!exact_radius(cfg, g, 0.1).has_value());  // constant data has no level set
  cfg.data.name = "quadratic-cylinder";
  cfg.data.r0 = 1.0;
  const auto r = exact_radius(cfg, g, 0.18);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(std::sqrt(1.0 - 0.36)));
  cfg.operator_name = "pil";
  CHECK(!exact_radius(cfg, g, 0.1).has_value());
}

TEST_CASE("run_solve emits artifacts") {
  RunConfig cfg = parse_config_text(kMinimal);
  cfg.output.dir = "test_run_out";
  const SolveArtifacts art = run_solve(cfg, 1);
  CHECK(art.layer_files.size() == size_t(cfg.game.steps() + 1));
  for (const auto& f : art.layer_files) CHECK(std::filesystem::exists(f));
  CHECK(std::filesystem::exists(art.manifest_file));
  std::ifstream in(art.manifest_file);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("config_hash = ") != std::string::npos);
  CHECK(text.find("layer_file = ") != std::string::npos);
  std::filesystem::remove_all("test_run_out");
}

TEST_CASE("run_sweep single value") {
  RunConfig cfg = parse_config_text(kMinimal);
  cfg.output.dir = "test_sweep_out";
  const auto rows = run_sweep(cfg, "epsilon", {0.1}, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].value == 0.1);
  CHECK(std::isnan(rows[0].successive_diff));  // nothing to difference against
  CHECK(std::filesystem::exists("test_sweep_out/sweep.csv"));
  std::filesystem::remove_all("test_sweep_out");
  CHECK_THROWS_AS(run_sweep(cfg, "bogus", {0.1}, 1), ConfigError);
}
