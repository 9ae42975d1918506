#include <doctest.h>

#include <string>

#include "storenet/config.hpp"
#include "storenet/error.hpp"

using namespace storenet;

namespace {

const char* kBase = R"([model]
lambda = 1
xi = 1
mu = 1
beta_bar = 2

[sim]
N = 100
x1_0 = 0.5
x2_0 = 0.25
horizon = 1
seed = 42
replicas = 3
record = grid:0.01

[output]
format = json
path = demo
precision = 8
)";

std::string code_of(const std::string& text) {
  try {
    parse_config(text, "t.ini");
  } catch (const Error& e) {
    return e.what();
  }
  return "ok";
}

}  // namespace

TEST_CASE("config parses every key") {
  const ScenarioConfig c = parse_config(kBase, "t.ini");
  CHECK(c.model.lambda == 1.0);
  CHECK(c.model.beta_bar == 2.0);
  CHECK(c.scaled.N == 100);
  CHECK(c.scaled.F_N.value() == 200);
  CHECK(c.x0 == Vec2{0.5, 0.25});
  CHECK(c.horizon == 1.0);
  CHECK(c.seed == 42);
  CHECK(c.replicas == 3);
  CHECK(c.record.mode == Recording::Mode::Grid);
  CHECK(c.record.dt == 0.01);
  CHECK(c.format == OutputFormat::Json);
  CHECK(c.path == "demo");
  CHECK(c.precision == 8);
  CHECK(c.initial_state() == SystemState{0, 50, 25});
}

TEST_CASE("config defaults and infinite capacity") {
  std::string text = kBase;
  text.replace(text.find("[output]"), std::string::npos, "");
  text.replace(text.find("record = grid:0.01"), 18, "F_N = infinite");
  const ScenarioConfig c = parse_config(text);
  CHECK(c.scaled.F_N.is_infinite());
  CHECK(c.record.mode == Recording::Mode::Events);
  CHECK(c.format == OutputFormat::Csv);
  CHECK(c.precision == 12);
}

TEST_CASE("config errors carry line numbers") {
  std::string text = kBase;
  text.replace(text.find("horizon = 1"), 11, "horizon = x");
  CHECK(code_of(text) == "CONFIG_ERROR: t.ini:11: 'sim.horizon' is not a finite number");

  text = kBase;
  text.replace(text.find("seed = 42"), 9, "sed = 42");
  CHECK(code_of(text) == "CONFIG_ERROR: t.ini:12: unknown key 'sim.sed'");

  text = kBase;
  text.replace(text.find("record = grid:0.01"), 18, "record = grid:-1");
  CHECK(code_of(text).rfind("CONFIG_ERROR: t.ini:14:", 0) == 0);

  text = kBase;
  text.replace(text.find("[sim]"), 5, "[simulation]");
  CHECK(code_of(text) == "CONFIG_ERROR: t.ini:7: unknown section [simulation]");

  text = kBase;
  text.replace(text.find("lambda = 1"), 10, "lambda = 1\nlambda = 2");
  CHECK(code_of(text) == "CONFIG_ERROR: t.ini:3: duplicate key 'model.lambda'");

  text = kBase;
  text.replace(text.find("mu = 1"), 6, "");
  CHECK(code_of(text).find("missing required key 'model.mu'") != std::string::npos);

  text = kBase;
  text.replace(text.find("replicas = 3"), 12, "replicas = 0");
  CHECK(code_of(text).rfind("CONFIG_ERROR: t.ini:13:", 0) == 0);

  text = kBase;
  text.replace(text.find("format = json"), 13, "format = xml");
  CHECK(code_of(text).rfind("CONFIG_ERROR", 0) == 0);
}

TEST_CASE("initial point outside S is rejected") {
  std::string text = kBase;
  text.replace(text.find("x1_0 = 0.5"), 10, "x1_0 = 1.6");
  CHECK(code_of(text).rfind("INIT_OUTSIDE_S", 0) == 0);
}

TEST_CASE("comments and blank lines") {
  std::string text = "# header\n\n";
  text += kBase;
  text.replace(text.find("xi = 1"), 6, "xi = 1   ; trailing comment");
  CHECK(parse_config(text).model.xi == 1.0);
}

TEST_CASE("provenance embeds the resolved config") {
  const ScenarioConfig c = parse_config(kBase, "t.ini");
  const auto p = provenance(c);
  CHECK(p["seed"] == 42);
  CHECK(p["config"]["sim"]["F_N"] == 200);
  CHECK(p["config"]["sim"]["record"] == "grid:0.01");
  CHECK(p["config"]["model"]["beta_bar"] == 2.0);
}
