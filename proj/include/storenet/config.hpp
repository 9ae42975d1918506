#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "storenet/ctmc.hpp"
#include "storenet/model.hpp"

namespace storenet {

enum class OutputFormat { Csv, Json };

/// Flat INI scenario:
///
///   [model]  lambda, xi, mu, beta_bar
///   [sim]    N, F_N (integer or `infinite`, default round(beta_bar N)),
///            x1_0, x2_0, horizon, seed, replicas, record (`events` | `grid:<dt>`)
///   [output] format (`csv` | `json`), path, precision
struct ScenarioConfig {
  ModelParams model;
  ScaledParams scaled;
  Vec2 x0;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  int replicas = 1;
  Recording record;
  OutputFormat format = OutputFormat::Csv;
  std::string path = "run";
  int precision = 12;
  std::string source = "<memory>";

  SystemState initial_state() const { return state_from_scaled(x0, scaled.N); }
};

/// Errors carry code CONFIG_ERROR (with `source:line:` prefix) or INIT_OUTSIDE_S.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<memory>");
ScenarioConfig load_config(const std::filesystem::path& file);

/// Resolved config and seed, embedded in every JSON output.
nlohmann::json provenance(const ScenarioConfig& config);

}  // namespace storenet
