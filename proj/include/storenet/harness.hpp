#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "storenet/config.hpp"
#include "storenet/fast_chain.hpp"
#include "storenet/martingale.hpp"
#include "storenet/replicas.hpp"
#include "storenet/scaling.hpp"
#include "storenet/skorokhod.hpp"

namespace storenet {

struct HarnessOptions {
  std::filesystem::path out_dir = ".";
  double regime_tol = 0.0;
  Execution execution = Execution::Parallel;
};

/// Writes <out>/<path>_r<k>.{csv,json} per replica and <out>/<path>_summary.json.
nlohmann::json run_simulate(const ScenarioConfig& config, const HarnessOptions& options);

/// Writes <out>/<path>_fluid.csv (t,x1,x2,on_boundary2) and <out>/<path>_fluid.json.
nlohmann::json run_fluid(const ScenarioConfig& config, const HarnessOptions& options);

/// Sup-norm distance between each replica's scaled path and the fluid
/// trajectory on the recording grid (dt = horizon / 1000 in event mode).
nlohmann::json run_compare(const ScenarioConfig& config, const HarnessOptions& options);

enum class Check { FastChain, Hitting, Martingale, Diffusion };

std::string_view to_string(Check check);
Check parse_check(std::string_view name);

/// One verdict per check: {"status": "pass" | "fail" | "skipped", ...}.
/// Skipped checks carry the violated precondition as "reason".
nlohmann::json run_report_bundle(const ScenarioConfig& config, const std::vector<Check>& which,
                                 const HarnessOptions& options);

/// True unless some verdict in the bundle has status "fail".
bool bundle_passed(const nlohmann::json& bundle);

// Plot-ready CSV exporters.
void write_reflected_csv(std::ostream& os, const ReflectedSolution& solution, int precision = 12);
void write_distribution_csv(std::ostream& os, const std::vector<double>& pi, int precision = 12);
void write_drift_test_csv(std::ostream& os, const DriftTestReport& report, int precision = 12);
void write_centered_csv(std::ostream& os, const CenteredPath& cpath, int precision = 12);
void write_path_csv(std::ostream& os, const Path& path, int precision = 12);

}  // namespace storenet
