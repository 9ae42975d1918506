#include "storenet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "storenet/error.hpp"
#include "storenet/fluid.hpp"
#include "storenet/rng.hpp"

namespace storenet {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("IO_ERROR", "cannot write " + file.string());
  return os;
}

void write_json(const std::filesystem::path& file, const json& doc) {
  auto os = open_out(file);
  os << doc.dump(2) << '\n';
}

std::filesystem::path out_file(const ScenarioConfig& c, const HarnessOptions& o, const std::string& suffix) {
  return o.out_dir / (c.path + suffix);
}

double grid_dt(const ScenarioConfig& c) {
  return c.record.mode == Recording::Mode::Grid ? c.record.dt : c.horizon / 1000.0;
}

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
};

Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

json state_json(const SystemState& s) { return {{"x0", s.x0}, {"x1", s.x1}, {"x2", s.x2}}; }

json skipped(std::string reason, std::string detail) {
  return {{"status", "skipped"}, {"reason", std::move(reason)}, {"detail", std::move(detail)}};
}

const char* status(bool ok) { return ok ? "pass" : "fail"; }

json check_fastchain(const ScenarioConfig& c, const HarnessOptions& o) {
  if (classify_regime(c.model, o.regime_tol) != Regime::OverLoaded)
    return skipped("REQUIRES_OVERLOADED", "the free-capacity chain is transient unless rho > beta_bar");
  const PiHeads heads = pi_heads(c.model);
  const FastChainDistribution dist = stationary_distribution(c.model, 200, 1e-10);
  const double d0 = std::abs(dist.pi[0] - heads.pi0);
  const double d1 = std::abs(dist.pi[1] - heads.pi1);
  const double residual = std::abs(drift_balance_residual(c.model, heads));
  const double g1 = generating_function(c.model, 1.0);
  const double g0 = generating_function(c.model, 0.0);
  const EmpiricalFastChain mc = simulate_fast_chain(c.model, 1e4, c.seed);
  const double mc_gap = std::abs(mc.fraction[0] - heads.pi0);

  const bool heads_ok = d0 <= 1e-9 && d1 <= 1e-9;
  const bool residual_ok = residual < 1e-9;
  const bool gf_ok = std::abs(g1 - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() &&
                     std::abs(g0 - heads.pi0) <= 1e-12;
  const bool mc_ok = mc_gap <= 3.0 * mc.std_error[0];

  {
    auto os = open_out(out_file(c, o, "_pi.csv"));
    write_distribution_csv(os, dist.pi, c.precision);
  }
  return {{"status", status(heads_ok && residual_ok && gf_ok && mc_ok)},
          {"y_star", y_star(c.model)},
          {"pi0", heads.pi0},
          {"pi1", heads.pi1},
          {"balance_solve", {{"n_max", 200}, {"pi0", dist.pi[0]}, {"pi1", dist.pi[1]}, {"tail_mass", dist.tail_mass}}},
          {"oracle_delta", {{"pi0", d0}, {"pi1", d1}, {"tolerance", 1e-9}, {"pass", heads_ok}}},
          {"drift_balance_residual", {{"value", residual}, {"tolerance", 1e-9}, {"pass", residual_ok}}},
          {"generating_function", {{"g1", g1}, {"g0", g0}, {"pass", gf_ok}}},
          {"monte_carlo",
           {{"horizon", 1e4},
            {"fraction_m0", mc.fraction[0]},
            {"std_error", mc.std_error[0]},
            {"k", 3.0},
            {"pass", mc_ok}}}};
}

json check_hitting(const ScenarioConfig& c, const HarnessOptions& o) {
  if (classify_regime(c.model, o.regime_tol) != Regime::OverLoaded)
    return skipped("REQUIRES_OVERLOADED", "T0 is finite only when rho > beta_bar");
  if (c.scaled.F_N.is_infinite()) return skipped("REQUIRES_FINITE_CAPACITY", "F_N is infinite");
  const double n = static_cast<double>(c.scaled.N);
  if (!(load(c.x0) < static_cast<double>(c.scaled.F_N.value()) / n))
    return skipped("REQUIRES_INTERIOR_START", "v.x0 must be below F_N / N");

  const double T0 = hitting_time_T0(c.model, c.x0);
  const double max_h = 50.0 * (T0 + 1.0 / c.model.mu);
  const auto times = sample_hitting_times(c.model, c.scaled, c.x0, c.replicas, c.seed, max_h, o.execution);
  std::vector<double> t1, e1;
  for (const auto& t : times)
    if (t) {
      t1.push_back(*t);
      e1.push_back(std::exp(c.model.mu * *t));
    }
  const HittingMoments rhs = exp_hitting_identity(c.model, c.scaled, c.x0);
  const Summary st = summarize(t1);
  const Summary se = summarize(e1);
  const bool all_hit = t1.size() == times.size();
  const bool mean_ok = std::abs(st.mean - T0) <= 0.02;
  const bool exp_ok = std::abs(se.mean - rhs.rhs1) <= 3.0 * se.std_error;
  return {{"status", status(all_hit && mean_ok && exp_ok)},
          {"T0", T0},
          {"replicas", times.size()},
          {"hits", t1.size()},
          {"mean_T1", {{"value", st.mean}, {"std_error", st.std_error}, {"tolerance", 0.02}, {"pass", mean_ok}}},
          {"exp_moment",
           {{"estimate", se.mean}, {"std_error", se.std_error}, {"rhs", rhs.rhs1}, {"k", 3.0}, {"pass", exp_ok}}},
          {"second_exp_moment_rhs", rhs.rhs2},
          {"limiting_scaled_variance", limiting_scaled_variance(c.model, c.x0)}};
}

json check_martingale(const ScenarioConfig& c, const HarnessOptions& o) {
  const std::int64_t N = c.scaled.N;
  const double n = static_cast<double>(N);
  Stream rng(c.seed, 0);
  double max_harmonic = 0.0;
  double max_gen_right = 0.0;
  double min_gen_wrong = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform();
    const double cc = (rng.uniform() - 0.5) * std::exp(-c.model.mu * t);
    const SystemState w{0, 1 + static_cast<std::int64_t>(rng.uniform() * 2.0 * n),
                        static_cast<std::int64_t>(rng.uniform() * 2.0 * n)};
    max_harmonic = std::max(max_harmonic, std::abs(harmonic_residual(c.model, N, cc, t, w)));
    max_gen_right = std::max(max_gen_right,
                             std::abs(quadratic_generator_residual(c.model, N, n * c.model.xi / c.model.mu, w)));
    min_gen_wrong = std::min(
        min_gen_wrong, std::abs(quadratic_generator_residual(c.model, N, n * c.model.xi / (2.0 * c.model.mu), w)));
  }
  const bool harmonic_ok = max_harmonic < 1e-6;
  const double gen_tol = 1e-12 * std::max(1.0, n * n);
  const bool generator_ok = max_gen_right <= gen_tol && min_gen_wrong > gen_tol;

  json out = {{"harmonic_residual", {{"draws", 100}, {"max", max_harmonic}, {"tolerance", 1e-6}, {"pass", harmonic_ok}}},
              {"quadratic_constant",
               {{"residual_N_xi_over_mu", max_gen_right},
                {"residual_N_xi_over_2mu", min_gen_wrong},
                {"tolerance", gen_tol},
                {"pass", generator_ok}}}};

  if (c.replicas < 50) {
    out["drift_tests"] = skipped("INSUFFICIENT_REPLICAS", "drift tests need at least 50 replicas");
    out["status"] = status(harmonic_ok && generator_ok);
    return out;
  }
  DriftTestOptions opts;
  opts.execution = o.execution;
  const SystemState init = c.initial_state();
  const auto lin = drift_test(linear_martingale(), c.model, N, init, c.horizon, c.replicas, c.seed, opts);
  const auto quad = drift_test(quadratic_martingale(), c.model, N, init, c.horizon, c.replicas, c.seed + 1, opts);
  const auto neg = drift_test(shifted_linear(0.5), c.model, N, init, c.horizon, c.replicas, c.seed + 2, opts);
  const bool drift_ok = lin.pass && quad.pass && !neg.pass;

  auto report = [&](const DriftTestReport& r, const std::string& tag, bool expect_pass) {
    auto os = open_out(out_file(c, o, "_drift_" + tag + ".csv"));
    write_drift_test_csv(os, r, c.precision);
    json j = {{"functional", r.name}, {"k", r.k}, {"passed_constancy", r.pass}, {"expected", expect_pass}};
    if (r.usable_until) j["usable_until"] = *r.usable_until;
    return j;
  };
  out["drift_tests"] = {{"linear", report(lin, "linear", true)},
                        {"quadratic", report(quad, "quadratic", true)},
                        {"negative_control", report(neg, "negative", false)},
                        {"replicas", c.replicas},
                        {"pass", drift_ok}};
  out["status"] = status(harmonic_ok && generator_ok && drift_ok);
  return out;
}

struct ReplicaDiffusion {
  StationaryMoments moments;
  DriftDiffusionFit fit;
  double acf = 0.0;
  double min_gap = INFINITY;  // min over the grid of Z - floor
  std::optional<DriftMatrixFit> matrix;
};

json check_diffusion(const ScenarioConfig& c, const HarnessOptions& o) {
  const Regime regime = classify_regime(c.model, o.regime_tol);
  if (regime == Regime::OverLoaded)
    return skipped("REQUIRES_NOT_OVERLOADED", "diffusion limits are stated for rho <= beta_bar");
  if (regime == Regime::Critical && c.scaled.F_N.is_infinite())
    return skipped("REQUIRES_FINITE_CAPACITY", "the critical floor needs finite F_N");
  const double mu = c.model.mu;
  const double burn = 5.0 / mu;
  if (!(c.horizon > burn + 1.0)) return skipped("HORIZON_TOO_SHORT", "horizon must exceed the burn-in 5/mu by 1");

  const double dt = c.record.mode == Recording::Mode::Grid ? c.record.dt : 0.01;
  const double acf_lag = 10.0 * dt;
  const std::int64_t N = c.scaled.N;
  const double interior = regime == Regime::Critical ? 3.0 / std::sqrt(static_cast<double>(N)) : -INFINITY;
  const SystemState init = c.initial_state();

  const auto reps = map_replicas(
      static_cast<std::size_t>(c.replicas),
      [&](std::size_t k) {
        const Path path =
            simulate_path(c.model, c.scaled, init, c.horizon, c.seed, k, Recording::grid(dt));
        const CenteredPath cp = regime == Regime::Critical ? centered_critical(path, c.model, N, dt, o.regime_tol)
                                                           : centered_underloaded(path, c.model, N, dt, o.regime_tol);
        ReplicaDiffusion r;
        r.moments = stationary_moments(cp, burn);
        r.fit = empirical_drift_diffusion(cp, dt, burn, interior);
        r.acf = autocorrelation(cp, acf_lag, burn);
        if (regime == Regime::Critical) {
          for (double z : cp.z) r.min_gap = std::min(r.min_gap, z - cp.floor);
          r.matrix = fit_drift_matrix(cp, c.model, dt, burn, interior);
        }
        return r;
      },
      o.execution);

  std::vector<double> var, slope, diff, acf, row2z1, row2z2, mse1, mse2;
  double min_gap = INFINITY;
  for (const auto& r : reps) {
    var.push_back(r.moments.variance);
    slope.push_back(r.fit.slope);
    diff.push_back(r.fit.diffusion);
    acf.push_back(r.acf);
    min_gap = std::min(min_gap, r.min_gap);
    if (r.matrix) {
      row2z1.push_back(r.matrix->row2[1]);
      row2z2.push_back(r.matrix->row2[2]);
      mse1.push_back(r.matrix->mse_z2_uses_z1);
      mse2.push_back(r.matrix->mse_z2_uses_z2);
    }
  }
  const Summary sv = summarize(var), ss = summarize(slope), sd = summarize(diff), sa = summarize(acf);
  const double coeff = c.model.lambda + 3.0 * c.model.xi;
  auto rel = [](double v, double target) { return std::abs(v - target) / std::abs(target); };
  json out = {{"regime", std::string(to_string(regime))},
              {"replicas", c.replicas},
              {"burn_in", burn},
              {"dt", dt},
              {"drift_slope", {{"value", ss.mean}, {"std_error", ss.std_error}, {"target", -mu}}}};

  if (regime == Regime::UnderLoaded) {
    const bool var_ok = rel(sv.mean, coeff / mu) <= 0.10;
    const bool slope_ok = rel(ss.mean, -mu) <= 0.15;
    const bool diff_ok = rel(sd.mean, coeff) <= 0.15;
    const double acf_target = std::exp(-mu * acf_lag);
    const bool acf_ok = rel(sa.mean, acf_target) <= 0.10;
    out["stationary_variance"] = {
        {"value", sv.mean}, {"std_error", sv.std_error}, {"target", coeff / mu}, {"rel_tol", 0.10}, {"pass", var_ok}};
    out["drift_slope"]["rel_tol"] = 0.15;
    out["drift_slope"]["pass"] = slope_ok;
    out["diffusion"] = {
        {"value", sd.mean}, {"std_error", sd.std_error}, {"target", coeff}, {"rel_tol", 0.15}, {"pass", diff_ok}};
    out["autocorrelation"] = {{"lag", acf_lag}, {"value", sa.mean}, {"target", acf_target}, {"rel_tol", 0.10},
                              {"pass", acf_ok}};
    out["status"] = status(var_ok && slope_ok && diff_ok && acf_ok);
    return out;
  }

  // Critical regime.
  const double stated = c.model.lambda + 2.5 * c.model.xi;
  const bool floor_ok = min_gap >= 0.0;
  const bool diff_ok = rel(sd.mean, stated) <= 0.20;
  const Summary m1 = summarize(mse1), m2 = summarize(mse2);
  out["floor"] = {{"min_gap", min_gap}, {"pass", floor_ok}};
  out["diffusion"] = {{"value", sd.mean},
                      {"std_error", sd.std_error},
                      {"target", stated},
                      {"rel_tol", 0.20},
                      {"pass", diff_ok},
                      {"generator_value", coeff},
                      {"rel_error_vs_generator_value", rel(sd.mean, coeff)}};
  out["drift_matrix"] = {{"row2_z1", summarize(row2z1).mean},
                         {"row2_z2", summarize(row2z2).mean},
                         {"mse_z2_uses_z1", m1.mean},
                         {"mse_z2_uses_z2", m2.mean},
                         {"better_variant", m2.mean <= m1.mean ? "-2 mu z2" : "-2 mu z1"},
                         {"asserted", false}};
  out["status"] = status(floor_ok && diff_ok);
  return out;
}

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Check check) {
  switch (check) {
    case Check::FastChain: return "fastchain";
    case Check::Hitting: return "hitting";
    case Check::Martingale: return "martingale";
    case Check::Diffusion: return "diffusion";
  }
  return "?";
}

Check parse_check(std::string_view name) {
  for (Check c : {Check::FastChain, Check::Hitting, Check::Martingale, Check::Diffusion})
    if (to_string(c) == name) return c;
  throw Error("INVALID_ARGUMENT", "unknown check '" + std::string(name) + "'");
}

void write_path_csv(std::ostream& os, const Path& path, int precision) {
  os << "t,x0,x1,x2,m,kind\n";
  const bool finite = !path.scaled.F_N.is_infinite();
  for (const auto& p : path.points) {
    os << fmt(p.t, precision) << ',' << p.state.x0 << ',' << p.state.x1 << ',' << p.state.x2 << ',';
    if (finite)
      os << path.scaled.F_N.value() - occupied(p.state);
    else
      os << "inf";
    os << ',' << to_string(p.kind) << '\n';
  }
}

void write_reflected_csv(std::ostream& os, const ReflectedSolution& s, int precision) {
  os << "t,z1,z2,y1,y2\n";
  for (std::size_t k = 0; k < s.t.size(); ++k)
    os << fmt(s.t[k], precision) << ',' << fmt(s.z[k].x1, precision) << ',' << fmt(s.z[k].x2, precision) << ','
       << fmt(s.y[k].x1, precision) << ',' << fmt(s.y[k].x2, precision) << '\n';
}

void write_distribution_csv(std::ostream& os, const std::vector<double>& pi, int precision) {
  os << "m,pi_m\n";
  for (std::size_t m = 0; m < pi.size(); ++m) os << m << ',' << fmt(pi[m], precision) << '\n';
}

void write_drift_test_csv(std::ostream& os, const DriftTestReport& r, int precision) {
  os << "t,mean,stderr\n";
  for (std::size_t k = 0; k < r.t.size(); ++k)
    os << fmt(r.t[k], precision) << ',' << fmt(r.mean[k], precision) << ',' << fmt(r.std_error[k], precision)
       << '\n';
}

void write_centered_csv(std::ostream& os, const CenteredPath& c, int precision) {
  const bool critical = c.regime == Regime::Critical;
  os << (critical ? "t,z,z1,z2\n" : "t,z\n");
  for (std::size_t k = 0; k < c.t.size(); ++k) {
    os << fmt(c.t[k], precision) << ',' << fmt(c.z[k], precision);
    if (critical) os << ',' << fmt(c.z1[k], precision) << ',' << fmt(c.z2[k], precision);
    os << '\n';
  }
}

nlohmann::json run_simulate(const ScenarioConfig& c, const HarnessOptions& o) {
  const SystemState init = c.initial_state();
  const bool finite = !c.scaled.F_N.is_infinite();
  auto rows = map_replicas(
      static_cast<std::size_t>(c.replicas),
      [&](std::size_t k) {
        const Path path = simulate_path(c.model, c.scaled, init, c.horizon, c.seed, k, c.record);
        const std::string suffix = "_r" + std::to_string(k) + (c.format == OutputFormat::Csv ? ".csv" : ".json");
        const auto file = out_file(c, o, suffix);
        if (c.format == OutputFormat::Csv) {
          auto os = open_out(file);
          write_path_csv(os, path, c.precision);
        } else {
          json cols = {{"t", json::array()}, {"x0", json::array()}, {"x1", json::array()},
                       {"x2", json::array()}, {"kind", json::array()}};
          for (const auto& p : path.points) {
            cols["t"].push_back(p.t);
            cols["x0"].push_back(p.state.x0);
            cols["x1"].push_back(p.state.x1);
            cols["x2"].push_back(p.state.x2);
            cols["kind"].push_back(std::string(to_string(p.kind)));
          }
          write_json(file, {{"provenance", provenance(c)}, {"replica", k}, {"path", cols}});
        }
        const SystemState& last = path.points.back().state;
        const Vec2 fin = scaled_state(path, c.horizon, c.scaled.N);
        json row = {{"replica", k},
                    {"file", file.filename().string()},
                    {"events", path.events},
                    {"frozen", path.frozen},
                    {"final_state", state_json(last)},
                    {"final_scaled", {fin.x1, fin.x2}}};
        if (finite) {
          const auto t1 = first_saturation_time(c.model, c.scaled, init, c.horizon, c.seed, k);
          row["T1"] = t1 ? json(*t1) : json(nullptr);
        }
        return row;
      },
      o.execution);
  json summary = {{"provenance", provenance(c)},
                  {"regime", std::string(to_string(classify_regime(c.model, o.regime_tol)))},
                  {"replicas", rows}};
  write_json(out_file(c, o, "_summary.json"), summary);
  return summary;
}

nlohmann::json run_fluid(const ScenarioConfig& c, const HarnessOptions& o) {
  const FluidTrajectory f = fluid_trajectory(c.model, c.x0, c.horizon, grid_dt(c), o.regime_tol);
  if (c.format == OutputFormat::Csv) {
    auto os = open_out(out_file(c, o, "_fluid.csv"));
    os << "t,x1,x2,on_boundary2\n";
    for (const auto& p : f.points)
      os << fmt(p.t, c.precision) << ',' << fmt(p.x1, c.precision) << ',' << fmt(p.x2, c.precision) << ','
         << (p.on_boundary2 ? 1 : 0) << '\n';
  }
  json summary = {{"provenance", provenance(c)},
                  {"regime", std::string(to_string(f.regime))},
                  {"points", f.points.size()},
                  {"numeric", f.numeric},
                  {"unspecified_corner", f.unspecified_corner},
                  {"contact_time", f.contact_time ? json(*f.contact_time) : json(nullptr)},
                  {"final", {f.points.back().x1, f.points.back().x2}}};
  if (f.regime == Regime::OverLoaded && load(c.x0) < c.model.beta_bar)
    summary["T0"] = hitting_time_T0(c.model, c.x0);
  if (c.format == OutputFormat::Json) {
    json rows = json::array();
    for (const auto& p : f.points) rows.push_back({p.t, p.x1, p.x2, p.on_boundary2});
    summary["trajectory"] = {{"columns", {"t", "x1", "x2", "on_boundary2"}}, {"rows", rows}};
  }
  write_json(out_file(c, o, "_fluid.json"), summary);
  return summary;
}

nlohmann::json run_compare(const ScenarioConfig& c, const HarnessOptions& o) {
  const FluidTrajectory f = fluid_trajectory(c.model, c.x0, c.horizon, grid_dt(c), o.regime_tol);
  const SystemState init = c.initial_state();
  const auto dist = map_replicas(
      static_cast<std::size_t>(c.replicas),
      [&](std::size_t k) {
        const Path path = simulate_path(c.model, c.scaled, init, c.horizon, c.seed, k);
        std::vector<Vec2> samples;
        samples.reserve(f.points.size());
        for (const auto& p : f.points) samples.push_back(scaled_state(path, std::min(p.t, c.horizon), c.scaled.N));
        return sup_distance(f, samples);
      },
      o.execution);
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  json summary = {{"provenance", provenance(c)},
                  {"grid_dt", grid_dt(c)},
                  {"fluid_regime", std::string(to_string(f.regime))},
                  {"per_replica", dist},
                  {"aggregate",
                   {{"min", sorted.front()},
                    {"median", median},
                    {"mean", summarize(dist).mean},
                    {"max", sorted.back()}}}};
  write_json(out_file(c, o, "_compare.json"), summary);
  return summary;
}

nlohmann::json run_report_bundle(const ScenarioConfig& c, const std::vector<Check>& which,
                                 const HarnessOptions& o) {
  json checks = json::object();
  for (Check k : which) {
    json v;
    try {
      switch (k) {
        case Check::FastChain: v = check_fastchain(c, o); break;
        case Check::Hitting: v = check_hitting(c, o); break;
        case Check::Martingale: v = check_martingale(c, o); break;
        case Check::Diffusion: v = check_diffusion(c, o); break;
      }
    } catch (const Error& e) {
      v = {{"status", "fail"}, {"error", e.code()}, {"detail", e.what()}};
    }
    checks[std::string(to_string(k))] = v;
  }
  json doc = {{"provenance", provenance(c)},
              {"regime", std::string(to_string(classify_regime(c.model, o.regime_tol)))},
              {"checks", checks}};
  doc["all_pass"] = bundle_passed(doc);
  write_json(out_file(c, o, "_report.json"), doc);
  return doc;
}

bool bundle_passed(const nlohmann::json& bundle) {
  for (const auto& [name, v] : bundle.at("checks").items())
    if (v.at("status") == "fail") return false;
  return true;
}

}  // namespace storenet
