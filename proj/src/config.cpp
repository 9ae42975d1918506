#include "storenet/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "storenet/error.hpp"

namespace storenet {

namespace {

struct Entry {
  std::string value;
  int line;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& what) const {
    std::ostringstream os;
    os << source_ << ':' << line << ": " << what;
    throw Error("CONFIG_ERROR", os.str());
  }

  void parse(std::string_view text) {
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      if (const auto hash = raw.find_first_of("#;"); hash != std::string_view::npos) raw = raw.substr(0, hash);
      const std::string_view line = trim(raw);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (section != "model" && section != "sim" && section != "output")
          fail(line_no, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected key = value");
      if (section.empty()) fail(line_no, "key outside of any section");
      const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
      if (!known(key)) fail(line_no, "unknown key '" + key + "'");
      if (entries_.count(key)) fail(line_no, "duplicate key '" + key + "'");
      entries_[key] = {std::string(trim(line.substr(eq + 1))), line_no};
    }
  }

  const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const Entry& require(const std::string& key) const {
    if (const Entry* e = find(key)) return *e;
    throw Error("CONFIG_ERROR", source_ + ": missing required key '" + key + "'");
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const Entry* e = fallback ? find(key) : &require(key);
    if (!e) return *fallback;
    double v = 0.0;
    const char* end = e->value.data() + e->value.size();
    const auto [p, ec] = std::from_chars(e->value.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) fail(e->line, "'" + key + "' is not a finite number");
    return v;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) const {
    const Entry* e = fallback ? find(key) : &require(key);
    if (!e) return *fallback;
    std::int64_t v = 0;
    const char* end = e->value.data() + e->value.size();
    const auto [p, ec] = std::from_chars(e->value.data(), end, v);
    if (ec != std::errc() || p != end) fail(e->line, "'" + key + "' is not an integer");
    return v;
  }

  int line_of(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->line : 0;
  }

 private:
  static bool known(const std::string& key) {
    static const char* keys[] = {"model.lambda", "model.xi",      "model.mu",       "model.beta_bar",
                                 "sim.N",        "sim.F_N",       "sim.x1_0",       "sim.x2_0",
                                 "sim.horizon",  "sim.seed",      "sim.replicas",   "sim.record",
                                 "output.format", "output.path", "output.precision"};
    for (const char* k : keys)
      if (key == k) return true;
    return false;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
};

}  // namespace

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
  Reader r{std::string(source)};
  r.parse(text);

  ScenarioConfig c;
  c.source = std::string(source);
  c.model = {r.real("model.lambda"), r.real("model.xi"), r.real("model.mu"), r.real("model.beta_bar")};
  try {
    validate(c.model);
  } catch (const Error& e) {
    r.fail(r.line_of("model.lambda"), e.what());
  }

  const std::int64_t N = r.integer("sim.N");
  if (N < 1) r.fail(r.line_of("sim.N"), "'sim.N' must be at least 1");
  if (const auto* f = r.find("sim.F_N")) {
    if (f->value == "infinite") {
      c.scaled = ScaledParams::infinite_capacity(N);
    } else {
      const std::int64_t F = r.integer("sim.F_N");
      if (F < 2) r.fail(f->line, "'sim.F_N' must be at least 2 or 'infinite'");
      c.scaled = ScaledParams{N, ExtendedCount(F)};
    }
  } else {
    c.scaled = ScaledParams::from_beta(c.model, N);
  }

  c.x0 = {r.real("sim.x1_0", 0.0), r.real("sim.x2_0", 0.0)};
  c.horizon = r.real("sim.horizon");
  if (!(c.horizon > 0.0)) r.fail(r.line_of("sim.horizon"), "'sim.horizon' must be positive");
  const std::int64_t seed = r.integer("sim.seed", 1);
  if (seed < 0) r.fail(r.line_of("sim.seed"), "'sim.seed' must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  const std::int64_t reps = r.integer("sim.replicas", 1);
  if (reps < 1 || reps > 1'000'000) r.fail(r.line_of("sim.replicas"), "'sim.replicas' must be in [1, 1e6]");
  c.replicas = static_cast<int>(reps);

  if (const auto* rec = r.find("sim.record")) {
    if (rec->value == "events") {
      c.record = Recording{};
    } else if (rec->value.rfind("grid:", 0) == 0) {
      const std::string dt = rec->value.substr(5);
      double v = 0.0;
      const auto [p, ec] = std::from_chars(dt.data(), dt.data() + dt.size(), v);
      if (ec != std::errc() || p != dt.data() + dt.size() || !(v > 0.0))
        r.fail(rec->line, "grid spacing must be a positive number");
      c.record = Recording::grid(v);
    } else {
      r.fail(rec->line, "'sim.record' must be 'events' or 'grid:<dt>'");
    }
  }

  if (const auto* f = r.find("output.format")) {
    if (f->value == "csv")
      c.format = OutputFormat::Csv;
    else if (f->value == "json")
      c.format = OutputFormat::Json;
    else
      r.fail(f->line, "'output.format' must be 'csv' or 'json'");
  }
  if (const auto* p = r.find("output.path")) {
    if (p->value.empty()) r.fail(p->line, "'output.path' must not be empty");
    c.path = p->value;
  }
  const std::int64_t prec = r.integer("output.precision", 12);
  if (prec < 1 || prec > 17) r.fail(r.line_of("output.precision"), "'output.precision' must be in [1, 17]");
  c.precision = static_cast<int>(prec);

  if (c.x0.x1 < 0.0 || c.x0.x2 < 0.0 || !in_domain_S(c.x0, c.model.beta_bar)) {
    std::ostringstream os;
    os << c.source << ':' << std::max(r.line_of("sim.x1_0"), r.line_of("sim.x2_0"))
       << ": initial point (" << c.x0.x1 << ", " << c.x0.x2 << ") is outside S (x1 + 2 x2 <= " << c.model.beta_bar
       << ")";
    throw Error("INIT_OUTSIDE_S", os.str());
  }
  if (!c.scaled.F_N.is_infinite() && occupied(c.initial_state()) > c.scaled.F_N.value())
    throw Error("INIT_OUTSIDE_S", c.source + ": initial state exceeds F_N after rounding");
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("CONFIG_ERROR", "cannot open config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), file.string());
}

nlohmann::json provenance(const ScenarioConfig& c) {
  nlohmann::json model = {
      {"lambda", c.model.lambda}, {"xi", c.model.xi}, {"mu", c.model.mu}, {"beta_bar", c.model.beta_bar}};
  nlohmann::json sim = {{"N", c.scaled.N},
                        {"x1_0", c.x0.x1},
                        {"x2_0", c.x0.x2},
                        {"horizon", c.horizon},
                        {"seed", c.seed},
                        {"replicas", c.replicas}};
  if (c.scaled.F_N.is_infinite())
    sim["F_N"] = "infinite";
  else
    sim["F_N"] = c.scaled.F_N.value();
  if (c.record.mode == Recording::Mode::Events) {
    sim["record"] = "events";
  } else {
    std::ostringstream os;
    os << "grid:" << c.record.dt;
    sim["record"] = os.str();
  }
  return {{"source", c.source},
          {"seed", c.seed},
          {"config",
           {{"model", model},
            {"sim", sim},
            {"output",
             {{"format", c.format == OutputFormat::Csv ? "csv" : "json"},
              {"path", c.path},
              {"precision", c.precision}}}}}};
}

}  // namespace storenet
