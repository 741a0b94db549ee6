#include "seasonal_dispersal/config.hpp"

#include "seasonal_dispersal/dispersal_operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sdisp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::ostringstream out;
  out << "invalid configuration (" << errors.size()
      << (errors.size() == 1 ? " problem)" : " problems)");
  for (const auto& e : errors) out << "\n  - " << e;
  return out.str();
}

struct Errors {
  std::vector<std::string> list;
  bool hypothesis = false;
  void add(std::string msg) { list.push_back(std::move(msg)); }
  std::size_t size() const { return list.size(); }
};

// Typed access to one JSON object. Records which keys were read so that
// finish() can reject the rest, and builds the resolved echo as it goes.
class Section {
 public:
  Section(const json& obj, std::string name, Errors& errors)
      : obj_(obj), name_(std::move(name)), errors_(errors) {}

  bool has(const std::string& key) const { return obj_.contains(key); }
  void mark(const std::string& key) { seen_.insert(key); }

  std::string key_path(const std::string& key) const { return name_ + "." + key; }

  std::optional<double> optional_number(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_.at(key).is_null()) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_number()) {
      errors_.add(key_path(key) + " must be a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      errors_.add(key_path(key) + " must be finite");
      return std::nullopt;
    }
    echo[key] = x;
    return x;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key) && !fallback) {
      seen_.insert(key);
      errors_.add(key_path(key) + " is required");
      return std::nan("");
    }
    auto v = optional_number(key);
    if (v) return *v;
    if (!has(key) && fallback) {
      echo[key] = *fallback;
      return *fallback;
    }
    return std::nan("");
  }

  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
    seen_.insert(key);
    if (!obj_.contains(key)) {
      if (!fallback) {
        errors_.add(key_path(key) + " is required");
        return 0;
      }
      echo[key] = *fallback;
      return *fallback;
    }
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) {
      errors_.add(key_path(key) + " must be an integer");
      return fallback.value_or(0);
    }
    echo[key] = v.get<long long>();
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!obj_.contains(key)) {
      echo[key] = fallback;
      return fallback;
    }
    if (!obj_.at(key).is_boolean()) {
      errors_.add(key_path(key) + " must be true or false");
      return fallback;
    }
    echo[key] = obj_.at(key).get<bool>();
    return obj_.at(key).get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    seen_.insert(key);
    if (!obj_.contains(key)) {
      if (!fallback) {
        errors_.add(key_path(key) + " is required");
        return {};
      }
      echo[key] = *fallback;
      return *fallback;
    }
    if (!obj_.at(key).is_string()) {
      errors_.add(key_path(key) + " must be a string");
      return fallback.value_or("");
    }
    echo[key] = obj_.at(key).get<std::string>();
    return obj_.at(key).get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    seen_.insert(key);
    std::vector<double> out;
    if (!obj_.contains(key)) {
      errors_.add(key_path(key) + " is required");
      return out;
    }
    const json& v = obj_.at(key);
    if (!v.is_array()) {
      errors_.add(key_path(key) + " must be an array of numbers");
      return out;
    }
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        errors_.add(key_path(key) + " must contain finite numbers only");
        return {};
      }
      out.push_back(e.get<double>());
    }
    echo[key] = out;
    return out;
  }

  void finish() {
    for (const auto& item : obj_.items())
      if (!seen_.count(item.key())) errors_.add("unknown key '" + key_path(item.key()) + "'");
  }

  json echo = json::object();

 private:
  const json& obj_;
  std::string name_;
  Errors& errors_;
  std::set<std::string> seen_;
};

const json& empty_object() {
  static const json empty = json::object();
  return empty;
}

// Returns the named top-level object, or an empty one after recording an error.
const json& section_object(const json& doc, const std::string& name, bool required,
                           Errors& errors) {
  if (!doc.contains(name)) {
    if (required) errors.add("section '" + name + "' is required");
    return empty_object();
  }
  if (!doc.at(name).is_object()) {
    errors.add("section '" + name + "' must be an object");
    return empty_object();
  }
  return doc.at(name);
}

void require(bool ok, Errors& errors, const std::string& msg) {
  if (!ok) errors.add(msg);
}

// Resolves a referenced table file, recording an error if it is missing.
std::optional<std::vector<std::vector<double>>> load_table(Section& s, const fs::path& base,
                                                           Errors& errors) {
  const std::string rel = s.string("path");
  if (rel.empty()) return std::nullopt;
  const fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
  if (!fs::exists(p)) {
    errors.add(s.key_path("path") + ": file '" + p.string() + "' does not exist");
    return std::nullopt;
  }
  try {
    return read_numeric_table(p);
  } catch (const Error& e) {
    errors.add(s.key_path("path") + ": " + e.what());
    return std::nullopt;
  }
}

// (x, value) pairs from either inline arrays or a two-column file.
void read_xy(Section& s, const fs::path& base, Errors& errors, std::vector<double>& xs,
             std::vector<double>& values) {
  if (s.has("path")) {
    auto table = load_table(s, base, errors);
    if (!table) return;
    for (const auto& row : *table) {
      if (row.size() < 2) {
        errors.add(s.key_path("path") + ": every row needs x and value columns");
        return;
      }
      xs.push_back(row[0]);
      values.push_back(row[1]);
    }
    return;
  }
  xs = s.numbers("x");
  values = s.numbers("values");
  if (xs.size() != values.size())
    errors.add(s.key_path("x") + " and " + s.key_path("values") + " differ in length");
}

void parse_grid(const json& obj, RunConfig& cfg, Errors& errors) {
  Section s(obj, "grid", errors);
  auto& g = cfg.problem.grid;
  g.x_min = s.number("x_min");
  g.x_max = s.number("x_max");
  const long long n = s.integer("n");
  const std::string boundary = s.string("boundary", "truncated");
  s.finish();
  require(!(g.x_min >= g.x_max), errors, "grid.x_min must be smaller than grid.x_max");
  if (n < 3 || n > 20000)
    errors.add("grid.n must lie in [3, 20000]");
  else
    g.n = static_cast<std::size_t>(n);
  try {
    g.boundary = boundary_mode_from_string(boundary);
  } catch (const Error& e) {
    errors.add(std::string("grid.boundary: ") + e.what());
  }
  cfg.echo["grid"] = s.echo;
}

void parse_kernel(const json& obj, RunConfig& cfg, Errors& errors) {
  Section s(obj, "kernel", errors);
  auto& k = cfg.problem.kernel;
  const std::string family = s.string("family", "tent");
  k.gamma = s.number("gamma");
  try {
    k.family = kernel_family_from_string(family);
  } catch (const Error& e) {
    errors.add(std::string("kernel.family: ") + e.what());
  }
  if (k.family == KernelFamily::truncated_gaussian) k.sigma = s.number("sigma", 0.5 * k.gamma);
  if (k.family == KernelFamily::tabulated) k.samples = s.numbers("samples");
  s.finish();
  require(k.gamma > 0.0, errors, "kernel.gamma must be positive");
  if (k.family == KernelFamily::truncated_gaussian) require(k.sigma > 0.0, errors, "kernel.sigma must be positive");
  cfg.echo["kernel"] = s.echo;
}

void parse_operator(const json& obj, RunConfig& cfg, Errors& errors) {
  Section s(obj, "operator", errors);
  cfg.problem.op.d = s.number("d", 1.0);
  cfg.problem.op.normalize_rows = s.boolean("normalize_rows", true);
  s.finish();
  require(cfg.problem.op.d > 0.0, errors, "operator.d must be positive");
  cfg.echo["operator"] = s.echo;
}

void parse_season(const json& obj, RunConfig& cfg, Errors& errors) {
  Section s(obj, "season", errors);
  const double omega = s.number("omega");
  const double rho = s.number("rho");
  const double delta = s.number("delta");
  s.finish();
  const std::size_t before = errors.size();
  require(omega > 0.0, errors, "season.omega must be positive");
  require(rho > 0.0 && rho < 1.0, errors, "season.rho must lie in (0,1)");
  require(delta > 0.0, errors, "season.delta must be positive");
  if (errors.size() == before) cfg.problem.season = SeasonClock::make(omega, rho, delta);
  cfg.echo["season"] = s.echo;
}

TimeProfileSpec parse_a(const json& v, const fs::path& base, Errors& errors, json& echo) {
  TimeProfileSpec a;
  if (v.is_number()) {
    a.value = v.get<double>();
    echo = a.value;
    return a;
  }
  if (!v.is_object()) {
    errors.add("growth.a must be a number or an object");
    return a;
  }
  Section s(v, "growth.a", errors);
  const std::string kind = s.string("kind");
  if (kind == "constant") {
    a.kind = TimeProfileSpec::Kind::constant;
    a.value = s.number("value");
  } else if (kind == "sine") {
    a.kind = TimeProfileSpec::Kind::sine;
    a.value = s.number("mean", 0.0);
    a.amplitude = s.number("amplitude");
    a.cycles = s.number("cycles", 1.0);
  } else if (kind == "table") {
    a.kind = TimeProfileSpec::Kind::table;
    if (s.has("path")) {
      if (auto table = load_table(s, base, errors)) {
        for (const auto& row : *table) a.values.push_back(row.back());
        s.echo["values"] = a.values;
      }
    } else {
      a.values = s.numbers("values");
    }
    require(a.values.size() >= 2, errors, "growth.a table needs at least 2 values");
  } else if (!kind.empty()) {
    errors.add("growth.a.kind must be one of constant, sine, table");
  }
  s.finish();
  echo = s.echo;
  return a;
}

SpatialProfile parse_b(const json& v, const fs::path& base, Errors& errors, json& echo) {
  if (v.is_number()) {
    echo = v;
    return SpatialProfile::constant_value(v.get<double>());
  }
  if (!v.is_object()) {
    errors.add("growth.b must be a number or an object");
    return SpatialProfile::constant_value(0.0);
  }
  Section s(v, "growth.b", errors);
  const std::string kind = s.string("kind");
  SpatialProfile b = SpatialProfile::constant_value(0.0);
  const std::size_t before = errors.size();
  try {
    if (kind == "constant") {
      const double value = s.number("value");
      if (errors.size() == before) b = SpatialProfile::constant_value(value);
    } else if (kind == "linear") {
      const double intercept = s.number("intercept", 0.0);
      const double slope = s.number("slope");
      if (errors.size() == before) b = SpatialProfile::linear(intercept, slope);
    } else if (kind == "gaussian") {
      const double base_level = s.number("base", 0.0);
      const double amplitude = s.number("amplitude");
      const double center = s.number("center", 0.0);
      const double width = s.number("width");
      if (errors.size() == before)
        b = SpatialProfile::gaussian(base_level, amplitude, center, width);
    } else if (kind == "cosine") {
      const double mean = s.number("mean", 0.0);
      const double amplitude = s.number("amplitude");
      const double wavelength = s.number("wavelength");
      const double phase = s.number("phase", 0.0);
      if (errors.size() == before) b = SpatialProfile::cosine(mean, amplitude, wavelength, phase);
    } else if (kind == "table") {
      std::vector<double> xs, values;
      read_xy(s, base, errors, xs, values);
      if (errors.size() == before) {
        b = SpatialProfile::table(xs, values);
        s.echo["x"] = xs;
        s.echo["values"] = values;
      }
    } else if (!kind.empty()) {
      errors.add("growth.b.kind must be one of constant, linear, gaussian, cosine, table");
    }
  } catch (const Error& e) {
    errors.add(std::string("growth.b: ") + e.what());
  }
  s.finish();
  echo = s.echo;
  return b;
}

void parse_growth(const json& obj, const fs::path& base, RunConfig& cfg, Errors& errors) {
  Section s(obj, "growth", errors);
  auto& g = cfg.problem.growth;
  const std::string family = s.string("family", "logistic");
  try {
    g.family = growth_family_from_string(family);
    if (g.family == GrowthFamily::custom)
      errors.add("growth.family 'custom' needs a callable and cannot be configured from a file");
  } catch (const Error& e) {
    errors.add(std::string("growth.family: ") + e.what());
  }
  json a_echo = 0.0, b_echo;
  if (obj.contains("a")) g.a = parse_a(obj.at("a"), base, errors, a_echo);
  s.mark("a");
  s.echo["a"] = a_echo;
  if (obj.contains("b")) {
    g.b = parse_b(obj.at("b"), base, errors, b_echo);
    s.mark("b");
    s.echo["b"] = b_echo;
  } else {
    s.number("b");  // reports "growth.b is required"
  }
  g.c_sat = s.number("c_sat", 1.0);
  g.K0 = s.optional_number("K0");
  g.K_lip = s.optional_number("K_lip");
  s.finish();
  require(g.c_sat > 0.0, errors, "growth.c_sat must be positive");
  if (g.K0) require(*g.K0 > 0.0, errors, "growth.K0 must be positive");
  if (g.K_lip) require(*g.K_lip > 0.0, errors, "growth.K_lip must be positive");
  cfg.echo["growth"] = s.echo;
}

void parse_solver(const json& obj, RunConfig& cfg, Errors& errors) {
  Section s(obj, "solver", errors);
  auto& v = cfg.solver;
  const long long substeps = s.integer("substeps", 0);
  v.eigen_tol = s.number("eigen_tol", kDefaultEigenTol);
  const long long eigen_max_iter = s.integer("eigen_max_iter", kDefaultEigenMaxIter);
  v.periodic_tol = s.number("periodic_tol", 1e-8);
  const long long max_sweeps = s.integer("max_sweeps", 2000);
  const long long max_periods = s.integer("max_periods", 5000);
  const long long periods = s.integer("periods", 300);
  v.extinct_threshold = s.number("extinct_threshold", 1e-6);
  v.margin = s.number("margin", 0.05);
  const long long floquet_substeps = s.integer("floquet_substeps", 1024);
  s.finish();
  require(substeps == 0 || substeps >= 8, errors, "solver.substeps must be 0 (automatic) or >= 8");
  require(v.eigen_tol > 0.0, errors, "solver.eigen_tol must be positive");
  require(eigen_max_iter >= 1, errors, "solver.eigen_max_iter must be >= 1");
  require(v.periodic_tol > 0.0, errors, "solver.periodic_tol must be positive");
  require(max_sweeps >= 1, errors, "solver.max_sweeps must be >= 1");
  require(max_periods >= 1, errors, "solver.max_periods must be >= 1");
  require(periods >= 1, errors, "solver.periods must be >= 1");
  require(v.extinct_threshold > 0.0 && v.extinct_threshold < 1.0, errors,
          "solver.extinct_threshold must lie in (0,1)");
  require(v.margin >= 0.0, errors, "solver.margin must be >= 0");
  require(floquet_substeps >= 8, errors, "solver.floquet_substeps must be >= 8");
  v.substeps = static_cast<std::size_t>(std::max(0LL, substeps));
  v.eigen_max_iter = static_cast<int>(std::clamp(eigen_max_iter, 1LL, 1LL << 30));
  v.max_sweeps = static_cast<int>(std::clamp(max_sweeps, 1LL, 1LL << 30));
  v.max_periods = static_cast<int>(std::clamp(max_periods, 1LL, 1LL << 30));
  v.periods = static_cast<std::size_t>(std::max(1LL, periods));
  v.floquet_substeps = static_cast<std::size_t>(std::max(8LL, floquet_substeps));
  cfg.echo["solver"] = s.echo;
}

void parse_seed(const json& obj, const fs::path& base, RunConfig& cfg, Errors& errors) {
  Section s(obj, "seed", errors);
  auto& seed = cfg.seed;
  const std::string kind = s.string("kind", "gaussian");
  if (kind == "constant") {
    seed.kind = SeedSpec::Kind::constant;
    seed.value = s.number("value", 0.5);
    require(seed.value >= 0.0, errors, "seed.value must be >= 0");
  } else if (kind == "gaussian") {
    seed.kind = SeedSpec::Kind::gaussian;
    seed.base = s.number("base", 0.1);
    seed.amplitude = s.number("amplitude", 0.5);
    seed.center = s.number("center", 0.0);
    seed.width = s.number("width", 1.0);
    require(seed.base >= 0.0 && seed.amplitude >= 0.0, errors,
            "seed.base and seed.amplitude must be >= 0");
    require(seed.width > 0.0, errors, "seed.width must be positive");
  } else if (kind == "table") {
    seed.kind = SeedSpec::Kind::table;
    read_xy(s, base, errors, seed.xs, seed.values);
    s.echo["x"] = seed.xs;
    s.echo["values"] = seed.values;
    require(seed.xs.size() >= 2, errors, "seed table needs at least 2 rows");
    for (double v : seed.values)
      if (v < 0.0) {
        errors.add("seed table values must be >= 0");
        break;
      }
  } else {
    errors.add("seed.kind must be one of constant, gaussian, table");
  }
  s.finish();
  cfg.echo["seed"] = s.echo;
}

void parse_output(const json& obj, RunConfig& cfg, Errors& errors) {
  Section s(obj, "output", errors);
  cfg.output.manifest = s.string("manifest", "");
  s.finish();
  cfg.echo["output"] = s.echo;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors, bool hypothesis_violation)
    : InvalidArgument(join_errors(errors)),
      errors_(std::move(errors)),
      hypothesis_(hypothesis_violation) {}

std::vector<std::vector<double>> read_numeric_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open table '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    bool numeric = true;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(token, &used));
        numeric = numeric && used == token.size();
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (row.empty() && numeric) continue;
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw InvalidArgument("non-numeric field in '" + path.string() + "' line " +
                            std::to_string(line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidArgument("ragged row in '" + path.string() + "' line " +
                            std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("table '" + path.string() + "' has no data rows");
  return rows;
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  Errors errors;
  RunConfig cfg;
  if (!doc.is_object()) throw ConfigError({"configuration root must be a JSON object"}, false);

  static const std::set<std::string> known = {"grid",   "kernel", "operator", "season",
                                              "growth", "solver", "seed",     "output"};
  for (const auto& item : doc.items())
    if (!known.count(item.key())) errors.add("unknown key '" + item.key() + "'");

  parse_grid(section_object(doc, "grid", true, errors), cfg, errors);
  const std::size_t spatial_before = errors.size();
  parse_kernel(section_object(doc, "kernel", true, errors), cfg, errors);
  parse_operator(section_object(doc, "operator", false, errors), cfg, errors);
  const bool spatial_ok = errors.size() == spatial_before;
  parse_season(section_object(doc, "season", true, errors), cfg, errors);
  parse_growth(section_object(doc, "growth", true, errors), base_dir, cfg, errors);
  parse_solver(section_object(doc, "solver", false, errors), cfg, errors);
  parse_seed(section_object(doc, "seed", false, errors), base_dir, cfg, errors);
  parse_output(section_object(doc, "output", false, errors), cfg, errors);

  // Forward the operator preconditions (resolution, wrap aliasing) even when
  // other sections have problems, so that every violation is listed.
  if (spatial_ok) {
    try {
      const auto& g = cfg.problem.grid;
      const SpatialGrid grid = build_grid(g.x_min, g.x_max, g.n, g.boundary);
      assemble_operator(grid, make_kernel(cfg.problem.kernel), cfg.problem.op.d,
                        cfg.problem.op.normalize_rows);
    } catch (const HypothesisViolation& e) {
      errors.add(e.what());
      errors.hypothesis = true;
    } catch (const Error& e) {
      errors.add(e.what());
    }
  }

  if (errors.list.empty()) {
    try {
      const Problem p = build_problem(cfg.problem);
      make_initial(cfg.seed, p.grid);
    } catch (const HypothesisViolation& e) {
      errors.add(e.what());
      errors.hypothesis = true;
    } catch (const Error& e) {
      errors.add(e.what());
    }
  }
  if (!errors.list.empty()) throw ConfigError(std::move(errors.list), errors.hypothesis);
  return cfg;
}

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError({"JSON syntax error at line " + std::to_string(line) + ", column " +
                       std::to_string(column) + ": " + e.what()},
                      false);
  }
  return parse_config(doc, base_dir);
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read configuration '" + path.string() + "'"}, false);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.parent_path().empty() ? fs::path(".")
                                                                  : path.parent_path());
}

}  // namespace sdisp
