#include "smde/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "smde/error.hpp"

#ifndef SMDE_VERSION
#define SMDE_VERSION "0.0.0"
#endif

namespace smde::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

// Splits on commas that are not inside parentheses.
std::vector<std::string_view> split_top(std::string_view v) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= v.size(); ++i) {
    if (i == v.size() || (v[i] == ',' && depth == 0)) {
      out.push_back(trim(v.substr(start, i - start)));
      start = i + 1;
    } else if (v[i] == '(') {
      ++depth;
    } else if (v[i] == ')') {
      --depth;
    }
  }
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string exact(double v) { return fmt("%.17g", v); }

std::string fixed4(double v) {
  if (std::isnan(v)) return "--";
  std::string s = fmt("%.4f", v);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string join(const std::vector<double>& v, const char* sep, std::string (*f)(double)) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += f(v[i]);
  }
  return out;
}

std::string short_num(double v) { return fmt("%g", v); }

std::vector<std::string> coordinate_names(Family f) {
  switch (f) {
    case Family::Burr: return {"c", "k"};
    case Family::ExpPoly: return {"theta1", "theta3"};
    default: return {"theta"};
  }
}

ParamVector placeholder(Family f) {
  switch (f) {
    case Family::Burr: return ParamVector(f, {1.0, 1.0});
    case Family::ExpPoly: return ParamVector(f, {0.0, -1.0});
    default: return ParamVector(f, {1.0});
  }
}

struct Entry {
  std::size_t line;
  std::string value;
};

ConfigError bad(const std::string& what, const Entry& e, const std::string& key) {
  return ConfigError("line " + std::to_string(e.line) + ": " + key + ": " + what, e.line, key);
}

}  // namespace

const char* version() noexcept { return SMDE_VERSION; }

Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "md") return Format::Markdown;
  if (s == "json") return Format::Json;
  throw ConfigError("unknown format '" + std::string(s) + "' (expected csv, md or json)", 0,
                    "format");
}

std::string_view to_string(Format f) noexcept {
  switch (f) {
    case Format::Csv: return "csv";
    case Format::Markdown: return "md";
    case Format::Json: return "json";
  }
  return "csv";
}

void ExperimentConfig::validate() const {
  if (theta0.empty()) throw ConfigError("theta0 list is empty", 0, "theta0");
  if (n.empty()) throw ConfigError("sample-size list is empty", 0, "n");
  if (estimators.empty()) throw ConfigError("estimator list is empty", 0, "estimators");
  if (reps == 0) throw ConfigError("reps must be at least 1", 0, "reps");
  for (const ParamVector& p : theta0)
    if (p.family() != family) throw ConfigError("theta0 belongs to another family", 0, "theta0");
  for (std::size_t v : n)
    if (v == 0) throw ConfigError("sample sizes must be positive", 0, "n");
  for (const EstimatorSpec& e : estimators) {
    if (!supports(family, e.kind))
      throw ConfigError("estimator '" + estimator_id(e) + "' does not apply to " +
                            std::string(smde::to_string(family)),
                        0, "estimators");
    if (e.kind == EstimatorKind::Stein && !(e.tuning && *e.tuning > 0.0))
      throw ConfigError("stein needs a positive a", 0, "a");
    if (e.kind == EstimatorKind::Identity)
      throw ConfigError("identity is a test estimator, not for experiments", 0, "estimators");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  static const char* const kKeys[] = {"family", "theta0", "n",      "estimators",
                                      "a",      "reps",   "seed",   "format", "name"};
  std::map<std::string, Entry> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'", lineno);
    const std::string key(trim(v.substr(0, eq)));
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known)
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'", lineno,
                        key);
    if (raw.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'",
                        lineno, key);
    raw[key] = {lineno, std::string(trim(v.substr(eq + 1)))};
  }

  for (const char* k : {"family", "theta0", "n", "estimators"})
    if (!raw.count(k)) throw ConfigError(std::string("missing required key '") + k + "'", 0, k);

  ExperimentConfig cfg;
  const Entry& fam = raw["family"];
  try {
    cfg.family = family_from_string(fam.value);
  } catch (const DomainError&) {
    throw bad("unknown family '" + fam.value + "'", fam, "family");
  }

  if (raw.count("name")) {
    cfg.name = raw["name"].value;
    if (cfg.name.empty() || cfg.name.find_first_of("/\\ ") != std::string::npos)
      throw bad("name must be a non-empty word", raw["name"], "name");
  }

  const Entry& th = raw["theta0"];
  const std::size_t dim = param_dim(cfg.family);
  for (std::string_view item : split_top(th.value)) {
    if (item.empty()) throw bad("empty list item", th, "theta0");
    if (item.front() == '(') {
      if (item.back() != ')') throw bad("unbalanced parenthesis", th, "theta0");
      item = item.substr(1, item.size() - 2);
    }
    std::vector<double> coords;
    for (std::string_view c : split_top(item)) {
      double x = 0.0;
      if (!parse_double(c, x)) throw bad("not a number: '" + std::string(c) + "'", th, "theta0");
      coords.push_back(x);
    }
    if (coords.size() != dim)
      throw bad("expected " + std::to_string(dim) + " coordinate(s) per entry", th, "theta0");
    if (!in_param_space(cfg.family, coords))
      throw bad("outside the parameter space of " + std::string(smde::to_string(cfg.family)), th,
                "theta0");
    cfg.theta0.emplace_back(cfg.family, coords);
  }

  const Entry& ns = raw["n"];
  for (std::string_view item : split_top(ns.value)) {
    std::uint64_t v = 0;
    if (!parse_u64(item, v) || v == 0)
      throw bad("sample sizes must be positive integers", ns, "n");
    cfg.n.push_back(static_cast<std::size_t>(v));
  }

  std::vector<double> a_values;
  if (raw.count("a")) {
    const Entry& ae = raw["a"];
    for (std::string_view item : split_top(ae.value)) {
      double a = 0.0;
      if (!parse_double(item, a) || !(a > 0.0) || !std::isfinite(a))
        throw bad("tuning values must be positive numbers", ae, "a");
      a_values.push_back(a);
    }
  }

  const Entry& es = raw["estimators"];
  if (!es.value.empty()) {
    for (std::string_view item : split_top(es.value)) {
      if (item == "stein") {
        if (a_values.empty()) throw bad("bare 'stein' needs an 'a' list", es, "estimators");
        for (double a : a_values) cfg.estimators.push_back({EstimatorKind::Stein, a});
        continue;
      }
      EstimatorSpec spec;
      try {
        spec = parse_estimator(item);
      } catch (const DomainError& e) {
        throw bad(e.what(), es, "estimators");
      }
      if (!supports(cfg.family, spec.kind))
        throw bad("'" + std::string(item) + "' does not apply to " +
                      std::string(smde::to_string(cfg.family)),
                  es, "estimators");
      if (spec.kind == EstimatorKind::Identity)
        throw bad("identity is a test estimator, not for experiments", es, "estimators");
      cfg.estimators.push_back(spec);
    }
  }
  if (cfg.estimators.empty()) throw bad("estimator list is empty", es, "estimators");

  if (raw.count("reps")) {
    std::uint64_t v = 0;
    if (!parse_u64(raw["reps"].value, v) || v == 0)
      throw bad("must be a positive integer", raw["reps"], "reps");
    cfg.reps = static_cast<std::size_t>(v);
  }
  if (raw.count("seed")) {
    if (!parse_u64(raw["seed"].value, cfg.seed))
      throw bad("must be an unsigned 64-bit integer", raw["seed"], "seed");
  }
  if (raw.count("format")) {
    try {
      cfg.format = format_from_string(raw["format"].value);
    } catch (const ConfigError& e) {
      throw bad(e.what(), raw["format"], "format");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0, "config");
  return parse_config(in);
}

ExperimentConfig builtin_table(int table) {
  if (table < 1 || table > 8) throw ConfigError("tables are numbered 1 to 8", 0, "table");
  ExperimentConfig cfg;
  cfg.name = "table" + std::to_string(table);
  cfg.n = {10, 25, 50, 100, 200};
  std::vector<double> a_values{0.25, 0.5, 1.0, 2.0, 3.0};
  std::vector<const char*> classical;
  switch ((table + 1) / 2) {
    case 1:
      cfg.family = Family::Exponential;
      for (double t : {0.5, 2.0, 5.0, 10.0}) cfg.theta0.emplace_back(cfg.family, std::initializer_list<double>{t});
      classical = {"ml", "mse", "cvm"};
      break;
    case 2:
      cfg.family = Family::Rayleigh;
      for (double t : {0.5, 2.0, 5.0, 10.0}) cfg.theta0.emplace_back(cfg.family, std::initializer_list<double>{t});
      classical = {"ml", "mom", "am", "cvm"};
      break;
    case 3:
      cfg.family = Family::Burr;
      cfg.theta0 = {ParamVector(cfg.family, {0.8, 2.0}), ParamVector(cfg.family, {2.0, 5.0}),
                    ParamVector(cfg.family, {5.0, 0.8})};
      classical = {"ml", "cvm"};
      break;
    default:
      cfg.family = Family::ExpPoly;
      cfg.theta0 = {ParamVector(cfg.family, {1.0, -0.05}), ParamVector(cfg.family, {0.0, -0.5}),
                    ParamVector(cfg.family, {-0.5, -3.0})};
      classical = {"sm", "nce"};
      a_values.push_back(5.0);
      break;
  }
  for (const char* id : classical) cfg.estimators.push_back(parse_estimator(id));
  for (double a : a_values) cfg.estimators.push_back({EstimatorKind::Stein, a});
  return cfg;
}

Experiment run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  Experiment e{cfg, {}};
  e.cells.reserve(cfg.theta0.size() * cfg.n.size() * cfg.estimators.size());
  for (const ParamVector& t : cfg.theta0)
    for (std::size_t n : cfg.n)
      for (const EstimatorSpec& spec : cfg.estimators)
        e.cells.push_back(run_cell(cfg.family, t, n, spec, cfg.reps, cfg.seed, opts));
  return e;
}

std::string provenance(const ExperimentConfig& cfg) {
  return "seed=" + std::to_string(cfg.seed) + " reps=" + std::to_string(cfg.reps) +
         " family=" + std::string(smde::to_string(cfg.family)) + " version=" + version();
}

std::string render_table(const Experiment& e, Measure m, Format f) {
  if (f == Format::Json) return render_json(e);
  const ExperimentConfig& cfg = e.config;
  const std::size_t dim = param_dim(cfg.family);
  const std::size_t cols = cfg.estimators.size();
  const bool csv = f == Format::Csv;
  const auto names = coordinate_names(cfg.family);

  std::vector<std::string> header{"theta0", "n"};
  if (dim > 1) header.push_back("param");
  for (const EstimatorSpec& s : cfg.estimators) header.push_back(estimator_id(s));

  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& cells) {
    if (csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    } else {
      os << "|";
      for (const auto& c : cells) os << " " << c << " |";
    }
    os << "\n";
  };
  emit(header);
  if (!csv) emit(std::vector<std::string>(header.size(), "---"));

  std::size_t row = 0;
  for (const ParamVector& t : cfg.theta0) {
    const std::vector<double> tv = t.to_vector();
    const std::string label =
        dim == 1 ? short_num(tv[0]) : "(" + join(tv, csv ? ";" : ", ", short_num) + ")";
    for (std::size_t n : cfg.n) {
      for (std::size_t i = 0; i < dim; ++i) {
        std::vector<std::string> cells{label, std::to_string(n)};
        if (dim > 1) cells.push_back(names[i]);
        for (std::size_t c = 0; c < cols; ++c) {
          const McSummary& s = e.cells[row * cols + c];
          const double v = m == Measure::Bias ? s.bias[i] : s.mse[i];
          cells.push_back(csv ? exact(v) : fixed4(v));
        }
        emit(cells);
      }
      ++row;
    }
  }
  os << (csv ? "# " : "\n") << (m == Measure::Bias ? "bias" : "mse") << " " << provenance(cfg)
     << "\n";
  return os.str();
}

std::string render_json(const Experiment& e) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["name"] = e.config.name;
  doc["family"] = std::string(smde::to_string(e.config.family));
  doc["seed"] = e.config.seed;
  doc["reps"] = e.config.reps;
  doc["version"] = version();
  ordered_json cells = ordered_json::array();
  for (const McSummary& s : e.cells) {
    ordered_json c;
    c["theta0"] = s.theta0.to_vector();
    c["n"] = s.n;
    c["estimator"] = s.estimator_id;
    c["bias"] = s.bias;
    c["mse"] = s.mse;
    c["failure_count"] = s.failure_count;
    cells.push_back(std::move(c));
  }
  doc["cells"] = std::move(cells);
  return doc.dump(2) + "\n";
}

std::string render_cells_csv(const std::vector<McSummary>& cells) {
  std::ostringstream os;
  os << "family,theta0,n,estimator,tuning,D,seed,failure_count,bias,mse\n";
  for (const McSummary& s : cells) {
    os << smde::to_string(s.family) << "," << join(s.theta0.to_vector(), ";", exact) << "," << s.n
       << "," << s.estimator_id << "," << (s.tuning ? exact(*s.tuning) : "") << "," << s.D << ","
       << s.seed << "," << s.failure_count << "," << join(s.bias, ";", exact) << ","
       << join(s.mse, ";", exact) << "\n";
  }
  return os.str();
}

std::vector<McSummary> parse_cells_csv(std::istream& in) {
  std::vector<McSummary> out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    return ConfigError("line " + std::to_string(lineno) + ": " + what, lineno);
  };
  auto numbers = [&](std::string_view field) {
    std::vector<double> v;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= field.size(); ++i) {
      if (i == field.size() || field[i] == ';') {
        const std::string_view tok = field.substr(start, i - start);
        double x = 0.0;
        if (tok == "nan" || tok == "-nan") {
          x = std::nan("");
        } else if (!parse_double(tok, x)) {
          throw fail("not a number: '" + std::string(tok) + "'");
        }
        v.push_back(x);
        start = i + 1;
      }
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || trim(line).empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    f.push_back(rest);
    if (f.size() != 10) throw fail("expected 10 fields");
    McSummary s;
    try {
      s.family = family_from_string(f[0]);
      s.theta0 = ParamVector(s.family, numbers(f[1]));
    } catch (const DomainError& e) {
      throw fail(e.what());
    }
    std::uint64_t u = 0;
    if (!parse_u64(f[2], u)) throw fail("bad n");
    s.n = u;
    s.estimator_id = std::string(f[3]);
    if (!f[4].empty()) s.tuning = numbers(f[4]).at(0);
    if (!parse_u64(f[5], u)) throw fail("bad D");
    s.D = u;
    if (!parse_u64(f[6], s.seed)) throw fail("bad seed");
    if (!parse_u64(f[7], u)) throw fail("bad failure_count");
    s.failure_count = u;
    s.bias = numbers(f[8]);
    s.mse = numbers(f[9]);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> read_data(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view v = trim(line);
    if (v.empty()) continue;
    double x = 0.0;
    if (!parse_double(v, x))
      throw DataError("line " + std::to_string(lineno) + ": not a number", lineno);
    if (!std::isfinite(x))
      throw DataError("line " + std::to_string(lineno) + ": non-finite value", lineno);
    if (!(x > 0.0))
      throw DataError("line " + std::to_string(lineno) + ": nonpositive value", lineno);
    out.push_back(x);
  }
  if (out.empty()) throw DataError("no observations", lineno);
  return out;
}

std::string fit_once_json(Family family, const std::vector<double>& data, const EstimatorSpec& spec,
                          std::uint64_t seed) {
  if (spec.kind == EstimatorKind::Identity)
    throw ConfigError("identity is a test estimator, not for fitting", 0, "estimator");
  if (!supports(family, spec.kind))
    throw ConfigError("estimator '" + estimator_id(spec) + "' does not apply to " +
                          std::string(smde::to_string(family)),
                      0, "estimator");
  if (spec.kind == EstimatorKind::Stein && !spec.tuning)
    throw ConfigError("stein needs a tuning value", 0, "a");
  const EstimateReport r = apply_estimator(family, Sample(data), spec, placeholder(family), seed);
  nlohmann::ordered_json doc;
  doc["family"] = std::string(smde::to_string(family));
  doc["estimator"] = estimator_id(spec);
  doc["n"] = data.size();
  doc["estimate"] = r.estimate;
  doc["params"] = r.params.to_vector();
  doc["objective"] = r.objective_at_opt;
  doc["converged"] = r.converged;
  doc["fallback_used"] = r.fallback_used;
  doc["iterations"] = r.iterations;
  return doc.dump();
}

}  // namespace smde::cli
