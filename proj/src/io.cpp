#include "livsic/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace livsic {

using nlohmann::json;

namespace {

struct ExperimentInfo {
  Experiment e;
  const char* name;
  const char* what;
};

const ExperimentInfo experiment_table[] = {
    {Experiment::poo, "poo", "periodic orbit obstructions up to a period"},
    {Experiment::lyapunov, "lyapunov", "fibered exponents over periodic orbits and Birkhoff runs"},
    {Experiment::domination, "domination", "smallest dominating iterate at a given beta"},
    {Experiment::solve, "solve", "transfer function on a dense orbit and its residuals"},
    {Experiment::closing_demo, "closing_demo", "closing-lemma bounds on harvested near returns"},
    {Experiment::sections, "sections", "orbit-closure sections, leaves, holonomies and trivialization"},
    {Experiment::contracting_search, "contracting_search", "search for a periodic point with a contracting fiber cycle"},
    {Experiment::theorem31_suite, "theorem31_suite", "exponents, domination and trivialization on one cocycle"},
};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& path, const std::string& reason) { issues.push_back({path, reason}); }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
        fail(join(path, it.key()), "unknown key");
    return true;
  }

  bool real(const json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(join(path, key), "expected a number");
      return false;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) fail(join(path, key), "must be finite");
    return true;
  }

  template <class Int>
  bool integer(const json& obj, const char* key, const std::string& path, Int& out) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(join(path, key), "expected an integer");
      return false;
    }
    out = v.get<Int>();
    return true;
  }

  bool text(const json& obj, const char* key, const std::string& path, std::string& out) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(join(path, key), "expected a string");
      return false;
    }
    out = v.get<std::string>();
    return true;
  }

  BaseFunction function(const json& j, const std::string& path) {
    BaseFunction f;
    if (j.is_number()) {
      f.constant = j.get<double>();
      return f;
    }
    if (!object(j, path, {"constant", "trig", "symbols"})) return f;
    real(j, "constant", path, f.constant);
    if (j.contains("trig")) {
      const json& a = j.at("trig");
      const std::string p = join(path, "trig");
      if (!a.is_array()) fail(p, "expected an array");
      else
        for (std::size_t i = 0; i < a.size(); ++i) {
          TrigTerm t;
          if (!object(a[i], index(p, i), {"amp", "kx", "ky", "phase"})) continue;
          if (!real(a[i], "amp", index(p, i), t.amp)) fail(join(index(p, i), "amp"), "missing");
          integer(a[i], "kx", index(p, i), t.kx);
          integer(a[i], "ky", index(p, i), t.ky);
          real(a[i], "phase", index(p, i), t.phase);
          f.trig.push_back(t);
        }
    }
    if (j.contains("symbols")) {
      const json& a = j.at("symbols");
      const std::string p = join(path, "symbols");
      if (!a.is_array()) fail(p, "expected an array");
      else
        for (std::size_t i = 0; i < a.size(); ++i) {
          SymbolTerm t;
          if (!object(a[i], index(p, i), {"coord", "weight"})) continue;
          integer(a[i], "coord", index(p, i), t.coord);
          if (!real(a[i], "weight", index(p, i), t.weight)) fail(join(index(p, i), "weight"), "missing");
          f.symbols.push_back(t);
        }
    }
    return f;
  }

  BumpField bump(const json& j, const std::string& path) {
    BumpField b;
    if (!object(j, path, {"a", "b", "c"})) return b;
    if (j.contains("a")) b.a = function(j.at("a"), join(path, "a"));
    else fail(join(path, "a"), "missing");
    if (j.contains("b")) b.b = function(j.at("b"), join(path, "b"));
    if (j.contains("c")) b.c = function(j.at("c"), join(path, "c"));
    return b;
  }

  LinearGenerator generator(const json& j, const std::string& path) {
    LinearGenerator g;
    if (!object(j, path, {"dim", "entries"})) return g;
    integer(j, "dim", path, g.dim);
    if (g.dim < 1 || g.dim > 8) {
      fail(join(path, "dim"), "must lie in [1, 8]");
      return g;
    }
    const std::string p = join(path, "entries");
    if (!j.contains("entries") || !j.at("entries").is_array()) {
      fail(p, "expected an array of dim * dim functions");
      return g;
    }
    const json& a = j.at("entries");
    if (a.size() != static_cast<std::size_t>(g.dim * g.dim)) fail(p, "expected dim * dim entries");
    for (std::size_t i = 0; i < a.size(); ++i) g.entries.push_back(function(a[i], index(p, i)));
    return g;
  }
};

json emit_function(const BaseFunction& f) {
  if (f.is_constant()) return f.constant;
  json j = {{"constant", f.constant}};
  if (!f.trig.empty()) {
    json a = json::array();
    for (const auto& t : f.trig) a.push_back({{"amp", t.amp}, {"kx", t.kx}, {"ky", t.ky}, {"phase", t.phase}});
    j["trig"] = a;
  }
  if (!f.symbols.empty()) {
    json a = json::array();
    for (const auto& t : f.symbols) a.push_back({{"coord", t.coord}, {"weight", t.weight}});
    j["symbols"] = a;
  }
  return j;
}

json emit_bump(const BumpField& b) {
  return {{"a", emit_function(b.a)}, {"b", emit_function(b.b)}, {"c", emit_function(b.c)}};
}

json emit_generator(const LinearGenerator& g) {
  json a = json::array();
  for (const auto& e : g.entries) a.push_back(emit_function(e));
  return {{"dim", g.dim}, {"entries", a}};
}

void parse_base(Reader& r, const json& j, BaseConfig& b) {
  if (!r.object(j, "base", {"kind", "matrix", "transition", "theta"})) return;
  std::string kind;
  if (!r.text(j, "kind", "base", kind)) {
    r.fail("base.kind", "missing");
    return;
  }
  if (kind == "cat_map") {
    b.kind = BaseKind::cat_map;
    if (j.contains("transition") || j.contains("theta")) r.fail("base", "cat_map takes only a matrix");
    if (j.contains("matrix")) {
      const json& m = j.at("matrix");
      bool ok = m.is_array() && m.size() == 2;
      for (std::size_t i = 0; ok && i < 2; ++i) {
        ok = m[i].is_array() && m[i].size() == 2;
        for (std::size_t k = 0; ok && k < 2; ++k) {
          ok = m[i][k].is_number_integer();
          if (ok) b.matrix[i][k] = m[i][k].get<std::int64_t>();
        }
      }
      if (!ok) {
        r.fail("base.matrix", "expected a 2 x 2 integer matrix");
        return;
      }
    }
    try {
      CatMap c(b.matrix);
    } catch (const Error& e) {
      r.fail("base.matrix", e.what());
    }
  } else if (kind == "sft") {
    b.kind = BaseKind::sft;
    if (j.contains("matrix")) r.fail("base.matrix", "sft takes a transition matrix");
    r.real(j, "theta", "base", b.theta);
    if (j.contains("transition")) {
      const json& m = j.at("transition");
      bool ok = m.is_array() && !m.empty();
      b.transition.clear();
      for (std::size_t i = 0; ok && i < m.size(); ++i) {
        ok = m[i].is_array();
        std::vector<int> row;
        for (std::size_t k = 0; ok && k < m[i].size(); ++k) {
          ok = m[i][k].is_number_integer();
          if (ok) row.push_back(m[i][k].get<int>());
        }
        b.transition.push_back(row);
      }
      if (!ok) {
        r.fail("base.transition", "expected a square 0/1 integer matrix");
        return;
      }
    }
    try {
      Sft s(static_cast<int>(b.transition.size()), b.transition, b.theta);
    } catch (const Error& e) {
      r.fail(e.kind() == ErrorKind::reducible ? "base.transition" : "base", e.what());
    }
  } else {
    r.fail("base.kind", "unknown base kind '" + kind + "' (cat_map | sft)");
  }
}

void parse_cocycle(Reader& r, const json& j, CocycleConfig& c) {
  if (!r.object(j, "cocycle", {"family_id", "fiber", "parameters", "alpha"})) return;
  std::string family;
  if (!r.text(j, "family_id", "cocycle", family)) {
    r.fail("cocycle.family_id", "missing");
    return;
  }
  const auto f = parse_family(family);
  if (!f) {
    r.fail("cocycle.family_id", "unknown family '" + family + "'");
    return;
  }
  c.family = *f;
  r.real(j, "alpha", "cocycle", c.alpha);
  if (!(c.alpha > 0 && c.alpha <= 1)) r.fail("cocycle.alpha", "must lie in (0, 1]");
  std::string fiber = c.family == CocycleFamily::linear_family ? "linear" : "circle";
  r.text(j, "fiber", "cocycle", fiber);
  if (fiber == "circle") c.fiber = FiberKind::circle;
  else if (fiber == "linear") c.fiber = FiberKind::linear;
  else r.fail("cocycle.fiber", "expected circle | linear");
  const bool linear_ok = c.family == CocycleFamily::linear_family || c.family == CocycleFamily::coboundary_generated;
  if (c.fiber == FiberKind::linear && !linear_ok) r.fail("cocycle.fiber", family + " is a circle family");
  if (c.fiber == FiberKind::circle && c.family == CocycleFamily::linear_family) r.fail("cocycle.fiber", "linear_family is linear");

  const json empty = json::object();
  const json& p = j.contains("parameters") ? j.at("parameters") : empty;
  const std::string pp = "cocycle.parameters";
  switch (c.family) {
    case CocycleFamily::rotation:
      if (!r.object(p, pp, {"tau"})) return;
      if (p.contains("tau")) c.tau = r.function(p.at("tau"), join(pp, "tau"));
      break;
    case CocycleFamily::arnold_bump:
    case CocycleFamily::locally_constant_sft:
      c.bump = r.bump(p, pp);
      break;
    case CocycleFamily::coboundary_generated:
      if (c.fiber == FiberKind::circle) {
        if (!r.object(p, pp, {"generator"})) return;
        if (p.contains("generator")) c.bump = r.bump(p.at("generator"), join(pp, "generator"));
        else r.fail(join(pp, "generator"), "missing");
        break;
      }
      [[fallthrough]];
    case CocycleFamily::linear_family:
      if (!r.object(p, pp, {"generator", "t"})) return;
      if (p.contains("generator")) c.generator = r.generator(p.at("generator"), join(pp, "generator"));
      else r.fail(join(pp, "generator"), "missing");
      r.real(p, "t", pp, c.t);
      break;
    case CocycleFamily::grid_table: {
      if (!r.object(p, pp, {"resolution", "cells"})) return;
      if (!r.integer(p, "resolution", pp, c.table_resolution) || c.table_resolution < 1)
        r.fail(join(pp, "resolution"), "expected a positive integer");
      const std::string cp = join(pp, "cells");
      if (!p.contains("cells") || !p.at("cells").is_array()) {
        r.fail(cp, "expected an array of [a, b, c] bump parameters");
        break;
      }
      const json& a = p.at("cells");
      for (std::size_t i = 0; i < a.size(); ++i) {
        std::array<double, 3> v{};
        bool ok = a[i].is_array() && a[i].size() == 3;
        for (std::size_t k = 0; ok && k < 3; ++k) {
          ok = a[i][k].is_number();
          if (ok) v[k] = a[i][k].get<double>();
        }
        if (!ok) r.fail(index(cp, i), "expected [a, b, c]");
        else if (!(std::abs(v[0]) < 1)) r.fail(index(cp, i), "bump amplitude must be below 1");
        c.table.push_back(v);
      }
      break;
    }
  }
}

void parse_run(Reader& r, const json& j, RunSettings& s) {
  if (!r.object(j, "run", {"period", "orbits", "length", "grid", "fiber_grid", "beta", "ell_max", "steps",
                           "near_returns", "resolutions", "t_grid", "anchors", "leaves", "horizon",
                           "export_fiber_stride"}))
    return;
  auto positive = [&](const char* key, auto& v) {
    if (r.integer(j, key, "run", v) && v < 1) r.fail(join("run", key), "must be positive");
  };
  positive("period", s.period);
  if (r.integer(j, "orbits", "run", s.orbits) && s.orbits < 0) r.fail("run.orbits", "must be >= 0");
  positive("length", s.length);
  if (r.integer(j, "grid", "run", s.grid) && s.grid < 0) r.fail("run.grid", "must be >= 0");
  if (r.integer(j, "fiber_grid", "run", s.fiber_grid) && (s.fiber_grid < 8 || (s.fiber_grid & (s.fiber_grid - 1))))
    r.fail("run.fiber_grid", "must be a power of two >= 8");
  double beta = 0;
  if (r.real(j, "beta", "run", beta)) {
    if (!(beta > 0 && beta <= 1)) r.fail("run.beta", "must lie in (0, 1]");
    s.beta = beta;
  }
  positive("ell_max", s.ell_max);
  positive("steps", s.steps);
  positive("near_returns", s.near_returns);
  positive("anchors", s.anchors);
  positive("leaves", s.leaves);
  positive("horizon", s.horizon);
  positive("export_fiber_stride", s.export_fiber_stride);
  if (j.contains("resolutions")) {
    const json& a = j.at("resolutions");
    s.resolutions.clear();
    for (std::size_t i = 0; a.is_array() && i < a.size(); ++i) {
      if (!a[i].is_number_integer() || a[i].get<int>() < 1) r.fail(index("run.resolutions", i), "expected a positive integer");
      else s.resolutions.push_back(a[i].get<int>());
    }
    if (!a.is_array()) r.fail("run.resolutions", "expected an array");
  }
  if (j.contains("t_grid")) {
    const json& a = j.at("t_grid");
    s.t_grid.clear();
    for (std::size_t i = 0; a.is_array() && i < a.size(); ++i) {
      if (!a[i].is_number()) r.fail(index("run.t_grid", i), "expected a number");
      else s.t_grid.push_back(a[i].get<double>());
    }
    if (!a.is_array()) r.fail("run.t_grid", "expected an array");
    else if (!std::is_sorted(s.t_grid.begin(), s.t_grid.end())) r.fail("run.t_grid", "must be increasing");
  }
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& i : experiment_table)
    if (i.e == e) return i.name;
  return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& s) {
  for (const auto& i : experiment_table)
    if (s == i.name) return i.e;
  return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& i : experiment_table) v.push_back(i.e);
    return v;
  }();
  return all;
}

const char* describe(Experiment e) {
  for (const auto& i : experiment_table)
    if (i.e == e) return i.what;
  return "";
}

namespace {

std::string issue_text(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& i : issues) os << "\n  " << (i.path.empty() ? "(document)" : i.path) << ": " << i.reason;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(ErrorKind::config, issue_text(issues)), issues_(std::move(issues)) {}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"poo", 1e-4},              // C^0 defect of Phi^(n)(p)
      {"residual", 5e-3},         // circle transfer function residual
      {"linear_residual", 1e-3},  // matrix transfer function residual
      {"exponent", 1e-2},         // half-width of the zero-exponent envelope
      {"conjugacy", 1e-2},        // trivialization residual
      {"groupoid", 1e-2},         // holonomy composition
      {"leaf_invariance", 1e-6},
      {"return_epsilon", 0.1},    // fiber displacement allowed at near returns
      {"uniqueness_factor", 2},   // allowed anchor-uniqueness deviation / transport error
      {"contraction", 1e-6},      // |multiplier| < 1 - contraction counts as contracting
      {"holder_stability", 0.2},  // relative change of the Hoelder ratio under grid doubling
  };
  return t;
}

double tolerance(const ScenarioConfig& cfg, const std::string& name) {
  if (auto it = cfg.tolerances.find(name); it != cfg.tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

std::map<std::string, double> effective_tolerances(const ScenarioConfig& cfg) {
  auto t = default_tolerances();
  for (const auto& [k, v] : cfg.tolerances) t[k] = v;
  return t;
}

ScenarioConfig parse_config(const json& doc) {
  Reader r;
  ScenarioConfig cfg;
  if (!r.object(doc, "", {"base", "cocycle", "experiment", "run", "tolerances", "seed", "output_dir"}))
    throw ConfigError(r.issues);
  if (doc.contains("base")) parse_base(r, doc.at("base"), cfg.base);
  else r.fail("base", "missing");
  if (doc.contains("cocycle")) parse_cocycle(r, doc.at("cocycle"), cfg.cocycle);
  else r.fail("cocycle", "missing");
  std::string experiment;
  if (r.text(doc, "experiment", "", experiment)) {
    if (auto e = parse_experiment(experiment)) cfg.experiment = *e;
    else r.fail("experiment", "unknown experiment kind '" + experiment + "'");
  } else if (!doc.contains("experiment")) {
    r.fail("experiment", "missing");
  }
  if (doc.contains("run")) parse_run(r, doc.at("run"), cfg.run);
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) r.fail("tolerances", "expected an object");
    else
      for (auto it = t.begin(); it != t.end(); ++it) {
        const std::string p = join("tolerances", it.key());
        if (!default_tolerances().count(it.key())) r.fail(p, "unknown tolerance");
        else if (!it->is_number() || !(it->get<double>() > 0)) r.fail(p, "expected a positive number");
        else cfg.tolerances[it.key()] = it->get<double>();
      }
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) r.fail("seed", "expected a non-negative integer");
    else cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  r.text(doc, "output_dir", "", cfg.output_dir);

  if (r.issues.empty()) {
    const auto& c = cfg.cocycle;
    if (c.family == CocycleFamily::locally_constant_sft && cfg.base.kind != BaseKind::sft)
      r.fail("cocycle.family_id", "locally_constant_sft needs an sft base");
    if (c.fiber == FiberKind::linear &&
        (cfg.experiment == Experiment::sections || cfg.experiment == Experiment::contracting_search))
      r.fail("experiment", std::string(to_string(cfg.experiment)) + " needs a circle fiber");
    if (c.family == CocycleFamily::grid_table) {
      try {
        const auto base = build_base(cfg.base);
        if (base->grid(c.table_resolution).size() != c.table.size())
          r.fail("cocycle.parameters.cells", "expected one entry per cell of the grid");
      } catch (const Error& e) {
        r.fail("cocycle.parameters.resolution", e.what());
      }
    }
  }
  if (r.issues.empty()) {
    try {
      build_system(cfg, build_base(cfg.base));
    } catch (const Error& e) {
      r.fail("cocycle", e.what());
    }
  }
  if (!r.issues.empty()) throw ConfigError(r.issues);
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({{"", std::string("not valid JSON: ") + e.what()}});
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json emit_config(const ScenarioConfig& cfg) {
  json base;
  if (cfg.base.kind == BaseKind::cat_map) {
    base = {{"kind", "cat_map"}, {"matrix", cfg.base.matrix}};
  } else {
    base = {{"kind", "sft"}, {"transition", cfg.base.transition}, {"theta", cfg.base.theta}};
  }
  const auto& c = cfg.cocycle;
  json params = json::object();
  switch (c.family) {
    case CocycleFamily::rotation: params["tau"] = emit_function(c.tau); break;
    case CocycleFamily::arnold_bump:
    case CocycleFamily::locally_constant_sft: params = emit_bump(c.bump); break;
    case CocycleFamily::coboundary_generated:
      if (c.fiber == FiberKind::circle) {
        params["generator"] = emit_bump(c.bump);
        break;
      }
      [[fallthrough]];
    case CocycleFamily::linear_family:
      params["generator"] = emit_generator(c.generator);
      params["t"] = c.t;
      break;
    case CocycleFamily::grid_table:
      params["resolution"] = c.table_resolution;
      params["cells"] = c.table;
      break;
  }
  json cocycle = {{"family_id", to_string(c.family)},
                  {"fiber", c.fiber == FiberKind::circle ? "circle" : "linear"},
                  {"alpha", c.alpha},
                  {"parameters", params}};
  const auto& s = cfg.run;
  json run = {{"period", s.period},   {"orbits", s.orbits},     {"length", s.length},
              {"grid", s.grid},       {"fiber_grid", s.fiber_grid}, {"ell_max", s.ell_max},
              {"steps", s.steps},     {"near_returns", s.near_returns}, {"resolutions", s.resolutions},
              {"t_grid", s.t_grid},   {"anchors", s.anchors},   {"leaves", s.leaves},
              {"horizon", s.horizon}, {"export_fiber_stride", s.export_fiber_stride}};
  if (s.beta) run["beta"] = *s.beta;
  return {{"base", base},
          {"cocycle", cocycle},
          {"experiment", to_string(cfg.experiment)},
          {"run", run},
          {"tolerances", cfg.tolerances},
          {"seed", cfg.seed},
          {"output_dir", cfg.output_dir}};
}

std::string scenario_hash(const ScenarioConfig& cfg) {
  // Output location does not change the scenario.
  json doc = emit_config(cfg);
  doc.erase("output_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::shared_ptr<const HyperbolicBase> build_base(const BaseConfig& b) {
  if (b.kind == BaseKind::cat_map) return std::make_shared<const HyperbolicBase>(CatMap(b.matrix));
  return std::make_shared<const HyperbolicBase>(Sft(static_cast<int>(b.transition.size()), b.transition, b.theta));
}

SkewSystem build_system(const ScenarioConfig& cfg, std::shared_ptr<const HyperbolicBase> base) {
  const auto& c = cfg.cocycle;
  switch (c.family) {
    case CocycleFamily::rotation: return make_skew(base, CircleCocycle::rotation(c.tau, c.alpha));
    case CocycleFamily::arnold_bump: return make_skew(base, CircleCocycle::bump(c.bump, c.alpha));
    case CocycleFamily::locally_constant_sft: return make_skew(base, CircleCocycle::locally_constant(c.bump));
    case CocycleFamily::coboundary_generated:
      if (c.fiber == FiberKind::circle) return make_skew(base, CircleCocycle::coboundary(base, c.bump, c.alpha));
      return make_skew(base, MatrixCocycle::coboundary(
                                 base, [g = c.generator, t = c.t](const BasePoint& x) { return g.v(x, t); }, c.alpha));
    case CocycleFamily::linear_family: return make_skew(base, linear_family(base, c.generator, c.t));
    case CocycleFamily::grid_table: {
      auto grid = std::make_shared<const BaseGrid>(base->grid(c.table_resolution));
      std::vector<std::shared_ptr<const CircleDiffeo>> values;
      for (const auto& v : c.table)
        values.push_back(std::make_shared<const CircleDiffeo>(
            CircleDiffeo::from_bump({v[0], v[1], v[2]}, cfg.run.fiber_grid)));
      return make_skew(base, CircleCocycle::table(grid, std::move(values), c.alpha));
    }
  }
  throw Error(ErrorKind::config, "unknown cocycle family");
}

// ------------------------------------------------------------ CSV

const std::vector<std::string> sweep_columns = {"orbit_id", "period", "type", "lambda_plus", "lambda_minus", "length",
                                                "multiplier"};
const std::vector<std::string> domination_columns = {"beta", "ell", "margin", "side"};
const std::vector<std::string> long_columns = {"x", "series", "value"};
const std::vector<std::string> grid_columns = {"cell", "fiber_index", "lift", "derivative"};

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(const Table& table, const std::filesystem::path& dir) {
  const auto path = dir / table.name;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (const auto& line : table.preamble) out << "# " << line << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) out << format_number(v);
            else out << v;
          },
          row[i]);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

CsvContent read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  CsvContent c;
  std::string line;
  bool header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    if (!header && line.rfind("# ", 0) == 0) {
      c.preamble.push_back(line.substr(2));
    } else if (!header) {
      c.columns = split(line);
      header = true;
    } else {
      c.rows.push_back(split(line));
    }
  }
  return c;
}

}  // namespace livsic
