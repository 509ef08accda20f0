#include "bef/cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "bef/error.hpp"

namespace bef::cli {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  const auto mark = node.Mark();
  if (mark.is_null()) throw Error(ErrorCode::ConfigParse, fmt::format("{}: {}", field, what));
  throw Error(ErrorCode::ConfigParse,
              fmt::format("line {}, column {}: {}: {}", mark.line + 1, mark.column + 1, field, what));
}

void expect_map(const YAML::Node& node, const std::string& field, const std::set<std::string>& keys) {
  if (!node.IsMap()) fail(node, field, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
  }
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, field, "wrong value type");
  }
}

template <typename T>
void read(const YAML::Node& parent, const std::string& key, const std::string& field, T& out) {
  if (const auto node = parent[key]) out = scalar<T>(node, join(field, key));
}

template <typename T>
void read_list(const YAML::Node& parent, const std::string& key, const std::string& field,
               std::vector<T>& out) {
  const auto node = parent[key];
  if (!node) return;
  const auto path = join(field, key);
  if (node.IsScalar()) {
    out = {scalar<T>(node, path)};
    return;
  }
  if (!node.IsSequence()) fail(node, path, "expected a list");
  out.clear();
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(scalar<T>(node[i], fmt::format("{}[{}]", path, i)));
  }
}

void read_range(const YAML::Node& parent, const std::string& key, const std::string& field,
                IntRange& out) {
  const auto node = parent[key];
  if (!node) return;
  const auto path = join(field, key);
  if (node.IsSequence()) {
    if (node.size() != 2) fail(node, path, "expected [min, max]");
    out = {scalar<int>(node[0], path + "[0]"), scalar<int>(node[1], path + "[1]")};
    return;
  }
  expect_map(node, path, {"min", "max"});
  read(node, "min", path, out.min);
  read(node, "max", path, out.max);
}

std::string default_id(const ModelConfig& m) {
  std::string id = to_string(m.family);
  for (const auto& [k, v] : m.couplings) id += fmt::format("_{}{:g}", k, v);
  return id;
}

ModelConfig parse_model(const YAML::Node& node, const std::string& field) {
  expect_map(node, field, {"id", "family", "couplings", "interaction_range", "terms"});
  ModelConfig m;
  if (const auto fam = node["family"]) {
    try {
      m.family = family_from_string(scalar<std::string>(fam, join(field, "family")));
    } catch (const Error& e) {
      fail(fam, join(field, "family"), e.what());
    }
  }
  if (const auto c = node["couplings"]) {
    if (!c.IsMap()) fail(c, join(field, "couplings"), "expected a mapping");
    for (const auto& kv : c) {
      const auto name = kv.first.as<std::string>();
      m.couplings[name] = scalar<double>(kv.second, join(field, "couplings." + name));
    }
  }
  read(node, "interaction_range", field, m.interaction_range);
  if (const auto terms = node["terms"]) {
    if (!terms.IsSequence()) fail(terms, join(field, "terms"), "expected a list");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto path = fmt::format("{}[{}]", join(field, "terms"), i);
      const auto t = terms[i];
      expect_map(t, path, {"offsets", "paulis", "coefficient", "placement"});
      CustomTermConfig term;
      read_list(t, "offsets", path, term.offsets);
      read(t, "paulis", path, term.paulis);
      read(t, "coefficient", path, term.coefficient);
      if (const auto p = t["placement"]) {
        try {
          term.placement = placement_from_string(scalar<std::string>(p, path + ".placement"));
        } catch (const Error& e) {
          fail(p, path + ".placement", e.what());
        }
      }
      if (term.paulis.size() != term.offsets.size() || term.offsets.empty()) {
        fail(t, path, "paulis must have one letter per offset");
      }
      if (term.paulis.find_first_not_of("IXYZ") != std::string::npos) {
        fail(t, path + ".paulis", "letters must be I, X, Y or Z");
      }
      m.terms.push_back(std::move(term));
    }
  }
  if (m.family == Family::Custom && m.terms.empty()) fail(node, field, "custom family needs terms");
  read(node, "id", field, m.id);
  if (m.id.empty()) m.id = default_id(m);
  return m;
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::ConfigParse, fmt::format("--set expects key=value, got '{}'", assignment));
  }
  const std::string path = assignment.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigParse, fmt::format("--set {}: {}", path, e.msg));
  }
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  YAML::Node cur;
  cur.reset(root);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next;
    if (cur.IsSequence() && std::all_of(parts[i].begin(), parts[i].end(), ::isdigit)) {
      const auto idx = std::stoul(parts[i]);
      if (idx >= cur.size()) {
        throw Error(ErrorCode::ConfigParse, fmt::format("--set {}: index {} out of range", path, idx));
      }
      next.reset(cur[idx]);
    } else {
      if (!cur[parts[i]]) cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next.reset(cur[parts[i]]);
    }
    cur.reset(next);
  }
  if (cur.IsSequence() && std::all_of(parts.back().begin(), parts.back().end(), ::isdigit)) {
    const auto idx = std::stoul(parts.back());
    if (idx >= cur.size()) {
      throw Error(ErrorCode::ConfigParse, fmt::format("--set {}: index {} out of range", path, idx));
    }
    cur[idx] = value;
  } else {
    cur[parts.back()] = value;
  }
}

ExperimentConfig parse_root(const YAML::Node& root) {
  ExperimentConfig c;
  if (root.IsNull()) throw Error(ErrorCode::ConfigParse, "empty configuration");
  expect_map(root, "", {"model", "models", "ordering", "n_range", "r_range", "solver", "boundary",
                        "suites", "gap_scan", "output", "threads", "inputs"});
  if (root["model"] && root["models"]) fail(root["models"], "models", "give either model or models");
  if (const auto m = root["model"]) c.models.push_back(parse_model(m, "model"));
  if (const auto ms = root["models"]) {
    if (!ms.IsSequence()) fail(ms, "models", "expected a list");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      c.models.push_back(parse_model(ms[i], fmt::format("models[{}]", i)));
    }
  }
  if (c.models.empty()) throw Error(ErrorCode::ConfigParse, "model: a model block is required");

  if (const auto o = root["ordering"]) {
    expect_map(o, "ordering", {"mode", "bridge_left"});
    std::string mode = "append";
    read(o, "mode", "ordering", mode);
    try {
      c.ordering.mode = ordering_mode_from_string(mode);
    } catch (const Error& e) {
      fail(o["mode"], "ordering.mode", e.what());
    }
    read(o, "bridge_left", "ordering", c.ordering.bridge_left);
  }
  read_range(root, "n_range", "", c.n_range);
  read_range(root, "r_range", "", c.r_range);

  if (const auto s = root["solver"]) {
    expect_map(s, "solver", {"tol", "max_iter", "seed", "degeneracy_tol", "krylov_dim", "memory_budget_mb"});
    read(s, "tol", "solver", c.solver.tol);
    read(s, "max_iter", "solver", c.solver.max_iter);
    read(s, "seed", "solver", c.solver.seed);
    read(s, "degeneracy_tol", "solver", c.solver.degeneracy_tol);
    read(s, "krylov_dim", "solver", c.solver.krylov_dim);
    read(s, "memory_budget_mb", "solver", c.solver.memory_budget_mb);
  }
  if (const auto b = root["boundary"]) {
    expect_map(b, "boundary", {"fresh_state", "allow_degenerate", "noise_floor", "fit_r_min"});
    read(b, "fresh_state", "boundary", c.boundary.fresh_state);
    read(b, "allow_degenerate", "boundary", c.boundary.allow_degenerate);
    read(b, "noise_floor", "boundary", c.boundary.noise_floor);
    read(b, "fit_r_min", "boundary", c.boundary.fit_r_min);
  }
  if (const auto s = root["suites"]) {
    expect_map(s, "suites", {"sandwich", "correlation", "entropy", "area_law"});
    if (const auto n = s["sandwich"]) {
      expect_map(n, "suites.sandwich", {"enabled", "m"});
      c.suites.sandwich.enabled = true;
      read(n, "enabled", "suites.sandwich", c.suites.sandwich.enabled);
      read_list(n, "m", "suites.sandwich", c.suites.sandwich.m);
    }
    if (const auto n = s["correlation"]) {
      expect_map(n, "suites.correlation", {"enabled", "bridge_left", "n", "r", "pairs"});
      c.suites.correlation.enabled = true;
      read(n, "enabled", "suites.correlation", c.suites.correlation.enabled);
      read(n, "bridge_left", "suites.correlation", c.suites.correlation.bridge_left);
      read(n, "n", "suites.correlation", c.suites.correlation.n);
      read_range(n, "r", "suites.correlation", c.suites.correlation.r);
      read_list(n, "pairs", "suites.correlation", c.suites.correlation.pairs);
    }
    if (const auto n = s["entropy"]) {
      expect_map(n, "suites.entropy", {"enabled", "m", "s"});
      c.suites.entropy.enabled = true;
      read(n, "enabled", "suites.entropy", c.suites.entropy.enabled);
      read(n, "m", "suites.entropy", c.suites.entropy.m);
      read_range(n, "s", "suites.entropy", c.suites.entropy.s);
    }
    if (const auto n = s["area_law"]) {
      expect_map(n, "suites.area_law", {"enabled", "m", "q", "n"});
      c.suites.area_law.enabled = true;
      read(n, "enabled", "suites.area_law", c.suites.area_law.enabled);
      read(n, "m", "suites.area_law", c.suites.area_law.m);
      read(n, "q", "suites.area_law", c.suites.area_law.q);
      read(n, "n", "suites.area_law", c.suites.area_law.n);
    }
  }
  if (const auto g = root["gap_scan"]) {
    expect_map(g, "gap_scan", {"parameter", "values"});
    read(g, "parameter", "gap_scan", c.gap_scan.parameter);
    read_list(g, "values", "gap_scan", c.gap_scan.values);
  }
  if (const auto o = root["output"]) {
    expect_map(o, "output", {"directory", "formats"});
    read(o, "directory", "output", c.output.directory);
    read_list(o, "formats", "output", c.output.formats);
  }
  read(root, "threads", "", c.threads);
  read_list(root, "inputs", "", c.inputs);
  return c;
}

void emit_range(YAML::Emitter& e, const char* key, IntRange r) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "min"
    << YAML::Value << r.min << YAML::Key << "max" << YAML::Value << r.max << YAML::EndMap;
}

template <typename T>
void emit_list(YAML::Emitter& e, const char* key, const std::vector<T>& values) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& v : values) e << v;
  e << YAML::EndSeq;
}

void emit_model(YAML::Emitter& e, const ModelConfig& m) {
  e << YAML::BeginMap;
  e << YAML::Key << "id" << YAML::Value << m.id;
  e << YAML::Key << "family" << YAML::Value << to_string(m.family);
  e << YAML::Key << "couplings" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : m.couplings) e << YAML::Key << k << YAML::Value << v;
  e << YAML::EndMap;
  e << YAML::Key << "interaction_range" << YAML::Value << m.interaction_range;
  if (!m.terms.empty()) {
    e << YAML::Key << "terms" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : m.terms) {
      e << YAML::BeginMap;
      emit_list(e, "offsets", t.offsets);
      e << YAML::Key << "paulis" << YAML::Value << t.paulis;
      e << YAML::Key << "coefficient" << YAML::Value << t.coefficient;
      e << YAML::Key << "placement" << YAML::Value << to_string(t.placement);
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;
}

}  // namespace

ModelSpec ModelConfig::to_spec() const {
  ModelSpec spec;
  spec.id = id;
  spec.family = family;
  spec.couplings = couplings;
  spec.interaction_range = interaction_range;
  for (const auto& t : terms) {
    TermTemplate tt;
    tt.offsets = t.offsets;
    tt.block = t.coefficient * pauli::string(t.paulis);
    tt.placement = t.placement;
    spec.custom_terms.push_back(std::move(tt));
  }
  validate(spec);
  return spec;
}

bool ExperimentConfig::wants(const std::string& format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

BoundaryOptions ExperimentConfig::boundary_options(int max_sites) const {
  BoundaryOptions o;
  o.solver.tol = solver.tol;
  o.solver.max_iter = solver.max_iter;
  o.solver.seed = solver.seed;
  o.solver.degeneracy_tol = solver.degeneracy_tol;
  o.solver.krylov_dim = solver.krylov_dim;
  o.solver.memory_budget = static_cast<std::size_t>(solver.memory_budget_mb * 1024.0 * 1024.0);
  o.solver.max_sites = max_sites;
  o.fresh_state = boundary.fresh_state;
  o.allow_degenerate = boundary.allow_degenerate;
  o.noise_floor = boundary.noise_floor;
  o.fit_r_min = boundary.fit_r_min;
  o.threads = std::max(1, threads);
  return o;
}

int max_sites_cap() {
  if (const char* env = std::getenv("BEF_MAX_N")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0 && value < 40) return static_cast<int>(value);
    throw Error(ErrorCode::ConfigParse, fmt::format("BEF_MAX_N='{}' is not a site count", env));
  }
  return kHardCap;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ConfigParse,
                fmt::format("line {}, column {}: {}", e.mark.line + 1, e.mark.column + 1, e.msg));
  }
  if (!overrides.empty() && !root.IsMap()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);
  return parse_root(root);
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, fmt::format("cannot open config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  if (c.models.size() == 1) {
    e << YAML::Key << "model" << YAML::Value;
    emit_model(e, c.models.front());
  } else {
    e << YAML::Key << "models" << YAML::Value << YAML::BeginSeq;
    for (const auto& m : c.models) emit_model(e, m);
    e << YAML::EndSeq;
  }
  e << YAML::Key << "ordering" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mode" << YAML::Value << to_string(c.ordering.mode);
  e << YAML::Key << "bridge_left" << YAML::Value << c.ordering.bridge_left << YAML::EndMap;
  emit_range(e, "n_range", c.n_range);
  emit_range(e, "r_range", c.r_range);

  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "tol" << YAML::Value << c.solver.tol;
  e << YAML::Key << "max_iter" << YAML::Value << c.solver.max_iter;
  e << YAML::Key << "seed" << YAML::Value << c.solver.seed;
  e << YAML::Key << "degeneracy_tol" << YAML::Value << c.solver.degeneracy_tol;
  e << YAML::Key << "krylov_dim" << YAML::Value << c.solver.krylov_dim;
  e << YAML::Key << "memory_budget_mb" << YAML::Value << c.solver.memory_budget_mb;
  e << YAML::EndMap;

  e << YAML::Key << "boundary" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "fresh_state" << YAML::Value << c.boundary.fresh_state;
  e << YAML::Key << "allow_degenerate" << YAML::Value << c.boundary.allow_degenerate;
  e << YAML::Key << "noise_floor" << YAML::Value << c.boundary.noise_floor;
  e << YAML::Key << "fit_r_min" << YAML::Value << c.boundary.fit_r_min;
  e << YAML::EndMap;

  const auto& s = c.suites;
  e << YAML::Key << "suites" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "sandwich" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "enabled" << YAML::Value << s.sandwich.enabled;
  emit_list(e, "m", s.sandwich.m);
  e << YAML::EndMap;
  e << YAML::Key << "correlation" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "enabled" << YAML::Value << s.correlation.enabled;
  e << YAML::Key << "bridge_left" << YAML::Value << s.correlation.bridge_left;
  e << YAML::Key << "n" << YAML::Value << s.correlation.n;
  emit_range(e, "r", s.correlation.r);
  emit_list(e, "pairs", s.correlation.pairs);
  e << YAML::EndMap;
  e << YAML::Key << "entropy" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "enabled" << YAML::Value << s.entropy.enabled;
  e << YAML::Key << "m" << YAML::Value << s.entropy.m;
  emit_range(e, "s", s.entropy.s);
  e << YAML::EndMap;
  e << YAML::Key << "area_law" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "enabled" << YAML::Value << s.area_law.enabled;
  e << YAML::Key << "m" << YAML::Value << s.area_law.m;
  e << YAML::Key << "q" << YAML::Value << s.area_law.q;
  e << YAML::Key << "n" << YAML::Value << s.area_law.n;
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::Key << "gap_scan" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "parameter" << YAML::Value << c.gap_scan.parameter;
  emit_list(e, "values", c.gap_scan.values);
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "directory" << YAML::Value << c.output.directory;
  emit_list(e, "formats", c.output.formats);
  e << YAML::EndMap;
  e << YAML::Key << "threads" << YAML::Value << c.threads;
  emit_list(e, "inputs", c.inputs);
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void check_config(const ExperimentConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigParse, what); };
  if (c.n_range.min < 2 || c.n_range.max < c.n_range.min) {
    bad(fmt::format("n_range {}..{} must be nonempty with min >= 2", c.n_range.min, c.n_range.max));
  }
  if (c.r_range.min < 1 || c.r_range.max < c.r_range.min) {
    bad(fmt::format("r_range {}..{} must be nonempty with min >= 1", c.r_range.min, c.r_range.max));
  }
  if (c.threads < 1) bad("threads must be >= 1");
  if (c.boundary.fresh_state != 0 && c.boundary.fresh_state != 1) bad("boundary.fresh_state must be 0 or 1");
  for (const auto& f : c.output.formats) {
    if (f != "csv" && f != "json" && f != "svg") bad(fmt::format("output.formats: unknown format '{}'", f));
  }
  if (c.ordering.mode == OrderingMode::Bridge && c.n_range.min < c.ordering.bridge_left + 2) {
    bad(fmt::format("bridge_left {} needs n >= {}", c.ordering.bridge_left, c.ordering.bridge_left + 2));
  }
  const auto& s = c.suites;
  if (s.sandwich.enabled && s.sandwich.m.empty()) bad("suites.sandwich.m: at least one m required");
  for (int m : s.sandwich.m) {
    if (m < 1) bad("suites.sandwich.m: entries must be >= 1");
  }
  if (s.correlation.enabled) {
    for (const auto& p : s.correlation.pairs) {
      if (p.size() != 2 || p.find_first_not_of("XYZ") != std::string::npos) {
        bad(fmt::format("suites.correlation.pairs: '{}' is not a Pauli pair", p));
      }
    }
    if (s.correlation.r.min < 1 || s.correlation.r.max < s.correlation.r.min) bad("suites.correlation.r invalid");
  }
  if (s.entropy.enabled && s.entropy.m < 1) bad("suites.entropy.m must be >= 1");
  if (s.area_law.enabled && (s.area_law.m < 1 || s.area_law.q < 1)) bad("suites.area_law needs m, q >= 1");

  const int cap = max_sites_cap();
  int largest = c.n_range.max;
  largest = std::max({largest, s.correlation.enabled ? s.correlation.n : 0, s.area_law.enabled ? s.area_law.n : 0,
                      s.entropy.enabled ? s.entropy.s.max : 0});
  if (largest > cap) {
    throw Error(ErrorCode::BudgetExceeded,
                fmt::format("n = {} exceeds the cap of {} sites (raise with BEF_MAX_N)", largest, cap));
  }
  LanczosOptions probe;
  probe.krylov_dim = 20;
  probe.levels = 2;
  const auto need = lanczos_memory_bytes(largest, probe);
  const auto budget = static_cast<double>(c.solver.memory_budget_mb) * 1024.0 * 1024.0;
  if (static_cast<double>(need) > budget) {
    throw Error(ErrorCode::BudgetExceeded,
                fmt::format("n = {} needs at least {:.0f} MiB, budget is {:.0f} MiB", largest,
                            static_cast<double>(need) / 1048576.0, c.solver.memory_budget_mb));
  }
}

}  // namespace bef::cli
