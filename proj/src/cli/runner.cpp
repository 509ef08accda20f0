#include "bef/cli/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "../parallel.hpp"
#include "bef/cli/plots.hpp"
#include "bef/error.hpp"
#include "bef/io.hpp"

namespace bef::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

// Files are staged here and written only after every computation succeeded.
class Staging {
 public:
  explicit Staging(std::string dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  std::vector<std::string> commit() const {
    std::vector<std::string> written;
    for (const auto& [name, content] : files_) {
      const auto path = (fs::path(dir_) / name).string();
      io::write_file(path, content);
      written.push_back(path);
    }
    return written;
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

io::Metadata metadata(const std::string& subcommand, const ExperimentConfig& c) {
  io::Metadata meta{{"subcommand", subcommand}};
  std::string models;
  for (const auto& m : c.models) models += (models.empty() ? "" : " ") + m.id;
  meta.emplace_back("models", models);
  meta.emplace_back("ordering", describe(c.ordering));
  meta.emplace_back("n_range", fmt::format("{}..{}", c.n_range.min, c.n_range.max));
  meta.emplace_back("r_range", fmt::format("{}..{}", c.r_range.min, c.r_range.max));
  meta.emplace_back("seed", std::to_string(c.solver.seed));
  meta.emplace_back("solver_tol", io::number(c.solver.tol));
  return meta;
}

Json header(const std::string& kind, const ExperimentConfig& c) {
  Json j;
  j["kind"] = kind;
  j["seed"] = c.solver.seed;
  j["ordering"] = describe(c.ordering);
  j["n_range"] = {c.n_range.min, c.n_range.max};
  j["r_range"] = {c.r_range.min, c.r_range.max};
  return j;
}

template <typename Write>
std::string to_csv(Write&& write) {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

struct Context {
  const ExperimentConfig& config;
  BoundaryOptions options;
  std::vector<ModelSpec> specs;
  std::ostream& log;
  std::shared_ptr<GroundStateCache> cache = std::make_shared<GroundStateCache>();

  BoundaryEngine engine(const ModelSpec& spec, const SiteOrdering& ordering) const {
    return BoundaryEngine(spec, ordering, options, cache);
  }
};

// --- solve ---------------------------------------------------------------

void run_solve(const Context& ctx, Staging& out) {
  LanczosOptions solver = ctx.options.solver;
  solver.levels = 3;
  std::vector<io::SolveRecord> records;
  for (const auto& spec : ctx.specs) {
    const int count = ctx.config.n_range.count();
    std::vector<io::SolveRecord> rows(static_cast<std::size_t>(count));
    detail::parallel_for(count, ctx.options.threads, [&](int i) {
      const int n = ctx.config.n_range.min + i;
      const auto h = build_hamiltonian(spec, n, ctx.config.ordering);
      rows[static_cast<std::size_t>(i)] = {spec.id, describe(ctx.config.ordering), n,
                                           ground_lanczos(h, solver), h.local_norm_bound()};
    });
    for (auto& r : rows) {
      ctx.log << fmt::format("solve {} n={} E0={:.12f} gap={:.6g}\n", r.model_id, r.n,
                             r.solution.energy, r.solution.gap);
      records.push_back(std::move(r));
    }
  }
  const auto& c = ctx.config;
  if (c.wants("csv")) {
    out.add("solve.csv", to_csv([&](std::ostream& s) { io::write_solve_csv(s, records, metadata("solve", c)); }));
  }
  if (c.wants("json")) {
    Json doc = header("solve", c);
    doc["records"] = Json::array();
    for (const auto& r : records) doc["records"].push_back(io::to_json(r));
    out.add("solve.json", json_text(doc));
  }
}

// --- mu-profile ----------------------------------------------------------

void run_mu_profile(const Context& ctx, Staging& out) {
  const auto& c = ctx.config;
  std::vector<BoundaryProfile> profiles;
  Json doc = header("mu-profile", c);
  doc["profiles"] = Json::array();
  for (const auto& spec : ctx.specs) {
    const auto profile = boundary_profile(ctx.engine(spec, c.ordering), c.n_range, c.r_range);
    Json item;
    item["profile"] = io::to_json(profile);
    try {
      item["fit"] = io::to_json(fit_decay(profile));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientPoints) throw;
      item["fit"] = nullptr;
      item["fit_error"] = e.what();
    }
    item["violations"] = profile_violations(profile);
    ctx.log << fmt::format("mu-profile {}: {} entries, {} violations\n", spec.id,
                           profile.entries.size(), item["violations"].size());
    doc["profiles"].push_back(std::move(item));
    profiles.push_back(profile);
  }
  if (c.wants("csv")) {
    out.add("mu_profile.csv", to_csv([&](std::ostream& s) {
              io::write_metadata(s, metadata("mu-profile", c));
              s << "model_id,ordering,n,r,mu\n";
              for (const auto& p : profiles) {
                std::ostringstream rows;
                io::write_profile_csv(rows, p);
                const auto text = rows.str();
                s << text.substr(text.find('\n') + 1);
              }
            }));
    out.add("mu_hat.csv", to_csv([&](std::ostream& s) {
              io::write_metadata(s, metadata("mu-profile", c));
              s << "model_id,ordering,r,mu_hat\n";
              for (const auto& p : profiles) {
                std::ostringstream rows;
                io::write_mu_hat_csv(rows, p);
                const auto text = rows.str();
                s << text.substr(text.find('\n') + 1);
              }
            }));
  }
  if (c.wants("json")) out.add("mu_profile.json", json_text(doc));
  if (c.wants("svg")) out.add("mu_decay.svg", mu_decay_svg(profiles));
}

// --- eta-scan ------------------------------------------------------------

std::vector<int> sandwich_m(const ExperimentConfig& c, int n) {
  std::vector<int> ms;
  if (c.suites.sandwich.m.empty()) {
    for (int m = 1; m < n && m <= 13; ++m) ms.push_back(m);
  } else {
    for (int m : c.suites.sandwich.m) {
      if (m < n) ms.push_back(m);
    }
  }
  return ms;
}

void run_eta_scan(const Context& ctx, Staging& out) {
  const auto& c = ctx.config;
  std::vector<InequalityReport> reports;
  for (const auto& spec : ctx.specs) {
    const auto engine = ctx.engine(spec, c.ordering);
    std::vector<std::pair<int, int>> cells;
    for (int n = c.n_range.min; n <= c.n_range.max; ++n) {
      for (int m : sandwich_m(c, n)) cells.emplace_back(n, m);
    }
    std::vector<InequalityReport> part(cells.size());
    detail::parallel_for(static_cast<int>(cells.size()), ctx.options.threads, [&](int i) {
      part[static_cast<std::size_t>(i)] = verify_eta_mu_sandwich(engine, cells[i].first, cells[i].second);
    });
    reports.insert(reports.end(), part.begin(), part.end());
  }
  sort_reports(reports);
  if (c.wants("csv")) {
    out.add("eta_scan.csv", to_csv([&](std::ostream& s) {
              io::write_metadata(s, metadata("eta-scan", c));
              s << "model_id,ordering,n,m,eta,mu,lower,upper\n";
              for (const auto& r : reports) {
                s << r.model_id << ',' << r.ordering << ',' << io::number(r.instance[0].second) << ','
                  << io::number(r.instance[1].second) << ',' << io::number(r.lhs) << ','
                  << io::number(r.details.at("mu")) << ',' << io::number(r.details.at("lower")) << ','
                  << io::number(r.rhs) << '\n';
              }
            }));
  }
  if (c.wants("json")) {
    Json doc = header("eta-scan", c);
    doc["reports"] = Json::array();
    for (const auto& r : reports) doc["reports"].push_back(io::to_json(r));
    out.add("eta_scan.json", json_text(doc));
  }
}

// --- correlations / verify -----------------------------------------------

struct BridgeGrid {
  int n;
  int left;
  IntRange r;
};

BridgeGrid bridge_grid(const ExperimentConfig& c) {
  const auto& s = c.suites.correlation;
  BridgeGrid g;
  g.n = s.n > 0 ? s.n : c.n_range.max;
  g.left = s.bridge_left > 0 ? s.bridge_left
                             : (c.ordering.mode == OrderingMode::Bridge ? c.ordering.bridge_left
                                                                        : (g.n - 1) / 2);
  g.r = s.r;
  if (g.r.max > g.left || g.left + g.r.max > g.n - 1 || g.left < 1) {
    throw Error(ErrorCode::ConfigParse,
                fmt::format("suites.correlation: r up to {} does not fit bridge_left {} with n {}",
                            g.r.max, g.left, g.n));
  }
  return g;
}

std::vector<InequalityReport> correlation_reports(const Context& ctx, const ModelSpec& spec) {
  const auto g = bridge_grid(ctx.config);
  const auto engine = ctx.engine(spec, SiteOrdering::bridge(g.left));
  std::vector<std::pair<int, std::string>> cells;
  for (int r = g.r.min; r <= g.r.max; ++r) {
    for (const auto& p : ctx.config.suites.correlation.pairs) cells.emplace_back(r, p);
  }
  // One solve for the shared ground states before fanning out.
  engine.ground(g.n);
  engine.predecessor(g.n);
  std::vector<InequalityReport> out(cells.size());
  detail::parallel_for(static_cast<int>(cells.size()), ctx.options.threads, [&](int i) {
    const auto& [r, p] = cells[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = verify_correlation_bound(engine, g.n, r, p[0], p[1]);
  });
  return out;
}

void run_correlations(const Context& ctx, Staging& out) {
  const auto& c = ctx.config;
  std::vector<io::CorrelationRecord> records;
  for (const auto& spec : ctx.specs) {
    auto reports = correlation_reports(ctx, spec);
    sort_reports(reports);
    for (const auto& r : reports) {
      records.push_back({r.model_id, r.ordering, static_cast<int>(r.instance[0].second),
                         static_cast<int>(r.instance[1].second),
                         static_cast<int>(r.details.at("site1")), static_cast<int>(r.details.at("site2")),
                         r.label, r.details.at("f"), r.details.at("mu")});
    }
  }
  if (c.wants("csv")) {
    out.add("correlations.csv", to_csv([&](std::ostream& s) {
              io::write_correlation_csv(s, records, metadata("correlations", c));
            }));
  }
  if (c.wants("json")) {
    Json doc = header("correlations", c);
    doc["records"] = Json::array();
    for (const auto& r : records) doc["records"].push_back(io::to_json(r));
    out.add("correlations.json", json_text(doc));
  }
}

int entropy_m(const ExperimentConfig& c) {
  return c.suites.entropy.m > 0 ? c.suites.entropy.m : std::max(1, c.n_range.min / 2);
}

void run_entropy_scan(const Context& ctx, Staging& out) {
  const auto& c = ctx.config;
  const int m = entropy_m(c);
  std::vector<io::EntropyRecord> records;
  for (const auto& spec : ctx.specs) {
    const auto engine = ctx.engine(spec, c.ordering);
    const int lo = std::max(c.n_range.min, m + 1);
    const int count = std::max(0, c.n_range.max - lo + 1);
    std::vector<io::EntropyRecord> part(static_cast<std::size_t>(count));
    detail::parallel_for(count, ctx.options.threads, [&](int i) {
      const int n = lo + i;
      part[static_cast<std::size_t>(i)] = {spec.id, describe(c.ordering), n, m, engine.entropy(n, m),
                                           engine.eta(n, m)};
    });
    records.insert(records.end(), part.begin(), part.end());
  }
  if (c.wants("csv")) {
    out.add("entropy_scan.csv", to_csv([&](std::ostream& s) {
              io::write_entropy_csv(s, records, metadata("entropy-scan", c));
            }));
  }
  if (c.wants("json")) {
    Json doc = header("entropy-scan", c);
    doc["records"] = Json::array();
    for (const auto& r : records) doc["records"].push_back(io::to_json(r));
    out.add("entropy_scan.json", json_text(doc));
  }
  if (c.wants("svg")) out.add("entropy_growth.svg", entropy_growth_svg(records));
}

int run_verify(const Context& ctx, Staging& out) {
  const auto& c = ctx.config;
  const auto& s = c.suites;
  if (!s.sandwich.enabled && !s.correlation.enabled && !s.entropy.enabled && !s.area_law.enabled) {
    throw Error(ErrorCode::ConfigParse, "verify: no suite is enabled");
  }
  std::vector<InequalityReport> reports;
  Json skipped = Json::array();
  auto guarded = [&](const std::string& suite, const std::string& model, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateGround) throw;
      ctx.log << fmt::format("verify: {} on {} skipped: {}\n", suite, model, e.what());
      skipped.push_back({{"suite", suite}, {"model_id", model}, {"reason", e.what()}});
    }
  };
  for (const auto& spec : ctx.specs) {
    if (s.sandwich.enabled) {
      guarded("sandwich", spec.id, [&] {
        const auto engine = ctx.engine(spec, c.ordering);
        std::vector<std::pair<int, int>> cells;
        for (int n = c.n_range.min; n <= c.n_range.max; ++n) {
          for (int m : sandwich_m(c, n)) cells.emplace_back(n, m);
        }
        std::vector<InequalityReport> part(cells.size());
        detail::parallel_for(static_cast<int>(cells.size()), ctx.options.threads, [&](int i) {
          part[static_cast<std::size_t>(i)] = verify_eta_mu_sandwich(engine, cells[i].first, cells[i].second);
        });
        reports.insert(reports.end(), part.begin(), part.end());
      });
    }
    if (s.correlation.enabled) {
      guarded("correlation", spec.id, [&] {
        auto part = correlation_reports(ctx, spec);
        reports.insert(reports.end(), part.begin(), part.end());
      });
    }
    if (s.entropy.enabled) {
      guarded("entropy", spec.id, [&] {
        const auto engine = ctx.engine(spec, c.ordering);
        const int m = s.entropy.m;
        const IntRange range{s.entropy.s.min > 0 ? s.entropy.s.min : m + 1,
                             s.entropy.s.max > 0 ? s.entropy.s.max : c.n_range.max};
        std::vector<InequalityReport> part(static_cast<std::size_t>(std::max(0, range.count())));
        detail::parallel_for(static_cast<int>(part.size()), ctx.options.threads, [&](int i) {
          part[static_cast<std::size_t>(i)] = verify_entropy_increment(engine, m, range.min + i);
        });
        reports.insert(reports.end(), part.begin(), part.end());
      });
    }
    if (s.area_law.enabled) {
      guarded("area_law", spec.id, [&] {
        const auto engine = ctx.engine(spec, SiteOrdering::append());
        const int n = s.area_law.n > 0 ? s.area_law.n : c.n_range.max;
        reports.push_back(verify_area_law_accumulation(engine, s.area_law.m, s.area_law.q, n));
      });
    }
  }
  sort_reports(reports);
  const auto failed = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.pass; });
  ctx.log << fmt::format("verify: {} reports, {} failed, {} skipped\n", reports.size(), failed,
                         skipped.size());
  if (c.wants("csv")) {
    out.add("verify.csv", to_csv([&](std::ostream& st) { io::write_reports_csv(st, reports, metadata("verify", c)); }));
  }
  if (c.wants("json")) {
    Json doc = header("verify", c);
    doc["all_pass"] = failed == 0;
    doc["total"] = reports.size();
    doc["failed"] = failed;
    doc["reports"] = Json::array();
    for (const auto& r : reports) doc["reports"].push_back(io::to_json(r));
    doc["skipped"] = skipped;
    out.add("verify.json", json_text(doc));
  }
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

void run_gap_scan(const Context& ctx, Staging& out) {
  const auto& c = ctx.config;
  if (c.gap_scan.parameter.empty() || c.gap_scan.values.empty()) {
    throw Error(ErrorCode::ConfigParse, "gap_scan: parameter and values are required");
  }
  std::vector<GapKappaRow> rows;
  for (const auto& spec : ctx.specs) {
    auto part = gap_vs_kappa_scan(spec, c.gap_scan.parameter, c.gap_scan.values, c.n_range,
                                  c.r_range, c.ordering, ctx.options);
    for (const auto& r : part) {
      ctx.log << fmt::format("gap-scan {}: gap={:.6g} kappa={}{}\n", r.model_id, r.gap,
                             io::number(r.kappa), r.flagged ? " (flagged)" : "");
    }
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (c.wants("csv")) {
    out.add("gap_scan.csv", to_csv([&](std::ostream& s) { io::write_gap_scan_csv(s, rows, metadata("gap-scan", c)); }));
  }
  if (c.wants("json")) {
    Json doc = header("gap-scan", c);
    doc["parameter"] = c.gap_scan.parameter;
    doc["rows"] = Json::array();
    for (const auto& r : rows) doc["rows"].push_back(io::to_json(r));
    out.add("gap_scan.json", json_text(doc));
  }
  if (c.wants("svg")) out.add("gap_kappa.svg", gap_kappa_svg(rows));
}

std::vector<std::string> report_inputs(const ExperimentConfig& c) {
  if (!c.inputs.empty()) return c.inputs;
  std::vector<std::string> files;
  if (fs::is_directory(c.output.directory)) {
    for (const auto& entry : fs::directory_iterator(c.output.directory)) {
      const auto name = entry.path().filename().string();
      if (entry.path().extension() == ".json" && name != "summary.json") files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error(ErrorCode::MissingInput,
                fmt::format("report: no JSON outputs found in '{}'", c.output.directory));
  }
  return files;
}

RunOutput run_report(const ExperimentConfig& c, std::ostream& log) {
  const auto inputs = report_inputs(c);
  Json summary;
  summary["kind"] = "summary";
  summary["sources"] = Json::array();
  Json verify = {{"total", 0}, {"failed", 0}};
  Json profiles = Json::array();
  Json gap_rows = Json::array();
  Json entropy = Json::array();
  int failed = 0;
  for (const auto& path : inputs) {
    if (!fs::exists(path)) throw Error(ErrorCode::MissingInput, fmt::format("no such file '{}'", path));
    const Json doc = Json::parse(io::read_file(path));
    const auto kind = doc.value("kind", "");
    summary["sources"].push_back({{"file", fs::path(path).filename().string()}, {"kind", kind}});
    if (kind == "verify") {
      verify["total"] = verify["total"].get<int>() + doc.at("total").get<int>();
      failed += doc.at("failed").get<int>();
      for (const auto& r : doc.at("reports")) {
        if (!r.at("pass").get<bool>()) verify["failures"].push_back(r);
      }
    } else if (kind == "mu-profile") {
      for (const auto& item : doc.at("profiles")) {
        Json p;
        p["model_id"] = item.at("profile").at("model_id");
        p["ordering"] = item.at("profile").at("ordering");
        p["mu_hat"] = item.at("profile").at("mu_hat");
        p["fit"] = item.at("fit");
        p["violations"] = item.at("violations");
        profiles.push_back(std::move(p));
      }
    } else if (kind == "gap-scan") {
      for (const auto& r : doc.at("rows")) {
        gap_rows.push_back({{"model_id", r.at("model_id")}, {"parameter", r.at("parameter")},
                            {"gap", r.at("gap")}, {"kappa", r.at("kappa")}, {"preferred", r.at("preferred")},
                            {"flagged", r.at("flagged")}});
      }
    } else if (kind == "entropy-scan") {
      for (const auto& r : doc.at("records")) entropy.push_back(r);
    }
  }
  verify["failed"] = failed;
  verify["all_pass"] = failed == 0;
  summary["verify"] = verify;
  summary["profiles"] = profiles;
  summary["gap_scan"] = gap_rows;
  summary["entropy"] = entropy;

  RunOutput out;
  Staging staging(c.output.directory);
  staging.add("summary.json", json_text(summary));
  out.files = staging.commit();
  try {
    for (auto& f : emit_plots(inputs, c.output.directory)) out.files.push_back(std::move(f));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingInput) throw;
    log << "report: nothing to plot\n";
  }
  return out;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"solve",        "mu-profile", "eta-scan",
                                              "correlations", "entropy-scan", "verify",
                                              "gap-scan",     "report"};
  return names;
}

ExperimentConfig resolve_config(const RunRequest& request) {
  ExperimentConfig c;
  if (!request.config_path.empty()) {
    c = load_config(request.config_path, request.sets);
  } else if (request.subcommand == "report") {
    c.models.push_back(ModelConfig{"unused", Family::TransverseFieldIsing, {}, 2, {}});
  } else {
    throw Error(ErrorCode::ConfigParse, "--config is required");
  }
  if (request.out) c.output.directory = *request.out;
  if (request.threads) c.threads = *request.threads;
  if (request.seed) c.solver.seed = *request.seed;
  if (!request.formats.empty()) c.output.formats = request.formats;
  return c;
}

RunOutput execute(const std::string& subcommand, const ExperimentConfig& config, std::ostream& log) {
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
    throw Error(ErrorCode::ConfigParse, fmt::format("unknown subcommand '{}'", subcommand));
  }
  if (subcommand == "report") return run_report(config, log);
  check_config(config);
  Context ctx{config, config.boundary_options(max_sites_cap()), {}, log};
  for (const auto& m : config.models) ctx.specs.push_back(m.to_spec());

  Staging staging(config.output.directory);
  RunOutput out;
  if (subcommand == "solve") run_solve(ctx, staging);
  else if (subcommand == "mu-profile") run_mu_profile(ctx, staging);
  else if (subcommand == "eta-scan") run_eta_scan(ctx, staging);
  else if (subcommand == "correlations") run_correlations(ctx, staging);
  else if (subcommand == "entropy-scan") run_entropy_scan(ctx, staging);
  else if (subcommand == "verify") out.exit_code = run_verify(ctx, staging);
  else if (subcommand == "gap-scan") run_gap_scan(ctx, staging);
  staging.add("resolved_config.yaml", serialize_config(config));
  out.files = staging.commit();
  return out;
}

int run(const RunRequest& request, std::ostream& log) {
  try {
    const auto config = resolve_config(request);
    const auto out = execute(request.subcommand, config, log);
    for (const auto& f : out.files) log << "wrote " << f << '\n';
    return out.exit_code;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ConfigParse:
      case ErrorCode::MissingInput:
      case ErrorCode::UnsupportedFamily:
      case ErrorCode::InvalidTerm:
      case ErrorCode::BridgeTooSmall:
      case ErrorCode::OutOfRange:
      case ErrorCode::GeometryTooSmall:
      case ErrorCode::UnsupportedOrdering:
        return kExitUsage;
      case ErrorCode::BudgetExceeded:
      case ErrorCode::TooLarge:
        return kExitBudget;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace bef::cli
