#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bef/cli/config.hpp"
#include "bef/cli/plots.hpp"
#include "bef/cli/runner.hpp"
#include "bef/error.hpp"
#include "bef/io.hpp"

using namespace bef;
using namespace bef::cli;
namespace fs = std::filesystem;

namespace {

const std::string kGolden = BEF_GOLDEN_DIR;
const std::string kConfigs = BEF_CONFIG_DIR;

// Set BEF_UPDATE_GOLDEN=1 to regenerate golden files instead of comparing.
bool updating() {
  const char* v = std::getenv("BEF_UPDATE_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bef_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::OutOfRange;
}

const char* kMinimal = R"(model:
  id: tiny
  family: tfim
  couplings: {J_zz: 1.0, g_x: 2.0}
n_range: {min: 4, max: 6}
r_range: {min: 1, max: 3}
)";

void compare_json(const io::Json& expected, const io::Json& actual, const std::string& path) {
  if (expected.is_number() && actual.is_number()) {
    EXPECT_NEAR(expected.get<double>(), actual.get<double>(), 1e-9) << path;
    return;
  }
  ASSERT_EQ(expected.type(), actual.type()) << path;
  if (expected.is_object()) {
    ASSERT_EQ(expected.size(), actual.size()) << path;
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      ASSERT_TRUE(actual.contains(it.key())) << path << "." << it.key();
      compare_json(it.value(), actual.at(it.key()), path + "." + it.key());
    }
  } else if (expected.is_array()) {
    ASSERT_EQ(expected.size(), actual.size()) << path;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      compare_json(expected[i], actual[i], path + "[" + std::to_string(i) + "]");
    }
  } else {
    EXPECT_EQ(expected, actual) << path;
  }
}

void check_golden_text(const std::string& name, const std::string& actual) {
  const auto path = kGolden + "/" + name;
  if (updating()) {
    io::write_file(path, actual);
    GTEST_SKIP() << "wrote " << path;
  }
  EXPECT_EQ(io::read_file(path), actual) << name;
}

BoundaryProfile synthetic_profile(const std::string& id, double scale, bool zero) {
  BoundaryProfile p;
  p.model_id = id;
  p.n_window = {8, 10};
  p.r_window = {1, 6};
  for (int r = 1; r <= 6; ++r) {
    const double mu = zero ? 0.0 : scale * std::exp(-0.9 * r);
    p.mu_hat[r] = mu;
    for (int n = 8; n <= 10; ++n) p.entries.push_back({n, r, mu});
  }
  return p;
}

}  // namespace

TEST(Config, ShippedConfigsRoundTrip) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".yaml") continue;
    ++seen;
    const auto config = load_config(entry.path().string());
    EXPECT_NO_THROW(check_config(config)) << entry.path();
    EXPECT_EQ(parse_config(serialize_config(config)), config) << entry.path();
  }
  EXPECT_GE(seen, 4);
}

TEST(Config, DefaultsAndRoundTripWithCustomTerms) {
  auto c = parse_config(kMinimal);
  EXPECT_EQ(c.solver.tol, 1e-11);
  EXPECT_EQ(c.output.formats, (std::vector<std::string>{"csv", "json"}));
  ModelConfig custom;
  custom.id = "cluster";
  custom.family = Family::Custom;
  custom.terms.push_back({{0, 1, 2}, "ZXZ", -1.0, Placement::Bulk});
  custom.terms.push_back({{0}, "X", 0.1 + 0.2, Placement::LeftEdge});
  c.models.push_back(custom);
  c.ordering = SiteOrdering::bridge(3);
  c.suites.correlation.enabled = true;
  c.gap_scan = {"g_x", {1.0, 1.0 / 3.0}};
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, SetOverridesLeaves) {
  const auto c = parse_config(kMinimal, {"n_range.max=9", "model.couplings.g_x=3.5", "solver.seed=42",
                                         "suites.sandwich.m=[1, 2]", "output.formats=[csv]"});
  EXPECT_EQ(c.n_range.max, 9);
  EXPECT_EQ(c.models[0].couplings.at("g_x"), 3.5);
  EXPECT_EQ(c.solver.seed, 42U);
  EXPECT_EQ(c.suites.sandwich.m, (std::vector<int>{1, 2}));
  EXPECT_TRUE(c.suites.sandwich.enabled);
  EXPECT_EQ(c.output.formats, (std::vector<std::string>{"csv"}));
}

TEST(Config, ErrorsCarryLineAndField) {
  try {
    parse_config("model:\n  id: x\n  family: tfim\n  colour: red\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParse);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("model.colour"), std::string::npos) << e.what();
  }
  try {
    parse_config(std::string(kMinimal) + "threads: many\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("threads"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_config("model: [unclosed\n"); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { parse_config(kMinimal, {"no_equals_sign"}); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { parse_config("model:\n  id: x\n  family: potts\n"); }), ErrorCode::ConfigParse);
}

TEST(Config, ChecksRangesAndCap) {
  EXPECT_EQ(code_of([] { check_config(parse_config(kMinimal, {"n_range.min=9"})); }),
            ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { check_config(parse_config(kMinimal, {"n_range.max=23"})); }),
            ErrorCode::BudgetExceeded);
  EXPECT_EQ(code_of([] { check_config(parse_config(kMinimal, {"output.formats=[pdf]"})); }),
            ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { check_config(parse_config(kMinimal, {"solver.memory_budget_mb=0.001"})); }),
            ErrorCode::BudgetExceeded);
}

TEST(Config, CapCanBeRaisedFromEnvironment) {
  EXPECT_EQ(max_sites_cap(), kHardCap);
  setenv("BEF_MAX_N", "24", 1);
  EXPECT_EQ(max_sites_cap(), 24);
  EXPECT_NO_THROW(check_config(parse_config(kMinimal, {"n_range.max=23", "solver.memory_budget_mb=1e6"})));
  unsetenv("BEF_MAX_N");
}

TEST(Run, BudgetExceededWritesNothing) {
  const auto dir = fresh_dir("budget");
  RunRequest req;
  req.subcommand = "solve";
  req.config_path = kConfigs + "/tfim_gapped.yaml";
  req.sets = {"n_range.max=23"};
  req.out = dir.string();
  std::ostringstream log;
  EXPECT_EQ(run(req, log), kExitBudget);
  EXPECT_FALSE(fs::exists(dir));
  EXPECT_NE(log.str().find("BudgetExceeded"), std::string::npos);
}

TEST(Run, UsageErrorsMapToExitTwo) {
  std::ostringstream log;
  RunRequest missing;
  missing.subcommand = "solve";
  missing.config_path = "/nonexistent/config.yaml";
  EXPECT_EQ(run(missing, log), kExitUsage);
  RunRequest empty_report;
  empty_report.subcommand = "report";
  empty_report.out = fresh_dir("empty_report").string();
  EXPECT_EQ(run(empty_report, log), kExitUsage);
}

TEST(Run, DecoupledProfileIsAllZero) {
  const auto dir = fresh_dir("decoupled");
  auto config = load_config(kConfigs + "/decoupled.yaml");
  config.output.directory = dir.string();
  config.output.formats = {"csv", "json", "svg"};
  std::ostringstream log;
  const auto out = execute("mu-profile", config, log);
  EXPECT_EQ(out.exit_code, kExitOk);
  std::istringstream csv(io::read_file((dir / "mu_profile.csv").string()));
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      EXPECT_EQ(line, "model_id,ordering,n,r,mu");
      header = true;
      continue;
    }
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
    ++rows;
  }
  EXPECT_EQ(rows, config.n_range.count() * config.r_range.count());
  const auto svg = io::read_file((dir / "mu_decay.svg").string());
  EXPECT_NE(svg.find("fill=\"none\""), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "resolved_config.yaml"));
}

TEST(Run, RerunsAreByteIdentical) {
  for (const std::string sub : {"solve", "mu-profile", "entropy-scan"}) {
    std::vector<std::map<std::string, std::string>> runs;
    for (int threads : {1, 2}) {
      const auto dir = fresh_dir("rerun_" + sub + std::to_string(threads));
      auto config = parse_config(kMinimal, {"suites.entropy.m=2"});
      config.output.directory = dir.string();
      config.output.formats = {"csv", "json", "svg"};
      config.threads = threads;
      std::ostringstream log;
      execute(sub, config, log);
      std::map<std::string, std::string> files;
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() == "resolved_config.yaml") continue;
        files[e.path().filename().string()] = io::read_file(e.path().string());
      }
      runs.push_back(files);
    }
    EXPECT_FALSE(runs[0].empty());
    EXPECT_EQ(runs[0], runs[1]) << sub;
  }
}

TEST(Run, VerifyMatchesGolden) {
  const auto dir = fresh_dir("verify");
  auto config = load_config(kGolden + "/verify_tfim_g2.yaml");
  config.output.directory = dir.string();
  std::ostringstream log;
  const auto out = execute("verify", config, log);
  EXPECT_EQ(out.exit_code, kExitOk) << log.str();
  const auto text = io::read_file((dir / "verify.json").string());
  const auto actual = io::Json::parse(text);
  EXPECT_TRUE(actual.at("all_pass").get<bool>());
  for (const auto& r : actual.at("reports")) EXPECT_TRUE(r.at("pass").get<bool>()) << r.dump();
  if (updating()) {
    io::write_file(kGolden + "/verify_tfim_g2.json", text);
    GTEST_SKIP() << "golden updated";
  }
  compare_json(io::Json::parse(io::read_file(kGolden + "/verify_tfim_g2.json")), actual, "");
}

TEST(Run, ReportCollatesAndPlots) {
  const auto dir = fresh_dir("report");
  auto config = parse_config(kMinimal, {"suites.entropy.m=2", "suites.sandwich.m=[1,2]"});
  config.output.directory = dir.string();
  std::ostringstream log;
  execute("mu-profile", config, log);
  EXPECT_EQ(execute("verify", config, log).exit_code, kExitOk);
  execute("entropy-scan", config, log);
  RunRequest req;
  req.subcommand = "report";
  req.out = dir.string();
  EXPECT_EQ(run(req, log), kExitOk) << log.str();
  const auto summary = io::Json::parse(io::read_file((dir / "summary.json").string()));
  EXPECT_EQ(summary.at("sources").size(), 3U);
  EXPECT_TRUE(summary.at("verify").at("all_pass").get<bool>());
  EXPECT_TRUE(fs::exists(dir / "mu_decay.svg"));
  EXPECT_TRUE(fs::exists(dir / "entropy_growth.svg"));
}

TEST(Plots, MissingInput) {
  EXPECT_EQ(code_of([] { emit_plots({"/nonexistent.json"}, "/tmp"); }), ErrorCode::MissingInput);
}

TEST(Plots, MuDecayGolden) {
  const auto svg = mu_decay_svg({synthetic_profile("gapped", 0.4, false),
                                 synthetic_profile("critical", 0.9, false),
                                 synthetic_profile("decoupled", 0.0, true)});
  EXPECT_NE(svg.find("decoupled"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  check_golden_text("mu_decay_synthetic.svg", svg);
}

TEST(Plots, GapKappaGolden) {
  std::vector<GapKappaRow> rows;
  for (double g : {1.5, 2.0, 3.0}) {
    GapKappaRow row;
    row.model_id = "tfim@g_x=" + io::number(g);
    row.parameter = g;
    row.gap = 2.0 * (g - 1.0);
    row.kappa = 1.2 * std::log(g);
    rows.push_back(row);
  }
  GapKappaRow free;
  free.model_id = "free";
  free.gap = 4.0;
  free.kappa = std::numeric_limits<double>::infinity();
  rows.push_back(free);
  check_golden_text("gap_kappa_synthetic.svg", gap_kappa_svg(rows));
}

TEST(Plots, EntropyGrowthGolden) {
  std::vector<io::EntropyRecord> records;
  for (int n = 8; n <= 14; ++n) {
    records.push_back({"gapped", "append", n, 6, 0.3 - 0.1 * std::exp(-double(n)), std::nullopt});
    records.push_back({"critical", "append", n, 6, 0.2 * std::log(double(n)), std::nullopt});
  }
  check_golden_text("entropy_growth_synthetic.svg", entropy_growth_svg(records));
}
