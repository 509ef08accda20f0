#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "bef/error.hpp"
#include "bef/io.hpp"

using namespace bef;

namespace {

BoundaryProfile sample_profile() {
  BoundaryProfile p;
  p.model_id = "tfim_g2";
  p.ordering = SiteOrdering::bridge(3);
  p.entries = {{8, 1, 0.25}, {8, 2, 1e-3}, {9, 1, 0.3}, {9, 2, 0.0}};
  p.mu_hat = {{1, 0.3}, {2, 1e-3}};
  p.n_window = {8, 9};
  p.r_window = {1, 2};
  p.noise_floor = 1e-11;
  p.fit_r_min = 1;
  return p;
}

std::string first_data_line(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return line;
  }
  return {};
}

}  // namespace

TEST(Number, ShortestRoundTripAndSpecialValues) {
  EXPECT_EQ(io::number(0.1), "0.1");
  EXPECT_EQ(io::number(1e-11), "1e-11");
  EXPECT_EQ(io::number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(io::number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(io::number(std::nan("")), "nan");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(io::number(x)), x);
}

TEST(Number, JsonCarriesNonFiniteAsStrings) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(io::json_number(inf), io::Json("inf"));
  EXPECT_TRUE(std::isinf(io::number_from_json(io::json_number(inf))));
  EXPECT_TRUE(std::isnan(io::number_from_json(io::json_number(std::nan("")))));
  EXPECT_EQ(io::number_from_json(io::json_number(2.5)), 2.5);
}

TEST(Csv, HeadersAndMetadata) {
  std::ostringstream out;
  io::write_profile_csv(out, sample_profile(), {{"seed", "7"}});
  const auto text = out.str();
  EXPECT_EQ(text.rfind("# seed: 7\n", 0), 0U);
  EXPECT_EQ(first_data_line(text), "model_id,ordering,n,r,mu");
  EXPECT_NE(text.find("tfim_g2,bridge3,8,2,0.001"), std::string::npos) << text;

  std::ostringstream hat;
  io::write_mu_hat_csv(hat, sample_profile());
  EXPECT_EQ(first_data_line(hat.str()), "model_id,ordering,r,mu_hat");

  std::ostringstream reports;
  io::write_reports_csv(reports, {});
  EXPECT_EQ(first_data_line(reports.str()),
            "name,model_id,ordering,instance,label,lhs,rhs,margin,pass,applicable,tol,note");

  std::ostringstream scan;
  io::write_gap_scan_csv(scan, {});
  EXPECT_EQ(first_data_line(scan.str()),
            "model_id,parameter,gap,gap2,kappa,amplitude,rms_exponential,rms_power_law,"
            "relative_exponential,alpha,preferred,flagged,message");
}

TEST(Json, ProfileRoundTrip) {
  const auto p = sample_profile();
  const auto back = io::profile_from_json(io::Json::parse(io::to_json(p).dump()));
  EXPECT_EQ(back.model_id, p.model_id);
  EXPECT_EQ(back.ordering, p.ordering);
  EXPECT_EQ(back.mu_hat, p.mu_hat);
  EXPECT_EQ(back.n_window, p.n_window);
  EXPECT_EQ(back.noise_floor, p.noise_floor);
  EXPECT_EQ(back.fit_r_min, p.fit_r_min);
  ASSERT_EQ(back.entries.size(), p.entries.size());
  for (std::size_t i = 0; i < p.entries.size(); ++i) EXPECT_EQ(back.entries[i].mu, p.entries[i].mu);
}

TEST(Json, ReportRoundTrip) {
  InequalityReport rep;
  rep.name = InequalityKind::CorrelationBound;
  rep.model_id = "m";
  rep.ordering = "bridge:8";
  rep.instance = {{"n", 17}, {"r", 3}};
  rep.label = "XZ";
  rep.lhs = 0.012345678901234567;
  rep.rhs = 0.5;
  rep.tol = 1e-9;
  rep.details["mu"] = 0.0589;
  rep.finalize();
  const auto back = io::report_from_json(io::Json::parse(io::to_json(rep).dump()));
  EXPECT_EQ(back.name, rep.name);
  EXPECT_EQ(back.instance, rep.instance);
  EXPECT_EQ(back.lhs, rep.lhs);
  EXPECT_EQ(back.margin, rep.margin);
  EXPECT_EQ(back.pass, rep.pass);
  EXPECT_EQ(back.details, rep.details);
}

TEST(Json, GapRowRoundTripKeepsInfinity) {
  GapKappaRow row;
  row.model_id = "free@g_x=2";
  row.parameter = 2.0;
  row.kappa = std::numeric_limits<double>::infinity();
  row.gap2 = std::nan("");
  row.preferred = "none";
  row.mu_hat = {{1, 0.0}, {2, 0.0}};
  const auto back = io::gap_row_from_json(io::Json::parse(io::to_json(row).dump()));
  EXPECT_TRUE(std::isinf(back.kappa));
  EXPECT_TRUE(std::isnan(back.gap2));
  EXPECT_EQ(back.mu_hat, row.mu_hat);
  EXPECT_EQ(back.preferred, "none");
}

TEST(Json, EntropyRoundTrip) {
  io::EntropyRecord rec{"m", "append", 12, 6, 0.4321, 1e-5};
  const auto back = io::entropy_from_json(io::Json::parse(io::to_json(rec).dump()));
  EXPECT_EQ(back.entropy, rec.entropy);
  EXPECT_EQ(back.eta, rec.eta);
  rec.eta.reset();
  EXPECT_FALSE(io::entropy_from_json(io::to_json(rec)).eta.has_value());
}

TEST(Json, InequalityNames) {
  for (auto kind : {InequalityKind::EtaMuSandwich, InequalityKind::CorrelationBound,
                    InequalityKind::EntropyIncrement, InequalityKind::AreaLawAccumulation}) {
    EXPECT_EQ(io::inequality_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(io::inequality_from_string("Nope"), Error);
}

TEST(Files, WriteCreatesDirectoriesAndReadBack) {
  const auto dir = std::filesystem::temp_directory_path() / "bef_io_test";
  std::filesystem::remove_all(dir);
  const auto path = (dir / "a" / "b.txt").string();
  io::write_file(path, "hello\n");
  EXPECT_EQ(io::read_file(path), "hello\n");
  std::filesystem::remove_all(dir);
  try {
    io::read_file(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingInput);
  }
}
