#include "bef/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bef/error.hpp"

namespace bef::io {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string instance_text(const std::vector<std::pair<std::string, double>>& instance) {
  std::string out;
  for (const auto& [k, v] : instance) {
    if (!out.empty()) out += ';';
    out += fmt::format("{}={}", k, number(v));
  }
  return out;
}

Json ordering_json(const SiteOrdering& ord) {
  Json j;
  j["mode"] = to_string(ord.mode);
  j["bridge_left"] = ord.bridge_left;
  return j;
}

SiteOrdering ordering_from_json(const Json& j) {
  const auto mode = ordering_mode_from_string(j.at("mode").get<std::string>());
  return mode == OrderingMode::Append ? SiteOrdering::append()
                                      : SiteOrdering::bridge(j.at("bridge_left").get<int>());
}

Json fit_json(const DecayFit& fit) {
  Json j;
  j["model"] = to_string(fit.model);
  j["amplitude"] = json_number(fit.amplitude);
  j["rate"] = json_number(fit.rate);
  j["fit_window"] = {fit.fit_window.min, fit.fit_window.max};
  j["points"] = fit.points;
  j["rms_log_residual"] = json_number(fit.rms_log_residual);
  j["relative_residual"] = json_number(fit.relative_residual);
  return j;
}

}  // namespace

std::string number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

Json json_number(double value) {
  if (std::isfinite(value)) return value;
  return number(value);
}

double number_from_json(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  throw Error(ErrorCode::ConfigParse, fmt::format("not a number: {}", value.dump()));
}

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
}

void write_profile_csv(std::ostream& out, const BoundaryProfile& profile, const Metadata& meta) {
  write_metadata(out, meta);
  out << "model_id,ordering,n,r,mu\n";
  for (const auto& e : profile.entries) {
    out << csv_field(profile.model_id) << ',' << describe(profile.ordering) << ',' << e.n << ','
        << e.r << ',' << number(e.mu) << '\n';
  }
}

void write_mu_hat_csv(std::ostream& out, const BoundaryProfile& profile, const Metadata& meta) {
  write_metadata(out, meta);
  out << "model_id,ordering,r,mu_hat\n";
  for (const auto& [r, mu] : profile.mu_hat) {
    out << csv_field(profile.model_id) << ',' << describe(profile.ordering) << ',' << r << ','
        << number(mu) << '\n';
  }
}

void write_reports_csv(std::ostream& out, const std::vector<InequalityReport>& reports,
                       const Metadata& meta) {
  write_metadata(out, meta);
  out << "name,model_id,ordering,instance,label,lhs,rhs,margin,pass,applicable,tol,note\n";
  for (const auto& r : reports) {
    out << to_string(r.name) << ',' << csv_field(r.model_id) << ',' << r.ordering << ','
        << instance_text(r.instance) << ',' << csv_field(r.label) << ',' << number(r.lhs) << ','
        << number(r.rhs) << ',' << number(r.margin) << ',' << (r.pass ? "true" : "false") << ','
        << (r.applicable ? "true" : "false") << ',' << number(r.tol) << ',' << csv_field(r.note)
        << '\n';
  }
}

void write_gap_scan_csv(std::ostream& out, const std::vector<GapKappaRow>& rows,
                        const Metadata& meta) {
  write_metadata(out, meta);
  out << "model_id,parameter,gap,gap2,kappa,amplitude,rms_exponential,rms_power_law,relative_exponential,alpha,"
         "preferred,flagged,message\n";
  for (const auto& r : rows) {
    out << csv_field(r.model_id) << ',' << number(r.parameter) << ',' << number(r.gap) << ','
        << number(r.gap2) << ',' << number(r.kappa) << ',' << number(r.amplitude) << ','
        << number(r.rms_exponential) << ',' << number(r.rms_power_law) << ','
        << number(r.relative_exponential) << ',' << number(r.alpha)
        << ',' << r.preferred << ',' << (r.flagged ? "true" : "false") << ','
        << csv_field(r.message) << '\n';
  }
}

void write_solve_csv(std::ostream& out, const std::vector<SolveRecord>& records,
                     const Metadata& meta) {
  write_metadata(out, meta);
  out << "model_id,ordering,n,energy,gap,gap2,residual,degenerate,iterations,local_norm\n";
  for (const auto& r : records) {
    const auto& s = r.solution;
    out << csv_field(r.model_id) << ',' << r.ordering << ',' << r.n << ',' << number(s.energy)
        << ',' << number(s.gap) << ','
        << number(s.gap2 ? *s.gap2 : std::numeric_limits<double>::quiet_NaN()) << ','
        << number(s.residual) << ',' << (s.degenerate ? "true" : "false") << ',' << s.iterations
        << ',' << number(r.local_norm) << '\n';
  }
}

void write_entropy_csv(std::ostream& out, const std::vector<EntropyRecord>& records,
                       const Metadata& meta) {
  write_metadata(out, meta);
  out << "model_id,ordering,n,m,entropy,eta\n";
  for (const auto& r : records) {
    out << csv_field(r.model_id) << ',' << r.ordering << ',' << r.n << ',' << r.m << ','
        << number(r.entropy) << ',' << (r.eta ? number(*r.eta) : std::string()) << '\n';
  }
}

void write_correlation_csv(std::ostream& out, const std::vector<CorrelationRecord>& records,
                           const Metadata& meta) {
  write_metadata(out, meta);
  out << "model_id,ordering,n,r,site1,site2,label,f,mu\n";
  for (const auto& r : records) {
    out << csv_field(r.model_id) << ',' << r.ordering << ',' << r.n << ',' << r.r << ','
        << r.site1 << ',' << r.site2 << ',' << r.label << ',' << number(r.f) << ','
        << number(r.mu) << '\n';
  }
}

Json to_json(const BoundaryProfile& profile) {
  Json j;
  j["model_id"] = profile.model_id;
  j["ordering"] = ordering_json(profile.ordering);
  j["n_window"] = {profile.n_window.min, profile.n_window.max};
  j["r_window"] = {profile.r_window.min, profile.r_window.max};
  j["noise_floor"] = profile.noise_floor;
  j["fit_r_min"] = profile.fit_r_min;
  j["mu_hat_is_lower_estimate"] = true;
  Json entries = Json::array();
  for (const auto& e : profile.entries) {
    entries.push_back({{"n", e.n}, {"r", e.r}, {"mu", json_number(e.mu)}});
  }
  j["entries"] = std::move(entries);
  Json hat = Json::array();
  for (const auto& [r, mu] : profile.mu_hat) hat.push_back({{"r", r}, {"mu_hat", json_number(mu)}});
  j["mu_hat"] = std::move(hat);
  return j;
}

BoundaryProfile profile_from_json(const Json& j) {
  BoundaryProfile p;
  p.model_id = j.at("model_id").get<std::string>();
  p.ordering = ordering_from_json(j.at("ordering"));
  p.n_window = {j.at("n_window")[0].get<int>(), j.at("n_window")[1].get<int>()};
  p.r_window = {j.at("r_window")[0].get<int>(), j.at("r_window")[1].get<int>()};
  p.noise_floor = j.at("noise_floor").get<double>();
  p.fit_r_min = j.value("fit_r_min", 2);
  for (const auto& e : j.at("entries")) {
    p.entries.push_back({e.at("n").get<int>(), e.at("r").get<int>(), number_from_json(e.at("mu"))});
  }
  for (const auto& e : j.at("mu_hat")) {
    p.mu_hat[e.at("r").get<int>()] = number_from_json(e.at("mu_hat"));
  }
  return p;
}

Json to_json(const DecayAnalysis& analysis) {
  Json j;
  j["exponential"] = fit_json(analysis.exponential);
  j["power_law"] = fit_json(analysis.power_law);
  j["preferred"] = to_string(analysis.preferred);
  j["kappa"] = json_number(analysis.exponential.rate);
  return j;
}

Json to_json(const InequalityReport& report) {
  Json j;
  j["name"] = to_string(report.name);
  j["model_id"] = report.model_id;
  j["ordering"] = report.ordering;
  Json inst = Json::object();
  for (const auto& [k, v] : report.instance) inst[k] = json_number(v);
  j["instance"] = std::move(inst);
  j["label"] = report.label;
  j["lhs"] = json_number(report.lhs);
  j["rhs"] = json_number(report.rhs);
  j["margin"] = json_number(report.margin);
  j["pass"] = report.pass;
  j["applicable"] = report.applicable;
  j["tol"] = report.tol;
  j["note"] = report.note;
  Json details = Json::object();
  for (const auto& [k, v] : report.details) details[k] = json_number(v);
  j["details"] = std::move(details);
  return j;
}

InequalityKind inequality_from_string(const std::string& name) {
  for (auto kind : {InequalityKind::EtaMuSandwich, InequalityKind::CorrelationBound,
                    InequalityKind::EntropyIncrement, InequalityKind::AreaLawAccumulation}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::ConfigParse, fmt::format("unknown inequality '{}'", name));
}

InequalityReport report_from_json(const Json& j) {
  InequalityReport r;
  r.name = inequality_from_string(j.at("name").get<std::string>());
  r.model_id = j.at("model_id").get<std::string>();
  r.ordering = j.at("ordering").get<std::string>();
  for (const auto& [k, v] : j.at("instance").items()) r.instance.emplace_back(k, number_from_json(v));
  r.label = j.value("label", "");
  r.lhs = number_from_json(j.at("lhs"));
  r.rhs = number_from_json(j.at("rhs"));
  r.margin = number_from_json(j.at("margin"));
  r.pass = j.at("pass").get<bool>();
  r.applicable = j.value("applicable", true);
  r.tol = j.at("tol").get<double>();
  r.note = j.value("note", "");
  if (j.contains("details")) {
    for (const auto& [k, v] : j.at("details").items()) r.details[k] = number_from_json(v);
  }
  return r;
}

Json to_json(const GapKappaRow& row) {
  Json j;
  j["model_id"] = row.model_id;
  j["parameter"] = json_number(row.parameter);
  j["gap"] = json_number(row.gap);
  j["gap2"] = json_number(row.gap2);
  j["kappa"] = json_number(row.kappa);
  j["amplitude"] = json_number(row.amplitude);
  j["rms_exponential"] = json_number(row.rms_exponential);
  j["rms_power_law"] = json_number(row.rms_power_law);
  j["relative_exponential"] = json_number(row.relative_exponential);
  j["alpha"] = json_number(row.alpha);
  j["preferred"] = row.preferred;
  j["flagged"] = row.flagged;
  j["message"] = row.message;
  Json hat = Json::array();
  for (const auto& [r, mu] : row.mu_hat) hat.push_back({{"r", r}, {"mu_hat", json_number(mu)}});
  j["mu_hat"] = std::move(hat);
  return j;
}

GapKappaRow gap_row_from_json(const Json& j) {
  GapKappaRow row;
  row.model_id = j.at("model_id").get<std::string>();
  row.parameter = number_from_json(j.at("parameter"));
  row.gap = number_from_json(j.at("gap"));
  row.gap2 = number_from_json(j.at("gap2"));
  row.kappa = number_from_json(j.at("kappa"));
  row.amplitude = number_from_json(j.at("amplitude"));
  row.rms_exponential = number_from_json(j.at("rms_exponential"));
  row.rms_power_law = number_from_json(j.at("rms_power_law"));
  row.relative_exponential = number_from_json(j.at("relative_exponential"));
  row.alpha = number_from_json(j.at("alpha"));
  row.preferred = j.at("preferred").get<std::string>();
  row.flagged = j.at("flagged").get<bool>();
  row.message = j.at("message").get<std::string>();
  for (const auto& e : j.at("mu_hat")) row.mu_hat[e.at("r").get<int>()] = number_from_json(e.at("mu_hat"));
  return row;
}

Json to_json(const SolveRecord& record) {
  const auto& s = record.solution;
  Json j;
  j["model_id"] = record.model_id;
  j["ordering"] = record.ordering;
  j["n"] = record.n;
  j["energy"] = json_number(s.energy);
  j["gap"] = json_number(s.gap);
  j["gap2"] = s.gap2 ? json_number(*s.gap2) : Json(nullptr);
  j["residual"] = json_number(s.residual);
  j["degenerate"] = s.degenerate;
  j["iterations"] = s.iterations;
  j["local_norm"] = json_number(record.local_norm);
  Json levels = Json::array();
  for (double e : s.energies) levels.push_back(json_number(e));
  j["energies"] = std::move(levels);
  return j;
}

Json to_json(const EntropyRecord& record) {
  Json j;
  j["model_id"] = record.model_id;
  j["ordering"] = record.ordering;
  j["n"] = record.n;
  j["m"] = record.m;
  j["entropy"] = json_number(record.entropy);
  j["eta"] = record.eta ? json_number(*record.eta) : Json(nullptr);
  return j;
}

EntropyRecord entropy_from_json(const Json& j) {
  EntropyRecord r;
  r.model_id = j.at("model_id").get<std::string>();
  r.ordering = j.at("ordering").get<std::string>();
  r.n = j.at("n").get<int>();
  r.m = j.at("m").get<int>();
  r.entropy = number_from_json(j.at("entropy"));
  if (j.contains("eta") && !j.at("eta").is_null()) r.eta = number_from_json(j.at("eta"));
  return r;
}

Json to_json(const CorrelationRecord& record) {
  Json j;
  j["model_id"] = record.model_id;
  j["ordering"] = record.ordering;
  j["n"] = record.n;
  j["r"] = record.r;
  j["site1"] = record.site1;
  j["site2"] = record.site2;
  j["label"] = record.label;
  j["f"] = json_number(record.f);
  j["mu"] = json_number(record.mu);
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingInput, fmt::format("cannot write {}", path));
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, fmt::format("cannot read {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bef::io
