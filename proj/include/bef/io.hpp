#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bef/boundary.hpp"
#include "bef/inequalities.hpp"

namespace bef::io {

using Json = nlohmann::ordered_json;
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip text for a double, with inf / -inf / nan spelled out.
std::string number(double value);

/// JSON cannot carry non-finite values; they are stored as the strings above.
Json json_number(double value);
double number_from_json(const Json& value);

/// Writes `# key: value` lines.
void write_metadata(std::ostream& out, const Metadata& meta);

// Columns: model_id,ordering,n,r,mu
void write_profile_csv(std::ostream& out, const BoundaryProfile& profile, const Metadata& meta = {});
// Columns: model_id,ordering,r,mu_hat
void write_mu_hat_csv(std::ostream& out, const BoundaryProfile& profile, const Metadata& meta = {});
// Columns: name,model_id,ordering,instance,label,lhs,rhs,margin,pass,applicable,tol,note
void write_reports_csv(std::ostream& out, const std::vector<InequalityReport>& reports,
                       const Metadata& meta = {});
// Columns: model_id,parameter,gap,gap2,kappa,amplitude,rms_exponential,rms_power_law,
//          relative_exponential,alpha,preferred,flagged,message
void write_gap_scan_csv(std::ostream& out, const std::vector<GapKappaRow>& rows,
                        const Metadata& meta = {});

struct SolveRecord {
  std::string model_id;
  std::string ordering;
  int n = 0;
  GroundSolution solution;
  double local_norm = 0.0;
};

// Columns: model_id,ordering,n,energy,gap,gap2,residual,degenerate,iterations,local_norm
void write_solve_csv(std::ostream& out, const std::vector<SolveRecord>& records,
                     const Metadata& meta = {});

struct EntropyRecord {
  std::string model_id;
  std::string ordering;
  int n = 0;
  int m = 0;
  double entropy = 0.0;
  std::optional<double> eta;
};

// Columns: model_id,ordering,n,m,entropy,eta
void write_entropy_csv(std::ostream& out, const std::vector<EntropyRecord>& records,
                       const Metadata& meta = {});

struct CorrelationRecord {
  std::string model_id;
  std::string ordering;
  int n = 0;
  int r = 0;
  int site1 = 0;
  int site2 = 0;
  std::string label;
  double f = 0.0;
  double mu = 0.0;
};

// Columns: model_id,ordering,n,r,site1,site2,label,f,mu
void write_correlation_csv(std::ostream& out, const std::vector<CorrelationRecord>& records,
                           const Metadata& meta = {});

Json to_json(const BoundaryProfile& profile);
Json to_json(const DecayAnalysis& analysis);
Json to_json(const InequalityReport& report);
Json to_json(const GapKappaRow& row);
Json to_json(const SolveRecord& record);
Json to_json(const EntropyRecord& record);
Json to_json(const CorrelationRecord& record);

BoundaryProfile profile_from_json(const Json& j);
InequalityReport report_from_json(const Json& j);
GapKappaRow gap_row_from_json(const Json& j);
EntropyRecord entropy_from_json(const Json& j);

InequalityKind inequality_from_string(const std::string& name);

/// Writes text to a file, creating parent directories.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace bef::io
