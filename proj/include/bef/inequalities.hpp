#pragma once

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bef/boundary.hpp"

namespace bef {

enum class InequalityKind { EtaMuSandwich, CorrelationBound, EntropyIncrement, AreaLawAccumulation };

std::string to_string(InequalityKind kind);

/// One evaluated instance of a bound lhs <= rhs. `pass` is margin >= -tol.
struct InequalityReport {
  InequalityKind name = InequalityKind::EtaMuSandwich;
  std::string model_id;
  std::string ordering;
  std::vector<std::pair<std::string, double>> instance;  // ordered parameter tuple
  std::string label;                                     // e.g. Pauli pair "XZ"
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  double tol = 1e-9;
  bool applicable = true;            // false when the bound's domain is violated
  std::string note;
  std::map<std::string, double> details;

  void finalize();
};

/// Deterministic order: kind, model, ordering, instance tuple, label.
void sort_reports(std::vector<InequalityReport>& reports);

constexpr double kDefaultTolerance = 1e-9;

/// Single-site observable with its operator norm.
struct ObservableSpec {
  Eigen::Matrix2cd op;
  int site = 1;  // site index
  std::string name;
  double norm = 0.0;

  static ObservableSpec pauli(char letter, int site);
  static ObservableSpec custom(const Eigen::Matrix2cd& op, int site, std::string name = "Q");
};

/// f(Q1, Q2) = <Q1 Q2> - <Q1><Q2> (real part; Hermitian inputs give a real value).
double connected_correlator(const StateVector& state, const ObservableSpec& q1,
                            const ObservableSpec& q2);

/// Two-sided check mu^2 <= eta_A <= sqrt(2 mu^2 - mu^4) with A = 1..m, where
/// mu is the alignment distance over the complement of A (which for Append is
/// exactly mu_n(n - m)).
InequalityReport verify_eta_mu_sandwich(const BoundaryEngine& engine, int n, int m,
                                        double tol = kDefaultTolerance);

/// |f(Q1, Q2)| <= 6 sqrt(2) ||Q1|| ||Q2|| mu_n(r) with Q1, Q2 on the r-th
/// neighbours of the joining site (engine ordering must be Bridge).
InequalityReport verify_correlation_bound(const BoundaryEngine& engine, int n, int r,
                                          const ObservableSpec& q1_template,
                                          const ObservableSpec& q2_template,
                                          double tol = kDefaultTolerance);
InequalityReport verify_correlation_bound(const BoundaryEngine& engine, int n, int r, char pauli1,
                                          char pauli2, double tol = kDefaultTolerance);

/// |S(rho_A^(s)) - S(rho_A^(s-1))| <= 8 eta (s - m) + 2 H2(2 eta).
InequalityReport verify_entropy_increment(const BoundaryEngine& engine, int m, int s,
                                          double tol = kDefaultTolerance);

/// Fannes-type increment bound for step s, capped by 2 min(m, s - m); the cap
/// alone applies when 2 eta > 1.
double capped_increment_bound(double eta, int m, int s);

/// S(rho_A^(n)) <= S(rho_A^(m+q)) + sum_{s=m+q+1}^{n} capped increment bound,
/// together with the seed bound S(rho_A^(m+q)) <= q (Append ordering only).
InequalityReport verify_area_law_accumulation(const BoundaryEngine& engine, int m, int q, int n,
                                              double tol = kDefaultTolerance);

/// Convenience forms that build a throwaway engine.
InequalityReport verify_eta_mu_sandwich(const ModelSpec& spec, const SiteOrdering& ordering, int n,
                                        int m, const BoundaryOptions& options = {});
InequalityReport verify_correlation_bound(const ModelSpec& spec, const SiteOrdering& bridge, int r,
                                          char pauli1, char pauli2,
                                          const BoundaryOptions& options = {});
InequalityReport verify_entropy_increment(const ModelSpec& spec, const SiteOrdering& ordering,
                                          int m, int s, const BoundaryOptions& options = {});
InequalityReport verify_area_law_accumulation(const ModelSpec& spec, const SiteOrdering& ordering,
                                              int m, int q, int n,
                                              const BoundaryOptions& options = {});

struct GapKappaRow {
  double parameter = 0.0;
  std::string model_id;
  double gap = 0.0;                   // E1 - E0 at n_max
  double gap2 = 0.0;                  // E2 - E0 at n_max (NaN if unavailable)
  double kappa = 0.0;                 // +inf when mu_hat vanishes identically
  double amplitude = 0.0;
  double rms_exponential = 0.0;
  double rms_power_law = 0.0;
  double relative_exponential = 0.0;  // sqrt(1 - R^2) of the exponential fit
  double alpha = 0.0;
  std::string preferred;
  bool flagged = false;
  std::string message;
  std::map<int, double> mu_hat;
};

/// Sweeps one coupling of `base` over `values`; one row per value.
std::vector<GapKappaRow> gap_vs_kappa_scan(const ModelSpec& base, const std::string& parameter,
                                           const std::vector<double>& values, IntRange n_range,
                                           IntRange r_range, const SiteOrdering& ordering,
                                           const BoundaryOptions& options = {});

}  // namespace bef
