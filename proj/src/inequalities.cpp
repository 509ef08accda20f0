#include "bef/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "bef/error.hpp"

namespace bef {

namespace {

std::vector<int> range_indices(int first, int last) {
  std::vector<int> out;
  for (int i = first; i <= last; ++i) out.push_back(i);
  return out;
}

InequalityReport make_report(InequalityKind kind, const BoundaryEngine& engine,
                             std::vector<std::pair<std::string, double>> instance, double tol) {
  InequalityReport rep;
  rep.name = kind;
  rep.model_id = engine.spec().id;
  rep.ordering = describe(engine.ordering());
  rep.instance = std::move(instance);
  rep.tol = tol;
  return rep;
}

const GroundSolution& checked(const BoundaryEngine& engine, const GroundStateCache::Solution& s) {
  if (!engine.options().allow_degenerate) require_unique(*s);
  return *s;
}

}  // namespace

std::string to_string(InequalityKind kind) {
  switch (kind) {
    case InequalityKind::EtaMuSandwich: return "EtaMuSandwich";
    case InequalityKind::CorrelationBound: return "CorrelationBound";
    case InequalityKind::EntropyIncrement: return "EntropyIncrement";
    case InequalityKind::AreaLawAccumulation: return "AreaLawAccumulation";
  }
  return "Unknown";
}

void InequalityReport::finalize() {
  margin = rhs - lhs;
  pass = margin >= -tol;
}

void sort_reports(std::vector<InequalityReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    return std::tie(a.name, a.model_id, a.ordering, a.instance, a.label) <
           std::tie(b.name, b.model_id, b.ordering, b.instance, b.label);
  });
}

ObservableSpec ObservableSpec::pauli(char letter, int site) {
  return custom(pauli::from_char(letter), site, std::string(1, letter));
}

ObservableSpec ObservableSpec::custom(const Eigen::Matrix2cd& op, int site, std::string name) {
  if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorCode::InvalidTerm, "observable is not Hermitian");
  }
  ObservableSpec out;
  out.op = op;
  out.site = site;
  out.name = std::move(name);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(op, Eigen::EigenvaluesOnly);
  out.norm = es.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

double connected_correlator(const StateVector& state, const ObservableSpec& q1,
                            const ObservableSpec& q2) {
  if (q1.site == q2.site) {
    throw Error(ErrorCode::SiteCollision, fmt::format("both observables on site {}", q1.site));
  }
  const StateVector q2psi = apply_site_operator(state, q2.site, q2.op);
  const StateVector q1q2psi = apply_site_operator(q2psi, q1.site, q1.op);
  const Complex joint = state.dot(q1q2psi);
  const Complex e1 = expectation(state, q1.site, q1.op);
  const Complex e2 = state.dot(q2psi);
  return (joint - e1 * e2).real();
}

InequalityReport verify_eta_mu_sandwich(const BoundaryEngine& engine, int n, int m, double tol) {
  auto rep = make_report(InequalityKind::EtaMuSandwich, engine,
                         {{"n", n}, {"m", m}}, tol);
  const double eta = engine.eta(n, m);
  const double mu = engine.alignment(n, range_indices(m + 1, n)).distance;
  const double mu2 = mu * mu;
  rep.lhs = eta;
  rep.rhs = std::sqrt(std::max(0.0, 2.0 * mu2 - mu2 * mu2));
  rep.details["mu"] = mu;
  rep.details["lower"] = mu2;
  rep.details["upper_margin"] = rep.rhs - eta;
  rep.details["lower_margin"] = eta - mu2;
  rep.margin = std::min(rep.rhs - eta, eta - mu2);
  rep.pass = rep.margin >= -tol;
  return rep;
}

InequalityReport verify_correlation_bound(const BoundaryEngine& engine, int n, int r,
                                          const ObservableSpec& q1_template,
                                          const ObservableSpec& q2_template, double tol) {
  const SiteOrdering& ord = engine.ordering();
  if (ord.mode != OrderingMode::Bridge) {
    throw Error(ErrorCode::UnsupportedOrdering, "correlation bound needs the bridge ordering");
  }
  const int left = ord.bridge_left;
  if (r < 1 || r > left || left + r > n - 1) {
    throw Error(ErrorCode::GeometryTooSmall,
                fmt::format("r={} does not fit segments of {} and {} sites", r, left, n - 1 - left));
  }
  ObservableSpec q1 = q1_template;
  ObservableSpec q2 = q2_template;
  q1.site = index_at(n, left - r, ord);
  q2.site = index_at(n, left + r, ord);

  auto rep = make_report(InequalityKind::CorrelationBound, engine, {{"n", n}, {"r", r}}, tol);
  rep.label = q1.name + q2.name;
  const auto full = engine.ground(n);
  const double f = connected_correlator(checked(engine, full).state, q1, q2);
  const double mu = engine.mu(n, r);
  rep.lhs = std::abs(f);
  rep.rhs = 6.0 * std::sqrt(2.0) * q1.norm * q2.norm * mu;
  rep.details["f"] = f;
  rep.details["mu"] = mu;
  rep.details["site1"] = q1.site;
  rep.details["site2"] = q2.site;
  const double scale = q1.norm * q2.norm * mu;
  rep.details["ratio"] = scale > 0.0 ? rep.lhs / scale : 0.0;
  rep.finalize();
  return rep;
}

InequalityReport verify_correlation_bound(const BoundaryEngine& engine, int n, int r, char pauli1,
                                          char pauli2, double tol) {
  return verify_correlation_bound(engine, n, r, ObservableSpec::pauli(pauli1, 1),
                                  ObservableSpec::pauli(pauli2, 2), tol);
}

double capped_increment_bound(double eta, int m, int s) {
  const double cap = 2.0 * std::min(m, s - m);
  if (2.0 * eta > 1.0) return cap;
  return std::min(cap, 8.0 * eta * (s - m) + 2.0 * binary_entropy(2.0 * eta));
}

InequalityReport verify_entropy_increment(const BoundaryEngine& engine, int m, int s, double tol) {
  if (m < 1 || s <= m) {
    throw Error(ErrorCode::OutOfRange, fmt::format("need 1 <= m < s, got m={} s={}", m, s));
  }
  auto rep = make_report(InequalityKind::EntropyIncrement, engine, {{"m", m}, {"s", s}}, tol);
  const double s_now = engine.entropy(s, m);
  const double s_before = engine.predecessor_entropy(s, m);
  const double eta = engine.eta(s, m);
  const double mu = engine.alignment(s, range_indices(m + 1, s)).distance;
  rep.lhs = std::abs(s_now - s_before);
  rep.details["increment"] = s_now - s_before;
  rep.details["eta"] = eta;
  rep.details["mu"] = mu;
  const double mu_form = 8.0 * std::sqrt(2.0) * (s - m) * mu + 2.0 * std::sqrt(2.0 * mu);
  rep.details["rhs_mu_form"] = mu_form;
  if (2.0 * eta > 1.0) {
    rep.applicable = false;
    rep.note = std::string(to_string(ErrorCode::EtaTooLarge));
    rep.rhs = capped_increment_bound(eta, m, s);
  } else {
    rep.rhs = 8.0 * eta * (s - m) + 2.0 * binary_entropy(2.0 * eta);
    rep.details["mu_form_consistent"] = rep.rhs <= mu_form + tol ? 1.0 : 0.0;
  }
  rep.finalize();
  return rep;
}

InequalityReport verify_area_law_accumulation(const BoundaryEngine& engine, int m, int q, int n,
                                              double tol) {
  if (engine.ordering().mode != OrderingMode::Append) {
    throw Error(ErrorCode::UnsupportedOrdering,
                "accumulation telescopes only when each predecessor is the previous chain");
  }
  if (m < 1 || q < 1 || m + q >= n) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("need m, q >= 1 and m + q < n, got m={} q={} n={}", m, q, n));
  }
  auto rep = make_report(InequalityKind::AreaLawAccumulation, engine,
                         {{"m", m}, {"q", q}, {"n", n}}, tol);
  const double seed = engine.entropy(m + q, m);
  double bound = seed;
  double signed_sum = 0.0;
  bool all_steps_pass = true;
  for (int s = m + q + 1; s <= n; ++s) {
    const auto step = verify_entropy_increment(engine, m, s, tol);
    bound += std::min(step.rhs, capped_increment_bound(step.details.at("eta"), m, s));
    signed_sum += step.details.at("increment");
    all_steps_pass = all_steps_pass && step.pass;
  }
  rep.lhs = engine.entropy(n, m);
  rep.rhs = bound;
  rep.details["seed_entropy"] = seed;
  rep.details["seed_margin"] = q - seed;
  rep.details["telescoping_residual"] = signed_sum - (rep.lhs - seed);
  rep.details["steps_pass"] = all_steps_pass ? 1.0 : 0.0;
  rep.finalize();
  if (seed > q + tol) {
    rep.pass = false;
    rep.note = "seed bound violated";
  }
  return rep;
}

InequalityReport verify_eta_mu_sandwich(const ModelSpec& spec, const SiteOrdering& ordering, int n,
                                        int m, const BoundaryOptions& options) {
  return verify_eta_mu_sandwich(BoundaryEngine(spec, ordering, options), n, m);
}

InequalityReport verify_correlation_bound(const ModelSpec& spec, const SiteOrdering& bridge, int r,
                                          char pauli1, char pauli2, const BoundaryOptions& options) {
  return verify_correlation_bound(BoundaryEngine(spec, bridge, options), 2 * bridge.bridge_left + 1,
                                  r, pauli1, pauli2);
}

InequalityReport verify_entropy_increment(const ModelSpec& spec, const SiteOrdering& ordering,
                                          int m, int s, const BoundaryOptions& options) {
  return verify_entropy_increment(BoundaryEngine(spec, ordering, options), m, s);
}

InequalityReport verify_area_law_accumulation(const ModelSpec& spec, const SiteOrdering& ordering,
                                              int m, int q, int n, const BoundaryOptions& options) {
  return verify_area_law_accumulation(BoundaryEngine(spec, ordering, options), m, q, n);
}

std::vector<GapKappaRow> gap_vs_kappa_scan(const ModelSpec& base, const std::string& parameter,
                                           const std::vector<double>& values, IntRange n_range,
                                           IntRange r_range, const SiteOrdering& ordering,
                                           const BoundaryOptions& options) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<GapKappaRow> rows;
  for (double value : values) {
    ModelSpec spec = base;
    spec.couplings[parameter] = value;
    spec.id = fmt::format("{}@{}={:g}", base.id, parameter, value);
    GapKappaRow row;
    row.parameter = value;
    row.model_id = spec.id;
    row.gap = row.gap2 = row.kappa = row.amplitude = nan;
    row.rms_exponential = row.rms_power_law = row.relative_exponential = row.alpha = nan;
    try {
      BoundaryEngine engine(spec, ordering, options);
      const auto g = engine.ground(n_range.max);
      row.gap = g->gap;
      row.gap2 = g->gap2 ? *g->gap2 : nan;
      const auto profile = boundary_profile(engine, n_range, r_range);
      row.mu_hat = profile.mu_hat;
      const bool vanishing = std::all_of(profile.mu_hat.begin(), profile.mu_hat.end(),
                                         [](const auto& kv) { return kv.second == 0.0; });
      if (vanishing) {
        row.kappa = std::numeric_limits<double>::infinity();
        row.amplitude = 0.0;
        row.preferred = "none";
      } else {
        const auto fit = fit_decay(profile);
        row.kappa = fit.exponential.rate;
        row.amplitude = fit.exponential.amplitude;
        row.rms_exponential = fit.exponential.rms_log_residual;
        row.rms_power_law = fit.power_law.rms_log_residual;
        row.relative_exponential = fit.exponential.relative_residual;
        row.alpha = fit.power_law.rate;
        row.preferred = to_string(fit.preferred);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateGround && e.code() != ErrorCode::InsufficientPoints) throw;
      row.flagged = true;
      row.message = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bef
