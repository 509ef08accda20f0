#include "bef/boundary.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bef/error.hpp"
#include "parallel.hpp"

namespace bef {

namespace {

std::vector<int> prefix_region(int m) {
  std::vector<int> out(m);
  for (int i = 0; i < m; ++i) out[i] = i + 1;
  return out;
}

DecayFit least_squares(const std::vector<std::pair<int, double>>& points, DecayModel model) {
  const auto count = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys;
  for (const auto& [r, mu] : points) {
    const double x = model == DecayModel::Exponential ? r : std::log(static_cast<double>(r));
    xs.push_back(x);
    ys.push_back(std::log(mu));
    sx += x;
    sy += ys.back();
  }
  const double mx = sx / count;
  const double my = sy / count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double res = ys[i] - (intercept + slope * xs[i]);
    ss += res * res;
    syy += (ys[i] - my) * (ys[i] - my);
  }
  DecayFit fit;
  fit.model = model;
  fit.amplitude = std::exp(intercept);
  fit.rate = -slope;
  fit.fit_window = {points.front().first, points.back().first};
  fit.points = static_cast<int>(points.size());
  fit.rms_log_residual = std::sqrt(ss / count);
  fit.relative_residual = syy > 0.0 ? std::sqrt(ss / syy) : 0.0;
  return fit;
}

}  // namespace

std::string fingerprint(const ModelSpec& spec) {
  std::string out = fmt::format("{}|k{}|d{}|", to_string(spec.family), spec.interaction_range,
                                spec.local_dim);
  for (const auto& [name, value] : spec.couplings) out += fmt::format("{}={:.17g};", name, value);
  for (const auto& t : spec.custom_terms) {
    out += fmt::format("|{}:", to_string(t.placement));
    for (int o : t.offsets) out += fmt::format("{},", o);
    for (Eigen::Index i = 0; i < t.block.size(); ++i) {
      out += fmt::format("{:.17g}{:+.17g}i ", t.block.data()[i].real(), t.block.data()[i].imag());
    }
  }
  return out;
}

BoundaryEngine::BoundaryEngine(ModelSpec spec, SiteOrdering ordering, BoundaryOptions options,
                               std::shared_ptr<GroundStateCache> cache)
    : spec_(std::move(spec)),
      ordering_(ordering),
      options_(std::move(options)),
      cache_(cache ? std::move(cache) : std::make_shared<GroundStateCache>()),
      fingerprint_(fingerprint(spec_)) {
  validate(spec_);
  options_.solver.throw_on_degenerate = false;
}

std::string BoundaryEngine::key(const char* kind, int n) const {
  return fmt::format("{}#{}#{}#{}", fingerprint_, describe(ordering_), kind, n);
}

GroundStateCache::Solution BoundaryEngine::ground(int n) const {
  return cache_->get_or_solve(key("full", n), [&]() {
    return ground_lanczos(build_hamiltonian(spec_, n, ordering_), options_.solver);
  });
}

GroundStateCache::Solution BoundaryEngine::predecessor(int n) const {
  if (ordering_.mode == OrderingMode::Append) {
    if (n < 2) throw Error(ErrorCode::OutOfRange, "predecessor needs n >= 2");
    return ground(n - 1);
  }
  return cache_->get_or_solve(key("pred", n), [&]() {
    return ground_lanczos(predecessor_hamiltonian(spec_, n, ordering_), options_.solver);
  });
}

const GroundSolution& BoundaryEngine::unique(const GroundStateCache::Solution& s) const {
  if (!options_.allow_degenerate) require_unique(*s);
  return *s;
}

StateVector BoundaryEngine::extended_predecessor(int n) const {
  const auto pred = predecessor(n);
  const StateVector& small = unique(pred).state;
  StateVector out = StateVector::Zero(small.size() * 2);
  out.segment(options_.fresh_state == 0 ? 0 : small.size(), small.size()) = small;
  return out;
}

LocalAlignment BoundaryEngine::alignment(int n, const std::vector<int>& region) const {
  if (std::find(region.begin(), region.end(), n) == region.end()) {
    throw Error(ErrorCode::OutOfRange, fmt::format("alignment region must contain site {}", n));
  }
  const auto full = ground(n);
  return align_on_region(unique(full).state, extended_predecessor(n), region,
                         options_.max_core_sites);
}

double BoundaryEngine::mu(int n, int r) const {
  if (r < 1) throw Error(ErrorCode::OutOfRange, fmt::format("radius {} < 1", r));
  return alignment(n, graph_ball(n, n, r, ordering_)).distance;
}

double BoundaryEngine::eta(int n, int m) const {
  if (m < 1 || m >= n) {
    throw Error(ErrorCode::OutOfRange, fmt::format("region 1..{} must be nonempty and below n={}", m, n));
  }
  if (m > options_.max_region_sites) {
    throw Error(ErrorCode::RegionTooLarge,
                fmt::format("region of {} sites exceeds {}", m, options_.max_region_sites));
  }
  const auto region = prefix_region(m);
  const auto full = ground(n);
  const auto pred = predecessor(n);
  return trace_distance(reduced_density(unique(full).state, region, options_.max_region_sites),
                        reduced_density(unique(pred).state, region, options_.max_region_sites));
}

double BoundaryEngine::entropy(int n, int m) const {
  const auto full = ground(n);
  return entanglement_entropy(unique(full).state, prefix_region(m));
}

double BoundaryEngine::predecessor_entropy(int n, int m) const {
  const auto pred = predecessor(n);
  return entanglement_entropy(unique(pred).state, prefix_region(m));
}

double mu_n_r(const ModelSpec& spec, int n, int r, const SiteOrdering& ordering,
              const BoundaryOptions& options) {
  return BoundaryEngine(spec, ordering, options).mu(n, r);
}

double eta_A(const ModelSpec& spec, int n, int m, const SiteOrdering& ordering,
             const BoundaryOptions& options) {
  return BoundaryEngine(spec, ordering, options).eta(n, m);
}

double clamp_to_floor(double mu, double noise_floor) { return mu < noise_floor ? 0.0 : mu; }

BoundaryProfile boundary_profile(const BoundaryEngine& engine, IntRange n_range, IntRange r_range) {
  if (n_range.min < 2 || n_range.max < n_range.min || r_range.min < 1 || r_range.max < r_range.min) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("invalid ranges n {}..{}, r {}..{}", n_range.min, n_range.max,
                            r_range.min, r_range.max));
  }
  const double floor = engine.options().noise_floor;
  std::vector<std::vector<ProfileEntry>> rows(static_cast<std::size_t>(n_range.count()));
  detail::parallel_for(n_range.count(), engine.options().threads, [&](int i) {
    const int n = n_range.min + i;
    for (int r = r_range.min; r <= r_range.max; ++r) {
      rows[static_cast<std::size_t>(i)].push_back({n, r, clamp_to_floor(engine.mu(n, r), floor)});
    }
  });
  BoundaryProfile profile;
  profile.model_id = engine.spec().id;
  profile.ordering = engine.ordering();
  profile.n_window = n_range;
  profile.r_window = r_range;
  profile.noise_floor = floor;
  profile.fit_r_min = engine.options().fit_r_min;
  for (const auto& row : rows) {
    for (const auto& e : row) {
      profile.entries.push_back(e);
      auto [it, inserted] = profile.mu_hat.emplace(e.r, e.mu);
      if (!inserted) it->second = std::max(it->second, e.mu);
    }
  }
  return profile;
}

BoundaryProfile boundary_profile(const ModelSpec& spec, const SiteOrdering& ordering,
                                 IntRange n_range, IntRange r_range,
                                 const BoundaryOptions& options) {
  return boundary_profile(BoundaryEngine(spec, ordering, options), n_range, r_range);
}

std::vector<std::string> profile_violations(const BoundaryProfile& profile, double tol) {
  std::vector<std::string> out;
  std::map<int, std::map<int, double>> by_n;
  for (const auto& e : profile.entries) {
    if (!(e.mu >= 0.0 && e.mu <= 1.0)) {
      out.push_back(fmt::format("mu_{}({}) = {} outside [0,1]", e.n, e.r, e.mu));
    }
    by_n[e.n][e.r] = e.mu;
  }
  for (const auto& [n, row] : by_n) {
    for (auto it = row.begin(); std::next(it) != row.end(); ++it) {
      const auto next = std::next(it);
      if (next->second > it->second + tol) {
        out.push_back(fmt::format("mu_{}({}) = {:.3e} exceeds mu_{}({}) = {:.3e}", n, next->first,
                                  next->second, n, it->first, it->second));
      }
    }
  }
  for (const auto& [r, value] : profile.mu_hat) {
    double best = 0.0;
    for (const auto& [n, row] : by_n) {
      if (auto it = row.find(r); it != row.end()) best = std::max(best, it->second);
    }
    if (best != value) out.push_back(fmt::format("mu_hat({}) = {} but max entry is {}", r, value, best));
  }
  return out;
}

std::string to_string(DecayModel model) {
  return model == DecayModel::Exponential ? "exponential" : "power_law";
}

DecayAnalysis fit_decay(const std::map<int, double>& mu_hat, double noise_floor, int r_min) {
  std::vector<std::pair<int, double>> points;
  for (const auto& [r, mu] : mu_hat) {
    if (r >= std::max(1, r_min) && mu > noise_floor) points.emplace_back(r, mu);
  }
  if (points.size() < 4) {
    throw Error(ErrorCode::InsufficientPoints,
                fmt::format("{} points with r >= {} above the noise floor {:.1e}; need 4",
                            points.size(), r_min, noise_floor));
  }
  DecayAnalysis out;
  out.exponential = least_squares(points, DecayModel::Exponential);
  out.power_law = least_squares(points, DecayModel::PowerLaw);
  out.preferred = out.exponential.rms_log_residual <= out.power_law.rms_log_residual
                      ? DecayModel::Exponential
                      : DecayModel::PowerLaw;
  return out;
}

DecayAnalysis fit_decay(const BoundaryProfile& profile) {
  return fit_decay(profile.mu_hat, profile.noise_floor, profile.fit_r_min);
}

}  // namespace bef
