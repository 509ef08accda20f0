#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <future>
#include <string>
#include <vector>

#include "bef/eigensolve.hpp"
#include "bef/model.hpp"
#include "bef/statetools.hpp"

namespace bef {

struct IntRange {
  int min = 0;
  int max = 0;

  bool operator==(const IntRange&) const = default;
  int count() const { return max - min + 1; }
};

struct BoundaryOptions {
  BoundaryOptions() { solver.levels = 2; }

  LanczosOptions solver;
  int fresh_state = 0;  // state of the added spin: 0 = up, 1 = down
  bool allow_degenerate = false;
  int max_core_sites = 13;
  int max_region_sites = 13;
  double noise_floor = 1e-12;
  int fit_r_min = 2;  // smallest r entering decay fits
  int threads = 1;    // workers for profile assembly
};

/// Canonical text identity of a spec (family, range, couplings, templates).
std::string fingerprint(const ModelSpec& spec);

/// Ground states keyed by (spec fingerprint, Hamiltonian layout). The first
/// caller of a key solves it; concurrent callers wait for that result.
class GroundStateCache {
 public:
  using Solution = std::shared_ptr<const GroundSolution>;

  template <typename Solve>
  Solution get_or_solve(const std::string& key, Solve&& solve) {
    std::promise<Solution> promise;
    std::shared_future<Solution> pending;
    {
      std::unique_lock lock(mutex_);
      auto it = entries_.find(key);
      if (it != entries_.end()) {
        pending = it->second;
        lock.unlock();
        return pending.get();
      }
      pending = promise.get_future().share();
      entries_.emplace(key, pending);
    }
    try {
      promise.set_value(std::make_shared<const GroundSolution>(solve()));
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::unique_lock lock(mutex_);
      entries_.erase(key);
    }
    return pending.get();
  }

  std::size_t size() const {
    std::unique_lock lock(mutex_);
    return entries_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_future<Solution>> entries_;
};

/// Everything the boundary-effect quantities need for one (spec, ordering):
/// ground states of H^(n) and of the system site n is added to.
class BoundaryEngine {
 public:
  BoundaryEngine(ModelSpec spec, SiteOrdering ordering, BoundaryOptions options = {},
                 std::shared_ptr<GroundStateCache> cache = nullptr);

  const ModelSpec& spec() const { return spec_; }
  const SiteOrdering& ordering() const { return ordering_; }
  const BoundaryOptions& options() const { return options_; }

  GroundStateCache::Solution ground(int n) const;
  GroundStateCache::Solution predecessor(int n) const;

  /// Psi_0^(n-1) with site n set to the fresh state.
  StateVector extended_predecessor(int n) const;

  /// mu_n(r) for the ball of radius r around the added site.
  double mu(int n, int r) const;

  /// Alignment of the n-site ground state with the extended predecessor over
  /// an arbitrary region that must contain site n.
  LocalAlignment alignment(int n, const std::vector<int>& region) const;

  /// Trace distance between rho_A of H^(n) and of its predecessor, A = 1..m.
  double eta(int n, int m) const;

  /// S(rho_A) in bits for A = 1..m on the ground state of H^(n) / predecessor.
  double entropy(int n, int m) const;
  double predecessor_entropy(int n, int m) const;

 private:
  const GroundSolution& unique(const GroundStateCache::Solution& s) const;
  std::string key(const char* kind, int n) const;

  ModelSpec spec_;
  SiteOrdering ordering_;
  BoundaryOptions options_;
  std::shared_ptr<GroundStateCache> cache_;
  std::string fingerprint_;
};

double mu_n_r(const ModelSpec& spec, int n, int r, const SiteOrdering& ordering,
              const BoundaryOptions& options = {});

double eta_A(const ModelSpec& spec, int n, int m, const SiteOrdering& ordering,
             const BoundaryOptions& options = {});

struct ProfileEntry {
  int n = 0;
  int r = 0;
  double mu = 0.0;
};

/// mu_n(r) over a window of system sizes. mu_hat(r) is the maximum over the
/// scanned n and therefore a lower estimate of the supremum over all n.
struct BoundaryProfile {
  std::string model_id;
  SiteOrdering ordering;
  std::vector<ProfileEntry> entries;
  std::map<int, double> mu_hat;
  IntRange n_window;
  IntRange r_window;
  double noise_floor = 1e-12;
  int fit_r_min = 2;
};

/// Values below the noise floor are reported as exactly zero.
double clamp_to_floor(double mu, double noise_floor);

BoundaryProfile boundary_profile(const BoundaryEngine& engine, IntRange n_range, IntRange r_range);
BoundaryProfile boundary_profile(const ModelSpec& spec, const SiteOrdering& ordering,
                                 IntRange n_range, IntRange r_range,
                                 const BoundaryOptions& options = {});

/// Range and monotonicity checks; returns one message per violation.
std::vector<std::string> profile_violations(const BoundaryProfile& profile, double tol = 1e-9);

enum class DecayModel { Exponential, PowerLaw };

std::string to_string(DecayModel model);

/// log mu = log(amplitude) - rate * r        (Exponential)
/// log mu = log(amplitude) - rate * log r    (PowerLaw, rate = alpha)
struct DecayFit {
  DecayModel model = DecayModel::Exponential;
  double amplitude = 0.0;
  double rate = 0.0;
  IntRange fit_window;
  int points = 0;
  double rms_log_residual = 0.0;
  // rms residual over the spread of log mu, i.e. sqrt(1 - R^2); comparable
  // between profiles that span different numbers of decades.
  double relative_residual = 0.0;
};

struct DecayAnalysis {
  DecayFit exponential;
  DecayFit power_law;
  DecayModel preferred = DecayModel::Exponential;

  const DecayFit& best() const {
    return preferred == DecayModel::Exponential ? exponential : power_law;
  }
};

/// Least squares on the points with r >= r_min and mu_hat above the noise
/// floor; needs four.
DecayAnalysis fit_decay(const std::map<int, double>& mu_hat, double noise_floor, int r_min = 2);
DecayAnalysis fit_decay(const BoundaryProfile& profile);

}  // namespace bef
