#include <cmath>

#include <gtest/gtest.h>

#include "bef/boundary.hpp"
#include "bef/error.hpp"
#include "oracle.hpp"

using namespace bef;

namespace {

std::vector<int> range(int a, int b) {
  std::vector<int> out;
  for (int s = a; s <= b; ++s) out.push_back(s);
  return out;
}

oracle::Vector ground_of(const oracle::Matrix& h) { return oracle::diagonalize(h).vectors.col(0); }

/// 1 - F between psi and phi after tracing out the ball, F from matrix square roots.
double one_minus_f(const oracle::Vector& psi, const oracle::Vector& phi, int n,
                   const std::vector<int>& ball) {
  const auto comp = oracle::complement(n, ball);
  if (comp.empty()) return 1.0 - std::abs(psi.dot(psi)) * std::abs(phi.dot(phi));
  return 1.0 - oracle::fidelity(oracle::partial_trace(psi, comp, n), oracle::partial_trace(phi, comp, n));
}

}  // namespace

TEST(Mu, TfimGappedMatchesDenseOracle) {
  const int n = 10;
  const auto psi = ground_of(oracle::tfim(n, 1.0, 2.0, 0.0, oracle::append_chain(n)));
  const auto phi =
      oracle::extend(ground_of(oracle::tfim(n - 1, 1.0, 2.0, 0.0, oracle::append_chain(n - 1))), 0);
  BoundaryEngine engine(tfim(1.0, 2.0), SiteOrdering::append());
  double previous = 1.0;
  for (int r = 1; r <= 6; ++r) {
    const double mu = engine.mu(n, r);
    const double reference = one_minus_f(psi, phi, n, range(n - r + 1, n));
    EXPECT_NEAR(mu * mu, reference, 1e-13) << r;
    if (reference > 1e-8) EXPECT_NEAR(mu, std::sqrt(reference), 1e-9) << r;
    EXPECT_LT(mu, previous);
    previous = mu;
  }
}

TEST(Mu, LargerSystemIsStrictlyDecreasing) {
  BoundaryEngine engine(tfim(1.0, 2.0), SiteOrdering::append());
  double previous = 1.0;
  for (int r = 1; r <= 6; ++r) {
    const double mu = engine.mu(14, r);
    EXPECT_LT(mu, previous) << r;
    EXPECT_GE(mu, 0.0);
    previous = mu;
  }
}

TEST(Mu, BridgeMatchesDenseOracle) {
  const int n = 9, left = 4;
  const auto psi = ground_of(oracle::tfim(n, 1.0, 1.0, 0.0, oracle::bridge_chain(n, left)));
  const oracle::Matrix pred = oracle::tfim(n - 1, 1.0, 1.0, 0.0, range(1, left)) +
                              oracle::tfim(n - 1, 1.0, 1.0, 0.0, range(left + 1, n - 1));
  const auto phi = oracle::extend(ground_of(pred), 0);
  BoundaryEngine engine(tfim(1.0, 1.0), SiteOrdering::bridge(left));
  for (int r = 1; r <= 4; ++r) {
    const auto ball = graph_ball(n, n, r, SiteOrdering::bridge(left));
    ASSERT_EQ(ball.size(), std::size_t(2 * r - 1));
    const double mu = engine.mu(n, r);
    EXPECT_NEAR(mu * mu, one_minus_f(psi, phi, n, ball), 1e-12) << r;
  }
}

TEST(Mu, DecoupledModelIsZero) {
  BoundaryEngine engine(tfim(0.0, 1.5), SiteOrdering::append());
  for (int n = 3; n <= 10; ++n) {
    for (int r = 1; r <= 4; ++r) EXPECT_LE(engine.mu(n, r), 1e-12);
    EXPECT_LE(engine.eta(n, n - 1), 1e-12);
  }
}

TEST(Mu, IndependentOfFreshState) {
  BoundaryOptions down;
  down.fresh_state = 1;
  BoundaryEngine up_engine(tfim(1.0, 1.3, 0.1), SiteOrdering::append());
  BoundaryEngine down_engine(tfim(1.0, 1.3, 0.1), SiteOrdering::append(), down);
  for (int r = 1; r <= 5; ++r) {
    EXPECT_NEAR(up_engine.mu(10, r), down_engine.mu(10, r), 1e-10) << r;
  }
}

TEST(Mu, RepeatedCallsAreBitwiseEqual) {
  const double a = mu_n_r(xxz(1.5, 0.1), 10, 3, SiteOrdering::append());
  const double b = mu_n_r(xxz(1.5, 0.1), 10, 3, SiteOrdering::append());
  EXPECT_EQ(a, b);
}

TEST(Mu, DegenerateGroundIsRejectedUnlessAllowed) {
  try {
    mu_n_r(tfim(1.0, 0.0), 6, 2, SiteOrdering::append());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateGround);
  }
  BoundaryOptions lenient;
  lenient.allow_degenerate = true;
  const double mu = mu_n_r(tfim(1.0, 0.0), 6, 2, SiteOrdering::append(), lenient);
  EXPECT_GE(mu, 0.0);
  EXPECT_LE(mu, 1.0);
}

TEST(Mu, RadiusMustBePositive) {
  EXPECT_THROW(mu_n_r(tfim(1.0, 2.0), 6, 0, SiteOrdering::append()), Error);
}

TEST(Eta, MatchesTraceDistanceOracle) {
  const int n = 10, m = 4;
  const auto psi = ground_of(oracle::tfim(n, 1.0, 1.0, 0.0, oracle::append_chain(n)));
  const auto prev = ground_of(oracle::tfim(n - 1, 1.0, 1.0, 0.0, oracle::append_chain(n - 1)));
  const double reference = oracle::trace_distance(oracle::partial_trace(psi, range(1, m), n),
                                                  oracle::partial_trace(prev, range(1, m), n - 1));
  EXPECT_NEAR(eta_A(tfim(1.0, 1.0), n, m, SiteOrdering::append()), reference, 1e-10);
}

TEST(Eta, DecreasesWithSystemSize) {
  BoundaryEngine engine(tfim(1.0, 2.0), SiteOrdering::append());
  double previous = 1.0;
  for (int n = 10; n <= 16; ++n) {
    const double eta = engine.eta(n, 6);
    EXPECT_LT(eta, previous) << n;
    previous = eta;
  }
}

TEST(Eta, RegionErrors) {
  BoundaryEngine engine(tfim(1.0, 2.0), SiteOrdering::append());
  EXPECT_THROW(engine.eta(6, 6), Error);
  BoundaryOptions small;
  small.max_region_sites = 3;
  BoundaryEngine capped(tfim(1.0, 2.0), SiteOrdering::append(), small);
  try {
    capped.eta(8, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RegionTooLarge);
  }
}

TEST(Profile, RangeMonotonicityAndMaximum) {
  const auto profile =
      boundary_profile(tfim(1.0, 2.0), SiteOrdering::append(), {8, 13}, {1, 6});
  EXPECT_TRUE(profile_violations(profile).empty());
  EXPECT_EQ(profile.entries.size(), 36U);
  for (const auto& [r, value] : profile.mu_hat) {
    double best = 0.0;
    for (const auto& e : profile.entries) {
      if (e.r == r) best = std::max(best, e.mu);
    }
    EXPECT_EQ(value, best);
  }
  for (auto it = profile.mu_hat.begin(); std::next(it) != profile.mu_hat.end(); ++it) {
    EXPECT_LE(std::next(it)->second, it->second + 1e-9);
  }
}

TEST(Profile, DecoupledIsIdenticallyZero) {
  const auto profile = boundary_profile(tfim(0.0, 1.0), SiteOrdering::append(), {4, 9}, {1, 4});
  for (const auto& [r, value] : profile.mu_hat) EXPECT_EQ(value, 0.0);
  EXPECT_THROW(fit_decay(profile), Error);
}

TEST(Profile, CriticalDominatesGapped) {
  const auto critical = boundary_profile(tfim(1.0, 1.0), SiteOrdering::append(), {8, 12}, {1, 6});
  const auto gapped = boundary_profile(tfim(1.0, 2.0), SiteOrdering::append(), {8, 12}, {1, 6});
  for (int r = 2; r <= 6; ++r) EXPECT_GT(critical.mu_hat.at(r), gapped.mu_hat.at(r)) << r;
}

TEST(Profile, ViolationsAreReported) {
  BoundaryProfile bad;
  bad.entries = {{5, 1, 0.1}, {5, 2, 0.2}, {6, 1, 1.5}};
  bad.mu_hat = {{1, 1.5}, {2, 0.3}};
  EXPECT_EQ(profile_violations(bad).size(), 3U);
}

TEST(Profile, ThreadsDoNotChangeValues) {
  BoundaryOptions two;
  two.threads = 2;
  const auto a = boundary_profile(xxz(1.5, 0.1), SiteOrdering::append(), {6, 9}, {1, 3});
  const auto b = boundary_profile(xxz(1.5, 0.1), SiteOrdering::append(), {6, 9}, {1, 3}, two);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].mu, b.entries[i].mu);
}

TEST(Clamp, BelowFloorIsZero) {
  EXPECT_EQ(clamp_to_floor(5e-13, 1e-12), 0.0);
  EXPECT_EQ(clamp_to_floor(2e-12, 1e-12), 2e-12);
}

TEST(Fit, ExactExponential) {
  std::map<int, double> mu;
  for (int r = 1; r <= 8; ++r) mu[r] = 0.5 * std::exp(-0.7 * r);
  const auto fit = fit_decay(mu, 1e-12);
  EXPECT_EQ(fit.preferred, DecayModel::Exponential);
  EXPECT_NEAR(fit.exponential.rate, 0.7, 1e-6);
  EXPECT_NEAR(fit.exponential.amplitude, 0.5, 1e-6);
  EXPECT_EQ(fit.exponential.fit_window, (IntRange{2, 8}));
  EXPECT_EQ(fit.exponential.points, 7);
}

TEST(Fit, ExactPowerLaw) {
  std::map<int, double> mu;
  for (int r = 1; r <= 8; ++r) mu[r] = std::pow(r, -2.0);
  const auto fit = fit_decay(mu, 1e-12);
  EXPECT_EQ(fit.preferred, DecayModel::PowerLaw);
  EXPECT_NEAR(fit.power_law.rate, 2.0, 1e-6);
  EXPECT_LE(fit.power_law.rms_log_residual, 1e-12);
}

TEST(Fit, NeedsFourPointsAboveFloor) {
  std::map<int, double> mu{{1, 0.1}, {2, 0.01}, {3, 1e-3}, {4, 1e-4}, {5, 1e-13}};
  try {
    fit_decay(mu, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientPoints);
  }
  EXPECT_NO_THROW(fit_decay(mu, 1e-12, 1));
}

TEST(Fit, GappedTfimPrefersExponential) {
  const auto profile = boundary_profile(tfim(1.0, 2.0), SiteOrdering::append(), {8, 12}, {1, 6});
  const auto fit = fit_decay(profile);
  EXPECT_EQ(fit.preferred, DecayModel::Exponential);
  EXPECT_GT(fit.exponential.rate, 0.0);
}

TEST(Cache, SolvesEachKeyOnce) {
  auto cache = std::make_shared<GroundStateCache>();
  BoundaryEngine a(tfim(1.0, 2.0), SiteOrdering::append(), {}, cache);
  BoundaryEngine b(tfim(1.0, 2.0), SiteOrdering::append(), {}, cache);
  a.mu(8, 2);
  const auto size = cache->size();
  EXPECT_EQ(size, 2U);
  b.mu(8, 3);
  b.eta(8, 3);
  EXPECT_EQ(cache->size(), size);
  EXPECT_EQ(a.ground(8).get(), b.ground(8).get());
}

TEST(Cache, FailedSolveIsNotRemembered) {
  GroundStateCache cache;
  int calls = 0;
  auto failing = [&]() -> GroundSolution {
    ++calls;
    throw Error(ErrorCode::NoConvergence, "test");
  };
  EXPECT_THROW(cache.get_or_solve("k", failing), Error);
  EXPECT_EQ(cache.size(), 0U);
  const auto ok = cache.get_or_solve("k", [&] {
    ++calls;
    return GroundSolution{};
  });
  EXPECT_EQ(calls, 2);
  EXPECT_NE(ok, nullptr);
}

TEST(Fingerprint, DistinguishesCouplings) {
  EXPECT_NE(fingerprint(tfim(1.0, 2.0)), fingerprint(tfim(1.0, 2.0000001)));
  EXPECT_EQ(fingerprint(tfim(1.0, 2.0)), fingerprint(tfim(1.0, 2.0)));
}
