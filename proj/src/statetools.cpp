#include "bef/statetools.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bef/error.hpp"

namespace bef {

namespace {

constexpr double kSchmidtWeightFloor = 1e-15;
// Eigenvalues of a reduced state below this are treated as exact zeros before
// taking square roots in the Uhlmann route.
constexpr double kSpectrumCutoff = 1e-14;

std::vector<std::size_t> offsets_for(const std::vector<int>& sites) {
  const std::size_t count = std::size_t{1} << sites.size();
  std::vector<std::size_t> out(count, 0);
  for (std::size_t label = 0; label < count; ++label) {
    std::size_t pattern = 0;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      if ((label >> k) & 1u) pattern |= std::size_t{1} << (sites[k] - 1);
    }
    out[label] = pattern;
  }
  return out;
}

void require_same_dims(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("density matrices of dimension {} and {}", a.dim(), b.dim()));
  }
}

// Factor M = L Q with Q having orthonormal rows; returns the square L.
Eigen::MatrixXcd lq_left_factor(const Eigen::MatrixXcd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m.adjoint());
  const Eigen::Index k = m.rows();
  Eigen::MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return r.adjoint();
}

// Columns of V sqrt(Lambda) for the retained part of the spectrum.
Eigen::MatrixXcd weighted_support(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    if (es.eigenvalues()[i] > kSpectrumCutoff) keep.push_back(i);
  }
  Eigen::MatrixXcd out(rho.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) =
        es.eigenvectors().col(keep[j]) * std::sqrt(es.eigenvalues()[keep[j]]);
  }
  return out;
}

}  // namespace

Bipartition Bipartition::of(int n, std::vector<int> region) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "bipartition of an empty system");
  std::sort(region.begin(), region.end());
  if (std::adjacent_find(region.begin(), region.end()) != region.end()) {
    throw Error(ErrorCode::OutOfRange, "region lists a site twice");
  }
  if (!region.empty() && (region.front() < 1 || region.back() > n)) {
    throw Error(ErrorCode::OutOfRange, fmt::format("region site outside 1..{}", n));
  }
  Bipartition bp;
  bp.n = n;
  bp.region = region;
  for (int s = 1; s <= n; ++s) {
    if (!std::binary_search(region.begin(), region.end(), s)) bp.complement.push_back(s);
  }
  bp.permutation = bp.region;
  bp.permutation.insert(bp.permutation.end(), bp.complement.begin(), bp.complement.end());
  return bp;
}

int sites_of(const StateVector& state) {
  const auto len = static_cast<std::size_t>(state.size());
  if (len < 2 || (len & (len - 1)) != 0) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("state length {} is not a power of two", len));
  }
  int n = 0;
  while ((std::size_t{1} << n) < len) ++n;
  return n;
}

Eigen::MatrixXcd bipartition_reshape(const StateVector& state, const Bipartition& bp) {
  if (static_cast<std::size_t>(state.size()) != (std::size_t{1} << bp.n)) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("state length {} for a {}-site bipartition", state.size(), bp.n));
  }
  const auto region_off = offsets_for(bp.region);
  const auto comp_off = offsets_for(bp.complement);
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(comp_off.size()),
                     static_cast<Eigen::Index>(region_off.size()));
  for (std::size_t i = 0; i < region_off.size(); ++i) {
    for (std::size_t c = 0; c < comp_off.size(); ++c) {
      m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
          state[static_cast<Eigen::Index>(comp_off[c] | region_off[i])];
    }
  }
  return m;
}

StateVector bipartition_unreshape(const Eigen::MatrixXcd& matrix, const Bipartition& bp) {
  if (static_cast<std::size_t>(matrix.rows()) != bp.complement_dim() ||
      static_cast<std::size_t>(matrix.cols()) != bp.region_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix shape does not match the bipartition");
  }
  const auto region_off = offsets_for(bp.region);
  const auto comp_off = offsets_for(bp.complement);
  StateVector state(static_cast<Eigen::Index>(std::size_t{1} << bp.n));
  for (std::size_t i = 0; i < region_off.size(); ++i) {
    for (std::size_t c = 0; c < comp_off.size(); ++c) {
      state[static_cast<Eigen::Index>(comp_off[c] | region_off[i])] =
          matrix(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i));
    }
  }
  return state;
}

void DensityMatrix::validate(double tol) const {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw Error(ErrorCode::NotPSD, "density matrix must be square and nonempty");
  }
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw Error(ErrorCode::NotPSD, "density matrix is not Hermitian");
  }
  const double trace = matrix.trace().real();
  if (std::abs(trace - 1.0) > tol) {
    throw Error(ErrorCode::NotPSD, fmt::format("trace {:.15f} != 1", trace));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()[0] < -tol) {
    throw Error(ErrorCode::NotPSD, fmt::format("eigenvalue {:.3e} < 0", es.eigenvalues()[0]));
  }
}

DensityMatrix reduced_density(const StateVector& state, const std::vector<int>& region,
                              int max_region_sites) {
  if (static_cast<int>(region.size()) > max_region_sites) {
    throw Error(ErrorCode::RegionTooLarge,
                fmt::format("{} region sites exceeds limit {}", region.size(), max_region_sites));
  }
  const auto bp = Bipartition::of(sites_of(state), region);
  const Eigen::MatrixXcd m = bipartition_reshape(state, bp);
  DensityMatrix rho;
  rho.matrix = m.transpose() * m.conjugate();
  return rho;
}

Eigen::VectorXd schmidt_values(const StateVector& state, const std::vector<int>& region) {
  const auto bp = Bipartition::of(sites_of(state), region);
  const Eigen::MatrixXcd m = bipartition_reshape(state, bp);
  if (m.rows() >= m.cols()) {
    return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues();
  }
  return Eigen::BDCSVD<Eigen::MatrixXcd>(m.transpose()).singularValues();
}

double shannon_bits(const Eigen::VectorXd& probabilities) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    if (p >= kSchmidtWeightFloor) s -= p * std::log2(p);
  }
  return std::max(0.0, s);
}

double entanglement_entropy(const StateVector& state, const std::vector<int>& region) {
  const Eigen::VectorXd sv = schmidt_values(state, region);
  return shannon_bits(sv.array().square().matrix());
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dims(rho, sigma);
  const Eigen::MatrixXcd diff = rho.matrix - sigma.matrix;
  const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return std::clamp(0.5 * es.eigenvalues().cwiseAbs().sum(), 0.0, 1.0);
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dims(rho, sigma);
  if (rho.dim() > (Eigen::Index{1} << 13)) {
    throw Error(ErrorCode::RegionTooLarge, fmt::format("fidelity of dimension {}", rho.dim()));
  }
  rho.validate();
  sigma.validate();
  const Eigen::MatrixXcd a = weighted_support(rho);
  const Eigen::MatrixXcd b = weighted_support(sigma);
  if (a.cols() == 0 || b.cols() == 0) return 0.0;
  const Eigen::MatrixXcd core = b.adjoint() * a;
  const double f = Eigen::BDCSVD<Eigen::MatrixXcd>(core).singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

LocalAlignment align_on_region(const StateVector& psi, const StateVector& phi,
                               const std::vector<int>& region, int max_core_sites) {
  if (psi.size() != phi.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("states of length {} and {}", psi.size(), phi.size()));
  }
  const auto bp = Bipartition::of(sites_of(psi), region);
  const int core_sites = static_cast<int>(std::min(bp.region.size(), bp.complement.size()));
  if (core_sites > max_core_sites) {
    throw Error(ErrorCode::RegionTooLarge,
                fmt::format("alignment core of {} sites exceeds limit {}", core_sites,
                            max_core_sites));
  }
  Eigen::MatrixXcd a = bipartition_reshape(psi, bp);
  Eigen::MatrixXcd b = bipartition_reshape(phi, bp);
  if (a.cols() > a.rows()) {
    // A unitary on R only sees the row spaces, so the LQ factors carry all
    // the information.
    a = lq_left_factor(a);
    b = lq_left_factor(b);
  }
  const Eigen::MatrixXcd core = b.adjoint() * a;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXcd rotation = svd.matrixU() * svd.matrixV().adjoint();
  LocalAlignment out;
  out.fidelity = std::clamp(svd.singularValues().sum(), 0.0, 1.0);
  out.distance = std::clamp((a - b * rotation).norm() / std::sqrt(2.0), 0.0, 1.0);
  return out;
}

double cross_fidelity_pure(const StateVector& psi, const StateVector& phi,
                           const std::vector<int>& region, int max_core_sites) {
  return align_on_region(psi, phi, region, max_core_sites).fidelity;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::OutOfDomain, fmt::format("binary entropy of {}", p));
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

StateVector apply_site_operator(const StateVector& state, int site, const Eigen::Matrix2cd& op) {
  const int n = sites_of(state);
  if (site < 1 || site > n) {
    throw Error(ErrorCode::OutOfRange, fmt::format("site {} outside 1..{}", site, n));
  }
  const std::size_t mask = std::size_t{1} << (site - 1);
  StateVector out(state.size());
  for (std::size_t x = 0; x < static_cast<std::size_t>(state.size()); ++x) {
    if (x & mask) continue;
    const auto lo = static_cast<Eigen::Index>(x);
    const auto hi = static_cast<Eigen::Index>(x | mask);
    out[lo] = op(0, 0) * state[lo] + op(0, 1) * state[hi];
    out[hi] = op(1, 0) * state[lo] + op(1, 1) * state[hi];
  }
  return out;
}

Complex expectation(const StateVector& state, int site, const Eigen::Matrix2cd& op) {
  return state.dot(apply_site_operator(state, site, op));
}

}  // namespace bef
