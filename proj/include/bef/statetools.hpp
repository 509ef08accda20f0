#pragma once

#include <vector>

#include "bef/model.hpp"

namespace bef {

/// Split of sites 1..n into a region R and its complement. Within each side
/// the k-th listed site is bit k of the local configuration label.
struct Bipartition {
  int n = 0;
  std::vector<int> region;
  std::vector<int> complement;
  std::vector<int> permutation;  // region followed by complement

  static Bipartition of(int n, std::vector<int> region);

  std::size_t region_dim() const { return std::size_t{1} << region.size(); }
  std::size_t complement_dim() const { return std::size_t{1} << complement.size(); }
};

/// Number of sites encoded by a state vector; throws DimensionMismatch if the
/// length is not a power of two.
int sites_of(const StateVector& state);

/// M(c, i) = amplitude with complement configuration c and region
/// configuration i; shape (dim R^c) x (dim R).
Eigen::MatrixXcd bipartition_reshape(const StateVector& state, const Bipartition& bp);
StateVector bipartition_unreshape(const Eigen::MatrixXcd& matrix, const Bipartition& bp);

/// Hermitian PSD unit-trace matrix. `validate` enforces the invariants.
struct DensityMatrix {
  Eigen::MatrixXcd matrix;

  Eigen::Index dim() const { return matrix.rows(); }
  void validate(double tol = 1e-10) const;
};

/// rho_R = Tr_{R^c} |psi><psi|, i.e. rho_R(i, j) = sum_c psi(c, i) conj(psi(c, j)).
DensityMatrix reduced_density(const StateVector& state, const std::vector<int>& region,
                              int max_region_sites = 13);

/// Schmidt coefficients of the cut, descending.
Eigen::VectorXd schmidt_values(const StateVector& state, const std::vector<int>& region);

/// Von Neumann entropy in bits from the Schmidt spectrum; weights below
/// 1e-15 are dropped.
double entanglement_entropy(const StateVector& state, const std::vector<int>& region);

/// Entropy in bits of a probability vector, dropping entries below 1e-15.
double shannon_bits(const Eigen::VectorXd& probabilities);

/// (1/2) ||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// F = ||sqrt(rho) sqrt(sigma)||_1 (not squared).
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Result of optimally aligning phi onto psi with a unitary on R.
struct LocalAlignment {
  double fidelity = 0.0;  // ||Tr_{R^c} |phi><psi| ||_1 = max_U |<psi|U|phi>|
  double distance = 0.0;  // (1/sqrt 2) min_U || psi - U phi ||, equal to sqrt(1 - fidelity)
};

/// Computes both quantities from one SVD of a core matrix whose side is
/// min(2^|R|, 2^(n-|R|)). The distance is formed from the residual vector,
/// so it stays accurate when it is far below sqrt(machine epsilon).
LocalAlignment align_on_region(const StateVector& psi, const StateVector& phi,
                               const std::vector<int>& region, int max_core_sites = 13);

/// max_U |<psi| U_R |phi>| over unitaries supported on R.
double cross_fidelity_pure(const StateVector& psi, const StateVector& phi,
                           const std::vector<int>& region, int max_core_sites = 13);

/// H_2(p) in bits with 0 log 0 = 0.
double binary_entropy(double p);

/// <psi| O |psi> for a single-site operator.
Complex expectation(const StateVector& state, int site, const Eigen::Matrix2cd& op);

/// O_site |psi>.
StateVector apply_site_operator(const StateVector& state, int site, const Eigen::Matrix2cd& op);

}  // namespace bef
