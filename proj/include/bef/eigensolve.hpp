#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bef/model.hpp"

namespace bef {

/// Term-by-term H v using bit-indexed local updates; the 2^n x 2^n matrix is
/// never formed. Output entries are accumulated in a fixed order, so the
/// result does not depend on `threads`.
StateVector apply_hamiltonian(const HamiltonianOperator& h, const StateVector& v, int threads = 1);

struct LanczosOptions {
  double tol = 1e-11;          // residual ||H v - E v|| per converged level
  int max_iter = 4000;         // matrix-vector products per level
  std::uint64_t seed = 20140101;
  double degeneracy_tol = 1e-8;  // relative: gap < tol * max(1, |E0|)
  int krylov_dim = 120;        // basis size before a restart
  int levels = 3;              // E0, E1, E2 by successive deflation
  int max_sites = 20;
  std::size_t memory_budget = std::size_t{2} << 30;  // bytes
  int threads = 1;
  bool throw_on_degenerate = false;
};

struct GroundSolution {
  double energy = 0.0;
  double gap = 0.0;                  // E1 - E0
  std::optional<double> gap2;        // E2 - E0 when a third level exists
  StateVector state;
  double residual = 0.0;
  bool degenerate = false;
  std::vector<double> energies;      // converged levels, ascending
  int iterations = 0;                // total matrix-vector products
  std::vector<double> ritz_history;  // lowest Ritz value after every step of level 0
};

/// Number of state vectors the solver keeps alive for an n-site problem.
std::size_t lanczos_memory_bytes(int n, const LanczosOptions& options);

/// Restarted Lanczos with full reorthogonalization. Excited levels are found
/// by deflating the converged lower eigenvectors.
GroundSolution ground_lanczos(const HamiltonianOperator& h, const LanczosOptions& options = {});

/// Throws DegenerateGround if the solution is flagged.
const GroundSolution& require_unique(const GroundSolution& solution);

/// Dense matrix of H, assembled column by column (n <= 12).
Eigen::MatrixXcd dense_matrix(const HamiltonianOperator& h);

/// k lowest eigenpairs of the dense matrix, ascending (n <= 12).
std::vector<std::pair<double, StateVector>> spectrum_dense(const HamiltonianOperator& h, int k);

}  // namespace bef
