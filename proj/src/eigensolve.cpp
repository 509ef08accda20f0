#include "bef/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <type_traits>

#include <fmt/format.h>

#include "bef/error.hpp"

namespace bef {

namespace {

// Precompiled form of a HamiltonianOperator: per term, the full-index bit
// pattern of every local configuration and the nonzero entries of each row.
template <typename Scalar>
class SparseProgram {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit SparseProgram(const HamiltonianOperator& h) : dim_(h.dimension()) {
    for (const auto& term : h.terms()) {
      Compiled c;
      const int k = static_cast<int>(term.support.size());
      c.bits.resize(k);
      for (int j = 0; j < k; ++j) c.bits[j] = term.support[j] - 1;
      const int local_dim = 1 << k;
      c.scatter.resize(local_dim);
      for (int b = 0; b < local_dim; ++b) {
        std::size_t pattern = 0;
        for (int j = 0; j < k; ++j) {
          if ((b >> (k - 1 - j)) & 1) pattern |= std::size_t{1} << c.bits[j];
        }
        c.scatter[b] = pattern;
      }
      c.mask = c.scatter[local_dim - 1];
      c.row_start.push_back(0);
      for (int a = 0; a < local_dim; ++a) {
        for (int b = 0; b < local_dim; ++b) {
          const Complex value = term.block(a, b);
          if (value == Complex(0.0, 0.0)) continue;
          if constexpr (std::is_same_v<Scalar, double>) {
            c.entries.push_back({b, value.real()});
          } else {
            c.entries.push_back({b, value});
          }
        }
        c.row_start.push_back(static_cast<int>(c.entries.size()));
      }
      terms_.push_back(std::move(c));
    }
  }

  void apply(const Scalar* in, Scalar* out, int threads) const {
    const auto dim = static_cast<std::int64_t>(dim_);
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && dim >= 4096)
    for (std::int64_t xi = 0; xi < dim; ++xi) {
      const auto x = static_cast<std::size_t>(xi);
      Scalar acc(0.0);
      for (const auto& c : terms_) {
        int a = 0;
        for (int bit : c.bits) a = (a << 1) | static_cast<int>((x >> bit) & 1u);
        const std::size_t rest = x & ~c.mask;
        for (int e = c.row_start[a]; e < c.row_start[a + 1]; ++e) {
          acc += c.entries[e].value * in[rest | c.scatter[c.entries[e].col]];
        }
      }
      out[x] = acc;
    }
  }

  Vector apply(const Vector& v, int threads) const {
    Vector out(v.size());
    apply(v.data(), out.data(), threads);
    return out;
  }

 private:
  struct Entry {
    int col;
    Scalar value;
  };
  struct Compiled {
    std::vector<int> bits;
    std::vector<std::size_t> scatter;
    std::size_t mask = 0;
    std::vector<int> row_start;
    std::vector<Entry> entries;
  };
  std::size_t dim_;
  std::vector<Compiled> terms_;
};

bool is_real(const HamiltonianOperator& h) {
  return std::all_of(h.terms().begin(), h.terms().end(), [](const LocalTerm& t) {
    return t.block.imag().cwiseAbs().maxCoeff() == 0.0;
  });
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> random_state(std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v[i] = uniform(rng);
    } else {
      const double re = uniform(rng);
      const double im = uniform(rng);
      v[i] = Complex(re, im);
    }
  }
  return v;
}

template <typename Vector>
void project_out(Vector& v, const std::vector<Vector>& found) {
  for (const auto& f : found) v -= f * f.dot(v);
}

// Rotates the global phase so the first largest-magnitude amplitude is real
// and positive.
void fix_phase(StateVector& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v[best]) / best_abs;
}

int effective_krylov(int n, const LanczosOptions& options) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t vec_bytes = dim * sizeof(Complex);
  const std::size_t fixed = static_cast<std::size_t>(options.levels + 4);
  const std::size_t affordable = options.memory_budget / vec_bytes;
  const std::size_t wanted = std::min<std::size_t>(static_cast<std::size_t>(options.krylov_dim), dim);
  if (affordable <= fixed) return 0;
  return static_cast<int>(std::min(wanted, affordable - fixed));
}

template <typename Scalar>
struct LevelResult {
  double energy;
  double residual;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
};

template <typename Scalar>
LevelResult<Scalar> solve_level(const SparseProgram<Scalar>& program, std::size_t dim, int krylov,
                                const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& found,
                                const LanczosOptions& options, int level, int& matvecs,
                                std::vector<double>* history) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::mt19937_64 rng(options.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(level));
  const auto available = static_cast<int>(dim - found.size());
  const int m = std::min(krylov, available);

  auto fresh_start = [&]() {
    Vector v = random_state<Scalar>(dim, rng);
    project_out(v, found);
    project_out(v, found);
    return Vector(v / v.norm());
  };

  Vector v = fresh_start();
  Matrix basis(static_cast<Eigen::Index>(dim), m);
  std::vector<double> alphas, betas;
  int level_matvecs = 0;

  while (true) {
    basis.col(0) = v;
    alphas.clear();
    betas.clear();
    Eigen::VectorXd ritz_vec;
    double ritz = 0.0;
    bool breakdown = false;
    int steps = 0;
    for (int j = 0; j < m; ++j) {
      Vector w = program.apply(Vector(basis.col(j)), options.threads);
      ++level_matvecs;
      const double alpha = std::real(basis.col(j).dot(w));
      w -= alpha * basis.col(j);
      if (j > 0) w -= betas[j - 1] * basis.col(j - 1);
      // Classical Gram-Schmidt, repeated when the first pass cancels heavily.
      for (int pass = 0; pass < 2; ++pass) {
        const double before = w.norm();
        const Vector overlap = basis.leftCols(j + 1).adjoint() * w;
        w -= basis.leftCols(j + 1) * overlap;
        project_out(w, found);
        if (w.norm() > 0.7071 * before) break;
      }
      const double beta = w.norm();
      alphas.push_back(alpha);
      steps = j + 1;

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      const Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alphas.data(), steps);
      const Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(betas.data(), steps - 1);
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      ritz = tri.eigenvalues()[0];
      ritz_vec = tri.eigenvectors().col(0);
      if (history) history->push_back(ritz);

      const double estimate = beta * std::abs(ritz_vec[steps - 1]);
      if (beta <= 1e-13 * std::max(1.0, std::abs(ritz))) {
        breakdown = true;
        break;
      }
      if (estimate < 0.25 * options.tol || steps == m || level_matvecs >= options.max_iter) break;
      betas.push_back(beta);
      basis.col(j + 1) = w / beta;
    }

    Vector y = basis.leftCols(steps) * ritz_vec.cast<Scalar>();
    project_out(y, found);
    y /= y.norm();
    const Vector hy = program.apply(y, options.threads);
    ++level_matvecs;
    const double energy = std::real(y.dot(hy));
    const double residual = (hy - energy * y).norm();
    if (residual <= options.tol) {
      matvecs += level_matvecs;
      return {energy, residual, std::move(y)};
    }
    if (level_matvecs >= options.max_iter) {
      throw Error(ErrorCode::NoConvergence,
                  fmt::format("level {} residual {:.3e} after {} products (tol {:.1e})", level,
                              residual, level_matvecs, options.tol));
    }
    // An invariant subspace that still leaves a large residual means the start
    // vector lost weight to rounding; begin again from a fresh draw.
    v = breakdown ? fresh_start() : y;
  }
}

template <typename Scalar>
GroundSolution run_lanczos(const HamiltonianOperator& h, int krylov, const LanczosOptions& options) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const std::size_t dim = h.dimension();
  const int levels = static_cast<int>(std::min<std::size_t>(std::max(options.levels, 2), dim));
  const SparseProgram<Scalar> program(h);

  GroundSolution out;
  std::vector<Vector> found;
  for (int level = 0; level < levels; ++level) {
    auto result = solve_level(program, dim, krylov, found, options, level, out.iterations,
                              level == 0 ? &out.ritz_history : nullptr);
    if (level == 0) out.residual = result.residual;
    out.energies.push_back(result.energy);
    found.push_back(std::move(result.vector));
  }
  // Deflated levels converge independently; sort in case a lower state was
  // found late.
  std::vector<int> order(levels);
  for (int i = 0; i < levels; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return out.energies[a] < out.energies[b]; });
  if (order[0] != 0) {
    const Vector hy = program.apply(found[order[0]], options.threads);
    out.residual = (hy - out.energies[order[0]] * found[order[0]]).norm();
  }
  std::vector<double> sorted;
  for (int i : order) sorted.push_back(out.energies[i]);
  out.energies = sorted;
  out.state = found[order[0]].template cast<Complex>();
  return out;
}

}  // namespace

StateVector apply_hamiltonian(const HamiltonianOperator& h, const StateVector& v, int threads) {
  if (static_cast<std::size_t>(v.size()) != h.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("state has {} amplitudes, operator acts on {}", v.size(), h.dimension()));
  }
  return SparseProgram<Complex>(h).apply(v, threads);
}

std::size_t lanczos_memory_bytes(int n, const LanczosOptions& options) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t krylov = std::min<std::size_t>(static_cast<std::size_t>(options.krylov_dim), dim);
  return dim * sizeof(Complex) * (krylov + static_cast<std::size_t>(options.levels) + 4);
}

GroundSolution ground_lanczos(const HamiltonianOperator& h, const LanczosOptions& options) {
  const int n = h.sites();
  if (n > options.max_sites) {
    throw Error(ErrorCode::TooLarge,
                fmt::format("{} sites exceeds solver limit {}", n, options.max_sites));
  }
  const int krylov = effective_krylov(n, options);
  if (krylov < std::min<int>(20, static_cast<int>(h.dimension()))) {
    throw Error(ErrorCode::BudgetExceeded,
                fmt::format("{} sites needs more than the {} byte solver budget", n,
                            options.memory_budget));
  }
  GroundSolution out = is_real(h) ? run_lanczos<double>(h, krylov, options)
                                   : run_lanczos<Complex>(h, krylov, options);
  fix_phase(out.state);
  out.energy = out.energies[0];
  out.gap = std::max(0.0, out.energies[1] - out.energies[0]);
  if (out.energies.size() > 2) out.gap2 = std::max(0.0, out.energies[2] - out.energies[0]);
  out.degenerate = out.gap < options.degeneracy_tol * std::max(1.0, std::abs(out.energy));
  if (out.degenerate && options.throw_on_degenerate) require_unique(out);
  return out;
}

const GroundSolution& require_unique(const GroundSolution& solution) {
  if (solution.degenerate) {
    throw Error(ErrorCode::DegenerateGround,
                fmt::format("gap {:.3e} above E0 = {:.12f}", solution.gap, solution.energy));
  }
  return solution;
}

Eigen::MatrixXcd dense_matrix(const HamiltonianOperator& h) {
  if (h.sites() > 12) {
    throw Error(ErrorCode::TooLarge, fmt::format("dense matrix for {} sites", h.sites()));
  }
  const SparseProgram<Complex> program(h);
  const auto dim = static_cast<Eigen::Index>(h.dimension());
  Eigen::MatrixXcd m(dim, dim);
  StateVector e = StateVector::Zero(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    e[j] = 1.0;
    m.col(j) = program.apply(e, 1);
    e[j] = 0.0;
  }
  return m;
}

std::vector<std::pair<double, StateVector>> spectrum_dense(const HamiltonianOperator& h, int k) {
  const Eigen::MatrixXcd m = dense_matrix(h);
  const auto count = std::min<Eigen::Index>(k, m.rows());
  std::vector<std::pair<double, StateVector>> out;
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real());
    for (Eigen::Index i = 0; i < count; ++i) {
      out.emplace_back(es.eigenvalues()[i], es.eigenvectors().col(i).cast<Complex>());
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    for (Eigen::Index i = 0; i < count; ++i) {
      out.emplace_back(es.eigenvalues()[i], es.eigenvectors().col(i));
    }
  }
  return out;
}

}  // namespace bef
