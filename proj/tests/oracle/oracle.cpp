#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

Eigen::Matrix2cd pauli(char c) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd m;
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli letter");
  }
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix product_operator(const std::vector<Eigen::Matrix2cd>& ops) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& op : ops) out = kron(op, out);
  return out;
}

Matrix pauli_on(int n, const std::vector<int>& sites, const std::string& letters) {
  std::vector<Eigen::Matrix2cd> ops(n, pauli('I'));
  for (std::size_t k = 0; k < sites.size(); ++k) ops[sites[k] - 1] = pauli(letters[k]);
  return product_operator(ops);
}

std::vector<int> append_chain(int n) {
  std::vector<int> chain(n);
  for (int p = 0; p < n; ++p) chain[p] = p + 1;
  return chain;
}

std::vector<int> bridge_chain(int n, int left) {
  std::vector<int> chain;
  for (int i = 1; i <= left; ++i) chain.push_back(i);
  chain.push_back(n);
  for (int i = left + 1; i < n; ++i) chain.push_back(i);
  return chain;
}

Matrix tfim(int n, double j_zz, double g_x, double h_z, const std::vector<int>& chain) {
  const auto dim = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  const int len = static_cast<int>(chain.size());
  for (int p = 0; p + 1 < len; ++p) h -= j_zz * pauli_on(n, {chain[p], chain[p + 1]}, "ZZ");
  for (int p = 0; p < len; ++p) {
    h -= g_x * pauli_on(n, {chain[p]}, "X");
    h -= h_z * pauli_on(n, {chain[p]}, "Z");
  }
  return h;
}

Matrix xxz(int n, double anisotropy, double h_z, const std::vector<int>& chain) {
  const auto dim = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  const int len = static_cast<int>(chain.size());
  for (int p = 0; p + 1 < len; ++p) {
    const std::vector<int> bond{chain[p], chain[p + 1]};
    h += pauli_on(n, bond, "XX") + pauli_on(n, bond, "YY") + anisotropy * pauli_on(n, bond, "ZZ");
  }
  for (int p = 0; p < len; ++p) h -= h_z * pauli_on(n, {chain[p]}, "Z");
  return h;
}

Eigenpairs diagonalize(const Matrix& h) {
  Eigenpairs out;
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  return out;
}

std::pair<double, double> free_fermion_tfim(int n, double j_zz, double g_x) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = g_x;
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = j_zz;
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  return {-s.sum(), 2.0 * s.minCoeff()};
}

namespace {

std::size_t compose(std::size_t region_bits, std::size_t comp_bits, const std::vector<int>& region,
                    const std::vector<int>& comp) {
  std::size_t x = 0;
  for (std::size_t k = 0; k < region.size(); ++k) {
    if ((region_bits >> k) & 1U) x |= std::size_t{1} << (region[k] - 1);
  }
  for (std::size_t k = 0; k < comp.size(); ++k) {
    if ((comp_bits >> k) & 1U) x |= std::size_t{1} << (comp[k] - 1);
  }
  return x;
}

}  // namespace

std::vector<int> complement(int n, const std::vector<int>& region) {
  std::vector<int> out;
  for (int s = 1; s <= n; ++s) {
    if (std::find(region.begin(), region.end(), s) == region.end()) out.push_back(s);
  }
  return out;
}

Matrix partial_trace(const Vector& psi, const std::vector<int>& region, int n) {
  const auto comp = complement(n, region);
  const std::size_t dr = std::size_t{1} << region.size();
  const std::size_t dc = std::size_t{1} << comp.size();
  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(dr), static_cast<Eigen::Index>(dr));
  for (std::size_t i = 0; i < dr; ++i) {
    for (std::size_t j = 0; j < dr; ++j) {
      Complex sum = 0.0;
      for (std::size_t c = 0; c < dc; ++c) {
        sum += psi(compose(i, c, region, comp)) * std::conj(psi(compose(j, c, region, comp)));
      }
      rho(i, j) = sum;
    }
  }
  return rho;
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho - sigma, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Matrix psd_sqrt(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

// sqrt(rho) as V diag(sqrt(lambda)) over eigenvalues above 1e-14; the
// discarded directions are round-off on rank-deficient reduced states.
Matrix sqrt_factor(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) > 1e-14) keep.push_back(k);
  }
  Matrix out(rho.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) =
        std::sqrt(es.eigenvalues()(keep[j])) * es.eigenvectors().col(keep[j]);
  }
  return out;
}

}  // namespace

double fidelity(const Matrix& rho, const Matrix& sigma) {
  const Matrix core = sqrt_factor(rho).adjoint() * sqrt_factor(sigma);
  if (core.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(core).singularValues().sum();
}

double entropy_bits(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double p : es.eigenvalues()) {
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

Vector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(Eigen::Index{1} << n);
  for (auto& x : v) x = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

Matrix random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
  return q;
}

Matrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = Complex(normal(rng), normal(rng));
  const Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Vector extend(const Vector& psi, int fresh) {
  Vector out = Vector::Zero(2 * psi.size());
  out.segment(fresh == 0 ? 0 : psi.size(), psi.size()) = psi;
  return out;
}

double overlap(const Vector& a, const Vector& b) { return std::abs(a.dot(b)); }

}  // namespace oracle

namespace oracle {

Matrix embed_term(int n, const std::vector<int>& support, const Matrix& block) {
  const std::size_t dim = std::size_t{1} << n;
  const int k = static_cast<int>(support.size());
  std::size_t mask = 0;
  for (int s : support) mask |= std::size_t{1} << (s - 1);
  auto local = [&](std::size_t x) {
    Eigen::Index a = 0;
    for (int j = 0; j < k; ++j) a = (a << 1) | static_cast<Eigen::Index>((x >> (support[j] - 1)) & 1U);
    return a;
  };
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    for (std::size_t y = 0; y < dim; ++y) {
      if ((x & ~mask) != (y & ~mask)) continue;
      out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = block(local(x), local(y));
    }
  }
  return out;
}

}  // namespace oracle
