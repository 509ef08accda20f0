#pragma once

// Reference implementations used only by tests. They share no code with the
// library: Hamiltonians come from explicit Kronecker products, reduced states
// from elementwise partial traces, fidelities from matrix square roots.

#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

Eigen::Matrix2cd pauli(char c);

/// Kronecker product a (x) b, a as the high-order factor.
Matrix kron(const Matrix& a, const Matrix& b);

/// Operator acting as ops[k] on site k + 1. Site 1 is the least significant
/// bit of the basis label.
Matrix product_operator(const std::vector<Eigen::Matrix2cd>& ops);

/// Pauli string with letters[p] on site chain[p]; all other sites identity.
Matrix pauli_on(int n, const std::vector<int>& sites, const std::string& letters);

/// chain[p] = site index sitting at chain position p. Model builders put
/// terms along `chain` only, so a shorter chain gives a sub-segment.
std::vector<int> append_chain(int n);
std::vector<int> bridge_chain(int n, int left);

Matrix tfim(int n, double j_zz, double g_x, double h_z, const std::vector<int>& chain);
Matrix xxz(int n, double anisotropy, double h_z, const std::vector<int>& chain);

struct Eigenpairs {
  Eigen::VectorXd values;
  Matrix vectors;
};
Eigenpairs diagonalize(const Matrix& h);

/// Ground energy and gap of the open chain -J sum ZZ - g sum X from the
/// singular values of its bidiagonal fermion matrix.
std::pair<double, double> free_fermion_tfim(int n, double j_zz, double g_x);

/// rho_R(i, j) = sum_c psi(i, c) conj(psi(j, c)); bit k of i is region[k].
Matrix partial_trace(const Vector& psi, const std::vector<int>& region, int n);

double trace_distance(const Matrix& rho, const Matrix& sigma);
Matrix psd_sqrt(const Matrix& rho);
double fidelity(const Matrix& rho, const Matrix& sigma);
double entropy_bits(const Matrix& rho);

std::vector<int> complement(int n, const std::vector<int>& region);

Vector random_state(int n, std::mt19937_64& rng);
Matrix random_unitary(int dim, std::mt19937_64& rng);
Matrix random_density(int dim, std::mt19937_64& rng);

/// psi with site n appended in state `fresh` (site n is the top bit).
Vector extend(const Vector& psi, int fresh);

/// |<a|b>| for unit vectors, insensitive to global phase.
double overlap(const Vector& a, const Vector& b);

}  // namespace oracle

namespace oracle {

/// Full-space matrix of `block` on `support`, support[0] the leftmost factor.
Matrix embed_term(int n, const std::vector<int>& support, const Matrix& block);

}  // namespace oracle
