#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bef {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

/// Canonical model families. Sign conventions (open chain, positions p):
///   TransverseFieldIsing: H = -J_zz sum Z_p Z_{p+1} - g_x sum X_p - h_z sum Z_p
///   XXZ:                  H = sum [J_xy (X_p X_{p+1} + Y_p Y_{p+1}) + anisotropy Z_p Z_{p+1}] - h_z sum Z_p
///   HeisenbergField:      H = J sum (X X + Y Y + Z Z) - h_x sum X_p - h_z sum Z_p
///   Custom:               user-supplied term templates, see TermTemplate.
enum class Family { TransverseFieldIsing, XXZ, HeisenbergField, Custom };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// Where a custom template is stamped along an open chain segment.
enum class Placement { Bulk, LeftEdge, RightEdge };

std::string to_string(Placement placement);
Placement placement_from_string(const std::string& name);

/// A term pattern in position space. `offsets` are relative chain positions
/// (ascending, first entry 0); `block` acts on them in that order, with the
/// first offset as the leftmost Kronecker factor.
struct TermTemplate {
  std::vector<int> offsets;
  Eigen::MatrixXcd block;
  Placement placement = Placement::Bulk;
};

struct ModelSpec {
  std::string id;
  Family family = Family::TransverseFieldIsing;
  std::map<std::string, double> couplings;
  int local_dim = 2;
  // Every term must fit inside some ball B_s^{k0}, i.e. span at most
  // 2 (k0 - 1) positions.
  int interaction_range = 2;
  std::vector<TermTemplate> custom_terms;

  double coupling(const std::string& name, double fallback) const;
};

/// Tfim / XXZ conveniences used throughout tests and configs.
ModelSpec tfim(double j_zz, double g_x, double h_z = 0.0);
ModelSpec xxz(double anisotropy, double h_z = 0.0, double j_xy = 1.0);
ModelSpec heisenberg_field(double j, double h_x, double h_z);

enum class OrderingMode { Append, Bridge };

std::string to_string(OrderingMode mode);
OrderingMode ordering_mode_from_string(const std::string& name);

/// Maps site indices (1-based, order of addition) to chain positions.
/// Append: index i sits at position i-1.
/// Bridge{L}: indices 1..L form the left segment, L+1..n-1 the right
/// segment, and index n is the joining site at position L.
struct SiteOrdering {
  OrderingMode mode = OrderingMode::Append;
  int bridge_left = 0;

  static SiteOrdering append() { return {}; }
  static SiteOrdering bridge(int left) { return {OrderingMode::Bridge, left}; }

  bool operator==(const SiteOrdering&) const = default;
};

std::string describe(const SiteOrdering& ordering);

/// Chain position (0-based) of site `index` in an n-site system.
int position_of(int n, int index, const SiteOrdering& ordering);
/// Inverse of position_of.
int index_at(int n, int position, const SiteOrdering& ordering);

/// Support holds 1-based site indices; bit (index - 1) of a basis label is
/// that site's state, with 0 = spin up (Z = +1).
struct LocalTerm {
  std::vector<int> support;
  Eigen::MatrixXcd block;
};

bool operator==(const LocalTerm& a, const LocalTerm& b);

class HamiltonianOperator {
 public:
  HamiltonianOperator(int n, std::vector<LocalTerm> terms, SiteOrdering ordering);

  int sites() const { return n_; }
  std::size_t dimension() const { return std::size_t{1} << n_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  const SiteOrdering& ordering() const { return ordering_; }

  /// max over anchor sites s of ||h_s||_inf, where h_s collects the terms
  /// whose leftmost position is s (the bound called J).
  double local_norm_bound() const;

 private:
  int n_;
  std::vector<LocalTerm> terms_;
  SiteOrdering ordering_;
};

/// Full n-site chain under the given ordering.
HamiltonianOperator build_hamiltonian(const ModelSpec& spec, int n, const SiteOrdering& ordering);

/// The (n-1)-site system from which site n is added: the Append chain of
/// n-1 sites, or, for Bridge, the two decoupled outer segments.
HamiltonianOperator predecessor_hamiltonian(const ModelSpec& spec, int n, const SiteOrdering& ordering);

/// K_n = H^(n) - H^(n-1) as a list of local terms (replaced boundary terms
/// appear with negated blocks).
std::vector<LocalTerm> increment_terms(const ModelSpec& spec, int n, const SiteOrdering& ordering);

/// B_center^k = {s : |pos(s) - pos(center)| < k}, returned as sorted indices.
std::vector<int> graph_ball(int n, int center, int k, const SiteOrdering& ordering);

/// Validates a ModelSpec (template shapes, Hermiticity, interaction range).
void validate(const ModelSpec& spec);

namespace pauli {
Eigen::Matrix2cd identity();
Eigen::Matrix2cd x();
Eigen::Matrix2cd y();
Eigen::Matrix2cd z();
Eigen::Matrix2cd from_char(char c);
/// Kronecker product of single-site Paulis, first character leftmost.
Eigen::MatrixXcd string(const std::string& letters);
}  // namespace pauli

}  // namespace bef
