#include "bef/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "bef/error.hpp"

namespace bef {

namespace {

using Chain = std::vector<int>;

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Embeds `block` acting on `support` into the space of `sites` (both lists of
// site indices; the first site of each list is the leftmost factor).
Eigen::MatrixXcd embed(const Eigen::MatrixXcd& block, const std::vector<int>& support,
                       const std::vector<int>& sites) {
  const int k = static_cast<int>(sites.size());
  const int ks = static_cast<int>(support.size());
  std::vector<int> slot(ks);
  for (int j = 0; j < ks; ++j) {
    slot[j] = static_cast<int>(std::find(sites.begin(), sites.end(), support[j]) - sites.begin());
  }
  const int dim = 1 << k;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  auto local = [&](int label) {
    int a = 0;
    for (int j = 0; j < ks; ++j) {
      a = (a << 1) | ((label >> (k - 1 - slot[j])) & 1);
    }
    return a;
  };
  int support_mask = 0;
  for (int j = 0; j < ks; ++j) support_mask |= 1 << (k - 1 - slot[j]);
  for (int row = 0; row < dim; ++row) {
    for (int col = 0; col < dim; ++col) {
      if ((row & ~support_mask) != (col & ~support_mask)) continue;
      out(row, col) = block(local(row), local(col));
    }
  }
  return out;
}

void add_term(std::vector<LocalTerm>& out, std::vector<int> support, Eigen::MatrixXcd block) {
  if (block.cwiseAbs().maxCoeff() == 0.0) return;
  out.push_back({std::move(support), std::move(block)});
}

void family_terms(const ModelSpec& spec, const Chain& chain, std::vector<LocalTerm>& out) {
  const int len = static_cast<int>(chain.size());
  switch (spec.family) {
    case Family::TransverseFieldIsing: {
      const double j_zz = spec.coupling("J_zz", 1.0);
      const double g_x = spec.coupling("g_x", 1.0);
      const double h_z = spec.coupling("h_z", 0.0);
      for (int p = 0; p + 1 < len; ++p) {
        add_term(out, {chain[p], chain[p + 1]}, -j_zz * pauli::string("ZZ"));
      }
      for (int p = 0; p < len; ++p) {
        Eigen::MatrixXcd field = -g_x * pauli::x() - h_z * pauli::z();
        add_term(out, {chain[p]}, field);
      }
      break;
    }
    case Family::XXZ: {
      const double j_xy = spec.coupling("J_xy", 1.0);
      const double delta = spec.coupling("anisotropy", 1.0);
      const double h_z = spec.coupling("h_z", 0.0);
      const Eigen::MatrixXcd bond =
          j_xy * (pauli::string("XX") + pauli::string("YY")) + delta * pauli::string("ZZ");
      for (int p = 0; p + 1 < len; ++p) add_term(out, {chain[p], chain[p + 1]}, bond);
      for (int p = 0; p < len; ++p) add_term(out, {chain[p]}, -h_z * pauli::z());
      break;
    }
    case Family::HeisenbergField: {
      const double j = spec.coupling("J", 1.0);
      const double h_x = spec.coupling("h_x", 0.0);
      const double h_z = spec.coupling("h_z", 0.0);
      const Eigen::MatrixXcd bond =
          j * (pauli::string("XX") + pauli::string("YY") + pauli::string("ZZ"));
      for (int p = 0; p + 1 < len; ++p) add_term(out, {chain[p], chain[p + 1]}, bond);
      for (int p = 0; p < len; ++p) {
        Eigen::MatrixXcd field = -h_x * pauli::x() - h_z * pauli::z();
        add_term(out, {chain[p]}, field);
      }
      break;
    }
    case Family::Custom: {
      for (const auto& tmpl : spec.custom_terms) {
        const int span = tmpl.offsets.back();
        std::vector<int> starts;
        switch (tmpl.placement) {
          case Placement::Bulk:
            for (int p = 0; p + span < len; ++p) starts.push_back(p);
            break;
          case Placement::LeftEdge:
            if (span < len) starts.push_back(0);
            break;
          case Placement::RightEdge:
            if (span < len) starts.push_back(len - 1 - span);
            break;
        }
        for (int p : starts) {
          std::vector<int> support;
          for (int off : tmpl.offsets) support.push_back(chain[p + off]);
          add_term(out, std::move(support), tmpl.block);
        }
      }
      break;
    }
  }
}

std::vector<Chain> full_layout(int n, const SiteOrdering& ordering) {
  Chain chain;
  for (int pos = 0; pos < n; ++pos) chain.push_back(index_at(n, pos, ordering));
  return {chain};
}

std::vector<Chain> predecessor_layout(int n, const SiteOrdering& ordering) {
  if (ordering.mode == OrderingMode::Append) {
    Chain chain;
    for (int i = 1; i < n; ++i) chain.push_back(i);
    return {chain};
  }
  Chain left, right;
  for (int i = 1; i <= ordering.bridge_left; ++i) left.push_back(i);
  for (int i = ordering.bridge_left + 1; i < n; ++i) right.push_back(i);
  return {left, right};
}

void check_size(int n, const SiteOrdering& ordering) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, fmt::format("site count {} < 1", n));
  if (ordering.mode == OrderingMode::Bridge) {
    if (ordering.bridge_left < 1 || n < ordering.bridge_left + 2) {
      throw Error(ErrorCode::BridgeTooSmall,
                  fmt::format("bridge with left segment {} needs n >= {}, got {}",
                              ordering.bridge_left, ordering.bridge_left + 2, n));
    }
  }
}

HamiltonianOperator assemble(const ModelSpec& spec, int n, const std::vector<Chain>& layout,
                             const SiteOrdering& ordering) {
  validate(spec);
  std::vector<LocalTerm> terms;
  for (const auto& chain : layout) family_terms(spec, chain, terms);
  return HamiltonianOperator(n, std::move(terms), ordering);
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::TransverseFieldIsing: return "tfim";
    case Family::XXZ: return "xxz";
    case Family::HeisenbergField: return "heisenberg_field";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "tfim" || name == "TransverseFieldIsing") return Family::TransverseFieldIsing;
  if (name == "xxz" || name == "XXZ") return Family::XXZ;
  if (name == "heisenberg_field" || name == "HeisenbergField") return Family::HeisenbergField;
  if (name == "custom" || name == "Custom") return Family::Custom;
  throw Error(ErrorCode::UnsupportedFamily, fmt::format("unknown model family '{}'", name));
}

std::string to_string(Placement placement) {
  switch (placement) {
    case Placement::Bulk: return "bulk";
    case Placement::LeftEdge: return "left_edge";
    case Placement::RightEdge: return "right_edge";
  }
  return "unknown";
}

Placement placement_from_string(const std::string& name) {
  if (name == "bulk") return Placement::Bulk;
  if (name == "left_edge") return Placement::LeftEdge;
  if (name == "right_edge") return Placement::RightEdge;
  throw Error(ErrorCode::InvalidTerm, fmt::format("unknown placement '{}'", name));
}

std::string to_string(OrderingMode mode) {
  return mode == OrderingMode::Append ? "append" : "bridge";
}

OrderingMode ordering_mode_from_string(const std::string& name) {
  if (name == "append") return OrderingMode::Append;
  if (name == "bridge") return OrderingMode::Bridge;
  throw Error(ErrorCode::OutOfRange, fmt::format("unknown ordering '{}'", name));
}

std::string describe(const SiteOrdering& ordering) {
  if (ordering.mode == OrderingMode::Append) return "append";
  return fmt::format("bridge{}", ordering.bridge_left);
}

double ModelSpec::coupling(const std::string& name, double fallback) const {
  auto it = couplings.find(name);
  return it == couplings.end() ? fallback : it->second;
}

ModelSpec tfim(double j_zz, double g_x, double h_z) {
  ModelSpec spec;
  spec.id = fmt::format("tfim_J{}_g{}", j_zz, g_x);
  if (h_z != 0.0) spec.id += fmt::format("_hz{}", h_z);
  spec.family = Family::TransverseFieldIsing;
  spec.couplings = {{"J_zz", j_zz}, {"g_x", g_x}, {"h_z", h_z}};
  return spec;
}

ModelSpec xxz(double anisotropy, double h_z, double j_xy) {
  ModelSpec spec;
  spec.id = fmt::format("xxz_D{}_hz{}", anisotropy, h_z);
  spec.family = Family::XXZ;
  spec.couplings = {{"J_xy", j_xy}, {"anisotropy", anisotropy}, {"h_z", h_z}};
  return spec;
}

ModelSpec heisenberg_field(double j, double h_x, double h_z) {
  ModelSpec spec;
  spec.id = fmt::format("heis_J{}_hx{}_hz{}", j, h_x, h_z);
  spec.family = Family::HeisenbergField;
  spec.couplings = {{"J", j}, {"h_x", h_x}, {"h_z", h_z}};
  return spec;
}

int position_of(int n, int index, const SiteOrdering& ordering) {
  if (index < 1 || index > n) {
    throw Error(ErrorCode::OutOfRange, fmt::format("site {} outside 1..{}", index, n));
  }
  if (ordering.mode == OrderingMode::Append) return index - 1;
  const int left = ordering.bridge_left;
  if (index <= left) return index - 1;
  if (index == n) return left;
  return index;
}

int index_at(int n, int position, const SiteOrdering& ordering) {
  if (position < 0 || position >= n) {
    throw Error(ErrorCode::OutOfRange, fmt::format("position {} outside 0..{}", position, n - 1));
  }
  if (ordering.mode == OrderingMode::Append) return position + 1;
  const int left = ordering.bridge_left;
  if (position < left) return position + 1;
  if (position == left) return n;
  return position;
}

bool operator==(const LocalTerm& a, const LocalTerm& b) {
  return a.support == b.support && a.block.rows() == b.block.rows() &&
         a.block.cols() == b.block.cols() && a.block == b.block;
}

HamiltonianOperator::HamiltonianOperator(int n, std::vector<LocalTerm> terms, SiteOrdering ordering)
    : n_(n), terms_(std::move(terms)), ordering_(ordering) {
  if (n < 1 || n > 30) throw Error(ErrorCode::OutOfRange, fmt::format("site count {}", n));
  for (const auto& term : terms_) {
    const auto k = term.support.size();
    if (k == 0 || term.block.rows() != (Eigen::Index{1} << k) || !is_hermitian(term.block, 1e-12)) {
      throw Error(ErrorCode::InvalidTerm, "term block must be Hermitian of dimension 2^|support|");
    }
    std::set<int> unique(term.support.begin(), term.support.end());
    if (unique.size() != k || *unique.begin() < 1 || *unique.rbegin() > n) {
      throw Error(ErrorCode::InvalidTerm, "term support must be distinct sites within 1..n");
    }
  }
}

double HamiltonianOperator::local_norm_bound() const {
  // Anchor each term at its smallest member index; for the layouts used here
  // this groups a bond with the field on its left site.
  std::map<int, std::vector<const LocalTerm*>> groups;
  for (const auto& term : terms_) {
    groups[*std::min_element(term.support.begin(), term.support.end())].push_back(&term);
  }
  double bound = 0.0;
  for (const auto& [anchor, members] : groups) {
    std::set<int> sites;
    for (const auto* t : members) sites.insert(t->support.begin(), t->support.end());
    std::vector<int> union_sites(sites.begin(), sites.end());
    const int dim = 1 << union_sites.size();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto* t : members) h += embed(t->block, t->support, union_sites);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    bound = std::max(bound, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return bound;
}

void validate(const ModelSpec& spec) {
  if (spec.local_dim != 2) {
    throw Error(ErrorCode::UnsupportedFamily,
                fmt::format("local dimension {} unsupported (qubits only)", spec.local_dim));
  }
  if (spec.interaction_range < 1) {
    throw Error(ErrorCode::InvalidTerm, "interaction range must be positive");
  }
  const int max_span = 2 * (spec.interaction_range - 1);
  if (spec.family != Family::Custom) {
    if (max_span < 1) {
      throw Error(ErrorCode::InvalidTerm,
                  fmt::format("{} has nearest-neighbour bonds; interaction range must be >= 2",
                              to_string(spec.family)));
    }
    return;
  }
  for (const auto& tmpl : spec.custom_terms) {
    if (tmpl.offsets.empty() || tmpl.offsets.front() != 0 ||
        !std::is_sorted(tmpl.offsets.begin(), tmpl.offsets.end()) ||
        std::adjacent_find(tmpl.offsets.begin(), tmpl.offsets.end()) != tmpl.offsets.end()) {
      throw Error(ErrorCode::InvalidTerm, "template offsets must be strictly ascending from 0");
    }
    const auto dim = Eigen::Index{1} << tmpl.offsets.size();
    if (tmpl.block.rows() != dim || tmpl.block.cols() != dim) {
      throw Error(ErrorCode::InvalidTerm,
                  fmt::format("template block must be {}x{}", dim, dim));
    }
    if (!is_hermitian(tmpl.block, 1e-12)) {
      throw Error(ErrorCode::InvalidTerm, "template block is not Hermitian");
    }
    if (tmpl.offsets.back() > max_span) {
      throw Error(ErrorCode::InvalidTerm,
                  fmt::format("template spans {} positions, beyond interaction range {}",
                              tmpl.offsets.back(), spec.interaction_range));
    }
  }
}

HamiltonianOperator build_hamiltonian(const ModelSpec& spec, int n, const SiteOrdering& ordering) {
  check_size(n, ordering);
  return assemble(spec, n, full_layout(n, ordering), ordering);
}

HamiltonianOperator predecessor_hamiltonian(const ModelSpec& spec, int n,
                                            const SiteOrdering& ordering) {
  if (n < 2) throw Error(ErrorCode::OutOfRange, "predecessor needs n >= 2");
  check_size(n, ordering);
  return assemble(spec, n - 1, predecessor_layout(n, ordering), ordering);
}

std::vector<LocalTerm> increment_terms(const ModelSpec& spec, int n, const SiteOrdering& ordering) {
  const auto full = build_hamiltonian(spec, n, ordering);
  const auto previous = predecessor_hamiltonian(spec, n, ordering);
  std::vector<bool> matched(previous.terms().size(), false);
  std::vector<LocalTerm> out;
  for (const auto& term : full.terms()) {
    bool found = false;
    for (std::size_t j = 0; j < previous.terms().size(); ++j) {
      if (!matched[j] && previous.terms()[j] == term) {
        matched[j] = true;
        found = true;
        break;
      }
    }
    if (!found) out.push_back(term);
  }
  for (std::size_t j = 0; j < previous.terms().size(); ++j) {
    if (!matched[j]) out.push_back({previous.terms()[j].support, -previous.terms()[j].block});
  }
  return out;
}

std::vector<int> graph_ball(int n, int center, int k, const SiteOrdering& ordering) {
  if (k < 1) throw Error(ErrorCode::OutOfRange, fmt::format("ball radius {} < 1", k));
  check_size(n, ordering);
  const int c = position_of(n, center, ordering);
  std::vector<int> out;
  for (int pos = std::max(0, c - k + 1); pos <= std::min(n - 1, c + k - 1); ++pos) {
    out.push_back(index_at(n, pos, ordering));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace pauli {

Eigen::Matrix2cd identity() { return Eigen::Matrix2cd::Identity(); }

Eigen::Matrix2cd x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd y() {
  Eigen::Matrix2cd m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Eigen::Matrix2cd z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd from_char(char c) {
  switch (c) {
    case 'I': return identity();
    case 'X': return x();
    case 'Y': return y();
    case 'Z': return z();
    default: throw Error(ErrorCode::InvalidTerm, fmt::format("unknown Pauli '{}'", c));
  }
}

Eigen::MatrixXcd string(const std::string& letters) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (char c : letters) {
    const Eigen::Matrix2cd p = from_char(c);
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        next.block<2, 2>(2 * i, 2 * j) = out(i, j) * p;
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace pauli

}  // namespace bef
