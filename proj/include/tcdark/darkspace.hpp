#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tcdark/operators.hpp"
#include "tcdark/propagator.hpp"

namespace tcdark {

/// Orthonormal basis of a numerical kernel.
struct DarkBasis {
  SpacePtr space;                 // null when computed for a bare matrix
  Eigen::MatrixXcd vectors;       // one column per kernel vector
  Eigen::VectorXd singular_values;
  Eigen::Index rank = 0;
  Eigen::Index nullity = 0;
  double tolerance = 0.0;         // relative to sigma_max
  double sigma_max = 0.0;
};

constexpr double kDefaultKernelTol = 1e-10;

/// Kernel via SVD: singular values <= tol * sigma_max count as zero.
DarkBasis nullspace(const Eigen::MatrixXcd& a, double tol = kDefaultKernelTol);
DarkBasis nullspace(const OperatorMatrix& a, double tol = kDefaultKernelTol);

/// Photon-vacuum states annihilated by V₊(g_now).
DarkBasis dark_subspace(SpacePtr space, const Eigen::MatrixXd& g_now, double tol = kDefaultKernelTol);

/// Photon-vacuum states ψ with V₊ exp(-i H(0) delta) ψ = 0.
DarkBasis black_subspace(const DrivenModel& model, double delta, double tol = kDefaultKernelTol);

/// CSV export: header "label,v0,v1,...", one row per basis state, amplitudes
/// written as re+imj.
void write_basis_csv(std::ostream& os, const DarkBasis& basis);

class GraphNotEven : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cavities joined by tunnel bridges.
struct CavityGraph {
  int vertices = 1;
  std::vector<std::pair<int, int>> edges;

  /// Path length from cavity 0; throws std::invalid_argument when disconnected.
  std::vector<int> distances() const;
  bool is_even() const;
};

/// Superposition of one two-atom singlet over cavities:
/// Σ_c w_c (g_a |a=0,b=1⟩ - g_b |a=1,b=0⟩)_c, both atoms in cavity c.
struct PairSuperposition {
  int atom_a = 0;
  int atom_b = 1;
  std::vector<std::pair<int, double>> cavity_weights{{0, 1.0}};
  double g_a = 1.0;
  double g_b = 1.0;
};

/// Normalized photon-vacuum tensor product of disjoint pair superpositions;
/// unpaired atoms are in the ground state. Throws std::invalid_argument when a
/// fixed pair is not co-located or the product leaves the space.
StateVector pair_product_state(const HilbertSpace& space, std::span<const PairSuperposition> pairs);

StateVector singlet_state(const HilbertSpace& space, int atom_a, int atom_b, int cavity);
/// (g_a|01⟩ - g_b|10⟩)/norm, the singlet deformed to stay dark for couplings g_a, g_b.
StateVector deformed_singlet(const HilbertSpace& space, int atom_a, int atom_b, int cavity, double g_a,
                             double g_b);

/// Σ_i (-1)^{d(i)} |s^i⟩ normalized, for atoms 0 and 1. Throws GraphNotEven.
StateVector graph_dark_state(const CavityGraph& graph, const HilbertSpace& space);

/// |g2 g4 λ(|0101⟩) - g1 g3 λ(|1010⟩)| on the photon vacuum of a 4-atom, one-cavity space.
double darkness_witness(const StateVector& state, const HilbertSpace& space, const Eigen::MatrixXd& g_now);

/// ‖V₊ ψ‖.
double is_dark(const StateVector& state, SpacePtr space, const Eigen::MatrixXd& g_now);

}  // namespace tcdark
