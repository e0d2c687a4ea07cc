#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tcdark/hilbert.hpp"

namespace tcdark {

using cplx = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<cplx>;

/// Complex matrix over a HilbertSpace. Stored dense up to kDenseLimit basis
/// states and compressed-sparse above.
class OperatorMatrix {
 public:
  static constexpr Eigen::Index kDenseLimit = 256;

  OperatorMatrix(SpacePtr space, const std::vector<Triplet>& entries);
  OperatorMatrix(SpacePtr space, DenseMatrix m);
  OperatorMatrix(SpacePtr space, SparseMatrix m);

  static OperatorMatrix zero(SpacePtr space);

  const HilbertSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(space_->dim()); }
  bool is_dense() const { return std::holds_alternative<DenseMatrix>(data_); }

  DenseMatrix dense() const;
  SparseMatrix sparse() const;
  const DenseMatrix* dense_view() const { return std::get_if<DenseMatrix>(&data_); }
  const SparseMatrix* sparse_view() const { return std::get_if<SparseMatrix>(&data_); }

  cplx coeff(Eigen::Index row, Eigen::Index col) const;
  StateVector apply(const StateVector& v) const;
  double max_abs() const;

  OperatorMatrix adjoint() const;
  OperatorMatrix operator+(const OperatorMatrix& other) const;
  OperatorMatrix operator-(const OperatorMatrix& other) const;
  OperatorMatrix operator*(const OperatorMatrix& other) const;
  OperatorMatrix operator*(cplx s) const;

  /// Adds s * other into this operator; both must share storage kind.
  void add_scaled(const OperatorMatrix& other, double s);

  /// Plain-text triplets "row col re im", nonzeros only.
  void write_triplets(std::ostream& os) const;

 private:
  void require_same_space(const OperatorMatrix& other) const;

  SpacePtr space_;
  std::variant<DenseMatrix, SparseMatrix> data_;
};

/// max|H - H†| / max|H|; 0 for the zero matrix.
double hermiticity_residual(const OperatorMatrix& h);
/// max|AB - BA|.
double commutator_norm(const OperatorMatrix& a, const OperatorMatrix& b);

enum class Frame { lab, rotating };

/// Model couplings, all as angular frequencies (rad/s); Hamiltonians are H/ħ.
struct ModelParams {
  double omega = 0.0;
  Eigen::MatrixXd g_base;             // [cavity][atom]
  Eigen::MatrixXd mu_ph;              // [cavity][cavity], symmetric, zero diagonal
  std::vector<Eigen::MatrixXd> mu_at; // per atom, [cavity][cavity]; empty = no tunneling
  Frame frame = Frame::rotating;

  /// All-zero parameters sized for the given model.
  static ModelParams zeros(int cavities, int atoms);
  /// Throws std::invalid_argument when shapes or values violate the model invariants.
  void validate(int cavities, int atoms) const;
};

OperatorMatrix photon_annihilation(SpacePtr space, int cavity);
OperatorMatrix photon_creation(SpacePtr space, int cavity);
/// σ for `atom`; restricted to states where the atom sits in `at_position` when given.
OperatorMatrix atomic_lowering(SpacePtr space, int atom, std::optional<int> at_position = std::nullopt);
/// Hermitian hop of `atom` between cavities i and j, level preserved.
OperatorMatrix atom_tunnel(SpacePtr space, int atom, int i, int j);
OperatorMatrix excitation_number(SpacePtr space);

/// a_i†σ_ik + a_iσ_ik† for atom k located in cavity i.
OperatorMatrix interaction_term(SpacePtr space, int cavity, int atom);
/// V₊ = Σ g[i][k] a_i†σ_ik.
OperatorMatrix interaction_raising(SpacePtr space, const Eigen::MatrixXd& g_now);
/// Σ_k g_k σ_k over an atoms-only (photon cutoff 0) space.
OperatorMatrix collective_lowering(SpacePtr atomic_space, std::span<const double> g);

/// H(t)/ħ = [ω N] + Σ g(a†σ + aσ†) + photon hopping + tunnel_scale · atom tunneling.
OperatorMatrix build_hamiltonian(SpacePtr space, const ModelParams& params, const Eigen::MatrixXd& g_now,
                                 double tunnel_scale = 1.0);

/// Precomputed pieces of H(t) so per-step assembly is a linear combination.
class HamiltonianTerms {
 public:
  HamiltonianTerms(SpacePtr space, const ModelParams& params);

  OperatorMatrix assemble(const Eigen::MatrixXd& g_now, double tunnel_scale = 1.0) const;
  const SpacePtr& space() const { return space_; }
  const ModelParams& params() const { return params_; }

 private:
  struct Coupling {
    int cavity;
    int atom;
    OperatorMatrix term;
  };

  SpacePtr space_;
  ModelParams params_;
  OperatorMatrix fixed_;       // frame term plus photon hopping
  OperatorMatrix tunneling_;
  std::vector<Coupling> couplings_;
};

}  // namespace tcdark
