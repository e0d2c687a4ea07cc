#pragma once

#include <span>
#include <string>
#include <vector>

#include "tcdark/operators.hpp"
#include "tcdark/propagator.hpp"

namespace tcdark {

/// Field density matrix: the atoms traced out of |ψ⟩⟨ψ|.
struct PhotonDensity {
  std::vector<std::vector<int>> labels;  // photon configurations, basis order
  Eigen::MatrixXcd matrix;

  double trace() const { return matrix.trace().real(); }
  double purity() const { return (matrix * matrix).trace().real(); }
};

/// Sorted spectra of H(t) along a deformation.
struct SpectralFlow {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> levels;          // ascending per time
  std::vector<std::vector<bool>> degenerate;    // per adjacent pair (j, j+1)
  double degeneracy_fraction = 1e-9;            // gap tolerance relative to the spectral range
};

/// Throws std::out_of_range for labels outside the space.
cplx amplitude(const StateVector& state, const HilbertSpace& space, const BasisState& label);
/// Probability of at least one photon in any cavity.
double free_photon_probability(const StateVector& state, const HilbertSpace& space);
/// Marginal probability of one photon configuration.
double photon_number_probability(const StateVector& state, const HilbertSpace& space, const std::vector<int>& config);
/// Probability of exactly `total` photons summed over cavities.
double photon_total_probability(const StateVector& state, const HilbertSpace& space, int total);
/// Probability that the atoms do not all share one cavity.
double apart_probability(const StateVector& state, const HilbertSpace& space);
PhotonDensity reduced_photon_density(const StateVector& state, const HilbertSpace& space);
/// |⟨reference|state⟩|².
double fidelity(const StateVector& state, const StateVector& reference);
/// Weight of the state inside the instantaneous dark subspace.
double dark_overlap(const StateVector& state, SpacePtr space, const Eigen::MatrixXd& g_now);

/// Ascending eigenvalues; throws NumericalError for non-Hermitian input.
Eigen::VectorXd spectrum(const OperatorMatrix& h);
SpectralFlow spectral_flow(const DrivenModel& model, std::span<const double> times,
                           double degeneracy_fraction = 1e-9);

/// Peaks whose value exceeds `floor` and whose topographic prominence is at
/// least `prominence_fraction` of the series maximum.
int count_humps(std::span<const double> series, double floor, double prominence_fraction = 0.2);

/// Resolves observable names ("P_free", "P_n[1]", "P_ph[0 1]", "pop[<label>]",
/// "fidelity_init", "dark_overlap", "witness", "P_apart") into callables.
/// Throws std::invalid_argument for unknown names.
std::vector<NamedObservable> make_observables(const std::vector<std::string>& names, SpacePtr space,
                                              const StateVector& initial);

}  // namespace tcdark
