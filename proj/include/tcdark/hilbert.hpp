#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcdark {

/// Level and cavity of one two-level atom.
struct AtomState {
  int level = 0;     // 0 = ground, 1 = excited
  int position = 0;  // cavity index

  auto operator<=>(const AtomState&) const = default;
};

/// Occupation-number record: photons per cavity plus per-atom (level, position).
struct BasisState {
  std::vector<int> photons;
  std::vector<AtomState> atoms;

  auto operator<=>(const BasisState&) const = default;
};

/// Atom content of a model. Fixed atoms sit in `home[k]`; mobile atoms may
/// occupy any cavity. An empty `home` places every fixed atom in cavity 0.
struct AtomSpec {
  int count = 0;
  bool mobile = false;
  std::vector<int> home;

  int home_of(int atom) const { return home.empty() ? 0 : home.at(static_cast<std::size_t>(atom)); }
};

int total_excitation(const BasisState& state);
int photon_total(const BasisState& state);

/// "|n1 n2|a1@p1 a2@p2⟩", e.g. "|1|0@0 1@0⟩".
std::string format_label(const BasisState& state);
/// Photon part only, e.g. "0 1".
std::string format_photons(const std::vector<int>& photons);

/// Truncated basis for two-level atoms in coupled cavities. Immutable once built.
class HilbertSpace {
 public:
  /// Enumerates every state with per-cavity photon number <= cutoff (and total
  /// excitation == sector when set), ordered lexicographically on
  /// (photons, atoms). The cutoff defaults to the sector.
  static std::shared_ptr<const HilbertSpace> enumerate(int cavities, AtomSpec atoms,
                                                       std::optional<int> sector,
                                                       std::optional<int> cutoff = std::nullopt);

  std::size_t dim() const { return basis_.size(); }
  int cavities() const { return cavities_; }
  int atom_count() const { return atoms_.count; }
  const AtomSpec& atom_spec() const { return atoms_; }
  std::optional<int> sector() const { return sector_; }
  int cutoff() const { return cutoff_; }

  std::span<const BasisState> basis() const { return basis_; }
  const BasisState& state(std::size_t i) const { return basis_.at(i); }
  std::string label(std::size_t i) const { return format_label(basis_.at(i)); }

  /// Throws std::out_of_range for states outside the space.
  std::size_t index_of(const BasisState& state) const;
  std::optional<std::size_t> find(const BasisState& state) const;

  /// Distinct photon vectors present in the basis, in basis order.
  std::vector<std::vector<int>> photon_configurations() const;

 private:
  HilbertSpace() = default;

  int cavities_ = 0;
  AtomSpec atoms_;
  std::optional<int> sector_;
  int cutoff_ = 0;
  std::vector<BasisState> basis_;
  std::map<BasisState, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const HilbertSpace>;

}  // namespace tcdark
