#include "tcdark/hilbert.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tcdark {

int photon_total(const BasisState& state) {
  return std::accumulate(state.photons.begin(), state.photons.end(), 0);
}

int total_excitation(const BasisState& state) {
  int n = photon_total(state);
  for (const auto& a : state.atoms) n += a.level;
  return n;
}

std::string format_photons(const std::vector<int>& photons) {
  std::ostringstream os;
  for (std::size_t i = 0; i < photons.size(); ++i) {
    if (i) os << ' ';
    os << photons[i];
  }
  return os.str();
}

std::string format_label(const BasisState& state) {
  std::ostringstream os;
  os << '|' << format_photons(state.photons) << '|';
  for (std::size_t k = 0; k < state.atoms.size(); ++k) {
    if (k) os << ' ';
    os << state.atoms[k].level << '@' << state.atoms[k].position;
  }
  os << "⟩";
  return os.str();
}

namespace {

// Odometer over a vector of digits with per-digit radix; returns false on wrap.
bool advance(std::vector<int>& digits, int radix) {
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (++*it < radix) return true;
    *it = 0;
  }
  return false;
}

}  // namespace

SpacePtr HilbertSpace::enumerate(int cavities, AtomSpec atoms, std::optional<int> sector,
                                 std::optional<int> cutoff) {
  if (cavities < 1) throw std::invalid_argument("enumerate: at least one cavity required");
  if (atoms.count < 0) throw std::invalid_argument("enumerate: negative atom count");
  if (!atoms.mobile && !atoms.home.empty()) {
    if (static_cast<int>(atoms.home.size()) != atoms.count)
      throw std::invalid_argument("enumerate: home list length must equal atom count");
    for (int h : atoms.home)
      if (h < 0 || h >= cavities) throw std::invalid_argument("enumerate: home cavity out of range");
  }
  if (sector && *sector < 0) throw std::invalid_argument("enumerate: negative sector");
  if (!cutoff && !sector) throw std::invalid_argument("enumerate: unrestricted space needs an explicit cutoff");
  const int cut = cutoff.value_or(sector.value_or(0));
  if (cut < 0) throw std::invalid_argument("enumerate: negative cutoff");

  // Per-atom local states: (level, position). Fixed atoms have one position.
  std::vector<std::vector<AtomState>> local(static_cast<std::size_t>(atoms.count));
  for (int k = 0; k < atoms.count; ++k) {
    for (int level = 0; level <= 1; ++level) {
      if (atoms.mobile) {
        for (int p = 0; p < cavities; ++p) local[k].push_back({level, p});
      } else {
        local[k].push_back({level, atoms.home_of(k)});
      }
    }
  }

  auto space = std::shared_ptr<HilbertSpace>(new HilbertSpace());
  space->cavities_ = cavities;
  space->atoms_ = atoms;
  space->sector_ = sector;
  space->cutoff_ = cut;

  std::vector<int> photons(static_cast<std::size_t>(cavities), 0);
  do {
    const int nph = std::accumulate(photons.begin(), photons.end(), 0);
    if (sector && nph > *sector) continue;
    std::vector<int> choice(static_cast<std::size_t>(atoms.count), 0);
    // Every atom has the same number of local states.
    const int radix = atoms.count ? static_cast<int>(local[0].size()) : 1;
    do {
      BasisState s;
      s.photons = photons;
      s.atoms.reserve(choice.size());
      for (std::size_t k = 0; k < choice.size(); ++k) s.atoms.push_back(local[k][static_cast<std::size_t>(choice[k])]);
      if (sector && total_excitation(s) != *sector) continue;
      space->basis_.push_back(std::move(s));
    } while (advance(choice, radix));
  } while (advance(photons, cut + 1));

  if (space->basis_.empty()) throw std::invalid_argument("enumerate: requested sector is unreachable (empty space)");

  // Basis order is lexicographic on (photons, atoms).
  std::sort(space->basis_.begin(), space->basis_.end());
  for (std::size_t i = 0; i < space->basis_.size(); ++i) space->index_.emplace(space->basis_[i], i);
  return space;
}

std::optional<std::size_t> HilbertSpace::find(const BasisState& state) const {
  auto it = index_.find(state);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t HilbertSpace::index_of(const BasisState& state) const {
  if (auto i = find(state)) return *i;
  throw std::out_of_range("index_of: state " + format_label(state) + " is not in the space");
}

std::vector<std::vector<int>> HilbertSpace::photon_configurations() const {
  std::vector<std::vector<int>> out;
  for (const auto& s : basis_)
    if (out.empty() || out.back() != s.photons) out.push_back(s.photons);
  return out;
}

}  // namespace tcdark
