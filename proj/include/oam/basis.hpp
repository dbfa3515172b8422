// Truncated OAM Hilbert spaces: mode labels, basis orderings, rail indexing.
#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace oam {

// Sign of the azimuthal index of a mode, or the corresponding subspace.
enum class Helicity { Positive, Negative };

// One Laguerre-Gaussian mode label: azimuthal (topological charge) index ell
// and radial index p >= 0.
struct ModeIndex {
  int ell = 0;
  int p = 0;
  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

std::string to_string(ModeIndex m);

// An ordered list of modes spanning a truncated OAM space.
//
// Two layouts are in use:
//   - tomography ordering  |1>,|2>,...,|n>,|-1>,|-2>,...,|-n>   (no ell = 0),
//   - contiguous ordering  ell_lo..ell_hi ascending (ell = 0 when spanned),
// each replicated over p = 0..p_max when radial structure is enabled
// (p minor, i.e. (ell,0),(ell,1),... before the next ell).
class BasisSpec {
 public:
  BasisSpec() = default;

  static BasisSpec tomography(int ell_max, bool include_p = false, int p_max = 0);
  static BasisSpec contiguous(int ell_lo, int ell_hi, int p_max = 0);
  // Even ell only, tomography-style ordering |2>,|4>,...,|-2>,|-4>,...
  static BasisSpec even_only(int ell_max);
  static BasisSpec from_modes(std::vector<ModeIndex> modes);

  int dim() const { return static_cast<int>(modes_.size()); }
  const std::vector<ModeIndex>& modes() const { return modes_; }
  ModeIndex mode(int idx) const { return modes_.at(static_cast<size_t>(idx)); }
  int index_of(ModeIndex m) const;  // throws std::invalid_argument if absent
  int find(ModeIndex m) const;      // -1 if absent
  bool contains(ModeIndex m) const { return find(m) >= 0; }

  int ell_max() const { return ell_max_; }
  int p_max() const { return p_max_; }
  bool has_radial() const { return p_max_ > 0; }
  bool symmetric_in_ell() const;
  bool has_ell_zero() const;
  // True when modes() follow the tomography layout exactly.
  bool is_tomography_ordered() const;

  // Smallest contiguous basis containing this one and its copy shifted by k.
  BasisSpec widened_for_shift(int k) const;

  friend bool operator==(const BasisSpec& a, const BasisSpec& b) {
    return a.modes_ == b.modes_;
  }

 private:
  std::vector<ModeIndex> modes_;
  std::map<ModeIndex, int> index_;
  int ell_max_ = 0;
  int p_max_ = 0;

  void rebuild_index();
};

// Canonical tomography basis |1>,...,|n>,|-1>,...,|-n|; ell_max >= 1.
BasisSpec make_basis(int ell_max, bool include_p = false, int p_max = 0);

// Rail-space layout: amplitudes live on path (x) mode with flat index
// path * dim + mode_index.
inline int rail_index(int path, int mode_idx, int dim) {
  return path * dim + mode_idx;
}

}  // namespace oam
