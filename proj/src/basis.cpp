#include "oam/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oam {

std::string to_string(ModeIndex m) {
  std::string s = "|" + std::to_string(m.ell);
  if (m.p != 0) s += "," + std::to_string(m.p);
  return s + ">";
}

void BasisSpec::rebuild_index() {
  index_.clear();
  ell_max_ = 0;
  p_max_ = 0;
  for (int i = 0; i < static_cast<int>(modes_.size()); ++i) {
    const ModeIndex& m = modes_[static_cast<size_t>(i)];
    if (m.p < 0) throw std::invalid_argument("mode radial index p must be >= 0");
    if (!index_.emplace(m, i).second)
      throw std::invalid_argument("duplicate mode " + to_string(m) + " in basis");
    ell_max_ = std::max(ell_max_, std::abs(m.ell));
    p_max_ = std::max(p_max_, m.p);
  }
}

BasisSpec BasisSpec::tomography(int ell_max, bool include_p, int p_max) {
  if (ell_max < 1) throw std::invalid_argument("ell_max must be >= 1");
  if (!include_p) p_max = 0;
  if (p_max < 0) throw std::invalid_argument("p_max must be >= 0");
  BasisSpec b;
  for (int sign : {+1, -1})
    for (int l = 1; l <= ell_max; ++l)
      for (int p = 0; p <= p_max; ++p) b.modes_.push_back({sign * l, p});
  b.rebuild_index();
  return b;
}

BasisSpec BasisSpec::contiguous(int ell_lo, int ell_hi, int p_max) {
  if (ell_lo > ell_hi) throw std::invalid_argument("empty ell range");
  if (p_max < 0) throw std::invalid_argument("p_max must be >= 0");
  BasisSpec b;
  for (int l = ell_lo; l <= ell_hi; ++l)
    for (int p = 0; p <= p_max; ++p) b.modes_.push_back({l, p});
  b.rebuild_index();
  return b;
}

BasisSpec BasisSpec::even_only(int ell_max) {
  if (ell_max < 2) throw std::invalid_argument("ell_max must be >= 2 for an even basis");
  BasisSpec b;
  for (int sign : {+1, -1})
    for (int l = 2; l <= ell_max; l += 2) b.modes_.push_back({sign * l, 0});
  b.rebuild_index();
  return b;
}

BasisSpec BasisSpec::from_modes(std::vector<ModeIndex> modes) {
  BasisSpec b;
  b.modes_ = std::move(modes);
  b.rebuild_index();
  return b;
}

int BasisSpec::index_of(ModeIndex m) const {
  int i = find(m);
  if (i < 0) throw std::invalid_argument("mode " + to_string(m) + " not in basis");
  return i;
}

int BasisSpec::find(ModeIndex m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : it->second;
}

bool BasisSpec::symmetric_in_ell() const {
  return std::all_of(modes_.begin(), modes_.end(),
                     [this](ModeIndex m) { return contains({-m.ell, m.p}); });
}

bool BasisSpec::has_ell_zero() const {
  return std::any_of(modes_.begin(), modes_.end(),
                     [](ModeIndex m) { return m.ell == 0; });
}

bool BasisSpec::is_tomography_ordered() const {
  if (modes_.empty() || dim() % 2 != 0) return false;
  const int plan = dim() / ((p_max_ + 1) * 2);  // modes per sign
  int i = 0;
  for (int sign : {+1, -1})
    for (int l = 1; l <= plan; ++l)
      for (int p = 0; p <= p_max_; ++p)
        if (modes_[static_cast<size_t>(i++)] != ModeIndex{sign * l, p}) return false;
  return i == dim();
}

BasisSpec BasisSpec::widened_for_shift(int k) const {
  if (modes_.empty()) throw std::invalid_argument("cannot widen an empty basis");
  int lo = modes_[0].ell, hi = modes_[0].ell;
  for (const ModeIndex& m : modes_) {
    lo = std::min({lo, m.ell, m.ell + k});
    hi = std::max({hi, m.ell, m.ell + k});
  }
  return contiguous(lo, hi, p_max_);
}

BasisSpec make_basis(int ell_max, bool include_p, int p_max) {
  return BasisSpec::tomography(ell_max, include_p, p_max);
}

}  // namespace oam
