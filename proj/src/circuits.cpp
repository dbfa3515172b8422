#include "oam/circuits.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oam/errors.hpp"

namespace oam {

namespace {
constexpr double kPi = std::numbers::pi;
}

Circuit::Circuit(std::string name, std::vector<OpticalElement> elements,
                 std::map<std::string, int> ports)
    : name_(std::move(name)), elements_(std::move(elements)), ports_(std::move(ports)) {
  if (elements_.empty()) throw std::invalid_argument("Circuit: empty element list");
  n_paths_ = elements_.front().n_paths;
  input_basis_ = elements_.front().basis_in;
  BasisSpec current = input_basis_;
  matrix_ = Matrix::Identity(static_cast<Eigen::Index>(n_paths_) * current.dim(),
                             static_cast<Eigen::Index>(n_paths_) * current.dim());
  for (const OpticalElement& e : elements_) {
    if (e.n_paths != n_paths_)
      throw std::invalid_argument("Circuit: elements disagree on path count");
    if (!(e.basis_in == current))
      throw std::invalid_argument("Circuit: element basis does not match the chain");
    matrix_ = e.matrix * matrix_;
    current = e.basis_out;
    total_cost_ += e.cost;
  }
  output_basis_ = current;
  for (const auto& [label, path] : ports_)
    if (path < 0 || path >= n_paths_)
      throw std::invalid_argument("Circuit: port '" + label + "' out of range");
}

int Circuit::port(const std::string& label) const {
  auto it = ports_.find(label);
  if (it == ports_.end())
    throw std::invalid_argument("Circuit '" + name_ + "' has no port '" + label + "'");
  return it->second;
}

Matrix Circuit::port_unitary(int out_path, int in_path) const {
  if (out_path < 0 || out_path >= n_paths_ || in_path < 0 || in_path >= n_paths_)
    throw std::invalid_argument("port_unitary: path out of range");
  const int di = input_basis_.dim();
  const int dw = output_basis_.dim();
  return matrix_.block(static_cast<Eigen::Index>(out_path) * dw,
                       static_cast<Eigen::Index>(in_path) * di, dw, di);
}

Circuit Circuit::then(const Circuit& next, std::string name) const {
  if (next.n_paths_ != n_paths_)
    throw std::invalid_argument("Circuit::then: path counts differ");
  if (!(next.input_basis_ == output_basis_))
    throw std::invalid_argument("Circuit::then: basis mismatch at the joint");
  std::vector<OpticalElement> all = elements_;
  all.insert(all.end(), next.elements_.begin(), next.elements_.end());
  if (name.empty()) name = name_ + "+" + next.name_;
  return Circuit(std::move(name), std::move(all), next.ports_);
}

Circuit Circuit::adjoint(std::string name) const {
  if (widening())
    throw CapacityError("Circuit::adjoint: undefined for basis-widening circuits");
  std::vector<OpticalElement> rev;
  rev.reserve(elements_.size());
  for (auto it = elements_.rbegin(); it != elements_.rend(); ++it)
    rev.push_back(oam::adjoint(*it));
  if (name.empty()) name = name_ + "_rev";
  // Output ports become inputs under reversal; keep the input port label.
  return Circuit(std::move(name), std::move(rev), {{"a", 0}});
}

bool Circuit::is_isometry(double tol) const {
  Matrix g = matrix_.adjoint() * matrix_;
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

CircuitBuilder::CircuitBuilder(int n_paths, BasisSpec basis, bool allow_widening)
    : n_paths_(n_paths), basis_(std::move(basis)), allow_widening_(allow_widening) {
  if (n_paths_ < 1) throw std::invalid_argument("CircuitBuilder: n_paths must be >= 1");
}

CircuitBuilder& CircuitBuilder::add(OpticalElement e) {
  if (!(e.basis_in == basis_))
    throw std::invalid_argument("CircuitBuilder: element built on a different basis");
  if (e.widening() && !allow_widening_)
    throw CapacityError("CircuitBuilder: basis widening disabled for this circuit");
  basis_ = e.basis_out;
  elements_.push_back(std::move(e));
  return *this;
}

CircuitBuilder& CircuitBuilder::bbs(int a, int b) {
  return add(beam_splitter(a, b, basis_, n_paths_));
}
CircuitBuilder& CircuitBuilder::dove(double beta, int path) {
  return add(dove_prism(beta, path, basis_, n_paths_));
}
CircuitBuilder& CircuitBuilder::dove_pair(double angle, int path) {
  return add(dove_prism_pair(angle, path, basis_, n_paths_));
}
CircuitBuilder& CircuitBuilder::gouy(double alpha, int path) {
  return add(gouy_stack(alpha, path, basis_, n_paths_));
}
CircuitBuilder& CircuitBuilder::plate(double theta, int path) {
  return add(phase_plate(theta, path, basis_, n_paths_));
}
CircuitBuilder& CircuitBuilder::slm(int k, int path) {
  return add(slm_shift(k, path, basis_, n_paths_));
}
CircuitBuilder& CircuitBuilder::swap(int a, int b) {
  return add(path_swap(a, b, basis_, n_paths_));
}

Circuit CircuitBuilder::build(std::string name, std::map<std::string, int> ports) && {
  return Circuit(std::move(name), std::move(elements_), std::move(ports));
}

namespace {

// Mach-Zehnder with a prism pair: arm phase e^{i 2 l beta} in path_a.
void emit_oam_sorter(CircuitBuilder& b, double beta, int path_a, int path_b) {
  b.bbs(path_a, path_b).dove_pair(beta, path_a).bbs(path_a, path_b);
}

// HS(alpha): arm phase e^{i (|l| + 2p) alpha + i l alpha} in path_a.
void emit_hs(CircuitBuilder& b, double alpha, int path_a, int path_b) {
  b.bbs(path_a, path_b)
      .gouy(alpha, path_a)
      .plate(-alpha, path_a)
      .dove_pair(alpha / 2.0, path_a)
      .bbs(path_a, path_b);
}

void emit_hs_even_slm(CircuitBuilder& b, int path_a, int path_b) {
  b.slm(+1, path_a);
  emit_hs(b, kPi / 2.0, path_a, path_b);
  b.slm(-1, path_a).slm(-1, path_b);
}

// Filters on path_a peeling positive modes into filter_paths[k-1]; the
// recombiners collect them onto recombine_path with amplitude +1.
void emit_hs_even_cascade(CircuitBuilder& b, int n_stages, int path_a,
                          const std::vector<int>& filter_paths, int recombine_path) {
  for (int k = 1; k <= n_stages - 1; ++k)
    emit_hs(b, kPi / std::pow(2.0, k + 1), path_a, filter_paths[static_cast<size_t>(k - 1)]);
  for (int k = n_stages - 1; k >= 1; --k)
    emit_oam_sorter(b, kPi / std::pow(2.0, k + 1), recombine_path,
                    filter_paths[static_cast<size_t>(k - 1)]);
}

int default_stages(const BasisSpec& basis) {
  int n = 2;
  while ((1 << n) <= basis.ell_max()) ++n;
  return n;
}

void require_flat_sorter_basis(const BasisSpec& basis, const char* who) {
  if (basis.has_radial())
    throw std::invalid_argument(std::string(who) + ": requires a p = 0 basis");
}

}  // namespace

Circuit oam_sorter(double beta, const BasisSpec& basis) {
  CircuitBuilder b(2, basis);
  emit_oam_sorter(b, beta, 0, 1);
  return std::move(b).build("oam_sorter", {{"a", 0}, {"b", 1}});
}

Circuit radial_mode_sorter(double alpha, const BasisSpec& basis) {
  if (!basis.has_radial())
    throw std::invalid_argument("radial_mode_sorter: basis must include radial modes");
  CircuitBuilder b(2, basis);
  b.bbs(0, 1).gouy(alpha, 0).plate(-alpha, 0).bbs(0, 1);
  return std::move(b).build("radial_mode_sorter", {{"a", 0}, {"b", 1}});
}

Circuit partial_helicity_sorter(double alpha, const BasisSpec& basis) {
  require_flat_sorter_basis(basis, "partial_helicity_sorter");
  CircuitBuilder b(2, basis);
  emit_hs(b, alpha, 0, 1);
  return std::move(b).build("hs", {{"a", 0}, {"b", 1}});
}

Circuit hs_odd(const BasisSpec& basis) {
  require_flat_sorter_basis(basis, "hs_odd");
  CircuitBuilder b(2, basis);
  emit_hs(b, kPi / 2.0, 0, 1);
  return std::move(b).build("hs_odd", {{"a", 0}, {"b", 1}});
}

Circuit hs_even_slm(const BasisSpec& basis) {
  require_flat_sorter_basis(basis, "hs_even_slm");
  CircuitBuilder b(2, basis);
  emit_hs_even_slm(b, 0, 1);
  return std::move(b).build("hs_even_slm", {{"+", 1}, {"-", 0}});
}

Circuit hs_even_cascade(int n_stages, const BasisSpec& basis) {
  require_flat_sorter_basis(basis, "hs_even_cascade");
  if (n_stages < 2) throw std::invalid_argument("hs_even_cascade: need n_stages >= 2");
  for (const ModeIndex& m : basis.modes()) {
    if (m.ell % 2 != 0) throw std::invalid_argument("hs_even_cascade: odd mode in basis");
    if (m.ell == 0) throw std::invalid_argument("hs_even_cascade: ell = 0 unsupported");
  }
  if (basis.ell_max() >= (1 << n_stages))
    throw CapacityError("hs_even_cascade: ell_max must be < 2^n_stages");
  const int n_paths = n_stages + 1;
  std::vector<int> filter_paths;
  for (int k = 1; k <= n_stages - 1; ++k) filter_paths.push_back(k);
  CircuitBuilder b(n_paths, basis);
  emit_hs_even_cascade(b, n_stages, 0, filter_paths, n_stages);
  return std::move(b).build("hs_even_cascade", {{"+", n_stages}, {"-", 0}});
}

Circuit full_helicity_sorter(const BasisSpec& basis, FhsVariant variant,
                             std::optional<int> n_stages) {
  require_flat_sorter_basis(basis, "full_helicity_sorter");
  if (variant == FhsVariant::Slm) {
    // paths: 0 main/negative port, 1 odd branch, 2 even partner/positive
    // port, 3 odd partner.
    CircuitBuilder b(4, basis);
    emit_oam_sorter(b, kPi / 2.0, 0, 1);
    emit_hs_even_slm(b, 0, 2);
    emit_hs(b, kPi / 2.0, 1, 3);
    emit_oam_sorter(b, kPi / 2.0, 2, 3);
    b.plate(kPi, 2);  // cancel the uniform -1 left on the positive port
    emit_oam_sorter(b, kPi / 2.0, 0, 1);
    return std::move(b).build("fhs_slm", {{"+", 2}, {"-", 0}});
  }
  const int n = n_stages.value_or(default_stages(basis));
  if (n < 2) throw std::invalid_argument("full_helicity_sorter: need n_stages >= 2");
  if (basis.ell_max() >= (1 << n))
    throw CapacityError("full_helicity_sorter: ell_max must be < 2^n_stages");
  // paths: 0 main/negative port, 1 odd branch, 2..n filter outputs,
  // n+1 positive port, n+2 odd partner.
  const int pos_port = n + 1;
  const int odd_partner = n + 2;
  std::vector<int> filter_paths;
  for (int k = 2; k <= n; ++k) filter_paths.push_back(k);
  CircuitBuilder b(n + 3, basis);
  emit_oam_sorter(b, kPi / 2.0, 0, 1);
  emit_hs_even_cascade(b, n, 0, filter_paths, pos_port);
  emit_hs(b, kPi / 2.0, 1, odd_partner);
  // The final recombiner crosses odd modes with a -1; pre-compensate.
  b.dove_pair(kPi / 2.0, odd_partner);
  emit_oam_sorter(b, kPi / 2.0, pos_port, odd_partner);
  emit_oam_sorter(b, kPi / 2.0, 0, 1);
  return std::move(b).build("fhs_cascade", {{"+", pos_port}, {"-", 0}});
}

namespace {

void require_gate_basis(const BasisSpec& basis, const char* who) {
  if (basis.has_radial() || basis.has_ell_zero() || !basis.symmetric_in_ell())
    throw std::invalid_argument(std::string(who) +
                                ": needs a p = 0 basis symmetric in +-ell without ell = 0");
}

// Gates run around the cascade sorter: every stage is square, so the
// recombining pass is the exact reverse device.
Circuit gate_core(const BasisSpec& basis, std::optional<int> n_stages, double plate_theta,
                  bool with_hadamard, const std::string& name) {
  Circuit fhs = full_helicity_sorter(basis, FhsVariant::Cascade, n_stages);
  const int pos = fhs.port("+");
  const int neg = fhs.port("-");
  CircuitBuilder mid(fhs.n_paths(), fhs.output_basis());
  if (plate_theta != 0.0) mid.plate(plate_theta, neg);
  if (with_hadamard) {
    mid.dove(0.0, pos);
    mid.bbs(pos, neg);
    mid.dove(0.0, pos);
  }
  if (plate_theta != 0.0) mid.plate(plate_theta, neg);
  Circuit middle = std::move(mid).build("mid", {{"a", 0}});
  return fhs.then(middle).then(fhs.adjoint(), name);
}

}  // namespace

Circuit gate_hx(const BasisSpec& basis, std::optional<int> n_stages) {
  require_gate_basis(basis, "gate_hx");
  return gate_core(basis, n_stages, 0.0, true, "gate_hx");
}

Circuit gate_phase(double theta, const BasisSpec& basis, std::optional<int> n_stages) {
  require_gate_basis(basis, "gate_phase");
  Circuit fhs = full_helicity_sorter(basis, FhsVariant::Cascade, n_stages);
  CircuitBuilder mid(fhs.n_paths(), fhs.output_basis());
  mid.plate(theta, fhs.port("-"));
  Circuit middle = std::move(mid).build("mid", {{"a", 0}});
  return fhs.then(middle).then(fhs.adjoint(), "gate_phase");
}

Circuit gate_hy(const BasisSpec& basis, std::optional<int> n_stages) {
  require_gate_basis(basis, "gate_hy");
  // P(pi/2) Hx P(pi/2) with the inner sorter pairs cancelled.
  return gate_core(basis, n_stages, kPi / 2.0, true, "gate_hy");
}

PortRoutingTable PortRoutingTable::from_circuit(const Circuit& c, double threshold) {
  PortRoutingTable t;
  const BasisSpec& bi = c.input_basis();
  const BasisSpec& bo = c.output_basis();
  t.n_paths_ = c.n_paths();
  t.dim_ = bi.dim();
  const Matrix& u = c.matrix();
  for (int p = 0; p < c.n_paths(); ++p) {
    for (int i = 0; i < bi.dim(); ++i) {
      RoutingRow row{p, bi.mode(i), {}, 0.0};
      const Eigen::Index col = rail_index(p, i, bi.dim());
      row.norm_squared = u.col(col).squaredNorm();
      for (int q = 0; q < c.n_paths(); ++q) {
        for (int j = 0; j < bo.dim(); ++j) {
          Complex a = u(rail_index(q, j, bo.dim()), col);
          if (std::abs(a) > threshold) row.targets.push_back({q, bo.mode(j), a});
        }
      }
      t.rows_.push_back(std::move(row));
    }
  }
  return t;
}

const RoutingRow& PortRoutingTable::row(int in_path, ModeIndex in_mode) const {
  for (const RoutingRow& r : rows_)
    if (r.in_path == in_path && r.in_mode == in_mode) return r;
  throw std::invalid_argument("routing table: no row for path " + std::to_string(in_path) +
                              " mode " + to_string(in_mode));
}

PortRoutingTable routing_table(const Circuit& c) {
  return PortRoutingTable::from_circuit(c);
}

int element_count(const Circuit& c) { return c.total_cost(); }

Matrix hx_block_matrix(int n) {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix m(2 * n, 2 * n);
  Matrix id = Matrix::Identity(n, n);
  m.topLeftCorner(n, n) = s * id;
  m.topRightCorner(n, n) = s * id;
  m.bottomLeftCorner(n, n) = s * id;
  m.bottomRightCorner(n, n) = -s * id;
  return m;
}

Matrix hy_block_matrix(int n) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  Matrix m(2 * n, 2 * n);
  Matrix id = Matrix::Identity(n, n);
  m.topLeftCorner(n, n) = s * id;
  m.topRightCorner(n, n) = s * i * id;
  m.bottomLeftCorner(n, n) = s * i * id;
  m.bottomRightCorner(n, n) = s * id;
  return m;
}

Matrix phase_block_matrix(double theta, int n) {
  Matrix m = Matrix::Identity(2 * n, 2 * n);
  m.bottomRightCorner(n, n) *= std::polar(1.0, theta);
  return m;
}

Matrix helicity_sort_columns(const BasisSpec& basis, int n_paths, int path_pos,
                             int path_neg) {
  const int d = basis.dim();
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(n_paths) * d, d);
  for (int i = 0; i < d; ++i) {
    const int ell = basis.mode(i).ell;
    if (ell == 0)
      throw std::invalid_argument("helicity_sort_columns: ell = 0 has no defined port");
    s(rail_index(ell > 0 ? path_pos : path_neg, i, d), i) = 1.0;
  }
  return s;
}

RailState apply(const Circuit& c, const RailState& s) {
  if (!(s.basis() == c.input_basis()) || s.n_paths() != c.n_paths())
    throw std::invalid_argument("apply: state does not match the circuit's input space");
  return RailState(c.output_basis(), c.n_paths(), c.matrix() * s.amplitudes(),
                   s.subnormalized());
}

RailDensity apply(const Circuit& c, const RailDensity& rho) {
  if (!(rho.basis() == c.input_basis()) || rho.n_paths() != c.n_paths())
    throw std::invalid_argument("apply: density does not match the circuit's input space");
  return RailDensity(c.output_basis(), c.n_paths(),
                     c.matrix() * rho.matrix() * c.matrix().adjoint());
}

}  // namespace oam
