// Composition of elements into the named interferometric devices: the
// parity OAM sorter, the Gouy-phase radial sorter, partial/odd/even/full
// helicity sorters, and the Hx / P(theta) / Hy gates built around the full
// helicity sorter.
//
// Port conventions. Circuits consume input on path 0 (port "a"). Sorter
// outputs are named ports; a routing table lists, per input mode, every
// output (path, mode, amplitude). Mach-Zehnder stages follow the splitter
// convention |a> -> (|a>+|b>)/sqrt2, |b> -> (|a>-|b>)/sqrt2, which leaves
// per-port phases on the raw cascades; the full-helicity-sorter factories
// insert fixed compensating elements (one phase plate for the SLM variant,
// one prism pair for the cascade variant) so that both variants realize the
// helicity-sorting permutation with amplitude exactly +1 on every mode.
//
// A second sorter "in series" means the beam re-enters the device through
// its output side; that traversal is Circuit::adjoint(), and adjoint(FHS)
// composed with FHS is the identity. Re-feeding the forward element list is
// not equivalent: auxiliary ports of the stages are only vacuum on the
// first pass.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oam/density.hpp"
#include "oam/elements.hpp"

namespace oam {

enum class FhsVariant { Slm, Cascade };

class Circuit {
 public:
  Circuit(std::string name, std::vector<OpticalElement> elements,
          std::map<std::string, int> ports);

  const std::string& name() const { return name_; }
  const std::vector<OpticalElement>& elements() const { return elements_; }
  int n_paths() const { return n_paths_; }
  const BasisSpec& input_basis() const { return input_basis_; }
  const BasisSpec& output_basis() const { return output_basis_; }
  // Ordered product of the element matrices,
  // (n_paths * dim_out) x (n_paths * dim_in); an isometry when widening.
  const Matrix& matrix() const { return matrix_; }
  int total_cost() const { return total_cost_; }
  bool widening() const { return !(output_basis_ == input_basis_); }

  const std::map<std::string, int>& ports() const { return ports_; }
  int port(const std::string& label) const;

  // Block mapping input path -> output path, dim_out x dim_in.
  Matrix port_unitary(int out_path, int in_path) const;

  // This circuit followed by `next` (bases and path counts must match up).
  Circuit then(const Circuit& next, std::string name = {}) const;
  // The device traversed in reverse; defined for non-widening circuits.
  Circuit adjoint(std::string name = {}) const;

  bool is_isometry(double tol = 1e-10) const;

 private:
  std::string name_;
  std::vector<OpticalElement> elements_;
  int n_paths_ = 0;
  BasisSpec input_basis_;
  BasisSpec output_basis_;
  Matrix matrix_;
  int total_cost_ = 0;
  std::map<std::string, int> ports_;
};

// Incremental element-list assembly; tracks the working basis through
// SLM widening stages.
class CircuitBuilder {
 public:
  CircuitBuilder(int n_paths, BasisSpec basis, bool allow_widening = true);

  const BasisSpec& basis() const { return basis_; }
  int n_paths() const { return n_paths_; }

  CircuitBuilder& add(OpticalElement e);
  CircuitBuilder& bbs(int path_a, int path_b);
  CircuitBuilder& dove(double beta, int path);
  CircuitBuilder& dove_pair(double relative_angle, int path);
  CircuitBuilder& gouy(double alpha, int path);
  CircuitBuilder& plate(double theta, int path);
  CircuitBuilder& slm(int k, int path);
  CircuitBuilder& swap(int path_a, int path_b);

  Circuit build(std::string name, std::map<std::string, int> ports) &&;

 private:
  int n_paths_;
  BasisSpec basis_;
  bool allow_widening_;
  std::vector<OpticalElement> elements_;
};

// --- Named devices -------------------------------------------------------

// Mach-Zehnder with a prism pair at relative angle beta in path 0.
// Output weights (1 + e^{i 2 l beta})/2 on port "a", (e^{i 2 l beta} - 1)/2
// on port "b"; beta = pi/2 sorts even from odd ell.
Circuit oam_sorter(double beta, const BasisSpec& basis);

// Mach-Zehnder with a Gouy lens stack (plus its constant-phase compensation
// plate) in path 0; interference weights use (|l| + 2p) alpha, so alpha =
// pi/2 sorts even from odd p at fixed even-|l| offset.
Circuit radial_mode_sorter(double alpha, const BasisSpec& basis);

// HS(alpha): Gouy stack + compensation + prism pair in path 0, giving the
// arm phase e^{i (|l| + l) alpha}. Negative modes never reach port "b".
Circuit partial_helicity_sorter(double alpha, const BasisSpec& basis);

// HS(pi/2): odd positive modes exit port "b", everything else port "a".
Circuit hs_odd(const BasisSpec& basis);

// Even-mode helicity sorter, SLM route: shift +1, sort odd, shift back on
// both ports. Widens the working basis by one unit in each direction.
Circuit hs_even_slm(const BasisSpec& basis);

// Even-mode helicity sorter, cascade route: N-1 partial helicity sorters
// (alpha = pi/4 ... pi/2^N) peel the positive modes, N-1 OAM sorters
// (beta = pi/4 ... pi/2^N) recombine them. Requires an even-only basis with
// ell_max < 2^N.
Circuit hs_even_cascade(int n_stages, const BasisSpec& basis);

// Full helicity sorter: parity sort, per-branch helicity sorters, two
// recombining OAM sorters, plus the fixed phase compensation. Routes every
// positive mode to port "+" and every negative mode to port "-" with
// amplitude exactly +1. For ell = 0 (outside the tomography domain) the SLM
// variant exits "+" and the cascade variant exits "-".
// n_stages defaults to the smallest N with ell_max < 2^N (at least 2).
Circuit full_helicity_sorter(const BasisSpec& basis, FhsVariant variant,
                             std::optional<int> n_stages = std::nullopt);

// Hadamard on every |+-l> pair: FHS, prism in the positive arm, splitter,
// prism again, reverse FHS. Single-port matrix [[1,1],[1,-1]]/sqrt2 in
// tomography block form.
Circuit gate_hx(const BasisSpec& basis, std::optional<int> n_stages = std::nullopt);

// P(theta) = diag(1, e^{i theta} 1): phase plate on the negative arm
// between an FHS and its reverse.
Circuit gate_phase(double theta, const BasisSpec& basis,
                   std::optional<int> n_stages = std::nullopt);

// Hy = P(pi/2) Hx P(pi/2), laid out with the inner sorter pairs cancelled:
// single-port matrix [[1, i],[i, 1]]/sqrt2.
Circuit gate_hy(const BasisSpec& basis, std::optional<int> n_stages = std::nullopt);

// --- Verification surface ------------------------------------------------

struct RoutingTarget {
  int out_path;
  ModeIndex out_mode;
  Complex amplitude;
};

struct RoutingRow {
  int in_path;
  ModeIndex in_mode;
  std::vector<RoutingTarget> targets;  // |amplitude| above threshold
  double norm_squared;                 // over all outputs, threshold or not
};

class PortRoutingTable {
 public:
  static PortRoutingTable from_circuit(const Circuit& c, double threshold = 1e-14);

  const std::vector<RoutingRow>& rows() const { return rows_; }
  const RoutingRow& row(int in_path, ModeIndex in_mode) const;

 private:
  std::vector<RoutingRow> rows_;
  int n_paths_ = 0;
  int dim_ = 0;
};

PortRoutingTable routing_table(const Circuit& c);
// Total component cost of the circuit.
int element_count(const Circuit& c);

// Reference block matrices of the gates on a tomography basis of dimension
// 2n: Hx = [[1,1],[1,-1]]/sqrt2, Hy = [[1,i],[i,1]]/sqrt2,
// P(theta) = diag(1, e^{i theta} 1).
Matrix hx_block_matrix(int n);
Matrix hy_block_matrix(int n);
Matrix phase_block_matrix(double theta, int n);
// Ideal helicity-sorter action on beams entering path 0 of an n_paths rail:
// |0> (x) |m> -> |port(m)> (x) |m| with amplitude +1. Returns the
// (n_paths * dim) x dim column block; used to cross-check FHS constructions.
Matrix helicity_sort_columns(const BasisSpec& basis, int n_paths, int path_pos,
                             int path_neg);

RailState apply(const Circuit& c, const RailState& s);
RailDensity apply(const Circuit& c, const RailDensity& rho);

}  // namespace oam
