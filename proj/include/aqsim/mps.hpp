#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "aqsim/circuit.hpp"
#include "aqsim/dense_linalg.hpp"
#include "aqsim/gates.hpp"
#include "aqsim/rng.hpp"
#include "aqsim/statevector.hpp"
#include "aqsim/trajectory.hpp"

namespace aqsim {

enum class BoundaryStrategy {
  swap_routing,   // route the ring's wrap bond through nearest-neighbor swaps
  open_override,  // drop the wrap bond (open-chain execution of a ring spec)
};

enum class MpsPrecision { f64, f32 };

struct MpsOptions {
  int max_bond = 64;
  double truncation_cutoff = 1e-10;  // relative to the largest singular value
  BoundaryStrategy boundary_strategy = BoundaryStrategy::swap_routing;
  MpsPrecision precision = MpsPrecision::f64;

  void validate() const;
};

// Matrix-product state in mixed-canonical form: tensors left of the center
// are left-orthonormal, tensors right of it right-orthonormal. tensor(i, s)
// is the (chi_left x chi_right) matrix for physical value s at site i.
template <class Real>
class MpsStateT {
 public:
  using Cplx = std::complex<Real>;
  using Mat = linalg::CMat<Real>;

  MpsStateT(std::span<const uint8_t> bits, const MpsOptions& opts);

  int num_sites() const { return static_cast<int>(tensors_.size()); }
  int center() const { return center_; }
  const MpsOptions& options() const { return opts_; }

  void move_center_to(int site);

  // two-site gate on adjacent sites (i, i+1); SVD split, truncation to
  // max_bond and the relative cutoff, renormalization to unit norm
  void apply_gate_bond(int i, const Unitary4& u);

  // gate on ring bond (a, b); nearest-neighbor bonds go straight to
  // apply_gate_bond, the wrap bond (L-1, 0) is swap-routed (the swaps are
  // exact two-site gates subject to the same truncation)
  void apply_gate_ring(int a, int b, const Unitary4& u);

  // local occupation <n_site>; moves the center
  double local_expectation(int site);

  // zero the (1-outcome) branch and renormalize by 1/sqrt(prob)
  void project(int site, int outcome, double prob);

  void apply_one_site(int site, const Unitary2& u);
  void scale(double factor);

  double norm() const;  // contraction norm (Frobenius norm of center tensor)

  // Schmidt coefficients across bond k (between sites k-1 and k), descending
  std::vector<double> schmidt_values(int bond);

  int bond_dim(int bond) const;  // bond k sits between sites k-1 and k
  int max_bond_dim() const;
  double discarded_weight() const { return discarded_; }

  // dense amplitudes; site 0 = most significant bit (L <= 20)
  PureState to_statevector() const;

  const Mat& tensor(int site, int s) const { return tensors_[site][s]; }

 private:
  void orthogonalize_step_right();  // left-orthonormalize center, move right
  void orthogonalize_step_left();

  std::vector<std::array<Mat, 2>> tensors_;
  int center_ = 0;
  MpsOptions opts_;
  double discarded_ = 0.0;
};

using MpsState = MpsStateT<double>;
using MpsStateF = MpsStateT<float>;

// spec-surface free functions
template <class Real>
void apply_two_site_gate_mps(MpsStateT<Real>& mps, int bond, const Unitary4& u) {
  mps.apply_gate_bond(bond, u);
}

template <class Real>
MeasurementRecord measure_and_feedback_mps(MpsStateT<Real>& mps, int site,
                                           CounterRng& rng, const NoiseModel& noise);

template <class Real>
double local_expectation(MpsStateT<Real>& mps, int site) {
  return mps.local_expectation(site);
}

template <class Real>
PureState to_statevector(const MpsStateT<Real>& mps) {
  return mps.to_statevector();
}

// trajectory backend wrapping the MPS for the shared driver
template <class Real>
class MpsBackend {
 public:
  MpsBackend(const CircuitInstance& inst, const MpsOptions& opts);

  int num_sites() const { return mps_.num_sites(); }
  void apply_two_site(int a, int b, const Unitary4& u) { mps_.apply_gate_ring(a, b, u); }
  void apply_one_site(int site, const Unitary2& u) { mps_.apply_one_site(site, u); }
  double prob_one(int site) { return mps_.local_expectation(site); }
  void project(int site, int outcome, double prob) { mps_.project(site, outcome, prob); }
  void scale_state(double s) { mps_.scale(s); }
  void occupation_row(double* out);
  double norm_error() { return std::abs(1.0 - mps_.norm()); }
  double discarded_weight() const { return mps_.discarded_weight(); }

  MpsStateT<Real>& state() { return mps_; }

 private:
  MpsStateT<Real> mps_;
};

// Runs one MPS trajectory. With open_override the wrap bonds are removed
// from the executed schedule (counts refer to the reduced schedule).
TrajectoryResult run_trajectory_mps(const CircuitInstance& inst,
                                    uint64_t trajectory_index,
                                    const MpsOptions& opts,
                                    const TrajectoryOptions& topt = {});

// variant exposing the final state (always materialized in double precision)
struct MpsTrajectoryOutput {
  TrajectoryResult result;
  std::vector<double> final_bipartite_entropy_s1;  // bonds 1..L-1, bits
  std::vector<double> final_bipartite_entropy_s2;
  std::vector<int> final_bond_dims;
};

MpsTrajectoryOutput run_trajectory_mps_with_entropies(
    const CircuitInstance& inst, uint64_t trajectory_index, const MpsOptions& opts,
    const TrajectoryOptions& topt = {});

// instance with wrap bonds dropped (open-chain execution of a ring spec)
CircuitInstance strip_wrap_bonds(const CircuitInstance& inst);

}  // namespace aqsim
