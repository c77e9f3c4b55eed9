#include "aqsim/mps.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace aqsim {

void MpsOptions::validate() const {
  if (max_bond < 1) {
    throw std::invalid_argument(fmt::format("max_bond must be >= 1, got {}", max_bond));
  }
  if (!(truncation_cutoff >= 0.0 && truncation_cutoff < 1.0)) {
    throw std::invalid_argument("truncation_cutoff must be in [0,1)");
  }
}

template <class Real>
MpsStateT<Real>::MpsStateT(std::span<const uint8_t> bits, const MpsOptions& opts)
    : opts_(opts) {
  opts_.validate();
  const int L = static_cast<int>(bits.size());
  if (L < 2) throw std::invalid_argument("MPS needs at least 2 sites");
  tensors_.resize(L);
  for (int i = 0; i < L; ++i) {
    for (int s = 0; s < 2; ++s) {
      tensors_[i][s] = Mat::Zero(1, 1);
      if ((bits[i] ? 1 : 0) == s) tensors_[i][s](0, 0) = Cplx{1, 0};
    }
  }
  center_ = 0;
}

template <class Real>
void MpsStateT<Real>::orthogonalize_step_right() {
  const int c = center_;
  const auto& a0 = tensors_[c][0];
  const auto& a1 = tensors_[c][1];
  const auto chi_l = a0.rows();
  const auto chi_r = a0.cols();
  Mat m(2 * chi_l, chi_r);
  m.topRows(chi_l) = a0;
  m.bottomRows(chi_l) = a1;
  Mat q, r;
  linalg::qr_thin<Real>(m, q, r);
  const auto k = q.cols();
  tensors_[c][0] = q.topRows(chi_l);
  tensors_[c][1] = q.bottomRows(chi_l);
  tensors_[c + 1][0] = (r * tensors_[c + 1][0]).eval();
  tensors_[c + 1][1] = (r * tensors_[c + 1][1]).eval();
  (void)k;
  ++center_;
}

template <class Real>
void MpsStateT<Real>::orthogonalize_step_left() {
  const int c = center_;
  const auto& a0 = tensors_[c][0];
  const auto& a1 = tensors_[c][1];
  const auto chi_l = a0.rows();
  const auto chi_r = a0.cols();
  Mat m(chi_l, 2 * chi_r);
  m.leftCols(chi_r) = a0;
  m.rightCols(chi_r) = a1;
  Mat l, q;
  linalg::lq_thin<Real>(m, l, q);
  tensors_[c][0] = q.leftCols(chi_r);
  tensors_[c][1] = q.rightCols(chi_r);
  tensors_[c - 1][0] = (tensors_[c - 1][0] * l).eval();
  tensors_[c - 1][1] = (tensors_[c - 1][1] * l).eval();
  --center_;
}

template <class Real>
void MpsStateT<Real>::move_center_to(int site) {
  while (center_ < site) orthogonalize_step_right();
  while (center_ > site) orthogonalize_step_left();
}

template <class Real>
void MpsStateT<Real>::apply_gate_bond(int i, const Unitary4& u) {
  const int L = num_sites();
  if (i < 0 || i + 1 >= L) {
    throw std::invalid_argument(fmt::format("bond {} out of range", i));
  }
  if (center_ < i) move_center_to(i);
  if (center_ > i + 1) move_center_to(i + 1);

  const auto chi_l = tensors_[i][0].rows();
  const auto chi_m = tensors_[i][0].cols();
  const auto chi_r = tensors_[i + 1][0].cols();
  (void)chi_m;

  // theta blocks B[t][t'] = A_i[t] * A_{i+1}[t']
  Mat b[2][2];
  for (int t = 0; t < 2; ++t)
    for (int tp = 0; tp < 2; ++tp) b[t][tp] = tensors_[i][t] * tensors_[i + 1][tp];

  // gate on the physical pair, then assemble (2 chi_l) x (2 chi_r)
  Mat theta(2 * chi_l, 2 * chi_r);
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      Mat acc = Mat::Zero(chi_l, chi_r);
      for (int t = 0; t < 2; ++t) {
        for (int tp = 0; tp < 2; ++tp) {
          const cd coef = u[(2 * s + sp) * 4 + (2 * t + tp)];
          if (coef != cd{0.0, 0.0}) {
            acc.noalias() += Cplx(static_cast<Real>(coef.real()),
                                  static_cast<Real>(coef.imag())) * b[t][tp];
          }
        }
      }
      theta.block(s * chi_l, sp * chi_r, chi_l, chi_r) = acc;
    }
  }

  auto svd = linalg::svd<Real>(theta);
  const auto dec =
      linalg::decide_truncation<Real>(svd.s, opts_.max_bond, opts_.truncation_cutoff);
  const int r = dec.rank;
  discarded_ += dec.discarded_weight / (dec.kept_weight + dec.discarded_weight);

  // left tensor takes the isometry; right tensor absorbs (renormalized) S V^h
  const Real inv = static_cast<Real>(1.0 / std::sqrt(dec.kept_weight));
  tensors_[i][0] = svd.u.block(0, 0, chi_l, r);
  tensors_[i][1] = svd.u.block(chi_l, 0, chi_l, r);
  Mat sv = (svd.s.head(r).template cast<Cplx>() * inv).asDiagonal() * svd.vh.topRows(r);
  tensors_[i + 1][0] = sv.leftCols(chi_r);
  tensors_[i + 1][1] = sv.rightCols(chi_r);
  center_ = i + 1;
}

template <class Real>
void MpsStateT<Real>::apply_gate_ring(int a, int b, const Unitary4& u) {
  const int L = num_sites();
  if (b == a + 1) {
    apply_gate_bond(a, u);
    return;
  }
  if (!(a == L - 1 && b == 0)) {
    throw std::invalid_argument(
        fmt::format("apply_gate_ring: sites ({}, {}) are not a ring bond", a, b));
  }
  // route physical site 0 next to site L-1, apply, route back
  const Unitary4 sw = swap_gate();
  for (int k = 0; k + 2 < L; ++k) apply_gate_bond(k, sw);
  // position L-2 now holds site 0, position L-1 holds site L-1; the gate's
  // first slot is site a = L-1, so swap the qubit roles
  apply_gate_bond(L - 2, transpose_qubits(u));
  for (int k = L - 3; k >= 0; --k) apply_gate_bond(k, sw);
}

template <class Real>
double MpsStateT<Real>::local_expectation(int site) {
  move_center_to(site);
  const double n0 = tensors_[site][0].squaredNorm();
  const double n1 = tensors_[site][1].squaredNorm();
  const double total = n0 + n1;
  if (total <= 0.0) throw TrajectoryError("MPS norm collapsed to zero");
  return n1 / total;
}

template <class Real>
void MpsStateT<Real>::project(int site, int outcome, double prob) {
  if (prob <= 0.0) {
    throw TrajectoryError(
        fmt::format("zero-norm projection at site {} (engine bug)", site));
  }
  move_center_to(site);
  tensors_[site][1 - outcome].setZero();
  tensors_[site][outcome] *= static_cast<Real>(1.0 / std::sqrt(prob));
}

template <class Real>
void MpsStateT<Real>::apply_one_site(int site, const Unitary2& u) {
  move_center_to(site);
  const Mat a0 = tensors_[site][0];
  const Mat a1 = tensors_[site][1];
  const auto c = [](cd z) {
    return Cplx(static_cast<Real>(z.real()), static_cast<Real>(z.imag()));
  };
  tensors_[site][0] = c(u[0]) * a0 + c(u[1]) * a1;
  tensors_[site][1] = c(u[2]) * a0 + c(u[3]) * a1;
}

template <class Real>
void MpsStateT<Real>::scale(double factor) {
  tensors_[center_][0] *= static_cast<Real>(factor);
  tensors_[center_][1] *= static_cast<Real>(factor);
}

template <class Real>
double MpsStateT<Real>::norm() const {
  return std::sqrt(tensors_[center_][0].squaredNorm() +
                   tensors_[center_][1].squaredNorm());
}

template <class Real>
std::vector<double> MpsStateT<Real>::schmidt_values(int bond) {
  const int L = num_sites();
  if (bond < 1 || bond >= L) {
    throw std::invalid_argument(fmt::format("bond {} out of range [1,{})", bond, L));
  }
  move_center_to(bond - 1);
  const auto chi_l = tensors_[bond - 1][0].rows();
  const auto chi_r = tensors_[bond - 1][0].cols();
  Mat m(2 * chi_l, chi_r);
  m.topRows(chi_l) = tensors_[bond - 1][0];
  m.bottomRows(chi_l) = tensors_[bond - 1][1];
  const auto s = linalg::singular_values<Real>(m);
  std::vector<double> out(s.size());
  for (int i = 0; i < s.size(); ++i) out[i] = static_cast<double>(s(i));
  return out;
}

template <class Real>
int MpsStateT<Real>::bond_dim(int bond) const {
  return static_cast<int>(tensors_[bond][0].rows());
}

template <class Real>
int MpsStateT<Real>::max_bond_dim() const {
  int m = 1;
  for (int i = 0; i < num_sites(); ++i) m = std::max(m, bond_dim(i));
  return m;
}

template <class Real>
PureState MpsStateT<Real>::to_statevector() const {
  const int L = num_sites();
  if (L > 20) {
    throw std::invalid_argument("to_statevector limited to 20 sites");
  }
  // accumulate left-to-right: rows enumerate bitstrings (site 0 major)
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
  for (int i = 0; i < L; ++i) {
    const auto chi_r = tensors_[i][0].cols();
    Eigen::MatrixXcd next(acc.rows() * 2, chi_r);
    for (int s = 0; s < 2; ++s) {
      Eigen::MatrixXcd block = acc * tensors_[i][s].template cast<std::complex<double>>();
      for (Eigen::Index row = 0; row < acc.rows(); ++row) {
        next.row(2 * row + s) = block.row(row);
      }
    }
    acc = std::move(next);
  }
  PureState st;
  st.num_sites = L;
  st.amps.assign(acc.rows(), cd{0, 0});
  for (Eigen::Index k = 0; k < acc.rows(); ++k) st.amps[k] = acc(k, 0);
  return st;
}

template class MpsStateT<double>;
template class MpsStateT<float>;

template <class Real>
MeasurementRecord measure_and_feedback_mps(MpsStateT<Real>& mps, int site,
                                           CounterRng& rng, const NoiseModel& noise) {
  const double p1 = mps.local_expectation(site);
  const double u = rng.next_u01();
  int outcome;
  if (p1 < kZeroProbGuard) {
    outcome = 0;
  } else if (1.0 - p1 < kZeroProbGuard) {
    outcome = 1;
  } else {
    outcome = u < p1 ? 1 : 0;
  }
  mps.project(site, outcome, outcome ? p1 : 1.0 - p1);
  int recorded = outcome;
  if (noise.has_readout_noise()) {
    const double flip = outcome ? noise.readout_flip_1to0 : noise.readout_flip_0to1;
    if (rng.next_u01() < flip) recorded = 1 - recorded;
  }
  if (recorded == 1) mps.apply_one_site(site, pauli_x());
  return MeasurementRecord{-1, site, static_cast<uint8_t>(outcome),
                           static_cast<uint8_t>(recorded), recorded == 1};
}

template MeasurementRecord measure_and_feedback_mps<double>(MpsStateT<double>&, int,
                                                            CounterRng&,
                                                            const NoiseModel&);
template MeasurementRecord measure_and_feedback_mps<float>(MpsStateT<float>&, int,
                                                           CounterRng&,
                                                           const NoiseModel&);

template <class Real>
MpsBackend<Real>::MpsBackend(const CircuitInstance& inst, const MpsOptions& opts)
    : mps_([&] {
        auto [bits, flags] =
            initial_configuration(inst.spec.initial_state, inst.spec.num_sites);
        (void)flags;
        return MpsStateT<Real>(bits, opts);
      }()) {}

template <class Real>
void MpsBackend<Real>::occupation_row(double* out) {
  // one directed sweep; each step is a QR center move
  const int L = mps_.num_sites();
  if (mps_.center() > L / 2) {
    for (int i = L - 1; i >= 0; --i) out[i] = mps_.local_expectation(i);
  } else {
    for (int i = 0; i < L; ++i) out[i] = mps_.local_expectation(i);
  }
}

template class MpsBackend<double>;
template class MpsBackend<float>;

CircuitInstance strip_wrap_bonds(const CircuitInstance& inst) {
  CircuitInstance out = inst;
  const int L = inst.spec.num_sites;
  for (Layer& layer : out.layers) {
    std::erase_if(layer.gates, [L](const BondGate& g) {
      return g.site_a == L - 1 && g.site_b == 0;
    });
  }
  return out;
}

namespace {

template <class Real>
TrajectoryResult run_mps_impl(const CircuitInstance& inst, uint64_t trajectory_index,
                              const MpsOptions& opts, const TrajectoryOptions& topt,
                              MpsTrajectoryOutput* extras) {
  const bool open_override =
      opts.boundary_strategy == BoundaryStrategy::open_override &&
      inst.spec.boundary == Boundary::periodic;
  const CircuitInstance& effective = open_override ? strip_wrap_bonds(inst) : inst;
  MpsBackend<Real> backend(effective, opts);
  TrajectoryResult res = run_trajectory(effective, trajectory_index, backend, topt);
  if (extras != nullptr) {
    auto& mps = backend.state();
    const int L = mps.num_sites();
    extras->final_bond_dims.resize(L + 1);
    for (int b = 0; b <= L; ++b) {
      extras->final_bond_dims[b] = b < L ? mps.bond_dim(b) : 1;
    }
    extras->final_bipartite_entropy_s1.assign(L - 1, 0.0);
    extras->final_bipartite_entropy_s2.assign(L - 1, 0.0);
    for (int bond = L - 1; bond >= 1; --bond) {
      const auto sv = mps.schmidt_values(bond);
      double s1 = 0.0, s2 = 0.0;
      double total = 0.0;
      for (double v : sv) total += v * v;
      for (double v : sv) {
        const double w = v * v / total;
        if (w > 1e-15) s1 -= w * std::log2(w);
        s2 += w * w;
      }
      extras->final_bipartite_entropy_s1[bond - 1] = s1;
      extras->final_bipartite_entropy_s2[bond - 1] = -std::log2(s2);
    }
  }
  return res;
}

}  // namespace

TrajectoryResult run_trajectory_mps(const CircuitInstance& inst,
                                    uint64_t trajectory_index, const MpsOptions& opts,
                                    const TrajectoryOptions& topt) {
  if (opts.precision == MpsPrecision::f32) {
    return run_mps_impl<float>(inst, trajectory_index, opts, topt, nullptr);
  }
  return run_mps_impl<double>(inst, trajectory_index, opts, topt, nullptr);
}

MpsTrajectoryOutput run_trajectory_mps_with_entropies(const CircuitInstance& inst,
                                                      uint64_t trajectory_index,
                                                      const MpsOptions& opts,
                                                      const TrajectoryOptions& topt) {
  MpsTrajectoryOutput out;
  if (opts.precision == MpsPrecision::f32) {
    out.result = run_mps_impl<float>(inst, trajectory_index, opts, topt, &out);
  } else {
    out.result = run_mps_impl<double>(inst, trajectory_index, opts, topt, &out);
  }
  return out;
}

}  // namespace aqsim
