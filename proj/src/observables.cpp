#include "aqsim/observables.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqsim {

namespace {

void kahan_add(double& sum, double& comp, double value) {
  const double y = value - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace

std::string provenance_name(EntropyProvenance p) {
  switch (p) {
    case EntropyProvenance::exact_state:
      return "exact-state";
    case EntropyProvenance::tomography:
      return "tomography";
    case EntropyProvenance::mitigated:
      return "mitigated";
  }
  return "?";
}

void DensityMatrix::validate() const {
  const auto n = rho.rows();
  if (rho.cols() != n || n != (Eigen::Index{1} << sites.size())) {
    throw std::invalid_argument("density matrix dimension mismatch");
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10) {
    throw std::invalid_argument(
        fmt::format("density matrix not Hermitian (deviation {})", herm));
  }
  const double tr = std::abs(rho.trace() - std::complex<double>{1.0, 0.0});
  if (tr > 1e-10) {
    throw std::invalid_argument(
        fmt::format("density matrix trace deviates from 1 by {}", tr));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) {
    throw std::invalid_argument(
        fmt::format("density matrix not PSD (min eigenvalue {}); apply "
                    "psd_project first",
                    es.eigenvalues().minCoeff()));
  }
}

DensityMatrix reduced_density_matrix(const PureState& state,
                                     std::span<const int> subsystem) {
  const int k = static_cast<int>(subsystem.size());
  if (k == 0 || k > 10) {
    throw std::invalid_argument(
        fmt::format("subsystem size {} outside supported range [1,10]", k));
  }
  for (int s : subsystem) {
    if (s < 0 || s >= state.num_sites) {
      throw std::invalid_argument(fmt::format("subsystem site {} out of range", s));
    }
  }
  const int L = state.num_sites;
  const int ne = L - k;
  std::vector<int> sub_bits(k);
  for (int j = 0; j < k; ++j) sub_bits[j] = state.bit_of_site(subsystem[j]);
  std::vector<int> env_bits;
  {
    std::vector<bool> in_sub(L, false);
    for (int b : sub_bits) in_sub[b] = true;
    for (int b = 0; b < L; ++b) {
      if (!in_sub[b]) env_bits.push_back(b);
    }
  }
  const std::size_t dk = std::size_t{1} << k;
  DensityMatrix out;
  out.sites.assign(subsystem.begin(), subsystem.end());
  out.rho = Eigen::MatrixXcd::Zero(dk, dk);
  Eigen::VectorXcd v(dk);
  const std::size_t de = std::size_t{1} << ne;
  for (std::size_t env = 0; env < de; ++env) {
    std::size_t env_idx = 0;
    for (int j = 0; j < ne; ++j) {
      if ((env >> j) & 1) env_idx |= std::size_t{1} << env_bits[j];
    }
    for (std::size_t a = 0; a < dk; ++a) {
      std::size_t idx = env_idx;
      // subsystem config a: bit j of a corresponds to subsystem[j]
      for (int j = 0; j < k; ++j) {
        if ((a >> (k - 1 - j)) & 1) idx |= std::size_t{1} << sub_bits[j];
      }
      v(a) = state.amps[idx];
    }
    out.rho.noalias() += v * v.adjoint();
  }
  return out;
}

template <class Real>
DensityMatrix reduced_density_matrix(MpsStateT<Real>& mps, int first, int count) {
  const int L = mps.num_sites();
  if (count <= 0 || count > 10 || first < 0 || first + count > L) {
    throw std::invalid_argument(
        fmt::format("contiguous subsystem [{}..{}) invalid for {} sites", first,
                    first + count, L));
  }
  mps.move_center_to(first);
  using Mat = typename MpsStateT<Real>::Mat;
  // grow open-physical-index block; phys combo p is site-major (first site =
  // most significant bit), matching the dense convention
  std::vector<Mat> block(2);
  block[0] = mps.tensor(first, 0);
  block[1] = mps.tensor(first, 1);
  for (int j = 1; j < count; ++j) {
    std::vector<Mat> next(block.size() * 2);
    for (std::size_t p = 0; p < block.size(); ++p) {
      for (int s = 0; s < 2; ++s) {
        next[p * 2 + s] = block[p] * mps.tensor(first + j, s);
      }
    }
    block = std::move(next);
  }
  const std::size_t dk = block.size();
  DensityMatrix out;
  out.sites.resize(count);
  for (int j = 0; j < count; ++j) out.sites[j] = first + j;
  out.rho.resize(dk, dk);
  for (std::size_t a = 0; a < dk; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      std::complex<double> acc = 0.0;
      const auto& ma = block[a];
      const auto& mb = block[b];
      for (Eigen::Index cidx = 0; cidx < ma.cols(); ++cidx) {
        for (Eigen::Index ridx = 0; ridx < ma.rows(); ++ridx) {
          acc += static_cast<std::complex<double>>(ma(ridx, cidx)) *
                 std::conj(static_cast<std::complex<double>>(mb(ridx, cidx)));
        }
      }
      out.rho(a, b) = acc;
      out.rho(b, a) = std::conj(acc);
    }
  }
  // guard against accumulated truncation drift
  const double tr = out.rho.trace().real();
  if (tr > 0) out.rho /= tr;
  return out;
}

template DensityMatrix reduced_density_matrix<double>(MpsStateT<double>&, int, int);
template DensityMatrix reduced_density_matrix<float>(MpsStateT<float>&, int, int);

double renyi_from_probabilities(std::span<const double> probs, int alpha) {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  if (alpha == 1) {
    double s = 0.0;
    for (double p : probs) {
      const double q = std::clamp(p, 0.0, 1.0);
      if (q > 1e-12) s -= q * std::log2(q);
    }
    return s;
  }
  double tr = 0.0;
  for (double p : probs) {
    const double q = std::clamp(p, 0.0, 1.0);
    tr += std::pow(q, alpha);
  }
  if (tr <= 0.0) tr = 1e-300;
  return std::log2(tr) / (1.0 - alpha);
}

double renyi_from_schmidt(std::span<const double> schmidt_values, int alpha) {
  double total = 0.0;
  for (double v : schmidt_values) total += v * v;
  std::vector<double> probs(schmidt_values.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = schmidt_values[i] * schmidt_values[i] / total;
  }
  return renyi_from_probabilities(probs, alpha);
}

EntropySample renyi_entropy(const DensityMatrix& rho, int alpha) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.rho, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-8) {
    throw std::invalid_argument(
        fmt::format("renyi_entropy: non-PSD input (min eigenvalue {}); apply "
                    "psd_project first",
                    min_eig));
  }
  std::vector<double> probs(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
  EntropySample out;
  out.alpha = alpha;
  out.value = renyi_from_probabilities(probs, alpha);
  return out;
}

std::pair<OccupationGrid, ParticleSeries> occupation_series(
    std::span<const TrajectoryResult> ensemble) {
  if (ensemble.empty()) {
    throw std::invalid_argument("occupation_series: empty ensemble");
  }
  const int L = ensemble.front().num_sites;
  const int depth = ensemble.front().depth;
  OccupationAccumulator acc(L, depth);
  for (const TrajectoryResult& r : ensemble) {
    if (r.num_sites != L || r.depth != depth) {
      throw std::invalid_argument("occupation_series: inhomogeneous ensemble");
    }
    acc.add(r);
  }
  return acc.finish();
}

OccupationAccumulator::OccupationAccumulator(int num_sites, int depth)
    : num_sites_(num_sites), depth_(depth) {
  const std::size_t cells = static_cast<std::size_t>(depth + 1) * num_sites;
  cell_sum_.assign(cells, 0.0);
  cell_sum_sq_.assign(cells, 0.0);
  cell_comp_.assign(2 * cells, 0.0);
  n_sum_.assign(depth + 1, 0.0);
  n_sum_sq_.assign(depth + 1, 0.0);
  n_comp_.assign(2 * (depth + 1), 0.0);
}

void OccupationAccumulator::add(const TrajectoryResult& r) {
  if (r.occupation.empty()) {
    throw std::invalid_argument("trajectory carries no occupation profile");
  }
  const std::size_t cells = cell_sum_.size();
  for (std::size_t c = 0; c < cells; ++c) {
    const double v = r.occupation[c];
    kahan_add(cell_sum_[c], cell_comp_[c], v);
    kahan_add(cell_sum_sq_[c], cell_comp_[cells + c], v * v);
  }
  for (int t = 0; t <= depth_; ++t) {
    const double n = r.total_particles(t);
    kahan_add(n_sum_[t], n_comp_[t], n);
    kahan_add(n_sum_sq_[t], n_comp_[depth_ + 1 + t], n * n);
  }
  ++samples_;
}

void OccupationAccumulator::merge(const OccupationAccumulator& other) {
  if (other.num_sites_ != num_sites_ || other.depth_ != depth_) {
    throw std::invalid_argument("accumulator shape mismatch");
  }
  const std::size_t cells = cell_sum_.size();
  for (std::size_t c = 0; c < cells; ++c) {
    kahan_add(cell_sum_[c], cell_comp_[c], other.cell_sum_[c]);
    kahan_add(cell_sum_sq_[c], cell_comp_[cells + c], other.cell_sum_sq_[c]);
  }
  for (int t = 0; t <= depth_; ++t) {
    kahan_add(n_sum_[t], n_comp_[t], other.n_sum_[t]);
    kahan_add(n_sum_sq_[t], n_comp_[depth_ + 1 + t], other.n_sum_sq_[t]);
  }
  samples_ += other.samples_;
}

std::pair<OccupationGrid, ParticleSeries> OccupationAccumulator::finish() const {
  if (samples_ == 0) throw std::invalid_argument("no samples accumulated");
  OccupationGrid grid;
  grid.num_sites = num_sites_;
  grid.depth = depth_;
  grid.samples = samples_;
  const auto n = static_cast<double>(samples_);
  const std::size_t cells = cell_sum_.size();
  grid.mean.resize(cells);
  grid.sem.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double mean = cell_sum_[c] / n;
    grid.mean[c] = mean;
    const double var = std::max(0.0, cell_sum_sq_[c] / n - mean * mean);
    grid.sem[c] = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  }
  ParticleSeries series;
  series.t.resize(depth_ + 1);
  series.n.resize(depth_ + 1);
  series.sem.resize(depth_ + 1);
  for (int t = 0; t <= depth_; ++t) {
    series.t[t] = t;
    const double mean = n_sum_[t] / n;
    series.n[t] = mean;
    const double var = std::max(0.0, n_sum_sq_[t] / n - mean * mean);
    series.sem[t] = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  }
  return {grid, series};
}

std::vector<double> OccupationAccumulator::pack() const {
  std::vector<double> out;
  out.reserve(1 + cell_sum_.size() * 2 + n_sum_.size() * 2);
  out.push_back(static_cast<double>(samples_));
  out.insert(out.end(), cell_sum_.begin(), cell_sum_.end());
  out.insert(out.end(), cell_sum_sq_.begin(), cell_sum_sq_.end());
  out.insert(out.end(), n_sum_.begin(), n_sum_.end());
  out.insert(out.end(), n_sum_sq_.begin(), n_sum_sq_.end());
  return out;
}

OccupationAccumulator OccupationAccumulator::unpack(int num_sites, int depth,
                                                    std::span<const double> data) {
  OccupationAccumulator acc(num_sites, depth);
  const std::size_t cells = acc.cell_sum_.size();
  const std::size_t rows = depth + 1;
  if (data.size() != 1 + 2 * cells + 2 * rows) {
    throw std::invalid_argument("packed accumulator has wrong size");
  }
  std::size_t o = 0;
  acc.samples_ = static_cast<int64_t>(data[o++]);
  for (std::size_t c = 0; c < cells; ++c) acc.cell_sum_[c] = data[o++];
  for (std::size_t c = 0; c < cells; ++c) acc.cell_sum_sq_[c] = data[o++];
  for (std::size_t t = 0; t < rows; ++t) acc.n_sum_[t] = data[o++];
  for (std::size_t t = 0; t < rows; ++t) acc.n_sum_sq_[t] = data[o++];
  return acc;
}

SampleStats aggregate_statistics(std::span<const double> samples, int bootstrap_b,
                                 double level, uint64_t seed) {
  if (samples.size() < 2) {
    throw std::invalid_argument("aggregate_statistics needs >= 2 samples");
  }
  SampleStats st;
  st.count = static_cast<int64_t>(samples.size());
  double sum = 0.0, comp = 0.0;
  for (double v : samples) kahan_add(sum, comp, v);
  st.mean = sum / st.count;
  double ss = 0.0, comp2 = 0.0;
  for (double v : samples) kahan_add(ss, comp2, (v - st.mean) * (v - st.mean));
  st.variance = ss / st.count;  // population convention

  CounterRng rng(chain_seed(seed, kTagBootstrap, 0));
  const auto n = static_cast<uint32_t>(samples.size());
  std::vector<double> means(bootstrap_b), vars(bootstrap_b);
  for (int b = 0; b < bootstrap_b; ++b) {
    double m = 0.0, m2 = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
      const double v = samples[rng.next_index(n)];
      m += v;
      m2 += v * v;
    }
    m /= n;
    means[b] = m;
    vars[b] = std::max(0.0, m2 / n - m * m);
  }
  std::sort(means.begin(), means.end());
  std::sort(vars.begin(), vars.end());
  const double tail = (1.0 - level) / 2.0;
  const auto pick = [&](const std::vector<double>& v, double q) {
    const auto idx = static_cast<std::size_t>(
        std::clamp(q * (v.size() - 1), 0.0, double(v.size() - 1)));
    return v[idx];
  };
  st.mean_ci_low = pick(means, tail);
  st.mean_ci_high = pick(means, 1.0 - tail);
  st.var_ci_low = pick(vars, tail);
  st.var_ci_high = pick(vars, 1.0 - tail);
  return st;
}

}  // namespace aqsim
