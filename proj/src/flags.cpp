#include "aqsim/flags.hpp"

#include <cmath>
#include <stdexcept>

#include "aqsim/kernels.hpp"

namespace aqsim {

int64_t FlagHistory::active_count(int t) const {
  const FlagVector& f = snapshots.at(t);
  return static_cast<int64_t>(kernels::count_nonzero(f.data(), f.size()));
}

FlagHistory run_flags(int num_sites, int depth, double p, const FlagVector& initial,
                      uint64_t seed, Boundary boundary) {
  FlagHistory hist;
  hist.num_sites = num_sites;
  hist.snapshots.reserve(depth + 1);
  const int reached =
      run_flags_visit(num_sites, depth, p, initial, seed, boundary,
                      [&](int, const FlagVector& f) { hist.snapshots.push_back(f); });
  // an absorbed run stays absorbed; pad the remaining snapshots
  for (int t = reached + 1; t <= depth; ++t) {
    hist.snapshots.push_back(FlagVector(num_sites, 0));
  }
  return hist;
}

namespace {

std::optional<int> single_seed_site(const FlagVector& initial) {
  int site = -1;
  int count = 0;
  for (int i = 0; i < static_cast<int>(initial.size()); ++i) {
    if (initial[i]) {
      ++count;
      site = i;
    }
  }
  if (count == 1) return site;
  return std::nullopt;
}

double spread_ratio(const FlagVector& f, int seed_site) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < static_cast<int>(f.size()); ++i) {
    if (f[i]) {
      const double d = i - seed_site;
      num += d * d;
      den += 1.0;
    }
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace

FlagStatsAccumulator::FlagStatsAccumulator(int num_sites, int depth,
                                           std::optional<int> seed_site)
    : num_sites_(num_sites), depth_(depth), seed_site_(seed_site) {
  sum_n_.assign(depth + 1, 0.0);
  sum_n2_.assign(depth + 1, 0.0);
  survivors_.assign(depth + 1, 0);
  if (seed_site_) sum_r2_.assign(depth + 1, 0.0);
}

void FlagStatsAccumulator::accumulate(double p, uint64_t seed,
                                      const FlagVector& initial, Boundary boundary) {
  const int reached = run_flags_visit(
      num_sites_, depth_, p, initial, seed, boundary,
      [&](int t, const FlagVector& f) {
        const auto n = static_cast<double>(
            kernels::count_nonzero(f.data(), f.size()));
        sum_n_[t] += n;
        sum_n2_[t] += n * n;
        if (n > 0) {
          ++survivors_[t];
          if (seed_site_) sum_r2_[t] += spread_ratio(f, *seed_site_);
        }
      });
  (void)reached;  // absorbed tail contributes zeros, already accounted
  ++n_;
}

FlagEnsembleStats FlagStatsAccumulator::finish() const {
  FlagEnsembleStats out;
  const auto n = static_cast<double>(n_);
  out.t.resize(depth_ + 1);
  out.mean_particles.resize(depth_ + 1);
  out.sem_particles.resize(depth_ + 1);
  out.density.resize(depth_ + 1);
  out.survival.resize(depth_ + 1);
  if (seed_site_) out.mean_square_spread.emplace(depth_ + 1, 0.0);
  for (int t = 0; t <= depth_; ++t) {
    out.t[t] = t;
    const double mean = sum_n_[t] / n;
    out.mean_particles[t] = mean;
    const double var = std::max(0.0, sum_n2_[t] / n - mean * mean);
    out.sem_particles[t] = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    out.density[t] = mean / num_sites_;
    out.survival[t] = survivors_[t] / n;
    if (seed_site_ && survivors_[t] > 0) {
      (*out.mean_square_spread)[t] = sum_r2_[t] / survivors_[t];
    }
  }
  return out;
}

FlagEnsembleStats flag_observables(std::span<const FlagHistory> histories) {
  if (histories.empty()) {
    throw std::invalid_argument("flag_observables: empty ensemble");
  }
  const int L = histories.front().num_sites;
  const int depth = histories.front().depth();
  std::optional<int> seed = single_seed_site(histories.front().snapshots.front());
  for (const FlagHistory& h : histories) {
    if (h.num_sites != L || h.depth() != depth) {
      throw std::invalid_argument("flag_observables: inhomogeneous ensemble");
    }
    if (seed && single_seed_site(h.snapshots.front()) != seed) seed.reset();
  }
  FlagEnsembleStats out;
  const auto n_real = static_cast<double>(histories.size());
  out.t.resize(depth + 1);
  out.mean_particles.assign(depth + 1, 0.0);
  out.sem_particles.assign(depth + 1, 0.0);
  out.density.assign(depth + 1, 0.0);
  out.survival.assign(depth + 1, 0.0);
  std::vector<double> sum_n2(depth + 1, 0.0);
  std::vector<int64_t> survivors(depth + 1, 0);
  std::vector<double> sum_r2(depth + 1, 0.0);
  for (const FlagHistory& h : histories) {
    for (int t = 0; t <= depth; ++t) {
      const auto n = static_cast<double>(h.active_count(t));
      out.mean_particles[t] += n;
      sum_n2[t] += n * n;
      if (n > 0) {
        ++survivors[t];
        if (seed) sum_r2[t] += spread_ratio(h.snapshots[t], *seed);
      }
    }
  }
  if (seed) out.mean_square_spread.emplace(depth + 1, 0.0);
  for (int t = 0; t <= depth; ++t) {
    out.t[t] = t;
    const double mean = out.mean_particles[t] / n_real;
    out.mean_particles[t] = mean;
    const double var = std::max(0.0, sum_n2[t] / n_real - mean * mean);
    out.sem_particles[t] = n_real > 1 ? std::sqrt(var / (n_real - 1)) : 0.0;
    out.density[t] = mean / L;
    out.survival[t] = survivors[t] / n_real;
    if (seed && survivors[t] > 0) {
      (*out.mean_square_spread)[t] = sum_r2[t] / survivors[t];
    }
  }
  return out;
}

}  // namespace aqsim
