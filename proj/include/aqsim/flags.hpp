#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aqsim/circuit.hpp"

namespace aqsim {

using FlagVector = std::vector<uint8_t>;

struct FlagHistory {
  int num_sites = 0;
  std::vector<FlagVector> snapshots;  // depth+1 entries

  int depth() const { return static_cast<int>(snapshots.size()) - 1; }
  int64_t active_count(int t) const;
};

// Flags-only dynamics: per depth unit, OR each brickwork bond of the layer's
// parity, then kill each active site independently with probability p. The
// per-(layer, site) kill draws are the positional stream keyed by
// chain_seed(seed, kTagMeasure, 0), so running with an instance_seed replays
// exactly the measurement selections of that circuit instance.
FlagHistory run_flags(int num_sites, int depth, double p,
                      const FlagVector& initial, uint64_t seed,
                      Boundary boundary = Boundary::periodic);

// streaming form: visit(t, flags) is called for t = 0..depth (t = 0 is the
// initial configuration); returns the depth actually reached (early exit once
// every flag is dead, which the absorbing dynamics can never revive)
template <class Visitor>
int run_flags_visit(int num_sites, int depth, double p, const FlagVector& initial,
                    uint64_t seed, Boundary boundary, Visitor&& visit);

struct FlagEnsembleStats {
  std::vector<double> t;             // 0..depth
  std::vector<double> mean_particles;   // <N(t)> over all realizations
  std::vector<double> sem_particles;    // standard error of the mean
  std::vector<double> density;          // <N(t)> / L
  std::vector<double> survival;         // fraction with N(t) > 0
  // mean over surviving realizations of sum_i (i-i0)^2 f_i / sum_i f_i;
  // present only for single-seed ensembles
  std::optional<std::vector<double>> mean_square_spread;
};

// ensemble reduction over histories; throws if spread is requested (single
// seed detected at t=0) but initial conditions are inconsistent
FlagEnsembleStats flag_observables(std::span<const FlagHistory> histories);

// streaming accumulator equivalent of flag_observables for large campaigns
class FlagStatsAccumulator {
 public:
  FlagStatsAccumulator(int num_sites, int depth, std::optional<int> seed_site);
  // runs one realization and folds it in
  void accumulate(double p, uint64_t seed, const FlagVector& initial,
                  Boundary boundary = Boundary::periodic);
  FlagEnsembleStats finish() const;
  int64_t realizations() const { return n_; }

 private:
  int num_sites_;
  int depth_;
  std::optional<int> seed_site_;
  int64_t n_ = 0;
  std::vector<double> sum_n_, sum_n2_;
  std::vector<double> sum_r2_;
  std::vector<int64_t> survivors_;
};

}  // namespace aqsim

#include "aqsim/flags_impl.hpp"
