#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aqsim/mps.hpp"
#include "aqsim/statevector.hpp"
#include "aqsim/trajectory.hpp"

namespace aqsim {

// ensemble-averaged <n_i(t)>; rows t = 0..depth, cols = sites
struct OccupationGrid {
  int num_sites = 0;
  int depth = 0;
  int64_t samples = 0;
  std::vector<double> mean;  // (depth+1) x L row-major
  std::vector<double> sem;

  double at(int t, int i) const {
    return mean[static_cast<std::size_t>(t) * num_sites + i];
  }
};

struct ParticleSeries {
  std::vector<double> t;
  std::vector<double> n;    // <N(t)>
  std::vector<double> sem;  // standard error over the ensemble
};

struct DensityMatrix {
  Eigen::MatrixXcd rho;
  std::vector<int> sites;

  int subsystem_size() const { return static_cast<int>(sites.size()); }
  // throws unless Hermitian (1e-10), unit trace (1e-10), eigenvalues >= -1e-8
  void validate() const;
};

enum class EntropyProvenance { exact_state, tomography, mitigated };

struct EntropySample {
  int alpha = 2;
  double value = 0.0;  // bits
  EntropyProvenance provenance = EntropyProvenance::exact_state;
  int64_t circuit_id = -1;
  int64_t trajectory_id = -1;
};

std::string provenance_name(EntropyProvenance p);

// partial trace over the complement; any subset for the dense path
DensityMatrix reduced_density_matrix(const PureState& state,
                                     std::span<const int> subsystem);

// contiguous subsystem [first, first+count) for the MPS path; moves center
template <class Real>
DensityMatrix reduced_density_matrix(MpsStateT<Real>& mps, int first, int count);

// Renyi entropy in bits: alpha=1 is von Neumann, else log2(tr rho^alpha)/(1-alpha);
// eigenvalues are clipped to [0,1] (and at 1e-12 before alpha=1 logs)
EntropySample renyi_entropy(const DensityMatrix& rho, int alpha);

double renyi_from_probabilities(std::span<const double> probs, int alpha);

// exact entropies of a bipartition from Schmidt values (unnormalized ok)
double renyi_from_schmidt(std::span<const double> schmidt_values, int alpha);

std::pair<OccupationGrid, ParticleSeries> occupation_series(
    std::span<const TrajectoryResult> ensemble);

// streaming, order-insensitive (compensated) accumulation for campaigns
class OccupationAccumulator {
 public:
  OccupationAccumulator() = default;
  OccupationAccumulator(int num_sites, int depth);
  void add(const TrajectoryResult& r);
  void merge(const OccupationAccumulator& other);  // canonical order folds
  std::pair<OccupationGrid, ParticleSeries> finish() const;
  int64_t samples() const { return samples_; }

  // serialization for resumable campaign units
  std::vector<double> pack() const;
  static OccupationAccumulator unpack(int num_sites, int depth,
                                      std::span<const double> data);

 private:
  int num_sites_ = 0;
  int depth_ = 0;
  int64_t samples_ = 0;
  std::vector<double> cell_sum_, cell_sum_sq_, cell_comp_;
  std::vector<double> n_sum_, n_sum_sq_, n_comp_;
};

struct SampleStats {
  int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // population convention
  double mean_ci_low = 0.0, mean_ci_high = 0.0;
  double var_ci_low = 0.0, var_ci_high = 0.0;
};

// mean, population variance, percentile-bootstrap CIs (B resamples)
SampleStats aggregate_statistics(std::span<const double> samples, int bootstrap_b,
                                 double level, uint64_t seed);

}  // namespace aqsim
