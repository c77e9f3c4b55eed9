#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aqsim/observables.hpp"

namespace aqsim {

struct FitResult {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double intercept = 0.0;  // log-log intercept
  double window_lo = 0.0;
  double window_hi = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

// weighted least squares of log y on log t over t in [window_lo, window_hi];
// sigmas may be empty (unweighted). Decay fits return negative exponents.
FitResult fit_power_law(std::span<const double> t, std::span<const double> y,
                        std::span<const double> sigma_y, double window_lo,
                        double window_hi);

struct FrontSeries {
  std::vector<double> t;
  std::vector<double> radius;       // threshold-front radius r(t)
  std::vector<double> mean_square;  // sum_i (i-i0)^2 <n_i> / sum_i <n_i>
};

enum class SpreadingMethod { threshold, mean_square };

// builds the front series from a single-seed ensemble grid and fits the
// dynamical exponent: r ~ t^{1/z} (threshold) or <R^2> ~ t^{2/z}
std::pair<FrontSeries, FitResult> spreading_exponent(const OccupationGrid& grid,
                                                     int seed_site,
                                                     SpreadingMethod method,
                                                     double threshold,
                                                     double window_lo,
                                                     double window_hi);

// z value implied by a front fit (method-dependent transform of the slope)
double dynamical_exponent_from_fit(const FitResult& fit, SpreadingMethod method);
double dynamical_exponent_stderr(const FitResult& fit, SpreadingMethod method);

struct CriticalPointEstimate {
  double p_c = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string method;        // "variance-peak" | "loglog-linearity"
  bool boundary_flag = false;  // discrete maximum sat on the scan edge
};

// one scan point of the variance-peak estimator; samples grouped by circuit
// so the bootstrap can resample circuits (cluster bootstrap)
struct VarianceScanPoint {
  double p = 0.0;
  std::vector<std::vector<double>> samples_by_circuit;
};

CriticalPointEstimate locate_variance_peak(std::span<const VarianceScanPoint> scan,
                                           int bootstrap_b, double level,
                                           uint64_t seed);

// log-log linearity estimator for the absorbing transition: picks the p that
// maximizes R^2 of the power-law fit of N(t); chunk_curves[i] holds per-chunk
// mean N(t) curves so the bootstrap can resample chunks
struct LinearityScanPoint {
  double p = 0.0;
  std::vector<std::vector<double>> chunk_curves;  // [chunk][t]
};

CriticalPointEstimate locate_loglog_linearity_peak(
    std::span<const LinearityScanPoint> scan, double window_lo, double window_hi,
    int bootstrap_b, double level, uint64_t seed);

// percentile bootstrap of an arbitrary statistic
std::pair<double, double> bootstrap_ci(
    std::span<const double> samples,
    const std::function<double(std::span<const double>)>& statistic, int b,
    double level, uint64_t seed);

double population_variance(std::span<const double> samples);

}  // namespace aqsim
