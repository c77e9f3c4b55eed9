#include "aqsim/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aqsim/rng.hpp"

namespace aqsim {

FitResult fit_power_law(std::span<const double> t, std::span<const double> y,
                        std::span<const double> sigma_y, double window_lo,
                        double window_hi) {
  if (t.size() != y.size() || (!sigma_y.empty() && sigma_y.size() != y.size())) {
    throw std::invalid_argument("fit_power_law: size mismatch");
  }
  if (!(window_lo < window_hi)) {
    throw std::invalid_argument("fit_power_law: window_lo must be < window_hi");
  }
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window_lo || t[i] > window_hi || t[i] <= 0.0) continue;
    if (!(y[i] > 0.0)) {
      throw std::invalid_argument(
          fmt::format("fit_power_law: non-positive value y({}) = {}", t[i], y[i]));
    }
    xs.push_back(std::log(t[i]));
    ys.push_back(std::log(y[i]));
    if (sigma_y.empty()) {
      ws.push_back(1.0);
    } else {
      const double rel = sigma_y[i] > 0 ? sigma_y[i] / y[i] : 0.0;
      ws.push_back(rel > 0 ? 1.0 / (rel * rel) : 1.0);
    }
  }
  const int n = static_cast<int>(xs.size());
  if (n < 4) {
    throw std::invalid_argument(
        fmt::format("fit_power_law: need >= 4 points in window, got {}", n));
  }
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sw += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
    sxx += ws[i] * xs[i] * xs[i];
    sxy += ws[i] * xs[i] * ys[i];
  }
  const double delta = sw * sxx - sx * sx;
  if (!(delta > 0)) throw std::invalid_argument("fit_power_law: degenerate window");
  const double slope = (sw * sxy - sx * sy) / delta;
  const double intercept = (sxx * sy - sx * sxy) / delta;

  double rss = 0.0, tss = 0.0;
  const double ybar = sy / sw;
  for (int i = 0; i < n; ++i) {
    const double r = ys[i] - (slope * xs[i] + intercept);
    rss += ws[i] * r * r;
    tss += ws[i] * (ys[i] - ybar) * (ys[i] - ybar);
  }
  double slope_var;
  if (sigma_y.empty()) {
    // residual-based error estimate
    slope_var = n > 2 ? (rss / (n - 2)) * (sw / delta) : 0.0;
  } else {
    slope_var = sw / delta;
  }
  FitResult out;
  out.exponent = slope;
  out.stderr_exponent = std::sqrt(std::max(0.0, slope_var));
  out.intercept = intercept;
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  out.r_squared = tss > 0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;
  out.n_points = n;
  return out;
}

std::pair<FrontSeries, FitResult> spreading_exponent(const OccupationGrid& grid,
                                                     int seed_site,
                                                     SpreadingMethod method,
                                                     double threshold,
                                                     double window_lo,
                                                     double window_hi) {
  if (seed_site < 0 || seed_site >= grid.num_sites) {
    throw std::invalid_argument("spreading_exponent: seed site out of range");
  }
  FrontSeries series;
  for (int t = 1; t <= grid.depth; ++t) {
    double num = 0.0, den = 0.0;
    double radius = 0.0;
    bool any = false;
    for (int i = 0; i < grid.num_sites; ++i) {
      const double v = grid.at(t, i);
      const double d = i - seed_site;
      num += d * d * v;
      den += v;
      if (v >= threshold) {
        any = true;
        radius = std::max(radius, std::abs(d));
      }
    }
    if (den <= 0.0 || (method == SpreadingMethod::threshold && !any)) {
      break;  // extinct front truncates the series
    }
    series.t.push_back(t);
    series.radius.push_back(radius);
    series.mean_square.push_back(num / den);
  }
  const auto& ys =
      method == SpreadingMethod::threshold ? series.radius : series.mean_square;
  // r(t) can be zero at early times while the cluster sits on the seed
  std::vector<double> ts, vals;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    if (ys[i] > 0.0) {
      ts.push_back(series.t[i]);
      vals.push_back(ys[i]);
    }
  }
  FitResult fit = fit_power_law(ts, vals, {}, window_lo, window_hi);
  return {series, fit};
}

double dynamical_exponent_from_fit(const FitResult& fit, SpreadingMethod method) {
  const double s = fit.exponent;
  return method == SpreadingMethod::threshold ? 1.0 / s : 2.0 / s;
}

double dynamical_exponent_stderr(const FitResult& fit, SpreadingMethod method) {
  const double s = fit.exponent;
  const double num = method == SpreadingMethod::threshold ? 1.0 : 2.0;
  return num * fit.stderr_exponent / (s * s);
}

namespace {

// vertex of the parabola through up to five points centered on the argmax;
// falls back to the discrete maximum for degenerate windows
double quadratic_peak(std::span<const double> xs, std::span<const double> ys,
                      std::size_t argmax) {
  const std::size_t n = xs.size();
  const std::size_t lo = argmax >= 2 ? argmax - 2 : 0;
  const std::size_t hi = std::min(n, argmax + 3);
  if (hi - lo < 3) return xs[argmax];
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, sy = 0, sxy = 0, sxxy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double x = xs[i] - xs[argmax];
    const double y = ys[i];
    s0 += 1;
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
    sy += y;
    sxy += x * y;
    sxxy += x * x * y;
  }
  // solve [s0 s1 s2; s1 s2 s3; s2 s3 s4] [c b a]^T = [sy sxy sxxy]^T
  const double d = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) +
                   s2 * (s1 * s3 - s2 * s2);
  if (std::abs(d) < 1e-30) return xs[argmax];
  const double b = (s0 * (sxy * s4 - s3 * sxxy) - sy * (s1 * s4 - s2 * s3) +
                    s2 * (s1 * sxxy - sxy * s2)) /
                   d;
  const double a = (s0 * (s2 * sxxy - sxy * s3) - s1 * (s1 * sxxy - sxy * s2) +
                    sy * (s1 * s3 - s2 * s2)) /
                   d;
  if (a >= 0.0) return xs[argmax];  // not a maximum
  double vertex = xs[argmax] - b / (2.0 * a);
  const double left = xs[argmax > 0 ? argmax - 1 : 0];
  const double right = xs[std::min(n - 1, argmax + 1)];
  return std::clamp(vertex, left, right);
}

}  // namespace

CriticalPointEstimate locate_variance_peak(std::span<const VarianceScanPoint> scan,
                                           int bootstrap_b, double level,
                                           uint64_t seed) {
  if (scan.size() < 5) {
    throw std::invalid_argument("locate_variance_peak: need >= 5 scan points");
  }
  std::vector<double> ps, vars;
  for (const auto& pt : scan) {
    std::vector<double> pooled;
    for (const auto& c : pt.samples_by_circuit) {
      pooled.insert(pooled.end(), c.begin(), c.end());
    }
    if (pooled.size() < 2) {
      throw std::invalid_argument("locate_variance_peak: point with < 2 samples");
    }
    ps.push_back(pt.p);
    vars.push_back(population_variance(pooled));
  }
  const std::size_t argmax =
      std::max_element(vars.begin(), vars.end()) - vars.begin();
  CriticalPointEstimate est;
  est.method = "variance-peak";
  est.boundary_flag = argmax == 0 || argmax + 1 == vars.size();
  est.p_c = est.boundary_flag ? ps[argmax] : quadratic_peak(ps, vars, argmax);

  // cluster bootstrap: resample circuits within each p
  CounterRng rng(chain_seed(seed, kTagBootstrap, 1));
  std::vector<double> peaks(bootstrap_b);
  std::vector<double> bvars(scan.size());
  for (int b = 0; b < bootstrap_b; ++b) {
    for (std::size_t ip = 0; ip < scan.size(); ++ip) {
      const auto& groups = scan[ip].samples_by_circuit;
      const auto nc = static_cast<uint32_t>(groups.size());
      std::vector<double> pooled;
      for (uint32_t c = 0; c < nc; ++c) {
        const auto& g = groups[rng.next_index(nc)];
        pooled.insert(pooled.end(), g.begin(), g.end());
      }
      bvars[ip] = pooled.size() >= 2 ? population_variance(pooled) : 0.0;
    }
    const std::size_t am = std::max_element(bvars.begin(), bvars.end()) - bvars.begin();
    peaks[b] = (am == 0 || am + 1 == bvars.size()) ? ps[am]
                                                   : quadratic_peak(ps, bvars, am);
  }
  std::sort(peaks.begin(), peaks.end());
  const double tail = (1.0 - level) / 2.0;
  est.ci_low = peaks[static_cast<std::size_t>(tail * (peaks.size() - 1))];
  est.ci_high = peaks[static_cast<std::size_t>((1.0 - tail) * (peaks.size() - 1))];
  est.ci_low = std::min(est.ci_low, est.p_c);
  est.ci_high = std::max(est.ci_high, est.p_c);
  return est;
}

namespace {

double linearity_r2(const std::vector<double>& mean_curve, double window_lo,
                    double window_hi) {
  std::vector<double> ts(mean_curve.size());
  for (std::size_t t = 0; t < mean_curve.size(); ++t) ts[t] = static_cast<double>(t);
  const FitResult fit = fit_power_law(ts, mean_curve, {}, window_lo, window_hi);
  return fit.r_squared;
}

std::vector<double> average_curves(const std::vector<std::vector<double>>& curves,
                                   const std::vector<uint32_t>* pick) {
  std::vector<double> mean(curves.front().size(), 0.0);
  const std::size_t n = pick ? pick->size() : curves.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = pick ? curves[(*pick)[i]] : curves[i];
    for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += c[t];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  return mean;
}

}  // namespace

CriticalPointEstimate locate_loglog_linearity_peak(
    std::span<const LinearityScanPoint> scan, double window_lo, double window_hi,
    int bootstrap_b, double level, uint64_t seed) {
  if (scan.size() < 3) {
    throw std::invalid_argument("linearity peak: need >= 3 scan points");
  }
  std::vector<double> ps, r2s;
  for (const auto& pt : scan) {
    ps.push_back(pt.p);
    r2s.push_back(linearity_r2(average_curves(pt.chunk_curves, nullptr), window_lo,
                               window_hi));
  }
  const std::size_t argmax = std::max_element(r2s.begin(), r2s.end()) - r2s.begin();
  CriticalPointEstimate est;
  est.method = "loglog-linearity";
  est.boundary_flag = argmax == 0 || argmax + 1 == r2s.size();
  est.p_c = est.boundary_flag ? ps[argmax] : quadratic_peak(ps, r2s, argmax);

  CounterRng rng(chain_seed(seed, kTagBootstrap, 2));
  std::vector<double> peaks(bootstrap_b);
  std::vector<double> br2(scan.size());
  std::vector<uint32_t> pick;
  for (int b = 0; b < bootstrap_b; ++b) {
    for (std::size_t ip = 0; ip < scan.size(); ++ip) {
      const auto nc = static_cast<uint32_t>(scan[ip].chunk_curves.size());
      pick.resize(nc);
      for (auto& idx : pick) idx = rng.next_index(nc);
      br2[ip] = linearity_r2(average_curves(scan[ip].chunk_curves, &pick),
                             window_lo, window_hi);
    }
    const std::size_t am = std::max_element(br2.begin(), br2.end()) - br2.begin();
    peaks[b] =
        (am == 0 || am + 1 == br2.size()) ? ps[am] : quadratic_peak(ps, br2, am);
  }
  std::sort(peaks.begin(), peaks.end());
  const double tail = (1.0 - level) / 2.0;
  est.ci_low = peaks[static_cast<std::size_t>(tail * (peaks.size() - 1))];
  est.ci_high = peaks[static_cast<std::size_t>((1.0 - tail) * (peaks.size() - 1))];
  est.ci_low = std::min(est.ci_low, est.p_c);
  est.ci_high = std::max(est.ci_high, est.p_c);
  return est;
}

std::pair<double, double> bootstrap_ci(
    std::span<const double> samples,
    const std::function<double(std::span<const double>)>& statistic, int b,
    double level, uint64_t seed) {
  if (samples.size() < 2) {
    throw std::invalid_argument("bootstrap_ci: need >= 2 samples");
  }
  CounterRng rng(chain_seed(seed, kTagBootstrap, 3));
  const auto n = static_cast<uint32_t>(samples.size());
  std::vector<double> resample(n);
  std::vector<double> stats(b);
  for (int i = 0; i < b; ++i) {
    for (uint32_t j = 0; j < n; ++j) resample[j] = samples[rng.next_index(n)];
    stats[i] = statistic(resample);
  }
  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - level) / 2.0;
  const double lo = stats[static_cast<std::size_t>(tail * (stats.size() - 1))];
  const double hi = stats[static_cast<std::size_t>((1.0 - tail) * (stats.size() - 1))];
  return {lo, hi};
}

double population_variance(std::span<const double> samples) {
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double acc = 0.0;
  for (double v : samples) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(samples.size());
}

}  // namespace aqsim
