#pragma once

#include <Eigen/Dense>
#include <complex>

namespace aqsim::linalg {

// Thin wrappers over LAPACK (gesdd/geqrf/gelqf) with per-thread workspace
// reuse. Eigen's built-in decompositions are several times slower for the
// matrix sizes the MPS engine hits, and the long campaigns are SVD-bound.

template <class Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using RVec = Eigen::Vector<Real, Eigen::Dynamic>;

template <class Real>
struct Svd {
  CMat<Real> u;   // m x k, k = min(m, n)
  RVec<Real> s;   // descending
  CMat<Real> vh;  // k x n
};

template <class Real>
Svd<Real> svd(const CMat<Real>& x);

template <class Real>
RVec<Real> singular_values(const CMat<Real>& x);

// thin QR: x (m x n) = q (m x k) r (k x n), k = min(m, n)
template <class Real>
void qr_thin(const CMat<Real>& x, CMat<Real>& q, CMat<Real>& r);

// thin LQ: x (m x n) = l (m x k) q (k x n), k = min(m, n)
template <class Real>
void lq_thin(const CMat<Real>& x, CMat<Real>& l, CMat<Real>& q);

struct TruncationDecision {
  int rank = 0;
  double kept_weight = 0.0;       // sum of kept sigma^2
  double discarded_weight = 0.0;  // sum of discarded sigma^2
};

// keep at most max_rank values and drop anything below rel_cutoff * s_max;
// always keeps at least one value
template <class Real>
TruncationDecision decide_truncation(const RVec<Real>& s, int max_rank,
                                     double rel_cutoff);

}  // namespace aqsim::linalg
