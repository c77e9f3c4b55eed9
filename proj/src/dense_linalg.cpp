#include "aqsim/dense_linalg.hpp"

#include <lapacke.h>

#include <stdexcept>
#include <vector>

namespace aqsim::linalg {

namespace {

template <class Real>
struct Work {
  std::vector<std::complex<Real>> cwork;
  std::vector<Real> rwork;
  std::vector<lapack_int> iwork;
  std::vector<std::complex<Real>> scratch;
};

template <class Real>
Work<Real>& work() {
  thread_local Work<Real> w;
  return w;
}

inline lapack_complex_double* lp(std::complex<double>* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}
inline lapack_complex_float* lp(std::complex<float>* p) {
  return reinterpret_cast<lapack_complex_float*>(p);
}

template <class Real>
lapack_int gesdd(char jobz, lapack_int m, lapack_int n, std::complex<Real>* a,
                 Real* s, std::complex<Real>* u, std::complex<Real>* vt);

template <>
lapack_int gesdd<double>(char jobz, lapack_int m, lapack_int n,
                         std::complex<double>* a, double* s,
                         std::complex<double>* u, std::complex<double>* vt) {
  auto& w = work<double>();
  const lapack_int mn = std::min(m, n);
  w.rwork.resize(std::max<std::size_t>(
      1, static_cast<std::size_t>(mn) * std::max(5 * mn + 7, 2 * (m > n ? m : n) + 2 * mn + 1)));
  w.iwork.resize(8 * mn);
  std::complex<double> q;
  lapack_int info = LAPACKE_zgesdd_work(LAPACK_COL_MAJOR, jobz, m, n, lp(a), m,
                                        s, lp(u), m, lp(vt), mn, lp(&q), -1,
                                        w.rwork.data(), w.iwork.data());
  if (info != 0) return info;
  const auto lwork = static_cast<lapack_int>(q.real());
  if (static_cast<lapack_int>(w.cwork.size()) < lwork) w.cwork.resize(lwork);
  return LAPACKE_zgesdd_work(LAPACK_COL_MAJOR, jobz, m, n, lp(a), m, s, lp(u),
                             m, lp(vt), mn, lp(w.cwork.data()),
                             static_cast<lapack_int>(w.cwork.size()),
                             w.rwork.data(), w.iwork.data());
}

template <>
lapack_int gesdd<float>(char jobz, lapack_int m, lapack_int n,
                        std::complex<float>* a, float* s, std::complex<float>* u,
                        std::complex<float>* vt) {
  auto& w = work<float>();
  const lapack_int mn = std::min(m, n);
  w.rwork.resize(std::max<std::size_t>(
      1, static_cast<std::size_t>(mn) * std::max(5 * mn + 7, 2 * (m > n ? m : n) + 2 * mn + 1)));
  w.iwork.resize(8 * mn);
  std::complex<float> q;
  lapack_int info = LAPACKE_cgesdd_work(LAPACK_COL_MAJOR, jobz, m, n, lp(a), m,
                                        s, lp(u), m, lp(vt), mn, lp(&q), -1,
                                        w.rwork.data(), w.iwork.data());
  if (info != 0) return info;
  const auto lwork = static_cast<lapack_int>(q.real());
  if (static_cast<lapack_int>(w.cwork.size()) < lwork) w.cwork.resize(lwork);
  return LAPACKE_cgesdd_work(LAPACK_COL_MAJOR, jobz, m, n, lp(a), m, s, lp(u),
                             m, lp(vt), mn, lp(w.cwork.data()),
                             static_cast<lapack_int>(w.cwork.size()),
                             w.rwork.data(), w.iwork.data());
}

template <class Real>
lapack_int geqrf_ungqr(lapack_int m, lapack_int n, std::complex<Real>* a,
                       std::complex<Real>* r, lapack_int k);

// factor a (m x n) in place into thin Q (m x k); fills r (k x n) first
template <>
lapack_int geqrf_ungqr<double>(lapack_int m, lapack_int n,
                               std::complex<double>* a, std::complex<double>* r,
                               lapack_int k) {
  std::vector<std::complex<double>> tau(k);
  lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, m, n, lp(a), m, lp(tau.data()));
  if (info != 0) return info;
  for (lapack_int j = 0; j < n; ++j) {
    for (lapack_int i = 0; i < k; ++i) {
      r[i + static_cast<std::size_t>(j) * k] =
          i <= j ? a[i + static_cast<std::size_t>(j) * m] : std::complex<double>{0, 0};
    }
  }
  return LAPACKE_zungqr(LAPACK_COL_MAJOR, m, k, k, lp(a), m, lp(tau.data()));
}

template <>
lapack_int geqrf_ungqr<float>(lapack_int m, lapack_int n, std::complex<float>* a,
                              std::complex<float>* r, lapack_int k) {
  std::vector<std::complex<float>> tau(k);
  lapack_int info = LAPACKE_cgeqrf(LAPACK_COL_MAJOR, m, n, lp(a), m, lp(tau.data()));
  if (info != 0) return info;
  for (lapack_int j = 0; j < n; ++j) {
    for (lapack_int i = 0; i < k; ++i) {
      r[i + static_cast<std::size_t>(j) * k] =
          i <= j ? a[i + static_cast<std::size_t>(j) * m] : std::complex<float>{0, 0};
    }
  }
  return LAPACKE_cungqr(LAPACK_COL_MAJOR, m, k, k, lp(a), m, lp(tau.data()));
}

template <class Real>
lapack_int gelqf_unglq(lapack_int m, lapack_int n, std::complex<Real>* a,
                       std::complex<Real>* l, lapack_int k);

template <>
lapack_int gelqf_unglq<double>(lapack_int m, lapack_int n,
                               std::complex<double>* a, std::complex<double>* l,
                               lapack_int k) {
  std::vector<std::complex<double>> tau(k);
  lapack_int info = LAPACKE_zgelqf(LAPACK_COL_MAJOR, m, n, lp(a), m, lp(tau.data()));
  if (info != 0) return info;
  for (lapack_int j = 0; j < k; ++j) {
    for (lapack_int i = 0; i < m; ++i) {
      l[i + static_cast<std::size_t>(j) * m] =
          i >= j ? a[i + static_cast<std::size_t>(j) * m] : std::complex<double>{0, 0};
    }
  }
  return LAPACKE_zunglq(LAPACK_COL_MAJOR, k, n, k, lp(a), m, lp(tau.data()));
}

template <>
lapack_int gelqf_unglq<float>(lapack_int m, lapack_int n, std::complex<float>* a,
                              std::complex<float>* l, lapack_int k) {
  std::vector<std::complex<float>> tau(k);
  lapack_int info = LAPACKE_cgelqf(LAPACK_COL_MAJOR, m, n, lp(a), m, lp(tau.data()));
  if (info != 0) return info;
  for (lapack_int j = 0; j < k; ++j) {
    for (lapack_int i = 0; i < m; ++i) {
      l[i + static_cast<std::size_t>(j) * m] =
          i >= j ? a[i + static_cast<std::size_t>(j) * m] : std::complex<float>{0, 0};
    }
  }
  return LAPACKE_cunglq(LAPACK_COL_MAJOR, k, n, k, lp(a), m, lp(tau.data()));
}

}  // namespace

template <class Real>
Svd<Real> svd(const CMat<Real>& x) {
  const auto m = static_cast<lapack_int>(x.rows());
  const auto n = static_cast<lapack_int>(x.cols());
  const lapack_int k = std::min(m, n);
  Svd<Real> out;
  out.u.resize(m, k);
  out.s.resize(k);
  out.vh.resize(k, n);
  CMat<Real> a = x;
  const lapack_int info =
      gesdd<Real>('S', m, n, a.data(), out.s.data(), out.u.data(), out.vh.data());
  if (info != 0) {
    throw std::runtime_error("gesdd failed with info " + std::to_string(info));
  }
  return out;
}

template <class Real>
RVec<Real> singular_values(const CMat<Real>& x) {
  const auto m = static_cast<lapack_int>(x.rows());
  const auto n = static_cast<lapack_int>(x.cols());
  RVec<Real> s(std::min(m, n));
  CMat<Real> a = x;
  const lapack_int info =
      gesdd<Real>('N', m, n, a.data(), s.data(), nullptr, nullptr);
  if (info != 0) {
    throw std::runtime_error("gesdd failed with info " + std::to_string(info));
  }
  return s;
}

template <class Real>
void qr_thin(const CMat<Real>& x, CMat<Real>& q, CMat<Real>& r) {
  const auto m = static_cast<lapack_int>(x.rows());
  const auto n = static_cast<lapack_int>(x.cols());
  const lapack_int k = std::min(m, n);
  q = x;
  r.resize(k, n);
  const lapack_int info = geqrf_ungqr<Real>(m, n, q.data(), r.data(), k);
  if (info != 0) {
    throw std::runtime_error("geqrf/ungqr failed with info " + std::to_string(info));
  }
  q.conservativeResize(m, k);
}

template <class Real>
void lq_thin(const CMat<Real>& x, CMat<Real>& l, CMat<Real>& q) {
  const auto m = static_cast<lapack_int>(x.rows());
  const auto n = static_cast<lapack_int>(x.cols());
  const lapack_int k = std::min(m, n);
  CMat<Real> a = x;
  l.resize(m, k);
  const lapack_int info = gelqf_unglq<Real>(m, n, a.data(), l.data(), k);
  if (info != 0) {
    throw std::runtime_error("gelqf/unglq failed with info " + std::to_string(info));
  }
  q = a.topRows(k);
}

template <class Real>
TruncationDecision decide_truncation(const RVec<Real>& s, int max_rank,
                                     double rel_cutoff) {
  TruncationDecision d;
  const int k = static_cast<int>(s.size());
  const double smax = k > 0 ? static_cast<double>(s(0)) : 0.0;
  const double floor = smax * rel_cutoff;
  int r = 0;
  while (r < k && r < max_rank && static_cast<double>(s(r)) > floor) ++r;
  if (r == 0 && k > 0) r = 1;
  d.rank = r;
  for (int i = 0; i < k; ++i) {
    const double w = static_cast<double>(s(i)) * static_cast<double>(s(i));
    if (i < r) {
      d.kept_weight += w;
    } else {
      d.discarded_weight += w;
    }
  }
  return d;
}

template Svd<double> svd<double>(const CMat<double>&);
template Svd<float> svd<float>(const CMat<float>&);
template RVec<double> singular_values<double>(const CMat<double>&);
template RVec<float> singular_values<float>(const CMat<float>&);
template void qr_thin<double>(const CMat<double>&, CMat<double>&, CMat<double>&);
template void qr_thin<float>(const CMat<float>&, CMat<float>&, CMat<float>&);
template void lq_thin<double>(const CMat<double>&, CMat<double>&, CMat<double>&);
template void lq_thin<float>(const CMat<float>&, CMat<float>&, CMat<float>&);
template TruncationDecision decide_truncation<double>(const RVec<double>&, int, double);
template TruncationDecision decide_truncation<float>(const RVec<float>&, int, double);

}  // namespace aqsim::linalg
