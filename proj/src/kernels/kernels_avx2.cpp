#if defined(WBAR_HAVE_AVX2_TU)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "kernel_table.hpp"

// AVX2+FMA variants. Compiled with -mavx2 -mfma in this TU only; the
// dispatcher guards entry with a runtime CPU check.
namespace wbar::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_min_sd(lo, sh));
}

// exp for 4 doubles, Cephes-style rational approximation with 2^n scaling.
// Inputs below the underflow cutoff return exactly 0; above the overflow
// cutoff they saturate at the cutoff's exp.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi_cut = _mm256_set1_pd(709.782712893383996843);
  const __m256d lo_cut = _mm256_set1_pd(-708.396418532264106224);
  const __m256d zero_cut = _mm256_set1_pd(-745.2);
  const __m256d log2e = _mm256_set1_pd(1.44269504088896340736);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  const __m256d zero_mask = _mm256_cmp_pd(x, zero_cut, _CMP_LT_OQ);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  xc = _mm256_fnmadd_pd(n, ln2_hi, xc);
  xc = _mm256_fnmadd_pd(n, ln2_lo, xc);

  const __m256d xx = _mm256_mul_pd(xc, xc);
  __m256d px = _mm256_fmadd_pd(p0, xx, p1);
  px = _mm256_fmadd_pd(px, xx, p2);
  px = _mm256_mul_pd(px, xc);
  __m256d qx = _mm256_fmadd_pd(q0, xx, q1);
  qx = _mm256_fmadd_pd(qx, xx, q2);
  qx = _mm256_fmadd_pd(qx, xx, q3);
  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // scale by 2^n through the exponent field
  __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i nl = _mm256_cvtepi32_epi64(ni);
  nl = _mm256_slli_epi64(_mm256_add_epi64(nl, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(nl));

  return _mm256_andnot_pd(zero_mask, r);
}

double sum_(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double max_val_(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4)
      acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    m = hmax(acc);
  }
  for (; i < n; ++i)
    if (x[i] > m) m = x[i];
  return m;
}

double l1_norm_(const double* x, std::size_t n) {
  const __m256d absmask =
      _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_and_pd(absmask, _mm256_loadu_pd(x + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double l1_diff_(const double* a, const double* b, std::size_t n) {
  const __m256d absmask =
      _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_and_pd(absmask, d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void mul_(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void div_(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_div_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) dst[i] = a[i] / b[i];
}

void axpy_(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                               _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_(double* dst, const double* x, double alpha, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) dst[i] = alpha * x[i];
}

void shift_add_(double* dst, const double* a, double alpha, const double* b,
                double c, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_fmadd_pd(va, _mm256_loadu_pd(b + i),
                                _mm256_loadu_pd(a + i));
    _mm256_storeu_pd(dst + i, _mm256_add_pd(t, vc));
  }
  for (; i < n; ++i) dst[i] = a[i] + alpha * b[i] + c;
}

void vexp_(double* dst, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, exp_pd(_mm256_loadu_pd(x + i)));
  if (i < n) {
    double buf[4] = {0, 0, 0, 0};
    for (std::size_t k = i; k < n; ++k) buf[k - i] = x[k];
    double out[4];
    _mm256_storeu_pd(out, exp_pd(_mm256_loadu_pd(buf)));
    for (std::size_t k = i; k < n; ++k) dst[k] = out[k - i];
  }
}

void vexp_plus_(double* dst, const double* x, const double* f, double c,
                std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(f + i));
    _mm256_storeu_pd(dst + i, exp_pd(_mm256_add_pd(t, vc)));
  }
  for (; i < n; ++i) {
    double buf[4] = {x[i] + f[i] + c, 0, 0, 0};
    double out[4];
    _mm256_storeu_pd(out, exp_pd(_mm256_loadu_pd(buf)));
    dst[i] = out[0];
  }
}

void vexp_scaled_(double* dst, const double* x, double alpha, double c,
                  std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vc);
    _mm256_storeu_pd(dst + i, exp_pd(t));
  }
  for (; i < n; ++i) {
    double buf[4] = {alpha * x[i] + c, 0, 0, 0};
    double out[4];
    _mm256_storeu_pd(out, exp_pd(_mm256_loadu_pd(buf)));
    dst[i] = out[0];
  }
}

double lse_(const double* x, std::size_t n) {
  const double m = max_val_(x, n);
  if (!std::isfinite(m)) return m;
  const __m256d vm = _mm256_set1_pd(m);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vm)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

double lse_plus_(const double* x, const double* f, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vmax = _mm256_add_pd(_mm256_loadu_pd(x), _mm256_loadu_pd(f));
    for (i = 4; i + 4 <= n; i += 4)
      vmax = _mm256_max_pd(
          vmax, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(f + i)));
    m = hmax(vmax);
  }
  for (; i < n; ++i) {
    const double v = x[i] + f[i];
    if (v > m) m = v;
  }
  if (!std::isfinite(m)) return m;

  const __m256d vm = _mm256_set1_pd(m);
  __m256d acc = _mm256_setzero_pd();
  for (i = 0; i + 4 <= n; i += 4) {
    __m256d t = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(f + i));
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(t, vm)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::exp(x[i] + f[i] - m);
  return m + std::log(s);
}

void matvec_(const double* a, std::size_t rows, std::size_t cols,
             const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_(a + i * cols, x, cols);
}

void matvec_t_(const double* a, std::size_t rows, std::size_t cols,
               const double* x, double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy_(x[i], a + i * cols, y, cols);
}

double min_diff_(const double* c, const double* v, std::size_t n,
                 std::size_t* argmin) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vbest =
        _mm256_sub_pd(_mm256_loadu_pd(c), _mm256_loadu_pd(v));
    for (i = 4; i + 4 <= n; i += 4)
      vbest = _mm256_min_pd(vbest, _mm256_sub_pd(_mm256_loadu_pd(c + i),
                                                 _mm256_loadu_pd(v + i)));
    best = hmin(vbest);
  }
  for (; i < n; ++i) {
    const double d = c[i] - v[i];
    if (d < best) best = d;
  }
  if (argmin) {
    // second pass: first index attaining the minimum (same subtraction, so
    // the comparison is exact)
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (c[j] - v[j] == best) {
        idx = j;
        break;
      }
    }
    *argmin = idx;
  }
  return best;
}

double xlogx_sum_(const double* x, std::size_t n) {
  // log stays scalar; this runs once per value evaluation, not per sweep
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > 0.0) s += x[i] * std::log(x[i]);
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t = {
      sum_,       dot_,        max_val_,     l1_norm_,   l1_diff_,
      mul_,       div_,        axpy_,        scale_,     shift_add_,
      vexp_,      vexp_plus_,  vexp_scaled_, lse_,       lse_plus_,
      xlogx_sum_, matvec_,     matvec_t_,    min_diff_,
  };
  return t;
}

}  // namespace wbar::kernels::detail

#endif  // WBAR_HAVE_AVX2_TU
