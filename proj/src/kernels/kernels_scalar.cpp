#include <cmath>
#include <limits>

#include "kernel_table.hpp"

// Reference implementations. Plain loops, no reassociation tricks: these
// define the semantics the SIMD variants are tested against.
namespace wbar::kernels::detail {
namespace {

double sum_(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double max_val_(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > m) m = x[i];
  return m;
}

double l1_norm_(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double l1_diff_(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void mul_(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void div_(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] / b[i];
}

void axpy_(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_(double* dst, const double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = alpha * x[i];
}

void shift_add_(double* dst, const double* a, double alpha, const double* b,
                double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + alpha * b[i] + c;
}

void vexp_(double* dst, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(x[i]);
}

void vexp_plus_(double* dst, const double* x, const double* f, double c,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(x[i] + f[i] + c);
}

void vexp_scaled_(double* dst, const double* x, double alpha, double c,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(alpha * x[i] + c);
}

double lse_(const double* x, std::size_t n) {
  const double m = max_val_(x, n);
  if (!std::isfinite(m)) return m;  // all -inf (or a +inf input)
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

double lse_plus_(const double* x, const double* f, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i] + f[i];
    if (v > m) m = v;
  }
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] + f[i] - m);
  return m + std::log(s);
}

double xlogx_sum_(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > 0.0) s += x[i] * std::log(x[i]);
  return s;
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
  std::size_t idx = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = c[j] - v[j];
    if (d < best) {
      best = d;
      idx = j;
    }
  }
  if (argmin) *argmin = idx;
  return best;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t = {
      sum_,       dot_,        max_val_,     l1_norm_,   l1_diff_,
      mul_,       div_,        axpy_,        scale_,     shift_add_,
      vexp_,      vexp_plus_,  vexp_scaled_, lse_,       lse_plus_,
      xlogx_sum_, matvec_,     matvec_t_,    min_diff_,
  };
  return t;
}

}  // namespace wbar::kernels::detail
