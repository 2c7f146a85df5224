#include "wbar/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "kernel_table.hpp"

namespace wbar::kernels {
namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#if defined(WBAR_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &detail::scalar_table();
    case Backend::avx2:
#if defined(WBAR_HAVE_AVX2_TU)
      return &detail::avx2_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

struct State {
  const KernelTable* table;
  Backend backend;

  State() {
    backend = Backend::scalar;
    table = &detail::scalar_table();
    init_auto();
  }

  void init_auto() {
    Backend want = cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
    if (const char* env = std::getenv("WBAR_KERNELS")) {
      if (std::strcmp(env, "scalar") == 0) want = Backend::scalar;
      else if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2())
        want = Backend::avx2;
    }
    backend = want;
    table = table_for(want);
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

Backend active() { return state().backend; }

bool supported(Backend b) {
  if (b == Backend::scalar) return true;
  return cpu_has_avx2();
}

void select(Backend b) {
  if (!supported(b))
    throw std::invalid_argument(std::string("kernel backend unavailable: ") +
                                name(b));
  state().backend = b;
  state().table = table_for(b);
}

void select_auto() { state().init_auto(); }

const char* name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "?";
}

double sum(const double* x, std::size_t n) { return state().table->sum(x, n); }

double dot(const double* a, const double* b, std::size_t n) {
  return state().table->dot(a, b, n);
}

double max_val(const double* x, std::size_t n) {
  return state().table->max_val(x, n);
}

double l1_norm(const double* x, std::size_t n) {
  return state().table->l1_norm(x, n);
}

double l1_diff(const double* a, const double* b, std::size_t n) {
  return state().table->l1_diff(a, b, n);
}

void mul(double* dst, const double* a, const double* b, std::size_t n) {
  state().table->mul(dst, a, b, n);
}

void div(double* dst, const double* a, const double* b, std::size_t n) {
  state().table->div(dst, a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  state().table->axpy(alpha, x, y, n);
}

void scale(double* dst, const double* x, double alpha, std::size_t n) {
  state().table->scale(dst, x, alpha, n);
}

void shift_add(double* dst, const double* a, double alpha, const double* b,
               double c, std::size_t n) {
  state().table->shift_add(dst, a, alpha, b, c, n);
}

void vexp(double* dst, const double* x, std::size_t n) {
  state().table->vexp(dst, x, n);
}

void vexp_plus(double* dst, const double* x, const double* f, double c,
               std::size_t n) {
  state().table->vexp_plus(dst, x, f, c, n);
}

void vexp_scaled(double* dst, const double* x, double alpha, double c,
                 std::size_t n) {
  state().table->vexp_scaled(dst, x, alpha, c, n);
}

double lse(const double* x, std::size_t n) { return state().table->lse(x, n); }

double lse_plus(const double* x, const double* f, std::size_t n) {
  return state().table->lse_plus(x, f, n);
}

double xlogx_sum(const double* x, std::size_t n) {
  return state().table->xlogx_sum(x, n);
}

void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  state().table->matvec(a, rows, cols, x, y);
}

void matvec_t(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y) {
  state().table->matvec_t(a, rows, cols, x, y);
}

double min_diff(const double* c, const double* v, std::size_t n,
                std::size_t* argmin) {
  return state().table->min_diff(c, v, n, argmin);
}

}  // namespace wbar::kernels
