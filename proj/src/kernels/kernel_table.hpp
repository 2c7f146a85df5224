#pragma once

#include <cstddef>

namespace wbar::kernels::detail {

// One function pointer per kernel; a backend fills the whole table.
struct KernelTable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*max_val)(const double*, std::size_t);
  double (*l1_norm)(const double*, std::size_t);
  double (*l1_diff)(const double*, const double*, std::size_t);
  void (*mul)(double*, const double*, const double*, std::size_t);
  void (*div)(double*, const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double*, const double*, double, std::size_t);
  void (*shift_add)(double*, const double*, double, const double*, double,
                    std::size_t);
  void (*vexp)(double*, const double*, std::size_t);
  void (*vexp_plus)(double*, const double*, const double*, double,
                    std::size_t);
  void (*vexp_scaled)(double*, const double*, double, double, std::size_t);
  double (*lse)(const double*, std::size_t);
  double (*lse_plus)(const double*, const double*, std::size_t);
  double (*xlogx_sum)(const double*, std::size_t);
  void (*matvec)(const double*, std::size_t, std::size_t, const double*,
                 double*);
  void (*matvec_t)(const double*, std::size_t, std::size_t, const double*,
                   double*);
  double (*min_diff)(const double*, const double*, std::size_t, std::size_t*);
};

const KernelTable& scalar_table();

#if defined(WBAR_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif

}  // namespace wbar::kernels::detail
