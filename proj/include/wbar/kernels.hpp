#pragma once

#include <cstddef>

// Dense double-precision primitives behind the numeric hot loops.
//
// Every operation has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The backend is chosen at runtime (CPU detection, WBAR_KERNELS
// env override, or an explicit select() call); the two variants are held to
// agree within floating-point reassociation noise by the equivalence tests.
namespace wbar::kernels {

enum class Backend { scalar, avx2 };

/// Backend currently routing all kernel calls.
Backend active();

/// Whether this build/CPU can run the given backend.
bool supported(Backend b);

/// Force a backend. Throws std::invalid_argument if unsupported here.
void select(Backend b);

/// Pick the best supported backend, honoring WBAR_KERNELS={scalar,avx2}.
void select_auto();

const char* name(Backend b);

double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double max_val(const double* x, std::size_t n);  // -inf for n == 0
double l1_norm(const double* x, std::size_t n);
double l1_diff(const double* a, const double* b, std::size_t n);

void mul(double* dst, const double* a, const double* b, std::size_t n);
void div(double* dst, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double* dst, const double* x, double alpha, std::size_t n);
/// dst[i] = a[i] + alpha * b[i] + c
void shift_add(double* dst, const double* a, double alpha, const double* b,
               double c, std::size_t n);

void vexp(double* dst, const double* x, std::size_t n);
/// dst[i] = exp(x[i] + f[i] + c)
void vexp_plus(double* dst, const double* x, const double* f, double c,
               std::size_t n);
/// dst[i] = exp(alpha * x[i] + c)
void vexp_scaled(double* dst, const double* x, double alpha, double c,
                 std::size_t n);

/// log(sum_i exp(x[i])), max-shifted. Returns -inf when all inputs are -inf.
double lse(const double* x, std::size_t n);
/// log(sum_i exp(x[i] + f[i]))
double lse_plus(const double* x, const double* f, std::size_t n);

/// sum_i x[i] * log(x[i]) with 0 log 0 = 0. Scalar on every backend.
double xlogx_sum(const double* x, std::size_t n);

/// y = A x for row-major A (rows x cols).
void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y);
/// y = A^T x for row-major A (rows x cols); y has cols entries.
void matvec_t(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y);

/// min_j (c[j] - v[j]) and the first attaining index (simplex pricing loop).
double min_diff(const double* c, const double* v, std::size_t n,
                std::size_t* argmin);

}  // namespace wbar::kernels
