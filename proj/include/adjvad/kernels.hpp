#pragma once

// Data-parallel inner loops used by the wavelet transform and the MLP.
//
// Every kernel exists as a portable scalar reference and, on x86-64, as an
// AVX2+FMA variant. The active table is chosen once at startup from CPUID and
// can be overridden with ADJVAD_KERNELS=scalar|avx2 or select_backend().
// Double-precision entry points always run the scalar reference; they back the
// 64-bit gradient-check mode.

#include <cstddef>
#include <string_view>

namespace adjvad::kernels {

enum class Backend { scalar, avx2 };

/// Strided GEMM: C = alpha * A * B + beta * C.
/// A is m x k, element (i, p) at a[i * a_rs + p * a_cs]; B is k x n likewise;
/// C is m x n row-major with leading dimension ldc. beta == 0 overwrites C
/// without reading it.
template <typename T>
struct Gemm {
  std::size_t m = 0, n = 0, k = 0;
  T alpha = T(1);
  const T* a = nullptr;
  std::ptrdiff_t a_rs = 0, a_cs = 0;
  const T* b = nullptr;
  std::ptrdiff_t b_rs = 0, b_cs = 0;
  T beta = T(0);
  T* c = nullptr;
  std::ptrdiff_t ldc = 0;
};

struct Table {
  Backend backend;
  std::string_view name;

  void (*gemm_f32)(const Gemm<float>&);

  // z[r, j] += bias[j]; s = sin(omega * z); dz = omega * cos(omega * z).
  // dz may be null. z, s, dz are rows x cols row-major and may alias s == z.
  void (*bias_sine_f32)(float* z, std::size_t rows, std::size_t cols,
                        const float* bias, float omega, float* s, float* dz);

  // y[r] = dot(x[r, :], w) + bias
  void (*dot_rows_f32)(const float* x, std::size_t rows, std::size_t cols,
                       const float* w, float bias, float* y);

  // acc[j] += sum_r weight[r] * x[r, j]; weight == null means all ones.
  void (*weighted_col_sum_f32)(const float* x, std::size_t rows,
                               std::size_t cols, const float* weight,
                               float* acc);

  // out[r, j] = u[r] * v[j] * scale[r, j]
  void (*outer_scaled_f32)(const float* u, std::size_t rows, const float* v,
                           std::size_t cols, const float* scale, float* out);

  // a[i] *= b[i]
  void (*mul_inplace_f32)(float* a, const float* b, std::size_t n);

  // Bias-corrected Adam update over a flat vector. step_size and the two
  // correction denominators are precomputed by the caller.
  void (*adam_f32)(float* param, const float* grad, float* m, float* v,
                   std::size_t n, float beta1, float beta2, float lr,
                   float bias_corr1, float bias_corr2, float eps_hat);

  // y[i] += alpha * x[i]
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
};

const Table& active();
const Table& table(Backend backend);
bool backend_available(Backend backend);
void select_backend(Backend backend);
Backend parse_backend(std::string_view name);

// Precision-generic entry points used by templated numerical code.
void gemm(const Gemm<float>& g);
void gemm(const Gemm<double>& g);
void bias_sine(float* z, std::size_t rows, std::size_t cols, const float* bias,
               float omega, float* s, float* dz);
void bias_sine(double* z, std::size_t rows, std::size_t cols,
               const double* bias, double omega, double* s, double* dz);
void dot_rows(const float* x, std::size_t rows, std::size_t cols,
              const float* w, float bias, float* y);
void dot_rows(const double* x, std::size_t rows, std::size_t cols,
              const double* w, double bias, double* y);
void weighted_col_sum(const float* x, std::size_t rows, std::size_t cols,
                      const float* weight, float* acc);
void weighted_col_sum(const double* x, std::size_t rows, std::size_t cols,
                      const double* weight, double* acc);
void outer_scaled(const float* u, std::size_t rows, const float* v,
                  std::size_t cols, const float* scale, float* out);
void outer_scaled(const double* u, std::size_t rows, const double* v,
                  std::size_t cols, const double* scale, double* out);
void mul_inplace(float* a, const float* b, std::size_t n);
void mul_inplace(double* a, const double* b, std::size_t n);
void adam(float* param, const float* grad, float* m, float* v, std::size_t n,
          float beta1, float beta2, float lr, float bias_corr1,
          float bias_corr2, float eps_hat);
void adam(double* param, const double* grad, double* m, double* v,
          std::size_t n, double beta1, double beta2, double lr,
          double bias_corr1, double bias_corr2, double eps_hat);
void axpy(double alpha, const double* x, double* y, std::size_t n);

}  // namespace adjvad::kernels
