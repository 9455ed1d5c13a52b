#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "adjvad/kernels.hpp"
#include "kernels/backends.hpp"
#include "kernels/reference.hpp"

namespace adjvad::kernels {

namespace detail {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace detail

namespace {

const Table* initial_table() {
  Backend wanted = backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("ADJVAD_KERNELS"); env && *env) {
    const std::string_view name(env);
    if (name != "auto") {
      wanted = parse_backend(name);
      if (!backend_available(wanted))
        throw std::runtime_error("ADJVAD_KERNELS=" + std::string(name) +
                                 " is not supported on this CPU");
    }
  }
  return &table(wanted);
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> t{initial_table()};
  return t;
}

}  // namespace

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(ADJVAD_HAVE_AVX2)
      return detail::cpu_has_avx2_fma();
#else
      return false;
#endif
  }
  return false;
}

const Table& table(Backend backend) {
#if defined(ADJVAD_HAVE_AVX2)
  if (backend == Backend::avx2) return detail::kAvx2Table;
#else
  if (backend == Backend::avx2)
    throw std::runtime_error("AVX2 kernels were not compiled in");
#endif
  return detail::kScalarTable;
}

const Table& active() { return *current().load(std::memory_order_relaxed); }

void select_backend(Backend backend) {
  if (!backend_available(backend))
    throw std::runtime_error("kernel backend not available on this CPU");
  current().store(&table(backend), std::memory_order_relaxed);
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  throw std::invalid_argument("unknown kernel backend: " + std::string(name));
}

void gemm(const Gemm<float>& g) { active().gemm_f32(g); }
void gemm(const Gemm<double>& g) { reference::gemm(g); }

void bias_sine(float* z, std::size_t rows, std::size_t cols, const float* bias,
               float omega, float* s, float* dz) {
  active().bias_sine_f32(z, rows, cols, bias, omega, s, dz);
}
void bias_sine(double* z, std::size_t rows, std::size_t cols,
               const double* bias, double omega, double* s, double* dz) {
  reference::bias_sine(z, rows, cols, bias, omega, s, dz);
}

void dot_rows(const float* x, std::size_t rows, std::size_t cols,
              const float* w, float bias, float* y) {
  active().dot_rows_f32(x, rows, cols, w, bias, y);
}
void dot_rows(const double* x, std::size_t rows, std::size_t cols,
              const double* w, double bias, double* y) {
  reference::dot_rows(x, rows, cols, w, bias, y);
}

void weighted_col_sum(const float* x, std::size_t rows, std::size_t cols,
                      const float* weight, float* acc) {
  active().weighted_col_sum_f32(x, rows, cols, weight, acc);
}
void weighted_col_sum(const double* x, std::size_t rows, std::size_t cols,
                      const double* weight, double* acc) {
  reference::weighted_col_sum(x, rows, cols, weight, acc);
}

void outer_scaled(const float* u, std::size_t rows, const float* v,
                  std::size_t cols, const float* scale, float* out) {
  active().outer_scaled_f32(u, rows, v, cols, scale, out);
}
void outer_scaled(const double* u, std::size_t rows, const double* v,
                  std::size_t cols, const double* scale, double* out) {
  reference::outer_scaled(u, rows, v, cols, scale, out);
}

void mul_inplace(float* a, const float* b, std::size_t n) {
  active().mul_inplace_f32(a, b, n);
}
void mul_inplace(double* a, const double* b, std::size_t n) {
  reference::mul_inplace(a, b, n);
}

void adam(float* param, const float* grad, float* m, float* v, std::size_t n,
          float beta1, float beta2, float lr, float bias_corr1,
          float bias_corr2, float eps_hat) {
  active().adam_f32(param, grad, m, v, n, beta1, beta2, lr, bias_corr1,
                    bias_corr2, eps_hat);
}
void adam(double* param, const double* grad, double* m, double* v,
          std::size_t n, double beta1, double beta2, double lr,
          double bias_corr1, double bias_corr2, double eps_hat) {
  reference::adam(param, grad, m, v, n, beta1, beta2, lr, bias_corr1,
                  bias_corr2, eps_hat);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy_f64(alpha, x, y, n);
}

}  // namespace adjvad::kernels
