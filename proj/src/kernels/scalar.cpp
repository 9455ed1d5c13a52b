#include "kernels/backends.hpp"
#include "kernels/reference.hpp"

namespace adjvad::kernels::detail {

namespace {

void gemm_f32(const Gemm<float>& g) { reference::gemm(g); }

void bias_sine_f32(float* z, std::size_t rows, std::size_t cols,
                   const float* bias, float omega, float* s, float* dz) {
  reference::bias_sine(z, rows, cols, bias, omega, s, dz);
}

void dot_rows_f32(const float* x, std::size_t rows, std::size_t cols,
                  const float* w, float bias, float* y) {
  reference::dot_rows(x, rows, cols, w, bias, y);
}

void weighted_col_sum_f32(const float* x, std::size_t rows, std::size_t cols,
                          const float* weight, float* acc) {
  reference::weighted_col_sum(x, rows, cols, weight, acc);
}

void outer_scaled_f32(const float* u, std::size_t rows, const float* v,
                      std::size_t cols, const float* scale, float* out) {
  reference::outer_scaled(u, rows, v, cols, scale, out);
}

void mul_inplace_f32(float* a, const float* b, std::size_t n) {
  reference::mul_inplace(a, b, n);
}

void adam_f32(float* param, const float* grad, float* m, float* v,
              std::size_t n, float beta1, float beta2, float lr,
              float bias_corr1, float bias_corr2, float eps_hat) {
  reference::adam(param, grad, m, v, n, beta1, beta2, lr, bias_corr1,
                  bias_corr2, eps_hat);
}

}  // namespace

const Table kScalarTable{
    Backend::scalar,      "scalar",         gemm_f32,
    bias_sine_f32,        dot_rows_f32,     weighted_col_sum_f32,
    outer_scaled_f32,     mul_inplace_f32,  adam_f32,
    reference::axpy,
};

}  // namespace adjvad::kernels::detail
