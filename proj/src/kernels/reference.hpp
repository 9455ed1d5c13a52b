#pragma once

// Scalar reference kernels. These define the semantics every SIMD variant is
// tested against.

#include <cmath>
#include <cstddef>

#include "adjvad/kernels.hpp"

namespace adjvad::kernels::reference {

template <typename T>
void gemm(const Gemm<T>& g) {
  for (std::size_t i = 0; i < g.m; ++i) {
    T* crow = g.c + static_cast<std::ptrdiff_t>(i) * g.ldc;
    for (std::size_t j = 0; j < g.n; ++j) {
      T acc = T(0);
      for (std::size_t p = 0; p < g.k; ++p) {
        acc += g.a[static_cast<std::ptrdiff_t>(i) * g.a_rs +
                   static_cast<std::ptrdiff_t>(p) * g.a_cs] *
               g.b[static_cast<std::ptrdiff_t>(p) * g.b_rs +
                   static_cast<std::ptrdiff_t>(j) * g.b_cs];
      }
      crow[j] = g.beta == T(0) ? g.alpha * acc : g.alpha * acc + g.beta * crow[j];
    }
  }
}

template <typename T>
void bias_sine(T* z, std::size_t rows, std::size_t cols, const T* bias,
               T omega, T* s, T* dz) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t idx = r * cols + j;
      const T arg = omega * (z[idx] + bias[j]);
      if (dz) dz[idx] = omega * std::cos(arg);
      s[idx] = std::sin(arg);
    }
  }
}

template <typename T>
void dot_rows(const T* x, std::size_t rows, std::size_t cols, const T* w,
              T bias, T* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    T acc = T(0);
    for (std::size_t j = 0; j < cols; ++j) acc += x[r * cols + j] * w[j];
    y[r] = acc + bias;
  }
}

template <typename T>
void weighted_col_sum(const T* x, std::size_t rows, std::size_t cols,
                      const T* weight, T* acc) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T wr = weight ? weight[r] : T(1);
    for (std::size_t j = 0; j < cols; ++j) acc[j] += wr * x[r * cols + j];
  }
}

template <typename T>
void outer_scaled(const T* u, std::size_t rows, const T* v, std::size_t cols,
                  const T* scale, T* out) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < cols; ++j)
      out[r * cols + j] = u[r] * v[j] * scale[r * cols + j];
}

template <typename T>
void mul_inplace(T* a, const T* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

template <typename T>
void adam(T* param, const T* grad, T* m, T* v, std::size_t n, T beta1,
          T beta2, T lr, T bias_corr1, T bias_corr2, T eps_hat) {
  for (std::size_t i = 0; i < n; ++i) {
    const T g = grad[i];
    m[i] = beta1 * m[i] + (T(1) - beta1) * g;
    v[i] = beta2 * v[i] + (T(1) - beta2) * g * g;
    const T m_hat = m[i] / bias_corr1;
    const T v_hat = v[i] / bias_corr2;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps_hat);
  }
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace adjvad::kernels::reference
