// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "kernels/backends.hpp"

namespace adjvad::kernels::detail {

namespace {

// ---------------------------------------------------------------------------
// GEMM: BLIS-style blocking with packed panels and a 6x16 register tile.

constexpr std::size_t kMr = 6;
constexpr std::size_t kNr = 16;
constexpr std::size_t kKc = 256;
constexpr std::size_t kMc = 96;
constexpr std::size_t kNc = 1024;

struct PackBuffers {
  std::vector<float> a;
  std::vector<float> b;
};

PackBuffers& pack_buffers() {
  thread_local PackBuffers bufs;
  return bufs;
}

inline float a_at(const Gemm<float>& g, std::size_t i, std::size_t p) {
  return g.a[static_cast<std::ptrdiff_t>(i) * g.a_rs +
             static_cast<std::ptrdiff_t>(p) * g.a_cs];
}

inline float b_at(const Gemm<float>& g, std::size_t p, std::size_t j) {
  return g.b[static_cast<std::ptrdiff_t>(p) * g.b_rs +
             static_cast<std::ptrdiff_t>(j) * g.b_cs];
}

void pack_a(const Gemm<float>& g, std::size_t i0, std::size_t mc,
            std::size_t p0, std::size_t kc, float* dst) {
  for (std::size_t ir = 0; ir < mc; ir += kMr) {
    const std::size_t mr = std::min(kMr, mc - ir);
    if (g.a_cs == 1 && mr == kMr) {
      const float* rows[kMr];
      for (std::size_t r = 0; r < kMr; ++r)
        rows[r] = g.a + static_cast<std::ptrdiff_t>(i0 + ir + r) * g.a_rs +
                  static_cast<std::ptrdiff_t>(p0);
      for (std::size_t p = 0; p < kc; ++p)
        for (std::size_t r = 0; r < kMr; ++r) *dst++ = rows[r][p];
      continue;
    }
    for (std::size_t p = 0; p < kc; ++p)
      for (std::size_t r = 0; r < kMr; ++r)
        *dst++ = r < mr ? a_at(g, i0 + ir + r, p0 + p) : 0.0f;
  }
}

void pack_b(const Gemm<float>& g, std::size_t p0, std::size_t kc,
            std::size_t j0, std::size_t nc, float* dst) {
  for (std::size_t jr = 0; jr < nc; jr += kNr) {
    const std::size_t nr = std::min(kNr, nc - jr);
    if (g.b_cs == 1 && nr == kNr) {
      for (std::size_t p = 0; p < kc; ++p) {
        const float* src = g.b + static_cast<std::ptrdiff_t>(p0 + p) * g.b_rs +
                           static_cast<std::ptrdiff_t>(j0 + jr);
        _mm256_storeu_ps(dst, _mm256_loadu_ps(src));
        _mm256_storeu_ps(dst + 8, _mm256_loadu_ps(src + 8));
        dst += kNr;
      }
      continue;
    }
    for (std::size_t p = 0; p < kc; ++p)
      for (std::size_t c = 0; c < kNr; ++c)
        *dst++ = c < nr ? b_at(g, p0 + p, j0 + jr + c) : 0.0f;
  }
}

void micro_kernel(std::size_t kc, const float* a, const float* b, float* c,
                  std::ptrdiff_t ldc, float alpha, std::size_t mr,
                  std::size_t nr) {
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
  __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
  __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
  __m256 c40 = _mm256_setzero_ps(), c41 = _mm256_setzero_ps();
  __m256 c50 = _mm256_setzero_ps(), c51 = _mm256_setzero_ps();

  for (std::size_t p = 0; p < kc; ++p) {
    const __m256 b0 = _mm256_loadu_ps(b);
    const __m256 b1 = _mm256_loadu_ps(b + 8);
    __m256 av = _mm256_broadcast_ss(a + 0);
    c00 = _mm256_fmadd_ps(av, b0, c00);
    c01 = _mm256_fmadd_ps(av, b1, c01);
    av = _mm256_broadcast_ss(a + 1);
    c10 = _mm256_fmadd_ps(av, b0, c10);
    c11 = _mm256_fmadd_ps(av, b1, c11);
    av = _mm256_broadcast_ss(a + 2);
    c20 = _mm256_fmadd_ps(av, b0, c20);
    c21 = _mm256_fmadd_ps(av, b1, c21);
    av = _mm256_broadcast_ss(a + 3);
    c30 = _mm256_fmadd_ps(av, b0, c30);
    c31 = _mm256_fmadd_ps(av, b1, c31);
    av = _mm256_broadcast_ss(a + 4);
    c40 = _mm256_fmadd_ps(av, b0, c40);
    c41 = _mm256_fmadd_ps(av, b1, c41);
    av = _mm256_broadcast_ss(a + 5);
    c50 = _mm256_fmadd_ps(av, b0, c50);
    c51 = _mm256_fmadd_ps(av, b1, c51);
    a += kMr;
    b += kNr;
  }

  const __m256 va = _mm256_set1_ps(alpha);
  if (mr == kMr && nr == kNr) {
    auto upd = [&](std::size_t r, __m256 lo, __m256 hi) {
      float* row = c + static_cast<std::ptrdiff_t>(r) * ldc;
      _mm256_storeu_ps(row, _mm256_fmadd_ps(va, lo, _mm256_loadu_ps(row)));
      _mm256_storeu_ps(row + 8,
                       _mm256_fmadd_ps(va, hi, _mm256_loadu_ps(row + 8)));
    };
    upd(0, c00, c01);
    upd(1, c10, c11);
    upd(2, c20, c21);
    upd(3, c30, c31);
    upd(4, c40, c41);
    upd(5, c50, c51);
    return;
  }

  alignas(32) float tile[kMr][kNr];
  _mm256_store_ps(tile[0], c00);
  _mm256_store_ps(tile[0] + 8, c01);
  _mm256_store_ps(tile[1], c10);
  _mm256_store_ps(tile[1] + 8, c11);
  _mm256_store_ps(tile[2], c20);
  _mm256_store_ps(tile[2] + 8, c21);
  _mm256_store_ps(tile[3], c30);
  _mm256_store_ps(tile[3] + 8, c31);
  _mm256_store_ps(tile[4], c40);
  _mm256_store_ps(tile[4] + 8, c41);
  _mm256_store_ps(tile[5], c50);
  _mm256_store_ps(tile[5] + 8, c51);
  for (std::size_t r = 0; r < mr; ++r) {
    float* row = c + static_cast<std::ptrdiff_t>(r) * ldc;
    for (std::size_t j = 0; j < nr; ++j) row[j] = std::fma(alpha, tile[r][j], row[j]);
  }
}

void gemm_f32(const Gemm<float>& g) {
  if (g.m == 0 || g.n == 0) return;
  for (std::size_t i = 0; i < g.m; ++i) {
    float* row = g.c + static_cast<std::ptrdiff_t>(i) * g.ldc;
    if (g.beta == 0.0f)
      std::fill(row, row + g.n, 0.0f);
    else if (g.beta != 1.0f)
      for (std::size_t j = 0; j < g.n; ++j) row[j] *= g.beta;
  }
  if (g.k == 0 || g.alpha == 0.0f) return;

  PackBuffers& bufs = pack_buffers();
  bufs.a.resize(kMc * kKc);
  bufs.b.resize(kKc * ((kNc + kNr - 1) / kNr) * kNr);

  for (std::size_t j0 = 0; j0 < g.n; j0 += kNc) {
    const std::size_t nc = std::min(kNc, g.n - j0);
    for (std::size_t p0 = 0; p0 < g.k; p0 += kKc) {
      const std::size_t kc = std::min(kKc, g.k - p0);
      pack_b(g, p0, kc, j0, nc, bufs.b.data());
      for (std::size_t i0 = 0; i0 < g.m; i0 += kMc) {
        const std::size_t mc = std::min(kMc, g.m - i0);
        pack_a(g, i0, mc, p0, kc, bufs.a.data());
        for (std::size_t jr = 0; jr < nc; jr += kNr) {
          const std::size_t nr = std::min(kNr, nc - jr);
          const float* bp = bufs.b.data() + (jr / kNr) * kc * kNr;
          for (std::size_t ir = 0; ir < mc; ir += kMr) {
            const std::size_t mr = std::min(kMr, mc - ir);
            const float* ap = bufs.a.data() + (ir / kMr) * kc * kMr;
            float* cp = g.c + static_cast<std::ptrdiff_t>(i0 + ir) * g.ldc +
                        static_cast<std::ptrdiff_t>(j0 + jr);
            micro_kernel(kc, ap, bp, cp, g.ldc, g.alpha, mr, nr);
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// sin/cos: Cephes single-precision polynomials with three-part Cody-Waite
// reduction by pi/4. Accurate to a few ulp for |x| up to ~8e3.

inline void sincos_ps(__m256 x, __m256* s, __m256* c) {
  const __m256 sign_mask = _mm256_castsi256_ps(_mm256_set1_epi32(INT32_MIN));
  const __m256 inv_sign_mask =
      _mm256_castsi256_ps(_mm256_set1_epi32(~INT32_MIN));

  __m256 sign_bit_sin = _mm256_and_ps(x, sign_mask);
  x = _mm256_and_ps(x, inv_sign_mask);

  __m256 y = _mm256_mul_ps(x, _mm256_set1_ps(1.27323954473516f));  // 4/pi
  __m256i j = _mm256_cvttps_epi32(y);
  j = _mm256_add_epi32(j, _mm256_set1_epi32(1));
  j = _mm256_and_si256(j, _mm256_set1_epi32(~1));
  y = _mm256_cvtepi32_ps(j);

  const __m256 swap_sign_sin = _mm256_castsi256_ps(
      _mm256_slli_epi32(_mm256_and_si256(j, _mm256_set1_epi32(4)), 29));
  const __m256 poly_mask = _mm256_castsi256_ps(_mm256_cmpeq_epi32(
      _mm256_and_si256(j, _mm256_set1_epi32(2)), _mm256_setzero_si256()));
  const __m256 sign_bit_cos = _mm256_castsi256_ps(_mm256_slli_epi32(
      _mm256_andnot_si256(_mm256_sub_epi32(j, _mm256_set1_epi32(2)),
                          _mm256_set1_epi32(4)),
      29));

  x = _mm256_fmadd_ps(y, _mm256_set1_ps(-0.78515625f), x);
  x = _mm256_fmadd_ps(y, _mm256_set1_ps(-2.4187564849853515625e-4f), x);
  x = _mm256_fmadd_ps(y, _mm256_set1_ps(-3.77489497744594108e-8f), x);

  sign_bit_sin = _mm256_xor_ps(sign_bit_sin, swap_sign_sin);
  const __m256 z = _mm256_mul_ps(x, x);

  __m256 yc = _mm256_set1_ps(2.443315711809948e-5f);
  yc = _mm256_fmadd_ps(yc, z, _mm256_set1_ps(-1.388731625493765e-3f));
  yc = _mm256_fmadd_ps(yc, z, _mm256_set1_ps(4.166664568298827e-2f));
  yc = _mm256_mul_ps(_mm256_mul_ps(yc, z), z);
  yc = _mm256_fnmadd_ps(_mm256_set1_ps(0.5f), z, yc);
  yc = _mm256_add_ps(yc, _mm256_set1_ps(1.0f));

  __m256 ys = _mm256_set1_ps(-1.9515295891e-4f);
  ys = _mm256_fmadd_ps(ys, z, _mm256_set1_ps(8.3321608736e-3f));
  ys = _mm256_fmadd_ps(ys, z, _mm256_set1_ps(-1.6666654611e-1f));
  ys = _mm256_mul_ps(ys, z);
  ys = _mm256_fmadd_ps(ys, x, x);

  const __m256 sin_v =
      _mm256_or_ps(_mm256_and_ps(poly_mask, ys), _mm256_andnot_ps(poly_mask, yc));
  const __m256 cos_v =
      _mm256_or_ps(_mm256_and_ps(poly_mask, yc), _mm256_andnot_ps(poly_mask, ys));
  *s = _mm256_xor_ps(sin_v, sign_bit_sin);
  *c = _mm256_xor_ps(cos_v, sign_bit_cos);
}

void bias_sine_f32(float* z, std::size_t rows, std::size_t cols,
                   const float* bias, float omega, float* s, float* dz) {
  const __m256 w = _mm256_set1_ps(omega);
  const std::size_t vec_end = cols & ~std::size_t{7};
  for (std::size_t r = 0; r < rows; ++r) {
    float* zr = z + r * cols;
    float* sr = s + r * cols;
    float* dr = dz ? dz + r * cols : nullptr;
    std::size_t j = 0;
    for (; j < vec_end; j += 8) {
      const __m256 arg =
          _mm256_mul_ps(w, _mm256_add_ps(_mm256_loadu_ps(zr + j),
                                         _mm256_loadu_ps(bias + j)));
      __m256 sv, cv;
      sincos_ps(arg, &sv, &cv);
      _mm256_storeu_ps(sr + j, sv);
      if (dr) _mm256_storeu_ps(dr + j, _mm256_mul_ps(w, cv));
    }
    if (j < cols) {
      alignas(32) float zt[8] = {}, bt[8] = {}, st[8], ct[8];
      const std::size_t rem = cols - j;
      std::memcpy(zt, zr + j, rem * sizeof(float));
      std::memcpy(bt, bias + j, rem * sizeof(float));
      const __m256 arg =
          _mm256_mul_ps(w, _mm256_add_ps(_mm256_load_ps(zt), _mm256_load_ps(bt)));
      __m256 sv, cv;
      sincos_ps(arg, &sv, &cv);
      _mm256_store_ps(st, sv);
      _mm256_store_ps(ct, _mm256_mul_ps(w, cv));
      std::memcpy(sr + j, st, rem * sizeof(float));
      if (dr) std::memcpy(dr + j, ct, rem * sizeof(float));
    }
  }
}

// ---------------------------------------------------------------------------

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  const __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

void dot_rows_f32(const float* x, std::size_t rows, std::size_t cols,
                  const float* w, float bias, float* y) {
  const std::size_t vec_end = cols & ~std::size_t{7};
  for (std::size_t r = 0; r < rows; ++r) {
    const float* xr = x + r * cols;
    __m256 acc = _mm256_setzero_ps();
    std::size_t j = 0;
    for (; j < vec_end; j += 8)
      acc = _mm256_fmadd_ps(_mm256_loadu_ps(xr + j), _mm256_loadu_ps(w + j), acc);
    float total = hsum(acc);
    for (; j < cols; ++j) total = std::fma(xr[j], w[j], total);
    y[r] = total + bias;
  }
}

void weighted_col_sum_f32(const float* x, std::size_t rows, std::size_t cols,
                          const float* weight, float* acc) {
  const std::size_t vec_end = cols & ~std::size_t{7};
  for (std::size_t r = 0; r < rows; ++r) {
    const float wr = weight ? weight[r] : 1.0f;
    const __m256 wv = _mm256_set1_ps(wr);
    const float* xr = x + r * cols;
    std::size_t j = 0;
    for (; j < vec_end; j += 8)
      _mm256_storeu_ps(acc + j, _mm256_fmadd_ps(wv, _mm256_loadu_ps(xr + j),
                                                _mm256_loadu_ps(acc + j)));
    for (; j < cols; ++j) acc[j] = std::fma(wr, xr[j], acc[j]);
  }
}

void outer_scaled_f32(const float* u, std::size_t rows, const float* v,
                      std::size_t cols, const float* scale, float* out) {
  const std::size_t vec_end = cols & ~std::size_t{7};
  for (std::size_t r = 0; r < rows; ++r) {
    const __m256 ur = _mm256_set1_ps(u[r]);
    const float* sr = scale + r * cols;
    float* orow = out + r * cols;
    std::size_t j = 0;
    for (; j < vec_end; j += 8)
      _mm256_storeu_ps(orow + j,
                       _mm256_mul_ps(_mm256_mul_ps(ur, _mm256_loadu_ps(v + j)),
                                     _mm256_loadu_ps(sr + j)));
    for (; j < cols; ++j) orow[j] = u[r] * v[j] * sr[j];
  }
}

void mul_inplace_f32(float* a, const float* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(a + i, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                          _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) a[i] *= b[i];
}

void adam_f32(float* param, const float* grad, float* m, float* v,
              std::size_t n, float beta1, float beta2, float lr,
              float bias_corr1, float bias_corr2, float eps_hat) {
  const __m256 b1 = _mm256_set1_ps(beta1), nb1 = _mm256_set1_ps(1.0f - beta1);
  const __m256 b2 = _mm256_set1_ps(beta2), nb2 = _mm256_set1_ps(1.0f - beta2);
  const __m256 vlr = _mm256_set1_ps(lr), ve = _mm256_set1_ps(eps_hat);
  const __m256 bc1 = _mm256_set1_ps(bias_corr1), bc2 = _mm256_set1_ps(bias_corr2);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 g = _mm256_loadu_ps(grad + i);
    const __m256 mi = _mm256_add_ps(_mm256_mul_ps(b1, _mm256_loadu_ps(m + i)),
                                    _mm256_mul_ps(nb1, g));
    const __m256 vi = _mm256_add_ps(_mm256_mul_ps(b2, _mm256_loadu_ps(v + i)),
                                    _mm256_mul_ps(_mm256_mul_ps(nb2, g), g));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    const __m256 m_hat = _mm256_div_ps(mi, bc1);
    const __m256 v_hat = _mm256_div_ps(vi, bc2);
    const __m256 step = _mm256_div_ps(_mm256_mul_ps(vlr, m_hat),
                                      _mm256_add_ps(_mm256_sqrt_ps(v_hat), ve));
    _mm256_storeu_ps(param + i, _mm256_sub_ps(_mm256_loadu_ps(param + i), step));
  }
  for (; i < n; ++i) {
    const float g = grad[i];
    m[i] = beta1 * m[i] + (1.0f - beta1) * g;
    v[i] = beta2 * v[i] + (1.0f - beta2) * g * g;
    param[i] -= lr * (m[i] / bias_corr1) / (std::sqrt(v[i] / bias_corr2) + eps_hat);
  }
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

}  // namespace

const Table kAvx2Table{
    Backend::avx2,    "avx2",          gemm_f32,
    bias_sine_f32,    dot_rows_f32,    weighted_col_sum_f32,
    outer_scaled_f32, mul_inplace_f32, adam_f32,
    axpy_f64,
};

}  // namespace adjvad::kernels::detail
