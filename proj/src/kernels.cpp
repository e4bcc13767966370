#include "tplab/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define TPLAB_X86 1
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#define TPLAB_NEON 1
#endif

namespace tplab::kernels {

namespace {

int g_forced = -1;

Isa detect() {
  const char* env = std::getenv("TPLAB_ISA");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
#if defined(TPLAB_X86)
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
#if defined(TPLAB_NEON)
  return Isa::neon;
#endif
  return Isa::scalar;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(TPLAB_X86)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(TPLAB_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  if (g_forced >= 0) return static_cast<Isa>(g_forced);
  static const Isa isa = detect();
  return isa;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool force_isa(Isa isa) {
  if (!isa_supported(isa)) return false;
  g_forced = static_cast<int>(isa);
  return true;
}

void reset_isa() { g_forced = -1; }

void pucci2_scalar(const double* a11, const double* a12, const double* a22, double* out,
                   std::size_t len, double wpos, double wneg) {
  for (std::size_t i = 0; i < len; ++i) {
    double m = 0.5 * (a11[i] + a22[i]);
    double q = 0.5 * (a11[i] - a22[i]);
    double d = std::sqrt(q * q + a12[i] * a12[i]);
    double e1 = m - d, e2 = m + d;
    double t1 = (e1 > 0.0 ? wpos : wneg) * e1;
    double t2 = (e2 > 0.0 ? wpos : wneg) * e2;
    out[i] = t1 + t2;
  }
}

void row1_scalar(const double* u, const double* f, double* out, std::size_t len,
                 double inv_h2, double dt, double wpos, double wneg) {
  for (std::size_t i = 0; i < len; ++i) {
    double d = (u[static_cast<std::ptrdiff_t>(i) - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
    double fd = (d > 0.0 ? wpos : wneg) * d;
    out[i] = u[i] + dt * (fd + f[i]);
  }
}

#if defined(TPLAB_X86)
__attribute__((target("avx2"))) void pucci2_avx2(const double* a11, const double* a12,
                                                 const double* a22, double* out, std::size_t len,
                                                 double wpos, double wneg) {
  const __m256d half = _mm256_set1_pd(0.5), zero = _mm256_setzero_pd();
  const __m256d wp = _mm256_set1_pd(wpos), wn = _mm256_set1_pd(wneg);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d a = _mm256_loadu_pd(a11 + i), b = _mm256_loadu_pd(a12 + i), c = _mm256_loadu_pd(a22 + i);
    __m256d m = _mm256_mul_pd(half, _mm256_add_pd(a, c));
    __m256d q = _mm256_mul_pd(half, _mm256_sub_pd(a, c));
    __m256d d = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(q, q), _mm256_mul_pd(b, b)));
    __m256d e1 = _mm256_sub_pd(m, d), e2 = _mm256_add_pd(m, d);
    __m256d w1 = _mm256_blendv_pd(wn, wp, _mm256_cmp_pd(e1, zero, _CMP_GT_OQ));
    __m256d w2 = _mm256_blendv_pd(wn, wp, _mm256_cmp_pd(e2, zero, _CMP_GT_OQ));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(w1, e1), _mm256_mul_pd(w2, e2)));
  }
  _mm256_zeroupper();
  pucci2_scalar(a11 + i, a12 + i, a22 + i, out + i, len - i, wpos, wneg);
}

__attribute__((target("avx2"))) void row1_avx2(const double* u, const double* f, double* out,
                                               std::size_t len, double inv_h2, double dt,
                                               double wpos, double wneg) {
  const __m256d two = _mm256_set1_pd(2.0), zero = _mm256_setzero_pd();
  const __m256d ih = _mm256_set1_pd(inv_h2), vdt = _mm256_set1_pd(dt);
  const __m256d wp = _mm256_set1_pd(wpos), wn = _mm256_set1_pd(wneg);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d um = _mm256_loadu_pd(u + i - 1), uc = _mm256_loadu_pd(u + i), up = _mm256_loadu_pd(u + i + 1);
    __m256d d = _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(um, _mm256_mul_pd(two, uc)), up), ih);
    __m256d w = _mm256_blendv_pd(wn, wp, _mm256_cmp_pd(d, zero, _CMP_GT_OQ));
    __m256d rhs = _mm256_add_pd(_mm256_mul_pd(w, d), _mm256_loadu_pd(f + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(uc, _mm256_mul_pd(vdt, rhs)));
  }
  _mm256_zeroupper();
  row1_scalar(u + i, f + i, out + i, len - i, inv_h2, dt, wpos, wneg);
}
#else
void pucci2_avx2(const double* a11, const double* a12, const double* a22, double* out,
                 std::size_t len, double wpos, double wneg) {
  pucci2_scalar(a11, a12, a22, out, len, wpos, wneg);
}
void row1_avx2(const double* u, const double* f, double* out, std::size_t len, double inv_h2,
               double dt, double wpos, double wneg) {
  row1_scalar(u, f, out, len, inv_h2, dt, wpos, wneg);
}
#endif

#if defined(TPLAB_NEON)
void pucci2_neon(const double* a11, const double* a12, const double* a22, double* out,
                 std::size_t len, double wpos, double wneg) {
  const float64x2_t half = vdupq_n_f64(0.5), zero = vdupq_n_f64(0.0);
  const float64x2_t wp = vdupq_n_f64(wpos), wn = vdupq_n_f64(wneg);
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    float64x2_t a = vld1q_f64(a11 + i), b = vld1q_f64(a12 + i), c = vld1q_f64(a22 + i);
    float64x2_t m = vmulq_f64(half, vaddq_f64(a, c));
    float64x2_t q = vmulq_f64(half, vsubq_f64(a, c));
    float64x2_t d = vsqrtq_f64(vaddq_f64(vmulq_f64(q, q), vmulq_f64(b, b)));
    float64x2_t e1 = vsubq_f64(m, d), e2 = vaddq_f64(m, d);
    float64x2_t w1 = vbslq_f64(vcgtq_f64(e1, zero), wp, wn);
    float64x2_t w2 = vbslq_f64(vcgtq_f64(e2, zero), wp, wn);
    vst1q_f64(out + i, vaddq_f64(vmulq_f64(w1, e1), vmulq_f64(w2, e2)));
  }
  pucci2_scalar(a11 + i, a12 + i, a22 + i, out + i, len - i, wpos, wneg);
}

void row1_neon(const double* u, const double* f, double* out, std::size_t len, double inv_h2,
               double dt, double wpos, double wneg) {
  const float64x2_t two = vdupq_n_f64(2.0), zero = vdupq_n_f64(0.0);
  const float64x2_t ih = vdupq_n_f64(inv_h2), vdt = vdupq_n_f64(dt);
  const float64x2_t wp = vdupq_n_f64(wpos), wn = vdupq_n_f64(wneg);
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    float64x2_t um = vld1q_f64(u + i - 1), uc = vld1q_f64(u + i), up = vld1q_f64(u + i + 1);
    float64x2_t d = vmulq_f64(vaddq_f64(vsubq_f64(um, vmulq_f64(two, uc)), up), ih);
    float64x2_t w = vbslq_f64(vcgtq_f64(d, zero), wp, wn);
    float64x2_t rhs = vaddq_f64(vmulq_f64(w, d), vld1q_f64(f + i));
    vst1q_f64(out + i, vaddq_f64(uc, vmulq_f64(vdt, rhs)));
  }
  row1_scalar(u + i, f + i, out + i, len - i, inv_h2, dt, wpos, wneg);
}
#else
void pucci2_neon(const double* a11, const double* a12, const double* a22, double* out,
                 std::size_t len, double wpos, double wneg) {
  pucci2_scalar(a11, a12, a22, out, len, wpos, wneg);
}
void row1_neon(const double* u, const double* f, double* out, std::size_t len, double inv_h2,
               double dt, double wpos, double wneg) {
  row1_scalar(u, f, out, len, inv_h2, dt, wpos, wneg);
}
#endif

void pucci2(const double* a11, const double* a12, const double* a22, double* out, std::size_t len,
            double wpos, double wneg) {
  switch (active_isa()) {
    case Isa::avx2: return pucci2_avx2(a11, a12, a22, out, len, wpos, wneg);
    case Isa::neon: return pucci2_neon(a11, a12, a22, out, len, wpos, wneg);
    case Isa::scalar: break;
  }
  pucci2_scalar(a11, a12, a22, out, len, wpos, wneg);
}

void row1(const double* u, const double* f, double* out, std::size_t len, double inv_h2, double dt,
          double wpos, double wneg) {
  switch (active_isa()) {
    case Isa::avx2: return row1_avx2(u, f, out, len, inv_h2, dt, wpos, wneg);
    case Isa::neon: return row1_neon(u, f, out, len, inv_h2, dt, wpos, wneg);
    case Isa::scalar: break;
  }
  row1_scalar(u, f, out, len, inv_h2, dt, wpos, wneg);
}

}  // namespace tplab::kernels
