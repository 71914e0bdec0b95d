// Copyright 2026-present the relm project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relm/vec/simd_kernels.hpp"

#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#define RELM_SIMD_X86 1
#include <immintrin.h>
#else
#define RELM_SIMD_X86 0
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define RELM_SIMD_NEON 1
#include <arm_neon.h>
#else
#define RELM_SIMD_NEON 0
#endif

namespace relm::simd {

float dot_scalar(const float *a, const float *b, size_t n) {
  float acc = 0.0f;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void batch_dot_scalar(const float *query, const float *base, size_t count,
                      size_t dim, float *out) {
  for (size_t i = 0; i < count; ++i) {
    out[i] = dot_scalar(query, base + i * dim, dim);
  }
}

#if RELM_SIMD_X86

__attribute__((target("avx2,fma"))) static float dot_avx2(const float *a,
                                                          const float *b,
                                                          size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8),
                           _mm256_loadu_ps(b + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
  }
  acc0 = _mm256_add_ps(acc0, acc1);
  __m128 lo = _mm256_castps256_ps128(acc0);
  __m128 hi = _mm256_extractf128_ps(acc0, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_hadd_ps(lo, lo);
  lo = _mm_hadd_ps(lo, lo);
  float acc = _mm_cvtss_f32(lo);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

__attribute__((target("avx2,fma"))) static void batch_dot_avx2(
    const float *query, const float *base, size_t count, size_t dim,
    float *out) {
  for (size_t i = 0; i < count; ++i) {
    out[i] = dot_avx2(query, base + i * dim, dim);
  }
}

#endif  // RELM_SIMD_X86

#if RELM_SIMD_NEON

static float dot_neon(const float *a, const float *b, size_t n) {
  float32x4_t acc = vdupq_n_f32(0.0f);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = vfmaq_f32(acc, vld1q_f32(a + i), vld1q_f32(b + i));
  }
  float sum = vaddvq_f32(acc);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

static void batch_dot_neon(const float *query, const float *base, size_t count,
                           size_t dim, float *out) {
  for (size_t i = 0; i < count; ++i) {
    out[i] = dot_neon(query, base + i * dim, dim);
  }
}

#endif  // RELM_SIMD_NEON

namespace {

using DotFn = float (*)(const float *, const float *, size_t);
using BatchDotFn = void (*)(const float *, const float *, size_t, size_t,
                            float *);

struct Dispatch {
  DotFn dot = dot_scalar;
  BatchDotFn batch_dot = batch_dot_scalar;
  const char *name = "scalar";
};

Dispatch select_kernels() {
  Dispatch d;
#if RELM_SIMD_X86
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    d.dot = dot_avx2;
    d.batch_dot = batch_dot_avx2;
    d.name = "avx2";
    return d;
  }
#endif
#if RELM_SIMD_NEON
  d.dot = dot_neon;
  d.batch_dot = batch_dot_neon;
  d.name = "neon";
  return d;
#endif
  return d;
}

const Dispatch &dispatch() {
  static const Dispatch d = select_kernels();
  return d;
}

}  // namespace

float dot(const float *a, const float *b, size_t n) {
  return dispatch().dot(a, b, n);
}

void batch_dot(const float *query, const float *base, size_t count, size_t dim,
               float *out) {
  dispatch().batch_dot(query, base, count, dim, out);
}

float l2_norm(const float *a, size_t n) {
  return std::sqrt(dot(a, a, n));
}

void normalize(float *a, size_t n) {
  if (n == 0) return;
  float norm = l2_norm(a, n);
  if (norm <= 0.0f) {
    a[0] = 1.0f;
    for (size_t i = 1; i < n; ++i) a[i] = 0.0f;
    return;
  }
  float inv = 1.0f / norm;
  for (size_t i = 0; i < n; ++i) a[i] *= inv;
}

const char *active_kernel() { return dispatch().name; }

}  // namespace relm::simd
