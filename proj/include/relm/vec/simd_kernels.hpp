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

#pragma once

#include <cstddef>

namespace relm::simd {

// Similarity scan inner loops. Scalar kernels are the reference; AVX2 (x86)
// and NEON (aarch64) variants are selected once at startup from runtime CPU
// capabilities and are equivalence-tested against the scalar path.

float dot_scalar(const float *a, const float *b, size_t n);
void batch_dot_scalar(const float *query, const float *base, size_t count,
                      size_t dim, float *out);

/// Dispatched dot product.
float dot(const float *a, const float *b, size_t n);

/// Dispatched batch of dot products: out[i] = query . base[i*dim .. ).
void batch_dot(const float *query, const float *base, size_t count, size_t dim,
               float *out);

float l2_norm(const float *a, size_t n);

/// In-place L2 normalization; an all-zero vector gets e0 = 1.
void normalize(float *a, size_t n);

/// Name of the selected kernel set: "avx2", "neon", or "scalar".
const char *active_kernel();

}  // namespace relm::simd
