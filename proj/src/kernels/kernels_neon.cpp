// Copyright 2026 The adsem Authors
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

// NEON variants for AArch64, where Advanced SIMD is always present.

#include <arm_neon.h>

#include "adsem/kernels.hpp"

namespace adsem::kernels {
namespace {

std::size_t intersect_count_neon(const std::uint32_t* a, std::size_t na, const std::uint32_t* b,
                                 std::size_t nb) {
  std::size_t i = 0, j = 0, count = 0;
  while (i + 4 <= na && j + 4 <= nb) {
    const uint32x4_t va = vld1q_u32(a + i);
    const uint32x4_t vb = vld1q_u32(b + j);
    uint32x4_t any = vceqq_u32(va, vb);
    any = vorrq_u32(any, vceqq_u32(va, vextq_u32(vb, vb, 1)));
    any = vorrq_u32(any, vceqq_u32(va, vextq_u32(vb, vb, 2)));
    any = vorrq_u32(any, vceqq_u32(va, vextq_u32(vb, vb, 3)));
    count += vaddvq_u32(vshrq_n_u32(any, 31));
    const std::uint32_t a_max = a[i + 3];
    const std::uint32_t b_max = b[j + 3];
    if (a_max <= b_max) i += 4;
    if (b_max <= a_max) j += 4;
  }
  while (i < na && j < nb) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

void blend_neon(const double* s1, const double* s2, std::size_t n, double lo, double hi,
                double alpha, double* out) {
  const double beta = 1.0 - alpha;
  const float64x2_t valpha = vdupq_n_f64(alpha);
  const float64x2_t vbeta = vdupq_n_f64(beta);
  std::size_t i = 0;
  if (!(hi > lo)) {
    const float64x2_t head = vdupq_n_f64(alpha * 1.0);
    for (; i + 2 <= n; i += 2) {
      vst1q_f64(out + i, vaddq_f64(head, vmulq_f64(vbeta, vld1q_f64(s2 + i))));
    }
    for (; i < n; ++i) out[i] = alpha * 1.0 + beta * s2[i];
    return;
  }
  const double range = hi - lo;
  const float64x2_t vlo = vdupq_n_f64(lo);
  const float64x2_t vrange = vdupq_n_f64(range);
  for (; i + 2 <= n; i += 2) {
    const float64x2_t norm = vdivq_f64(vsubq_f64(vld1q_f64(s1 + i), vlo), vrange);
    const float64x2_t x = vmulq_f64(valpha, norm);
    const float64x2_t y = vmulq_f64(vbeta, vld1q_f64(s2 + i));
    vst1q_f64(out + i, vaddq_f64(x, y));
  }
  for (; i < n; ++i) {
    const double norm = (s1[i] - lo) / range;
    out[i] = alpha * norm + beta * s2[i];
  }
}

// sparse_dot and min_max have no NEON variant yet; the scalar ones are used.
KernelTable make_neon_table() {
  KernelTable t = scalar_table();
  t.isa = Isa::kNeon;
  t.intersect_count = intersect_count_neon;
  t.blend = blend_neon;
  return t;
}

}  // namespace

namespace detail {
const KernelTable* neon_table() {
  static const KernelTable table = make_neon_table();
  return &table;
}
}  // namespace detail

}  // namespace adsem::kernels
