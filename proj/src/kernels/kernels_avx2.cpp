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

// AVX2 variants. This translation unit is compiled with -mavx2 and is only
// entered after a runtime CPU check.

#include <immintrin.h>

#include "adsem/kernels.hpp"

namespace adsem::kernels {
namespace {

// Rotation k of an 8-lane vector: lane p takes lane (p + k) % 8.
inline __m256i rotation(int k) {
  return _mm256_setr_epi32(k % 8, (k + 1) % 8, (k + 2) % 8, (k + 3) % 8, (k + 4) % 8,
                           (k + 5) % 8, (k + 6) % 8, (k + 7) % 8);
}

// Bit p of result[k] is set when a-lane p equals b-lane (p + k) % 8.
inline void block_match_masks(__m256i va, __m256i vb, int masks[8]) {
  for (int k = 0; k < 8; ++k) {
    const __m256i rotated = _mm256_permutevar8x32_epi32(vb, rotation(k));
    masks[k] = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(va, rotated)));
  }
}

std::size_t intersect_count_avx2(const std::uint32_t* a, std::size_t na, const std::uint32_t* b,
                                 std::size_t nb) {
  std::size_t i = 0, j = 0, count = 0;
  while (i + 8 <= na && j + 8 <= nb) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + j));
    __m256i any = _mm256_setzero_si256();
    for (int k = 0; k < 8; ++k) {
      any = _mm256_or_si256(any, _mm256_cmpeq_epi32(va, _mm256_permutevar8x32_epi32(vb, rotation(k))));
    }
    count += static_cast<std::size_t>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(any)))));
    const std::uint32_t a_max = a[i + 7];
    const std::uint32_t b_max = b[j + 7];
    if (a_max <= b_max) i += 8;
    if (b_max <= a_max) j += 8;
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

double sparse_dot_avx2(const std::uint32_t* ka, const double* va, std::size_t na,
                       const std::uint32_t* kb, const double* vb, std::size_t nb) {
  std::size_t i = 0, j = 0;
  double sum = 0.0;
  while (i + 8 <= na && j + 8 <= nb) {
    const __m256i a_keys = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(ka + i));
    const __m256i b_keys = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(kb + j));
    int masks[8];
    block_match_masks(a_keys, b_keys, masks);
    int any = 0;
    for (int k = 0; k < 8; ++k) any |= masks[k];
    // Matches are visited in ascending a-lane order, which is ascending key order.
    while (any != 0) {
      const int p = __builtin_ctz(static_cast<unsigned>(any));
      any &= any - 1;
      for (int k = 0; k < 8; ++k) {
        if (masks[k] & (1 << p)) {
          sum += va[i + p] * vb[j + ((p + k) & 7)];
          break;
        }
      }
    }
    const std::uint32_t a_max = ka[i + 7];
    const std::uint32_t b_max = kb[j + 7];
    if (a_max <= b_max) i += 8;
    if (b_max <= a_max) j += 8;
  }
  while (i < na && j < nb) {
    if (ka[i] < kb[j]) {
      ++i;
    } else if (kb[j] < ka[i]) {
      ++j;
    } else {
      sum += va[i] * vb[j];
      ++i;
      ++j;
    }
  }
  return sum;
}

void blend_avx2(const double* s1, const double* s2, std::size_t n, double lo, double hi,
                double alpha, double* out) {
  const double beta = 1.0 - alpha;
  const __m256d valpha = _mm256_set1_pd(alpha);
  const __m256d vbeta = _mm256_set1_pd(beta);
  std::size_t i = 0;
  if (!(hi > lo)) {
    const __m256d head = _mm256_set1_pd(alpha * 1.0);
    for (; i + 4 <= n; i += 4) {
      const __m256d b = _mm256_mul_pd(vbeta, _mm256_loadu_pd(s2 + i));
      _mm256_storeu_pd(out + i, _mm256_add_pd(head, b));
    }
    for (; i < n; ++i) out[i] = alpha * 1.0 + beta * s2[i];
    return;
  }
  const double range = hi - lo;
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vrange = _mm256_set1_pd(range);
  for (; i + 4 <= n; i += 4) {
    const __m256d norm = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(s1 + i), vlo), vrange);
    const __m256d a = _mm256_mul_pd(valpha, norm);
    const __m256d b = _mm256_mul_pd(vbeta, _mm256_loadu_pd(s2 + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(a, b));
  }
  for (; i < n; ++i) {
    const double norm = (s1[i] - lo) / range;
    out[i] = alpha * norm + beta * s2[i];
  }
}

MinMax min_max_avx2(const double* v, std::size_t n) {
  if (n < 8) return scalar_table().min_max(v, n);
  __m256d lo = _mm256_loadu_pd(v);
  __m256d hi = lo;
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    lo = _mm256_min_pd(lo, x);
    hi = _mm256_max_pd(hi, x);
  }
  alignas(32) double lo_lanes[4];
  alignas(32) double hi_lanes[4];
  _mm256_store_pd(lo_lanes, lo);
  _mm256_store_pd(hi_lanes, hi);
  MinMax r{lo_lanes[0], hi_lanes[0]};
  for (int k = 1; k < 4; ++k) {
    if (lo_lanes[k] < r.min) r.min = lo_lanes[k];
    if (hi_lanes[k] > r.max) r.max = hi_lanes[k];
  }
  for (; i < n; ++i) {
    if (v[i] < r.min) r.min = v[i];
    if (v[i] > r.max) r.max = v[i];
  }
  return r;
}

constexpr KernelTable kAvx2{Isa::kAvx2, intersect_count_avx2, sparse_dot_avx2, blend_avx2,
                            min_max_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace adsem::kernels
