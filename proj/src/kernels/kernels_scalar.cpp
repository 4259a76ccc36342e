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

#include "adsem/kernels.hpp"

namespace adsem::kernels {
namespace {

std::size_t intersect_count_scalar(const std::uint32_t* a, std::size_t na, const std::uint32_t* b,
                                   std::size_t nb) {
  std::size_t i = 0, j = 0, count = 0;
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

double sparse_dot_scalar(const std::uint32_t* ka, const double* va, std::size_t na,
                         const std::uint32_t* kb, const double* vb, std::size_t nb) {
  std::size_t i = 0, j = 0;
  double sum = 0.0;
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

void blend_scalar(const double* s1, const double* s2, std::size_t n, double lo, double hi,
                  double alpha, double* out) {
  const double beta = 1.0 - alpha;
  if (!(hi > lo)) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * 1.0 + beta * s2[i];
    return;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = (s1[i] - lo) / range;
    out[i] = alpha * norm + beta * s2[i];
  }
}

MinMax min_max_scalar(const double* v, std::size_t n) {
  MinMax r{v[0], v[0]};
  for (std::size_t i = 1; i < n; ++i) {
    if (v[i] < r.min) r.min = v[i];
    if (v[i] > r.max) r.max = v[i];
  }
  return r;
}

constexpr KernelTable kScalar{Isa::kScalar, intersect_count_scalar, sparse_dot_scalar,
                              blend_scalar, min_max_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace adsem::kernels
