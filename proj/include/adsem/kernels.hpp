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

#pragma once

// Data-parallel inner loops used by similarity scoring and retrieval.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, a SIMD variant (AVX2 on x86-64, NEON on AArch64). The active
// variant is chosen once at startup from CPU features; ADSEM_ISA=scalar|avx2|neon
// overrides the choice. SIMD variants are required to return results that are
// bit-identical to the scalar reference, including floating-point sums, so
// accumulation order is fixed (ascending key order) in every variant.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace adsem::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

struct MinMax {
  double min = 0.0;
  double max = 0.0;
};

struct KernelTable {
  Isa isa;
  // Size of the intersection of two strictly increasing id arrays.
  std::size_t (*intersect_count)(const std::uint32_t* a, std::size_t na,
                                 const std::uint32_t* b, std::size_t nb);
  // Sum over shared keys of va[k] * vb[k], accumulated in ascending key order.
  double (*sparse_dot)(const std::uint32_t* ka, const double* va, std::size_t na,
                       const std::uint32_t* kb, const double* vb, std::size_t nb);
  // out[i] = alpha * norm(s1[i]) + (1 - alpha) * s2[i], where norm is min-max
  // scaling into [0, 1] with bounds (lo, hi); norm is 1 when hi <= lo.
  void (*blend)(const double* s1, const double* s2, std::size_t n, double lo, double hi,
                double alpha, double* out);
  // Requires n >= 1.
  MinMax (*min_max)(const double* v, std::size_t n);
};

const KernelTable& scalar_table();
bool isa_supported(Isa isa);
// Throws adsem::Error if the ISA is not supported on this machine or build.
const KernelTable& table_for(Isa isa);
const KernelTable& active();
// Replaces the process-wide active table. Intended for tests and benchmarks.
void set_active(Isa isa);

// Thin span wrappers over the active table.

inline std::size_t intersect_count(std::span<const std::uint32_t> a,
                                   std::span<const std::uint32_t> b) {
  return active().intersect_count(a.data(), a.size(), b.data(), b.size());
}

struct SparseView {
  std::span<const std::uint32_t> keys;
  std::span<const double> values;
};

inline double sparse_dot(SparseView a, SparseView b) {
  return active().sparse_dot(a.keys.data(), a.values.data(), a.keys.size(), b.keys.data(),
                             b.values.data(), b.keys.size());
}

inline MinMax min_max(std::span<const double> v) { return active().min_max(v.data(), v.size()); }

inline void blend(std::span<const double> stage1, std::span<const double> stage2, MinMax bounds,
                  double alpha, std::span<double> out) {
  active().blend(stage1.data(), stage2.data(), out.size(), bounds.min, bounds.max, alpha,
                 out.data());
}

namespace detail {
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace adsem::kernels
