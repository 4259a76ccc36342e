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

#include <atomic>
#include <cstdlib>
#include <string>

#include "adsem/error.hpp"
#include "adsem/kernels.hpp"

namespace adsem::kernels {

#if !(defined(__x86_64__) || defined(_M_X64))
namespace detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace detail
#endif

#if !(defined(__aarch64__) || defined(_M_ARM64))
namespace detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace detail
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
      return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel ISA not supported here: " + std::string(to_string(isa)));
  }
  switch (isa) {
    case Isa::kAvx2: return *detail::avx2_table();
    case Isa::kNeon: return *detail::neon_table();
    case Isa::kScalar: break;
  }
  return scalar_table();
}

namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("ADSEM_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (want == to_string(isa) && isa_supported(isa)) return &table_for(isa);
    }
  }
  if (isa_supported(Isa::kAvx2)) return &table_for(Isa::kAvx2);
  if (isa_supported(Isa::kNeon)) return &table_for(Isa::kNeon);
  return &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{detect()};
  return slot;
}

}  // namespace

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&table_for(isa), std::memory_order_release); }

}  // namespace adsem::kernels
