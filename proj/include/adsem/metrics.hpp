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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "adsem/catalog.hpp"

namespace adsem {

// One day of delivery for a (primary, shadow) pair.
struct DayRecord {
  std::int64_t impressions_p = 0;
  std::int64_t impressions_s = 0;
  std::int64_t conversions_p = 0;
  std::int64_t conversions_s = 0;
  double revenue_p = 0.0;
  double revenue_s = 0.0;

  bool operator==(const DayRecord&) const = default;
};

struct PairDeliveryStats {
  ShadowPair pair;
  std::vector<DayRecord> days;

  DayRecord totals() const;
  bool operator==(const PairDeliveryStats&) const = default;
};

// Stat-sig conversion difference of one pair with the 1.65-sigma (90%)
// Gaussian bound: max(0, delta - 1.65 * sqrt(2 / (conv_p + conv_s))), where
// delta = |conv_p - conv_s| / ((conv_p + conv_s) / 2). Undefined (nullopt)
// when both counts are zero.
std::optional<double> stat_sig_diff_pair(double conv_p, double conv_s);

inline constexpr double kStatSigMultiplier = 1.65;

struct PairValue {
  std::optional<double> value;  // per-pair StatSigDiff, nullopt when undefined
  double revenue_p = 0.0;
  double revenue_s = 0.0;
};

struct AggregateStatSig {
  double value = 0.0;
  std::size_t used_pairs = 0;
  std::size_t undefined_pairs = 0;
};

// Per-pair values averaged with weights sqrt(rev_p + rev_s). Undefined and
// zero-weight pairs add nothing to either sum. Throws kUndefined when no pair
// has a defined value and positive weight.
AggregateStatSig aggregate_stat_sig_diff(std::span<const PairValue> pairs);
AggregateStatSig aggregate_stat_sig_diff(std::span<const PairDeliveryStats> stats);

// 100 * (sum of primary impressions / sum of shadow impressions - 1) for one
// day; nullopt when the shadow sum is zero.
std::optional<double> daily_rel_impression_diff(std::span<const PairDeliveryStats> stats, std::size_t day);
std::optional<double> rel_impression_diff(double primary_sum, double shadow_sum);

// Median with the two central values averaged for even lengths. Throws
// kInvalidArgument on an empty series.
double median(std::vector<double> values);
// Median absolute deviation from the median.
double mad(std::span<const double> series);

// |top-k ∩ relevant| / |relevant|; nullopt when relevant is empty. Throws
// kInvalidArgument for k < 1.
std::optional<double> recall_at_k(std::span<const std::string> retrieved,
                                  const std::unordered_set<std::string>& relevant, int k);

// Same, from per-position relevance flags of the ranked list and the size of
// the full relevant set.
std::optional<double> recall_at_k(std::span<const char> relevant_flags, std::size_t relevant_count, int k);

struct AlignmentResult {
  double alignment_ratio = 0.0;
  std::optional<double> incremental_recall;  // nullopt when relevant is empty
};

// alignment = |llm_k ∩ base_k| / k; incremental = |(llm_k \ base_k) ∩ relevant| / |relevant|.
// Lists shorter than k are used as they are. Throws kInvalidArgument for k <= 0.
AlignmentResult alignment_and_incremental(std::span<const std::string> llm_ranked,
                                          std::span<const std::string> baseline_ranked,
                                          const std::unordered_set<std::string>& relevant, int k);

// Flag form: llm_relevant[i] marks whether llm_ranked[i] is relevant.
AlignmentResult alignment_and_incremental(std::span<const std::string> llm_ranked,
                                          std::span<const char> llm_relevant,
                                          std::span<const std::string> baseline_ranked,
                                          std::size_t relevant_count, int k);

// Ads sharing at least one latent topic with `seed`, excluding the seed.
std::unordered_set<std::string> relevant_set(const AdCatalog& catalog, const Ad& seed);

}  // namespace adsem
