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

#include "adsem/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "adsem/error.hpp"

namespace adsem {

DayRecord PairDeliveryStats::totals() const {
  DayRecord t;
  for (const auto& d : days) {
    t.impressions_p += d.impressions_p;
    t.impressions_s += d.impressions_s;
    t.conversions_p += d.conversions_p;
    t.conversions_s += d.conversions_s;
    t.revenue_p += d.revenue_p;
    t.revenue_s += d.revenue_s;
  }
  return t;
}

std::optional<double> stat_sig_diff_pair(double conv_p, double conv_s) {
  if (conv_p < 0.0 || conv_s < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "conversion counts must be nonnegative");
  }
  const double total = conv_p + conv_s;
  if (total <= 0.0) return std::nullopt;
  const double delta = std::abs(conv_p - conv_s) / (total / 2.0);
  const double bound = kStatSigMultiplier * std::sqrt(2.0 / total);
  return std::max(0.0, delta - bound);
}

AggregateStatSig aggregate_stat_sig_diff(std::span<const PairValue> pairs) {
  AggregateStatSig out;
  double weighted = 0.0;
  double weights = 0.0;
  for (const auto& p : pairs) {
    if (!p.value) {
      ++out.undefined_pairs;
      continue;
    }
    const double w = std::sqrt(p.revenue_p + p.revenue_s);
    if (!(w > 0.0)) continue;
    weighted += *p.value * w;
    weights += w;
    ++out.used_pairs;
  }
  if (out.used_pairs == 0) {
    throw Error(ErrorCode::kUndefined, "no pair has a defined StatSigDiff with positive revenue");
  }
  out.value = weighted / weights;
  return out;
}

AggregateStatSig aggregate_stat_sig_diff(std::span<const PairDeliveryStats> stats) {
  std::vector<PairValue> values;
  values.reserve(stats.size());
  for (const auto& s : stats) {
    const DayRecord t = s.totals();
    values.push_back({stat_sig_diff_pair(static_cast<double>(t.conversions_p), static_cast<double>(t.conversions_s)),
                      t.revenue_p, t.revenue_s});
  }
  return aggregate_stat_sig_diff(values);
}

std::optional<double> rel_impression_diff(double primary_sum, double shadow_sum) {
  if (!(shadow_sum > 0.0)) return std::nullopt;
  return (primary_sum / shadow_sum - 1.0) * 100.0;
}

std::optional<double> daily_rel_impression_diff(std::span<const PairDeliveryStats> stats, std::size_t day) {
  double p = 0.0, s = 0.0;
  for (const auto& pair : stats) {
    if (day >= pair.days.size()) throw Error(ErrorCode::kInvalidArgument, "day outside simulated range");
    p += static_cast<double>(pair.days[day].impressions_p);
    s += static_cast<double>(pair.days[day].impressions_s);
  }
  return rel_impression_diff(p, s);
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "median of an empty series");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double mad(std::span<const double> series) {
  if (series.empty()) throw Error(ErrorCode::kInvalidArgument, "MAD of an empty series");
  const double m = median({series.begin(), series.end()});
  std::vector<double> dev;
  dev.reserve(series.size());
  for (double x : series) dev.push_back(std::abs(x - m));
  return median(std::move(dev));
}

std::optional<double> recall_at_k(std::span<const std::string> retrieved,
                                  const std::unordered_set<std::string>& relevant, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "recall k must be >= 1");
  if (relevant.empty()) return std::nullopt;
  const std::size_t n = std::min(retrieved.size(), static_cast<std::size_t>(k));
  std::unordered_set<std::string_view> seen;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.contains(retrieved[i]) && seen.insert(retrieved[i]).second) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

AlignmentResult alignment_and_incremental(std::span<const std::string> llm_ranked,
                                          std::span<const std::string> baseline_ranked,
                                          const std::unordered_set<std::string>& relevant, int k) {
  if (k <= 0) throw Error(ErrorCode::kInvalidArgument, "alignment k must be positive");
  const auto top = [k](std::span<const std::string> list) {
    return std::unordered_set<std::string_view>(list.begin(),
                                                list.begin() + std::min(list.size(), static_cast<std::size_t>(k)));
  };
  const auto llm = top(llm_ranked);
  const auto base = top(baseline_ranked);
  std::size_t shared = 0, novel_relevant = 0;
  for (std::string_view id : llm) {
    if (base.contains(id)) {
      ++shared;
    } else if (relevant.contains(std::string(id))) {
      ++novel_relevant;
    }
  }
  AlignmentResult r;
  r.alignment_ratio = static_cast<double>(shared) / static_cast<double>(k);
  if (!relevant.empty()) r.incremental_recall = static_cast<double>(novel_relevant) / static_cast<double>(relevant.size());
  return r;
}

std::optional<double> recall_at_k(std::span<const char> relevant_flags, std::size_t relevant_count, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "recall k must be >= 1");
  if (relevant_count == 0) return std::nullopt;
  const std::size_t n = std::min(relevant_flags.size(), static_cast<std::size_t>(k));
  const auto hits = std::count_if(relevant_flags.begin(), relevant_flags.begin() + n, [](char f) { return f != 0; });
  return static_cast<double>(hits) / static_cast<double>(relevant_count);
}

AlignmentResult alignment_and_incremental(std::span<const std::string> llm_ranked,
                                          std::span<const char> llm_relevant,
                                          std::span<const std::string> baseline_ranked,
                                          std::size_t relevant_count, int k) {
  if (k <= 0) throw Error(ErrorCode::kInvalidArgument, "alignment k must be positive");
  if (llm_relevant.size() != llm_ranked.size()) {
    throw Error(ErrorCode::kInvalidArgument, "relevance flags must parallel the ranked list");
  }
  const std::size_t kk = static_cast<std::size_t>(k);
  const std::unordered_set<std::string_view> base(baseline_ranked.begin(),
                                                  baseline_ranked.begin() + std::min(baseline_ranked.size(), kk));
  std::unordered_set<std::string_view> seen;
  std::size_t shared = 0, novel_relevant = 0;
  for (std::size_t i = 0; i < std::min(llm_ranked.size(), kk); ++i) {
    if (!seen.insert(llm_ranked[i]).second) continue;
    if (base.contains(llm_ranked[i])) {
      ++shared;
    } else if (llm_relevant[i]) {
      ++novel_relevant;
    }
  }
  AlignmentResult r;
  r.alignment_ratio = static_cast<double>(shared) / static_cast<double>(k);
  if (relevant_count > 0) r.incremental_recall = static_cast<double>(novel_relevant) / static_cast<double>(relevant_count);
  return r;
}

std::unordered_set<std::string> relevant_set(const AdCatalog& catalog, const Ad& seed) {
  std::unordered_set<std::string> out;
  for (const auto& ad : catalog.ads()) {
    if (ad.ad_id == seed.ad_id) continue;
    for (const auto& t : ad.latent_topics) {
      if (seed.latent_topics.contains(t)) {
        out.insert(ad.ad_id);
        break;
      }
    }
  }
  return out;
}

}  // namespace adsem
