// SPDX-License-Identifier: Apache-2.0
//
// SINR feasibility checks over effective coefficients. A link v is feasible
// in a set S iff
//   g_vv >= beta * sum_{w in S \ {v}} g_vw
// up to a small relative slack absorbing floating-point noise. The exact
// enumeration oracle (exact_max_feasible) is capped at n <= 20 and exists to
// verify everything else.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sinrcap/instance.hpp"

namespace sinrcap {

// Relative slack on the SINR inequality.
inline constexpr double kFeasTolRel = 1e-9;

// Hard cap for the 2^n subset enumeration.
inline constexpr int kExactOracleCap = 20;

struct LinkFeasibility {
  int link = -1;
  double margin = 0.0;  // g_vv - beta * interference, in power units
  bool feasible = false;
};

struct FeasibilityReport {
  std::vector<LinkFeasibility> links;  // one entry per member of S, ascending
  bool feasible = true;                // conjunction of per-link flags
};

namespace detail {

struct MarginInfo {
  double margin = 0.0;        // g_vv - beta * interference
  double scaled_interf = 0.0; // beta * interference, always >= 0
};

// Margin of link v against the members of S (v's own entry is skipped).
// Summation is in ascending index order so independent evaluations agree.
inline MarginInfo link_margin(int v, const IndexSet& S, const EffectiveCoeffs& coeffs) {
  double interference = 0.0;
  for (int w : S) {
    if (w != v) interference += coeffs.g(v, w);
  }
  MarginInfo info;
  info.scaled_interf = coeffs.beta * interference;
  info.margin = coeffs.g(v, v) - info.scaled_interf;
  return info;
}

inline bool margin_ok(const MarginInfo& info, double self_gain) {
  const double scale = std::max(std::abs(self_gain), info.scaled_interf);
  return info.margin >= -kFeasTolRel * scale;
}

inline void require_links_in_range(const IndexSet& S, int n, const char* who) {
  for (int w : S) {
    if (w < 0 || w >= n)
      throw std::invalid_argument(std::string(who) + ": link index out of range");
  }
}

}  // namespace detail

inline bool is_link_feasible(int v, const IndexSet& S, const EffectiveCoeffs& coeffs) {
  detail::require_links_in_range(S, coeffs.n, "is_link_feasible");
  if (std::find(S.begin(), S.end(), v) == S.end())
    throw std::invalid_argument("is_link_feasible: v must be a member of S");
  return detail::margin_ok(detail::link_margin(v, S, coeffs), coeffs.g(v, v));
}

inline FeasibilityReport is_feasible_set(const IndexSet& S, const EffectiveCoeffs& coeffs) {
  detail::require_links_in_range(S, coeffs.n, "is_feasible_set");
  FeasibilityReport report;
  report.links.reserve(S.size());
  for (int v : S) {
    const auto info = detail::link_margin(v, S, coeffs);
    LinkFeasibility entry;
    entry.link = v;
    entry.margin = info.margin;
    entry.feasible = detail::margin_ok(info, coeffs.g(v, v));
    report.feasible = report.feasible && entry.feasible;
    report.links.push_back(entry);
  }
  return report;
}

// Scans links in the given order, keeping each one iff the accumulated set
// stays feasible (full re-check per candidate). The result is feasible and
// maximal with respect to single additions in that order.
inline IndexSet greedy_feasible_subset(const EffectiveCoeffs& coeffs,
                                       const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != coeffs.n)
    throw std::invalid_argument("greedy_feasible_subset: order must be a permutation of 0..n-1");
  std::vector<bool> seen(coeffs.n, false);
  for (int v : order) {
    if (v < 0 || v >= coeffs.n || seen[v])
      throw std::invalid_argument("greedy_feasible_subset: order must be a permutation of 0..n-1");
    seen[v] = true;
  }
  IndexSet chosen;
  for (int candidate : order) {
    IndexSet trial = chosen;
    trial.insert(std::upper_bound(trial.begin(), trial.end(), candidate), candidate);
    if (is_feasible_set(trial, coeffs).feasible) chosen = std::move(trial);
  }
  return chosen;
}

// Exhaustive maximum-cardinality feasible subset; ties broken by the
// lexicographically smallest index set. Refuses n > kExactOracleCap.
inline IndexSet exact_max_feasible(const EffectiveCoeffs& coeffs) {
  const int n = coeffs.n;
  if (n > kExactOracleCap)
    throw std::invalid_argument("exact_max_feasible: n exceeds enumeration cap of " +
                                std::to_string(kExactOracleCap));
  IndexSet best;  // empty set is always feasible
  IndexSet members;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    const int size = std::popcount(mask);
    if (size < static_cast<int>(best.size())) continue;
    members.clear();
    for (int v = 0; v < n; ++v) {
      if (mask & (std::uint64_t{1} << v)) members.push_back(v);
    }
    if (!is_feasible_set(members, coeffs).feasible) continue;
    if (size > static_cast<int>(best.size()) ||
        (size == static_cast<int>(best.size()) &&
         std::lexicographical_compare(members.begin(), members.end(), best.begin(), best.end())))
      best = members;
  }
  return best;
}

// One pass of Algorithm 1 step 3: the links of R feasible within R itself.
// No cascading re-filter after removals.
inline IndexSet filter_feasible(const IndexSet& R, const EffectiveCoeffs& coeffs) {
  detail::require_links_in_range(R, coeffs.n, "filter_feasible");
  IndexSet kept;
  for (int v : R) {
    if (detail::margin_ok(detail::link_margin(v, R, coeffs), coeffs.g(v, v))) kept.push_back(v);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace sinrcap
