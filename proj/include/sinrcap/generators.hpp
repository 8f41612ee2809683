// SPDX-License-Identifier: Apache-2.0
//
// Synthetic instance generators: random geometric instances on a square,
// planted instances that embed a known feasible core inside uniform filler
// gains, and union-of-copies instances that duplicate subsets of a feasible
// base. All generators are deterministic functions of (params, seed).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sinrcap/feasibility.hpp"
#include "sinrcap/instance.hpp"
#include "sinrcap/rng.hpp"

namespace sinrcap {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlantedInstance {
  Instance instance;
  IndexSet planted;  // sorted; feasible in the returned instance
};

namespace detail {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace detail

// Senders uniform in the box, receivers offset uniformly per coordinate,
// gains G_vw = 1 / d(s_w, r_v)^alpha. A receiver landing exactly on any
// sender is resampled (bounded retries).
inline Instance generate_geometric(const GeometricParams& params, std::uint64_t seed) {
  params.validate();
  const int n = params.n;
  Xoshiro256 rng(seed);

  std::vector<detail::Point> senders(n), receivers(n);
  for (int v = 0; v < n; ++v) {
    senders[v].x = rng.uniform(0.0, params.box_side);
    senders[v].y = rng.uniform(0.0, params.box_side);
    receivers[v].x = senders[v].x + rng.uniform(-params.offset_range, params.offset_range);
    receivers[v].y = senders[v].y + rng.uniform(-params.offset_range, params.offset_range);
  }

  // Resample a receiver that coincides with any sender.
  constexpr int kMaxRetries = 64;
  for (int v = 0; v < n; ++v) {
    int retries = 0;
    auto degenerate = [&](const detail::Point& r) {
      for (int w = 0; w < n; ++w) {
        if (detail::dist(senders[w], r) == 0.0) return true;
      }
      return false;
    };
    while (degenerate(receivers[v])) {
      if (++retries > kMaxRetries)
        throw GenerationError("generate_geometric: receiver " + std::to_string(v) +
                              " kept coinciding with a sender after " +
                              std::to_string(kMaxRetries) + " retries");
      receivers[v].x = senders[v].x + rng.uniform(-params.offset_range, params.offset_range);
      receivers[v].y = senders[v].y + rng.uniform(-params.offset_range, params.offset_range);
    }
  }

  Instance inst;
  inst.n = n;
  inst.beta = params.beta;
  inst.noise = params.noise;
  inst.gain.resize(n, n);
  for (int v = 0; v < n; ++v) {
    for (int w = 0; w < n; ++w) {
      inst.gain(v, w) = std::pow(detail::dist(senders[w], receivers[v]), -params.alpha);
    }
  }
  inst.powers.resize(n);
  for (int v = 0; v < n; ++v) {
    inst.powers[v] = params.power_mode == PowerMode::kUniform
                         ? 1.0
                         : std::pow(detail::dist(senders[v], receivers[v]), params.alpha / 2.0);
  }

  nlohmann::json geometry;
  for (int v = 0; v < n; ++v) {
    geometry["senders"].push_back({senders[v].x, senders[v].y});
    geometry["receivers"].push_back({receivers[v].x, receivers[v].y});
  }
  inst.meta = {{"generator", "geometric"},
               {"seed", seed},
               {"alpha", params.alpha},
               {"box_side", params.box_side},
               {"offset_range", params.offset_range},
               {"power_mode", to_string(params.power_mode)},
               {"geometry", std::move(geometry)}};
  inst.validate();
  return inst;
}

// Plants a greedily-found feasible geometric core of size geometric.n inside
// an instance of n_total links; every gain entry outside the core submatrix
// is iid uniform on (0, kappa]. The geometric pool is enlarged (x2, up to 5
// attempts) until the greedy subset is big enough.
inline PlantedInstance generate_planted(const PlantedParams& params, std::uint64_t seed) {
  params.validate();
  const int core = params.geometric.n;
  const int n = params.n_total;
  Xoshiro256 rng(mix64(seed ^ 0x706c616e746564ull));  // distinct from the pool stream

  constexpr int kMaxAttempts = 5;
  int pool_n = std::max({2 * core, n, 16});
  Instance pool;
  IndexSet greedy;
  int achieved = 0;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt, pool_n *= 2) {
    GeometricParams pool_params = params.geometric;
    pool_params.n = pool_n;
    pool = generate_geometric(pool_params, mix64(seed ^ (0x706f6f6cull + attempt)));
    std::vector<int> order(pool_n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    greedy = greedy_feasible_subset(derive_coeffs(pool), order);
    achieved = std::max(achieved, static_cast<int>(greedy.size()));
    if (static_cast<int>(greedy.size()) >= core) break;
    if (attempt + 1 == kMaxAttempts)
      throw GenerationError("generate_planted: requested core of " + std::to_string(core) +
                            " but greedy feasible subsets reached only " +
                            std::to_string(achieved) + " links");
  }
  greedy.resize(core);  // any subset of a feasible set is feasible

  // Random positions for the core inside the final instance.
  std::vector<int> positions(n);
  std::iota(positions.begin(), positions.end(), 0);
  rng.shuffle(positions);
  IndexSet planted(positions.begin(), positions.begin() + core);
  std::sort(planted.begin(), planted.end());

  // source[p] = pool link installed at position p (-1 for filler positions).
  std::vector<int> source(n, -1);
  for (int i = 0; i < core; ++i) source[planted[i]] = greedy[i];
  // Filler links take powers from unused pool links.
  std::vector<bool> used(pool.n, false);
  for (int v : greedy) used[v] = true;
  int next_unused = 0;
  for (int p = 0; p < n; ++p) {
    if (source[p] >= 0) continue;
    while (used[next_unused]) ++next_unused;
    source[p] = next_unused;
    used[next_unused] = true;
  }

  std::vector<bool> is_core(n, false);
  for (int p : planted) is_core[p] = true;

  Instance inst;
  inst.n = n;
  inst.beta = params.geometric.beta;
  inst.noise = params.geometric.noise;
  inst.powers.resize(n);
  for (int p = 0; p < n; ++p) inst.powers[p] = pool.powers[source[p]];
  inst.gain.resize(n, n);
  for (int w = 0; w < n; ++w) {
    for (int v = 0; v < n; ++v) {
      inst.gain(w, v) = is_core[w] && is_core[v] ? pool.gain(source[w], source[v])
                                                 : rng.uniform_open_closed(params.kappa);
    }
  }
  inst.meta = {{"generator", "planted"},
               {"seed", seed},
               {"kappa", params.kappa},
               {"core_size", core},
               {"power_mode", to_string(params.geometric.power_mode)},
               {"alpha", params.geometric.alpha},
               {"planted", planted}};
  inst.validate();
  return {std::move(inst), std::move(planted)};
}

// Appends duplicates of randomly chosen subsets of base_feasible. A copy
// replicates its original's power, self-gain and every cross-gain, i.e. the
// duplicated link occupies the same physical position as its original.
inline Instance generate_union_of_copies(const Instance& base, const IndexSet& base_feasible,
                                         const std::vector<int>& copy_sizes, std::uint64_t seed) {
  base.validate();
  const EffectiveCoeffs coeffs = derive_coeffs(base);
  detail::require_links_in_range(base_feasible, base.n, "generate_union_of_copies");
  if (!is_feasible_set(base_feasible, coeffs).feasible)
    throw std::invalid_argument("generate_union_of_copies: base_feasible is not feasible in base");
  for (int size : copy_sizes) {
    if (size < 0 || size > static_cast<int>(base_feasible.size()))
      throw std::invalid_argument(
          "generate_union_of_copies: copy sizes must be within |base_feasible|");
  }

  Xoshiro256 rng(mix64(seed ^ 0x756e696f6eull));
  std::vector<int> origin(base.n);
  std::iota(origin.begin(), origin.end(), 0);
  for (int size : copy_sizes) {
    IndexSet pick = base_feasible;
    rng.shuffle(pick);
    pick.resize(size);
    std::sort(pick.begin(), pick.end());
    origin.insert(origin.end(), pick.begin(), pick.end());
  }

  const int n = static_cast<int>(origin.size());
  Instance inst;
  inst.n = n;
  inst.beta = base.beta;
  inst.noise = base.noise;
  inst.powers.resize(n);
  inst.gain.resize(n, n);
  for (int w = 0; w < n; ++w) {
    inst.powers[w] = base.powers[origin[w]];
    for (int v = 0; v < n; ++v) inst.gain(w, v) = base.gain(origin[w], origin[v]);
  }
  inst.meta = {{"generator", "union_of_copies"},
               {"seed", seed},
               {"base_n", base.n},
               {"base_feasible", base_feasible},
               {"origin", std::vector<int>(origin.begin() + base.n, origin.end())}};
  inst.validate();
  return inst;
}

}  // namespace sinrcap
