// Copyright 2026 The localeq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "localeq/metrics.hpp"

namespace oracle {

// Min-cost transport between supplies p and demands q (equal totals) by
// successive shortest paths with Bellman-Ford on the residual graph.
inline double transport_cost(const std::vector<double>& p, const std::vector<double>& q,
                             const std::vector<std::vector<double>>& cost) {
  const std::size_t n = p.size(), m = q.size();
  // Nodes: 0 source, 1..n supplies, n+1..n+m demands, n+m+1 sink.
  const std::size_t N = n + m + 2, S = 0, T = n + m + 1;
  struct Edge {
    std::size_t to;
    double cap, cost;
    std::size_t rev;
  };
  std::vector<std::vector<Edge>> g(N);
  auto add = [&](std::size_t a, std::size_t b, double cap, double c) {
    g[a].push_back({b, cap, c, g[b].size()});
    g[b].push_back({a, 0.0, -c, g[a].size() - 1});
  };
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) add(S, 1 + i, p[i], 0.0);
  for (std::size_t j = 0; j < m; ++j) add(1 + n + j, T, q[j], 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) add(1 + i, 1 + n + j, inf, cost[i][j]);

  double total = 0.0;
  const double eps = 1e-15;
  for (int iter = 0; iter < 10000; ++iter) {
    std::vector<double> dist(N, inf);
    std::vector<std::size_t> prev_node(N, N), prev_edge(N, 0);
    dist[S] = 0.0;
    for (std::size_t round = 0; round + 1 < N; ++round) {
      bool changed = false;
      for (std::size_t u = 0; u < N; ++u) {
        if (dist[u] == inf) continue;
        for (std::size_t k = 0; k < g[u].size(); ++k) {
          const auto& e = g[u][k];
          if (e.cap > eps && dist[u] + e.cost < dist[e.to] - 1e-15) {
            dist[e.to] = dist[u] + e.cost;
            prev_node[e.to] = u;
            prev_edge[e.to] = k;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[T] == inf) break;
    double push = inf;
    for (std::size_t v = T; v != S; v = prev_node[v]) push = std::min(push, g[prev_node[v]][prev_edge[v]].cap);
    if (!(push > eps)) break;
    for (std::size_t v = T; v != S; v = prev_node[v]) {
      auto& e = g[prev_node[v]][prev_edge[v]];
      e.cap -= push;
      g[v][e.rev].cap += push;
    }
    total += push * dist[T];
  }
  return total;
}

inline double unit_metric_transport(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<std::vector<double>> cost(p.size(), std::vector<double>(q.size(), 1.0));
  for (std::size_t i = 0; i < std::min(p.size(), q.size()); ++i) cost[i][i] = 0.0;
  return transport_cost(p, q, cost);
}

// Precision/recall at one threshold by direct counting.
struct Counts {
  std::uint64_t tp = 0, fp = 0, fn = 0;
};
inline Counts count_at(const std::vector<localeq::ScoredPair>& pairs, double t) {
  Counts c;
  for (const auto& p : pairs) {
    const bool pred = p.score >= t;
    if (pred && p.gold) ++c.tp;
    if (pred && !p.gold) ++c.fp;
    if (!pred && p.gold) ++c.fn;
  }
  return c;
}

// Brute-force curve: every distinct score as a threshold, O(n^2).
inline std::vector<localeq::PRPoint> brute_curve(const std::vector<localeq::ScoredPair>& pairs) {
  std::vector<double> ts;
  for (const auto& p : pairs) ts.push_back(p.score);
  std::sort(ts.begin(), ts.end(), std::greater<>());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<localeq::PRPoint> out;
  for (double t : ts) {
    const auto c = count_at(pairs, t);
    localeq::PRPoint pt;
    pt.threshold = t;
    pt.tp = c.tp;
    pt.fp = c.fp;
    pt.fn = c.fn;
    pt.precision = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 1.0;
    pt.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    out.push_back(pt);
  }
  return out;
}

// Linear scan for the best qualifying point; first (highest threshold) wins ties.
inline localeq::OperatingPoint scan_recall_at_precision(const std::vector<localeq::PRPoint>& pts, double target) {
  localeq::OperatingPoint best;
  for (const auto& p : pts)
    if (p.precision >= target && (!best.attainable || p.recall > best.recall)) {
      best.attainable = true;
      best.recall = p.recall;
      best.precision = p.precision;
      best.threshold = p.threshold;
    }
  return best;
}

// Single-pass sums in long double.
inline double pearson_sums(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = static_cast<long double>(x.size()), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double num = n * sxy - sx * sy;
  const long double den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  return static_cast<double>(num / den);
}

}  // namespace oracle
