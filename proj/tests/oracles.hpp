#pragma once

// Independent reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#include "synthcal/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Exact optimal-transport cost between two uniform empirical measures, solved
/// as an integer min-cost flow: every a_i supplies |b| units, every b_j
/// demands |a| units, shipping one unit from a_i to b_j costs |a_i - b_j|.
/// The transportation LP has integral optimal vertices, so this is the LP value.
inline double transport_lp(const std::vector<double>& a, const std::vector<double>& b) {
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  const int source = na + nb, sink = na + nb + 1, nodes = na + nb + 2;
  struct Edge {
    int to;
    long cap;
    double cost;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
  auto add = [&](int u, int v, long cap, double cost) {
    adj[static_cast<std::size_t>(u)].push_back(static_cast<int>(edges.size()));
    edges.push_back({v, cap, cost});
    adj[static_cast<std::size_t>(v)].push_back(static_cast<int>(edges.size()));
    edges.push_back({u, 0, -cost});
  };
  for (int i = 0; i < na; ++i) add(source, i, nb, 0.0);
  for (int j = 0; j < nb; ++j) add(na + j, sink, na, 0.0);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) add(i, na + j, static_cast<long>(na) * nb, std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)]));

  long remaining = static_cast<long>(na) * nb;
  double total = 0.0;
  while (remaining > 0) {
    // Bellman-Ford shortest path in the residual graph.
    std::vector<double> dist(static_cast<std::size_t>(nodes), std::numeric_limits<double>::infinity());
    std::vector<int> via(static_cast<std::size_t>(nodes), -1);
    dist[static_cast<std::size_t>(source)] = 0.0;
    for (int round = 0; round < nodes; ++round) {
      bool changed = false;
      for (int u = 0; u < nodes; ++u) {
        if (dist[static_cast<std::size_t>(u)] == std::numeric_limits<double>::infinity()) continue;
        for (int e : adj[static_cast<std::size_t>(u)]) {
          const auto& ed = edges[static_cast<std::size_t>(e)];
          if (ed.cap > 0 && dist[static_cast<std::size_t>(u)] + ed.cost < dist[static_cast<std::size_t>(ed.to)] - 1e-15) {
            dist[static_cast<std::size_t>(ed.to)] = dist[static_cast<std::size_t>(u)] + ed.cost;
            via[static_cast<std::size_t>(ed.to)] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    long push = remaining;
    for (int v = sink; v != source; v = edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to)
      push = std::min(push, edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])].cap);
    for (int v = sink; v != source; v = edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to) {
      edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])].cap -= push;
      edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].cap += push;
    }
    total += static_cast<double>(push) * dist[static_cast<std::size_t>(sink)];
    remaining -= push;
  }
  return total / (static_cast<double>(na) * nb);
}

/// KS by evaluating both empirical CDFs at every pooled sample point.
inline double ks_brute_force(const std::vector<double>& a, const std::vector<double>& b) {
  auto cdf = [](const std::vector<double>& s, double x) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= x; })) /
           static_cast<double>(s.size());
  };
  double sup = 0.0;
  for (const auto* s : {&a, &b})
    for (double x : *s) sup = std::max(sup, std::abs(cdf(a, x) - cdf(b, x)));
  return sup;
}

/// Quantile mapping from the definition: rank by counting (ties by position),
/// real order statistic k found by counting, position p*n_r - 0.5 as an exact
/// fraction, linear interpolation between neighbouring order statistics.
inline std::vector<double> quantile_map_brute_force(const std::vector<double>& synth, const std::vector<double>& real) {
  const long ns = static_cast<long>(synth.size()), nr = static_cast<long>(real.size());
  auto order_stat = [&](long k) {
    for (long i = 0; i < nr; ++i) {
      long below = 0, equal_before = 0;
      for (long j = 0; j < nr; ++j) {
        if (real[static_cast<std::size_t>(j)] < real[static_cast<std::size_t>(i)]) ++below;
        else if (real[static_cast<std::size_t>(j)] == real[static_cast<std::size_t>(i)] && j < i) ++equal_before;
      }
      if (below + equal_before == k) return real[static_cast<std::size_t>(i)];
    }
    return real.back();
  };
  std::vector<double> out(synth.size());
  for (long i = 0; i < ns; ++i) {
    long rank = 0;
    for (long j = 0; j < ns; ++j)
      if (synth[static_cast<std::size_t>(j)] < synth[static_cast<std::size_t>(i)] ||
          (synth[static_cast<std::size_t>(j)] == synth[static_cast<std::size_t>(i)] && j < i))
        ++rank;
    // (rank + 1/2) / ns * nr - 1/2 = num / den
    const long num = (2 * rank + 1) * nr - ns, den = 2 * ns;
    double v;
    if (num <= 0) v = order_stat(0);
    else if (num / den >= nr - 1) v = order_stat(nr - 1);
    else {
      const double lo = order_stat(num / den), hi = order_stat(num / den + 1);
      v = num % den == 0 ? lo : lo + (static_cast<double>(num % den) / static_cast<double>(den)) * (hi - lo);
    }
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

/// Central finite differences of f over a parameter vector, step h.
inline std::vector<double> finite_difference(std::vector<double> params, const std::function<double(const std::vector<double>&)>& f,
                                             double h = 1e-5) {
  std::vector<double> grad(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + h;
    const double up = f(params);
    params[k] = saved - h;
    const double down = f(params);
    params[k] = saved;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

/// max_k |a_k - n_k| / max(|a_k|, |n_k|, floor).
inline double max_relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double scale = std::max({std::abs(analytic[k]), std::abs(numeric[k]), floor});
    worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / scale);
  }
  return worst;
}

}  // namespace oracle
