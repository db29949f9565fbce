#pragma once
// 1-D clustering for sample partitioning: Gaussian-mixture EM with BIC model
// selection over 1..max_components, deterministic quantile initialization,
// and a largest-gap fallback when every mixture fit is ill-conditioned.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "shapesense/geometry.hpp"

namespace shapesense {

struct Cluster1D {
  std::vector<int> members;  // indices into the input value array
  double mean = 0.0;
};

namespace detail {

struct GmmFit {
  std::vector<double> weight, mean, var;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  bool ok = false;
};

inline GmmFit fit_gmm_1d(const std::vector<double>& sorted, int k, double var_floor) {
  const int n = static_cast<int>(sorted.size());
  GmmFit fit;
  fit.weight.assign(k, 1.0 / k);
  fit.mean.resize(k);
  fit.var.resize(k);
  for (int c = 0; c < k; ++c) {
    const double q = (c + 0.5) / k;
    fit.mean[c] = sorted[static_cast<int>(q * (n - 1))];
  }
  const double spread = sorted.back() - sorted.front();
  const double var0 = std::max(var_floor, spread * spread / (4.0 * k * k) + var_floor);
  std::fill(fit.var.begin(), fit.var.end(), var0);

  std::vector<double> resp(static_cast<std::size_t>(n) * k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    double ll = 0.0;
    for (int s = 0; s < n; ++s) {
      double total = 0.0;
      for (int c = 0; c < k; ++c) {
        const double d = sorted[s] - fit.mean[c];
        const double p = fit.weight[c] *
                         std::exp(-0.5 * d * d / fit.var[c]) /
                         std::sqrt(kTwoPi * fit.var[c]);
        resp[s * k + c] = p;
        total += p;
      }
      if (!(total > 0.0) || !std::isfinite(total)) return fit;  // ill-conditioned
      for (int c = 0; c < k; ++c) resp[s * k + c] /= total;
      ll += std::log(total);
    }
    fit.log_likelihood = ll;
    for (int c = 0; c < k; ++c) {
      double w = 0.0, m = 0.0;
      for (int s = 0; s < n; ++s) {
        w += resp[s * k + c];
        m += resp[s * k + c] * sorted[s];
      }
      if (w < 1e-9) return fit;  // component starved
      m /= w;
      double v = 0.0;
      for (int s = 0; s < n; ++s) {
        const double d = sorted[s] - m;
        v += resp[s * k + c] * d * d;
      }
      fit.weight[c] = w / n;
      fit.mean[c] = m;
      fit.var[c] = std::max(v / w, var_floor);
    }
    if (std::abs(ll - prev_ll) < 1e-8 * (1.0 + std::abs(ll))) break;
    prev_ll = ll;
  }
  fit.ok = std::isfinite(fit.log_likelihood);
  return fit;
}

}  // namespace detail

// Partition values into clusters. var_floor bounds component variances away
// from zero (set it from the quantization scale of the data).
inline std::vector<Cluster1D> cluster_1d(std::span<const double> values, int max_components,
                                         double var_floor) {
  std::vector<Cluster1D> clusters;
  const int n = static_cast<int>(values.size());
  if (n == 0) return clusters;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[a] < values[b]; });
  std::vector<double> sorted(n);
  for (int s = 0; s < n; ++s) sorted[s] = values[order[s]];

  const double spread = sorted.back() - sorted.front();
  var_floor = std::max(var_floor, 1e-12);

  // Trivial cases: one point, or everything within quantization width.
  if (n == 1 || spread <= 3.0 * std::sqrt(var_floor)) {
    Cluster1D c;
    c.members.assign(order.begin(), order.end());
    c.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    clusters.push_back(std::move(c));
    return clusters;
  }

  const int k_cap = std::min(max_components, n);
  detail::GmmFit best;
  double best_bic = std::numeric_limits<double>::infinity();
  bool any_ok = false;
  for (int k = 1; k <= k_cap; ++k) {
    const auto fit = detail::fit_gmm_1d(sorted, k, var_floor);
    if (!fit.ok) continue;
    // Components carrying less than two points do not count as real modes.
    bool starved = false;
    for (double w : fit.weight)
      if (w * n < 2.0 && k > 1) starved = true;
    if (starved) continue;
    const double bic = -2.0 * fit.log_likelihood + (3.0 * k - 1.0) * std::log(n);
    if (bic < best_bic) {
      best_bic = bic;
      best = fit;
      any_ok = true;
    }
  }

  std::vector<int> assignment(n, 0);
  int k_used = 1;
  if (any_ok) {
    k_used = static_cast<int>(best.mean.size());
    for (int s = 0; s < n; ++s) {
      double best_p = -1.0;
      for (int c = 0; c < k_used; ++c) {
        const double d = sorted[s] - best.mean[c];
        const double p = best.weight[c] * std::exp(-0.5 * d * d / best.var[c]) /
                         std::sqrt(kTwoPi * best.var[c]);
        if (p > best_p) {
          best_p = p;
          assignment[s] = c;
        }
      }
    }
  } else {
    // Fallback: split at gaps much larger than the typical spacing.
    std::vector<double> gaps;
    for (int s = 0; s + 1 < n; ++s) gaps.push_back(sorted[s + 1] - sorted[s]);
    std::vector<double> g = gaps;
    std::sort(g.begin(), g.end());
    const double median_gap = g[g.size() / 2];
    const double cut = std::max(8.0 * median_gap, 4.0 * std::sqrt(var_floor));
    int label = 0;
    for (int s = 0; s < n; ++s) {
      if (s > 0 && gaps[s - 1] > cut) ++label;
      assignment[s] = label;
    }
    k_used = label + 1;
  }

  clusters.resize(k_used);
  for (int s = 0; s < n; ++s) {
    clusters[assignment[s]].members.push_back(order[s]);
    clusters[assignment[s]].mean += sorted[s];
  }
  std::erase_if(clusters, [](const Cluster1D& c) { return c.members.empty(); });
  for (auto& c : clusters) c.mean /= static_cast<double>(c.members.size());
  return clusters;
}

}  // namespace shapesense
