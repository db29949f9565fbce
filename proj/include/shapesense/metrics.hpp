#pragma once
// Evaluation metrics: the per-edge squared head-position error (with the
// direction candidate minimizing it), greedy matching of estimates to true
// edges, and the MSE / per-edge relative root-MSE aggregates.

#include <cmath>
#include <limits>
#include <vector>

#include "shapesense/estimate.hpp"
#include "shapesense/geometry.hpp"

namespace shapesense {

// (lambda cos xi - lh cos xh)^2 + (lambda sin xi - lh sin xh)^2 for one
// candidate direction.
inline double epsilon_sq_single(const DirectedEdge& truth, double lambda_hat,
                                double xi_hat) {
  const double dx = truth.length * truth.direction.cos() - lambda_hat * std::cos(xi_hat);
  const double dy = truth.length * truth.direction.sin() - lambda_hat * std::sin(xi_hat);
  return dx * dx + dy * dy;
}

// Squared error against the candidate minimizing it; reports the chosen xi.
inline double epsilon_sq(const DirectedEdge& truth, const EdgeEstimate& est,
                         double* chosen_xi = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  double best_xi = est.xi_candidates[0];
  for (double xi : est.xi_candidates) {
    const double e = epsilon_sq_single(truth, est.lambda_hat, xi);
    if (e < best) {
      best = e;
      best_xi = xi;
    }
  }
  if (chosen_xi != nullptr) *chosen_xi = best_xi;
  return best;
}

struct RunErrors {
  std::vector<double> eps_sq;  // one per true edge
  bool flagged = false;        // some true edge had no matching estimate
  double v_hat = 0.0;
  int estimates_found = 0;
  double closure_gap = 0.0;
  bool shape_complete = false;
};

// The evaluation list: estimates whose rounded edge count survived, one entry
// per counted edge (an estimate of count two stands for two boundary edges).
inline std::vector<EdgeEstimate> evaluation_estimates(
    const std::vector<EdgeEstimate>& estimates, std::size_t cap) {
  std::vector<EdgeEstimate> out;
  for (const auto& est : estimates)
    for (int c = 0; c < est.n_e_rounded && out.size() < cap; ++c) out.push_back(est);
  return out;
}

// Greedy minimum-error bipartite matching between the true edges and the
// first min(#estimates, #true) estimates. True edges left unmatched score the
// zero-estimate sentinel lambda_i^2 and flag the run.
inline RunErrors match_estimates(const std::vector<DirectedEdge>& truth,
                                 const std::vector<EdgeEstimate>& estimates) {
  RunErrors run;
  const std::size_t n_true = truth.size();
  const std::size_t n_est = std::min(n_true, estimates.size());
  run.eps_sq.assign(n_true, 0.0);
  run.estimates_found = static_cast<int>(estimates.size());

  std::vector<char> true_used(n_true, 0), est_used(n_est, 0);
  for (std::size_t round = 0; round < std::min(n_true, n_est); ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n_true; ++i) {
      if (true_used[i]) continue;
      for (std::size_t j = 0; j < n_est; ++j) {
        if (est_used[j]) continue;
        const double e = epsilon_sq(truth[i], estimates[j]);
        if (e < best) {
          best = e;
          bi = i;
          bj = j;
        }
      }
    }
    true_used[bi] = 1;
    est_used[bj] = 1;
    run.eps_sq[bi] = best;
  }
  for (std::size_t i = 0; i < n_true; ++i) {
    if (!true_used[i]) {
      run.eps_sq[i] = truth[i].length * truth[i].length;
      run.flagged = true;
    }
  }
  return run;
}

struct MetricsReport {
  std::vector<DirectedEdge> truth;
  std::vector<RunErrors> runs;

  // MSE = sum over runs and edges of eps^2, divided by the number of runs.
  double mse() const {
    if (runs.empty()) return 0.0;
    double total = 0.0;
    for (const auto& r : runs)
      for (double e : r.eps_sq) total += e;
    return total / static_cast<double>(runs.size());
  }

  // RSR-MSE_i = sqrt(mean over runs of eps_i^2) / lambda_i.
  double rsr_mse(std::size_t edge_index) const {
    if (runs.empty()) return 0.0;
    double total = 0.0;
    for (const auto& r : runs) total += r.eps_sq[edge_index];
    return std::sqrt(total / static_cast<double>(runs.size())) /
           truth[edge_index].length;
  }

  double mean_v_hat() const {
    if (runs.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : runs) s += r.v_hat;
    return s / static_cast<double>(runs.size());
  }
};

}  // namespace shapesense
