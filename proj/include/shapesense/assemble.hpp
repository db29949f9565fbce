#pragma once
// Boundary assembly: order edge-estimate instances into a cycle supported by
// the connectivity evidence, then pick one direction candidate per instance
// so that vertex convexity and detection order match the records and the
// closure gap is minimal.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "shapesense/estimate.hpp"

namespace shapesense {

namespace detail {

struct AssemblyScore {
  int vertex_mismatches = 0;
  int order_violations = 0;
  double gap = 0.0;

  bool operator<(const AssemblyScore& o) const {
    if (vertex_mismatches != o.vertex_mismatches)
      return vertex_mismatches < o.vertex_mismatches;
    if (order_violations != o.order_violations)
      return order_violations < o.order_violations;
    return gap < o.gap;
  }
};

// Enumerate cyclic (or, failing that, path) arrangements of the instance
// multiset where neighbors are backed by a connectivity record.
struct ArrangementSearch {
  const std::vector<int>& instance_est;          // estimate id per instance
  const std::vector<std::vector<char>>& allowed;  // estimate-level adjacency
  std::vector<std::vector<int>> cycles;
  std::vector<int> best_path;
  std::vector<int> current;
  std::vector<char> used;
  std::size_t cap = 256;

  ArrangementSearch(const std::vector<int>& inst,
                    const std::vector<std::vector<char>>& adj)
      : instance_est(inst), allowed(adj), used(inst.size(), 0) {}

  bool adjacent(int ia, int ib) const {
    return allowed[instance_est[ia]][instance_est[ib]] != 0;
  }

  void dfs() {
    if (current.size() > best_path.size()) best_path = current;
    if (current.size() == instance_est.size()) {
      if (cycles.size() < cap && adjacent(current.back(), current.front()))
        cycles.push_back(current);
      return;
    }
    for (std::size_t i = 0; i < instance_est.size(); ++i) {
      if (used[i]) continue;
      // Identical instances are interchangeable: only take the first unused
      // copy of each estimate.
      bool duplicate_skipped = false;
      for (std::size_t j = 0; j < i; ++j)
        if (!used[j] && instance_est[j] == instance_est[i]) duplicate_skipped = true;
      if (duplicate_skipped) continue;
      if (!current.empty() && !adjacent(current.back(), static_cast<int>(i))) continue;
      used[i] = 1;
      current.push_back(static_cast<int>(i));
      dfs();
      current.pop_back();
      used[i] = 0;
    }
  }

  void run() {
    used.assign(instance_est.size(), 0);
    current.clear();
    // Fixed starting instance removes rotations of the same cycle.
    used[0] = 1;
    current.push_back(0);
    dfs();
  }
};

}  // namespace detail

// Assemble the boundary from the estimates (expanded by their rounded edge
// counts) and the significant connectivity records. Sign combinations that
// contradict recorded vertex convexity or detection order are rejected ahead
// of the closure criterion; with contradictory connectivity the best path
// cover is returned with complete = false.
inline ShapeEstimate assemble_shape(const std::vector<EdgeEstimate>& estimates,
                                    const std::vector<ConnectivityRecord>& records,
                                    const EstimatorParams& params) {
  ShapeEstimate shape;
  const int n_est = static_cast<int>(estimates.size());

  std::vector<int> instance_est;
  for (int e = 0; e < n_est; ++e)
    for (int c = 0; c < std::max(0, estimates[e].n_e_rounded); ++c)
      instance_est.push_back(e);

  if (instance_est.empty()) {
    // Nothing adopted with a positive count: fall back to the first estimate.
    if (estimates.empty()) return shape;
    instance_est.push_back(0);
  }

  if (instance_est.size() == 1 || instance_est.size() > 12) {
    // Single edge, or too many instances to arrange: emit an open chain.
    for (int ia : instance_est)
      shape.ordered_edges.push_back(
          {ia, estimates[ia].lambda_hat, estimates[ia].xi_candidates[0]});
    std::vector<DirectedEdge> chain;
    for (const auto& pe : shape.ordered_edges)
      chain.push_back({pe.lambda, Angle(pe.xi)});
    shape.closure_gap = closure_gap(chain);
    shape.complete = false;
    return shape;
  }

  std::vector<std::vector<char>> allowed(n_est, std::vector<char>(n_est, 0));
  struct RecordInfo {
    VertexKind vertex;
    int head, tail;
  };
  std::vector<RecordInfo> sig;
  for (const auto& rec : records) {
    if (!rec.significant) continue;
    if (rec.head_estimate >= n_est || rec.tail_estimate >= n_est) continue;
    allowed[rec.head_estimate][rec.tail_estimate] = 1;
    allowed[rec.tail_estimate][rec.head_estimate] = 1;
    sig.push_back({rec.vertex_majority, rec.head_estimate, rec.tail_estimate});
  }

  detail::ArrangementSearch search(instance_est, allowed);
  search.run();

  std::vector<std::vector<int>> arrangements = search.cycles;
  bool cyclic = !arrangements.empty();
  if (!cyclic && search.best_path.size() >= 2) arrangements.push_back(search.best_path);
  if (arrangements.empty()) {
    for (int ia : instance_est)
      shape.ordered_edges.push_back(
          {ia, estimates[ia].lambda_hat, estimates[ia].xi_candidates[0]});
    std::vector<DirectedEdge> chain;
    for (const auto& pe : shape.ordered_edges)
      chain.push_back({pe.lambda, Angle(pe.xi)});
    shape.closure_gap = closure_gap(chain);
    shape.complete = false;
    return shape;
  }

  auto record_for = [&](int est_a, int est_b) -> const RecordInfo* {
    for (const auto& r : sig) {
      if ((r.head == est_a && r.tail == est_b) || (r.head == est_b && r.tail == est_a))
        return &r;
    }
    return nullptr;
  };

  detail::AssemblyScore best_score;
  bool have_best = false;
  std::vector<PlacedEdge> best_edges;
  Vec2 best_gap;

  for (const auto& arrangement : arrangements) {
    const std::size_t m = arrangement.size();
    const std::uint32_t sign_count = 1u << m;
    for (std::uint32_t signs = 0; signs < sign_count; ++signs) {
      std::vector<PlacedEdge> edges(m);
      for (std::size_t s = 0; s < m; ++s) {
        const int est = instance_est[arrangement[s]];
        edges[s] = {est, estimates[est].lambda_hat,
                    estimates[est].xi_candidates[(signs >> s) & 1u]};
      }

      // Vertex positions along the chain (first tail at the origin).
      std::vector<Vec2> tails(m + 1);
      for (std::size_t s = 0; s < m; ++s) {
        tails[s + 1] = tails[s] + Vec2{edges[s].lambda * std::cos(edges[s].xi),
                                       edges[s].lambda * std::sin(edges[s].xi)};
      }

      detail::AssemblyScore score;
      score.gap = (tails[m] - tails[0]).norm();
      const std::size_t junction_count = cyclic ? m : m - 1;
      for (std::size_t s = 0; s < junction_count; ++s) {
        const std::size_t t = (s + 1) % m;
        const auto* rec = record_for(edges[s].estimate_index, edges[t].estimate_index);
        if (rec == nullptr) continue;
        const double turn = std::sin(edges[t].xi - edges[s].xi);
        if (turn > kAngleTol && rec->vertex == VertexKind::Concave) ++score.vertex_mismatches;
        if (turn < -kAngleTol && rec->vertex == VertexKind::Convex) ++score.vertex_mismatches;
        // Detection order: the head-ward edge lies at larger x.
        const Vec2 mid_s = (tails[s] + tails[s + 1]) * 0.5;
        const Vec2 mid_t = (tails[t] + tails[t + 1]) * 0.5;
        const bool s_is_head = rec->head == edges[s].estimate_index &&
                               rec->tail == edges[t].estimate_index;
        const double head_x = s_is_head ? mid_s.x : mid_t.x;
        const double tail_x = s_is_head ? mid_t.x : mid_s.x;
        if (head_x + 1e-9 < tail_x) ++score.order_violations;
      }

      if (!have_best || score < best_score) {
        have_best = true;
        best_score = score;
        best_edges = edges;
        best_gap = tails[m] - tails[0];
      }
    }
  }

  shape.ordered_edges = best_edges;
  if (!cyclic) {
    // Path cover: append the instances the longest path could not reach.
    std::vector<int> remaining(n_est, 0);
    for (int ia : instance_est) ++remaining[ia];
    for (const auto& pe : best_edges) --remaining[pe.estimate_index];
    for (int e = 0; e < n_est; ++e)
      for (int c = 0; c < remaining[e]; ++c)
        shape.ordered_edges.push_back(
            {e, estimates[e].lambda_hat, estimates[e].xi_candidates[0]});
    std::vector<DirectedEdge> chain;
    for (const auto& pe : shape.ordered_edges) chain.push_back({pe.lambda, Angle(pe.xi)});
    best_gap = closure_gap(chain);
  }
  shape.closure_gap = best_gap;
  double perim = 0.0;
  for (const auto& pe : shape.ordered_edges) perim += pe.lambda;
  shape.complete =
      cyclic && perim > 0.0 && best_gap.norm() <= params.closure_tol * perim;
  return shape;
}

}  // namespace shapesense
