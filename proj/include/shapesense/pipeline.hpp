#pragma once
// Full estimation pipeline over a set of range traces: speed, extraction,
// classification, the parallel and general edge parts, connectivity, the
// count rescue and concave re-evaluation, and boundary assembly.

#include <vector>

#include "shapesense/assemble.hpp"
#include "shapesense/estimate.hpp"
#include "shapesense/extract.hpp"
#include "shapesense/sim.hpp"

namespace shapesense {

struct PipelineResult {
  bool any_detection = false;
  int n_r = 0;
  double m_t = 0.0;
  double v_hat = 0.0;
  std::vector<DetectionSegment> segments;     // all, finalized
  std::vector<int> valid_segments;            // indices into segments
  std::vector<ConsecutivePair> pairs;         // indices into segments
  std::vector<PsiSet> psi_sets;
  std::vector<EdgeEstimate> estimates;        // parallel part first
  std::vector<int> segment_assignment;        // segment -> estimate (-1 none)
  std::vector<ConnectivityRecord> records;
  ShapeEstimate shape;
};

struct PipelineParams {
  ExtractionParams extraction;  // dt/v/r_max filled in from the run
  EstimatorParams estimator;
};

inline PipelineResult run_pipeline(const std::vector<RangeTrace>& traces,
                                   const SimConfig& cfg, PipelineParams params) {
  PipelineResult res;

  double first = 0.0, last = 0.0;
  measure_detection_span(traces, res.m_t, first, last, res.any_detection);
  if (!res.any_detection) return res;

  res.n_r = count_nonzero_detectors(traces);
  res.v_hat = res.m_t > 0.0 ? estimate_speed(res.n_r, res.m_t, cfg) : 0.0;
  if (!(res.v_hat > 0.0)) return res;

  ExtractionParams xp = params.extraction;
  xp.dt = cfg.dt;
  xp.r_max = cfg.r_max;
  xp.v = res.v_hat;

  for (const auto& trace : traces) {
    for (auto& seg : segment_trace(trace, xp))
      res.segments.push_back(finalize_sd(seg, res.v_hat, xp.zero_step_tol));
  }
  apply_sd_noise(res.segments, cfg.sigma_s, cfg.seed);

  for (int i = 0; i < static_cast<int>(res.segments.size()); ++i)
    if (res.segments[i].valid_whole_edge) res.valid_segments.push_back(i);
  res.pairs = pair_consecutive(res.segments, xp);

  EstimatorParams est = params.estimator;
  est.seed = cfg.seed;
  res.psi_sets = classify_segments(res.segments, res.valid_segments, est, cfg.dt);

  const PsiSet* zero_set = nullptr;
  for (const auto& set : res.psi_sets)
    if (set.label == PsiLabel::Zero) zero_set = &set;

  std::vector<EdgeEstimate> parallel;
  if (zero_set != nullptr)
    parallel = estimate_parallel_edges(*zero_set, res.segments, res.v_hat, res.m_t, cfg, est);
  auto general =
      adopt_estimates(res.psi_sets, res.segments, res.v_hat, res.m_t, cfg, est);

  res.estimates = std::move(parallel);
  res.estimates.insert(res.estimates.end(), general.begin(), general.end());

  res.segment_assignment.assign(res.segments.size(), -1);
  for (int e = 0; e < static_cast<int>(res.estimates.size()); ++e)
    for (int idx : res.estimates[e].support) res.segment_assignment[idx] = e;

  res.records = connectivity(res.pairs, res.segment_assignment, est);

  // Rescue rule: a zero-rounded estimate backed by a significant consecutive
  // connection still counts as one edge.
  for (int e = 0; e < static_cast<int>(res.estimates.size()); ++e) {
    if (res.estimates[e].n_e_rounded != 0) continue;
    for (const auto& rec : res.records) {
      if (rec.n_c >= est.n_c_min && (rec.head_estimate == e || rec.tail_estimate == e)) {
        res.estimates[e].n_e_rounded = 1;
        break;
      }
    }
  }

  res.estimates =
      concave_compensation(std::move(res.estimates), res.records, res.v_hat, res.m_t, cfg);

  res.shape = assemble_shape(res.estimates, res.records, est);
  return res;
}

}  // namespace shapesense
