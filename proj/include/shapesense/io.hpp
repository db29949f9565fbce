#pragma once
// File formats: polygon definitions (JSON), traces / segments / pairs
// (JSON Lines with a metadata header for traces), estimate output (JSON) and
// experiment configuration parsing.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapesense/experiment.hpp"
#include "shapesense/pipeline.hpp"
#include "shapesense/presets.hpp"

namespace shapesense {

using nlohmann::json;

// --- polygon -----------------------------------------------------------

inline json polygon_to_json(const PolygonTarget& poly) {
  json edges = json::array();
  for (const auto& e : poly.edges())
    edges.push_back({{"lambda", e.length}, {"xi", e.direction.rad()}});
  return json{{"edges", edges}, {"anchor", {poly.anchor().x, poly.anchor().y}}};
}

inline PolygonTarget polygon_from_json(const json& j) {
  std::vector<DirectedEdge> edges;
  for (const auto& e : j.at("edges"))
    edges.push_back({e.at("lambda").get<double>(), Angle(e.at("xi").get<double>())});
  Vec2 anchor{0.0, 0.0};
  if (j.contains("anchor")) {
    anchor.x = j["anchor"].at(0).get<double>();
    anchor.y = j["anchor"].at(1).get<double>();
  }
  return PolygonTarget::make(std::move(edges), anchor);
}

// --- sim config --------------------------------------------------------

inline json sim_config_to_json(const SimConfig& cfg) {
  return json{{"omega_width", cfg.omega_width},
              {"omega_height", cfg.omega_height},
              {"n_s", cfg.n_s},
              {"r_max", cfg.r_max},
              {"v", cfg.v},
              {"dt", cfg.dt},
              {"seed", cfg.seed},
              {"p_b", cfg.p_b},
              {"sigma_s", cfg.sigma_s},
              {"vertical_offset", cfg.vertical_offset}};
}

inline SimConfig sim_config_from_json(const json& j) {
  SimConfig cfg;
  if (j.contains("omega_width")) cfg.omega_width = j["omega_width"].get<double>();
  if (j.contains("omega_height")) cfg.omega_height = j["omega_height"].get<double>();
  if (j.contains("n_s")) cfg.n_s = j["n_s"].get<int>();
  if (j.contains("r_max")) cfg.r_max = j["r_max"].get<double>();
  if (j.contains("v")) cfg.v = j["v"].get<double>();
  if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("p_b")) cfg.p_b = j["p_b"].get<double>();
  if (j.contains("sigma_s")) cfg.sigma_s = j["sigma_s"].get<double>();
  if (j.contains("vertical_offset")) cfg.vertical_offset = j["vertical_offset"].get<double>();
  cfg.validate();
  return cfg;
}

// --- traces (JSONL: meta header line, then one line per sensor) ---------

inline void write_traces_jsonl(std::ostream& out, const std::vector<RangeTrace>& traces,
                               const SimConfig& cfg, double m_t) {
  json meta{{"type", "meta"}, {"config", sim_config_to_json(cfg)}, {"m_t", m_t}};
  out << meta.dump() << '\n';
  for (const auto& tr : traces) {
    json samples = json::array();
    for (const auto& s : tr.samples) {
      switch (s.kind) {
        case RangeSample::Kind::Distance: samples.push_back(s.value); break;
        case RangeSample::Kind::NoDetection: samples.push_back(nullptr); break;
        case RangeSample::Kind::Lost: samples.push_back("lost"); break;
      }
    }
    json line{{"sensor_id", tr.sensor_id}, {"t0", tr.t0}, {"dt", tr.dt},
              {"samples", samples}};
    out << line.dump() << '\n';
  }
}

struct TraceFile {
  SimConfig config;
  double m_t = 0.0;
  std::vector<RangeTrace> traces;
};

inline TraceFile read_traces_jsonl(std::istream& in) {
  TraceFile file;
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (!have_meta) {
      if (!j.contains("type") || j["type"] != "meta")
        throw std::runtime_error("trace file must start with a meta line");
      file.config = sim_config_from_json(j.at("config"));
      file.m_t = j.at("m_t").get<double>();
      have_meta = true;
      continue;
    }
    RangeTrace tr;
    tr.sensor_id = j.at("sensor_id").get<int>();
    tr.t0 = j.at("t0").get<double>();
    tr.dt = j.at("dt").get<double>();
    for (const auto& s : j.at("samples")) {
      if (s.is_null())
        tr.samples.push_back(RangeSample::none());
      else if (s.is_string())
        tr.samples.push_back(RangeSample::lost());
      else
        tr.samples.push_back(RangeSample::distance(s.get<double>()));
    }
    file.traces.push_back(std::move(tr));
  }
  if (!have_meta) throw std::runtime_error("empty trace file");
  return file;
}

// --- segments and pairs (JSONL) -----------------------------------------

inline const char* boundary_event_name(BoundaryEvent e) {
  switch (e) {
    case BoundaryEvent::SlopeChange: return "slope_change";
    case BoundaryEvent::JumpDown: return "jump_down";
    case BoundaryEvent::JumpUp: return "jump_up";
    case BoundaryEvent::AppearBelowMax: return "appear_below_max";
    case BoundaryEvent::DisappearBelowMax: return "disappear_below_max";
    case BoundaryEvent::TraceEdge: return "trace_edge";
    case BoundaryEvent::LostGap: return "lost_gap";
  }
  return "unknown";
}

inline BoundaryEvent boundary_event_from_name(const std::string& name) {
  if (name == "slope_change") return BoundaryEvent::SlopeChange;
  if (name == "jump_down") return BoundaryEvent::JumpDown;
  if (name == "jump_up") return BoundaryEvent::JumpUp;
  if (name == "appear_below_max") return BoundaryEvent::AppearBelowMax;
  if (name == "disappear_below_max") return BoundaryEvent::DisappearBelowMax;
  if (name == "trace_edge") return BoundaryEvent::TraceEdge;
  if (name == "lost_gap") return BoundaryEvent::LostGap;
  throw std::runtime_error("unknown boundary event: " + name);
}

inline void write_segments_jsonl(std::ostream& out,
                                 const std::vector<DetectionSegment>& segments) {
  for (const auto& s : segments) {
    json line{{"sensor_id", s.sensor_id}, {"t_s", s.t_s},   {"t_e", s.t_e},
              {"r_s", s.r_s},             {"r_e", s.r_e},   {"l_d", s.l_d},
              {"s_d", s.s_d},             {"valid", s.valid_whole_edge},
              {"start_event", boundary_event_name(s.start_event)},
              {"end_event", boundary_event_name(s.end_event)},
              {"forced_zero", s.forced_zero}, {"max_step", s.max_step}};
    out << line.dump() << '\n';
  }
}

inline std::vector<DetectionSegment> read_segments_jsonl(std::istream& in) {
  std::vector<DetectionSegment> segments;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    DetectionSegment s;
    s.sensor_id = j.at("sensor_id").get<int>();
    s.t_s = j.at("t_s").get<double>();
    s.t_e = j.at("t_e").get<double>();
    s.r_s = j.at("r_s").get<double>();
    s.r_e = j.at("r_e").get<double>();
    s.l_d = j.at("l_d").get<double>();
    s.s_d = j.at("s_d").get<double>();
    s.valid_whole_edge = j.at("valid").get<bool>();
    s.start_event = boundary_event_from_name(j.at("start_event").get<std::string>());
    s.end_event = boundary_event_from_name(j.at("end_event").get<std::string>());
    if (j.contains("forced_zero")) s.forced_zero = j["forced_zero"].get<bool>();
    if (j.contains("max_step")) s.max_step = j["max_step"].get<double>();
    segments.push_back(s);
  }
  return segments;
}

inline void write_pairs_jsonl(std::ostream& out, const std::vector<ConsecutivePair>& pairs) {
  for (const auto& p : pairs) {
    json line{{"first", p.first},
              {"second", p.second},
              {"vertex", p.vertex == VertexKind::Concave ? "concave" : "convex"},
              {"order", p.order == DetectionOrder::FirstNearerHead ? "first_nearer_head"
                                                                   : "first_nearer_tail"}};
    out << line.dump() << '\n';
  }
}

inline std::vector<ConsecutivePair> read_pairs_jsonl(std::istream& in) {
  std::vector<ConsecutivePair> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ConsecutivePair p;
    p.first = j.at("first").get<int>();
    p.second = j.at("second").get<int>();
    p.vertex = j.at("vertex").get<std::string>() == "concave" ? VertexKind::Concave
                                                              : VertexKind::Convex;
    p.order = j.at("order").get<std::string>() == "first_nearer_tail"
                  ? DetectionOrder::FirstNearerTail
                  : DetectionOrder::FirstNearerHead;
    pairs.push_back(p);
  }
  return pairs;
}

// --- estimate output -----------------------------------------------------

inline json estimate_to_json(const PipelineResult& result) {
  json edges = json::array();
  for (const auto& e : result.estimates) {
    edges.push_back({{"lambda", e.lambda_hat},
                     {"xi_candidates", {e.xi_candidates[0], e.xi_candidates[1]}},
                     {"n_e", e.n_e_hat},
                     {"n_e_rounded", e.n_e_rounded},
                     {"support_count", e.support.size()},
                     {"source", e.source == EdgeEstimate::Source::ParallelPart
                                    ? "parallel"
                                    : "general"}});
  }
  json connectivity = json::array();
  for (const auto& r : result.records) {
    connectivity.push_back(
        {{"head", r.head_estimate},
         {"tail", r.tail_estimate},
         {"n_c", r.n_c},
         {"vertex", r.vertex_majority == VertexKind::Concave ? "concave" : "convex"}});
  }
  json ordered = json::array();
  for (const auto& pe : result.shape.ordered_edges)
    ordered.push_back({{"estimate_index", pe.estimate_index},
                       {"lambda", pe.lambda},
                       {"xi", pe.xi}});
  return json{{"v_hat", result.v_hat},
              {"n_r", result.n_r},
              {"m_t", result.m_t},
              {"edges", edges},
              {"connectivity", connectivity},
              {"shape",
               {{"ordered_edges", ordered},
                {"closure_gap", {result.shape.closure_gap.x, result.shape.closure_gap.y}},
                {"complete", result.shape.complete}}}};
}

// --- experiment configuration --------------------------------------------

inline PolygonTarget target_from_json(const json& j, std::string* name = nullptr) {
  if (j.is_string()) {
    if (name != nullptr) *name = j.get<std::string>();
    return make_preset(j.get<std::string>());
  }
  if (name != nullptr) *name = "custom";
  return polygon_from_json(j);
}

inline ExperimentSpec experiment_spec_from_json(const json& j) {
  ExperimentSpec spec;
  if (j.contains("target")) spec.target = target_from_json(j["target"], &spec.target_name);
  if (j.contains("sim")) spec.sim = sim_config_from_json(j["sim"]);
  if (j.contains("runs")) spec.runs = j["runs"].get<int>();
  if (j.contains("estimator")) {
    const auto& e = j["estimator"];
    auto& p = spec.pipeline.estimator;
    if (e.contains("s_small")) p.s_small = e["s_small"].get<double>();
    if (e.contains("s_large")) p.s_large = e["s_large"].get<double>();
    if (e.contains("band_lo")) p.band_lo = e["band_lo"].get<double>();
    if (e.contains("band_hi")) p.band_hi = e["band_hi"].get<double>();
    if (e.contains("eps_l")) p.eps_l = e["eps_l"].get<double>();
    if (e.contains("max_pairs")) p.max_pairs = e["max_pairs"].get<int>();
    if (e.contains("k_max")) p.k_max = e["k_max"].get<int>();
    if (e.contains("n_c_min")) p.n_c_min = e["n_c_min"].get<int>();
    if (e.contains("closure_tol")) p.closure_tol = e["closure_tol"].get<double>();
  }
  if (j.contains("extraction")) {
    const auto& e = j["extraction"];
    auto& p = spec.pipeline.extraction;
    if (e.contains("tol_slope_change")) p.tol_slope_change = e["tol_slope_change"].get<double>();
    if (e.contains("jump_factor")) p.jump_factor = e["jump_factor"].get<double>();
    if (e.contains("min_samples")) p.min_samples = e["min_samples"].get<int>();
    if (e.contains("zero_step_tol")) p.zero_step_tol = e["zero_step_tol"].get<double>();
    if (e.contains("least_squares_sd")) p.least_squares_sd = e["least_squares_sd"].get<bool>();
  }
  if (j.contains("sweep")) {
    Sweep sweep;
    const auto& s = j["sweep"];
    if (s.contains("n_s")) sweep.n_s = s["n_s"].get<std::vector<int>>();
    if (s.contains("v")) sweep.v = s["v"].get<std::vector<double>>();
    if (s.contains("p_b")) sweep.p_b = s["p_b"].get<std::vector<double>>();
    if (s.contains("sigma_s")) sweep.sigma_s = s["sigma_s"].get<std::vector<double>>();
    spec.sweep = sweep;
  }
  spec.validate();
  return spec;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace shapesense
