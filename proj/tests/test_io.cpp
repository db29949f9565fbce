// File format round trips and the CSV emitters.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "shapesense/io.hpp"

using namespace shapesense;

TEST(IoPolygon, RoundTrip) {
  const auto truck = make_truck();
  const auto j = polygon_to_json(truck);
  const auto back = polygon_from_json(j);
  ASSERT_EQ(back.edge_count(), truck.edge_count());
  for (std::size_t i = 0; i < truck.edge_count(); ++i) {
    EXPECT_DOUBLE_EQ(back.edges()[i].length, truck.edges()[i].length);
    EXPECT_DOUBLE_EQ(back.edges()[i].direction.rad(), truck.edges()[i].direction.rad());
  }
  EXPECT_THROW(polygon_from_json(json{{"edges", json::array()}}), std::exception);
}

TEST(IoTraces, RoundTripPreservesSamples) {
  SimConfig cfg;
  cfg.omega_width = 800.0;
  cfg.n_s = 60;
  cfg.seed = 3;
  cfg.p_b = 0.05;
  const auto tri = make_triangle();
  auto sim = simulate_traces(tri, cfg);
  inject_loss(sim.traces, cfg.p_b, cfg.seed);

  std::stringstream buf;
  write_traces_jsonl(buf, sim.traces, cfg, sim.m_t);
  const auto file = read_traces_jsonl(buf);
  EXPECT_DOUBLE_EQ(file.m_t, sim.m_t);
  EXPECT_EQ(file.config.n_s, cfg.n_s);
  ASSERT_EQ(file.traces.size(), sim.traces.size());
  for (std::size_t i = 0; i < sim.traces.size(); ++i) {
    ASSERT_EQ(file.traces[i].samples.size(), sim.traces[i].samples.size());
    EXPECT_DOUBLE_EQ(file.traces[i].t0, sim.traces[i].t0);
    for (std::size_t k = 0; k < sim.traces[i].samples.size(); ++k) {
      EXPECT_EQ(static_cast<int>(file.traces[i].samples[k].kind),
                static_cast<int>(sim.traces[i].samples[k].kind));
      if (sim.traces[i].samples[k].is_distance())
        EXPECT_DOUBLE_EQ(file.traces[i].samples[k].value, sim.traces[i].samples[k].value);
    }
  }
}

TEST(IoSegments, RoundTrip) {
  std::vector<DetectionSegment> segs(3);
  segs[0].sensor_id = 4;
  segs[0].t_s = 10.5;
  segs[0].t_e = 30.25;
  segs[0].r_s = 80.0;
  segs[0].r_e = 20.0;
  segs[0].l_d = 19.75;
  segs[0].s_d = -3.0379746835443036;
  segs[0].start_event = BoundaryEvent::AppearBelowMax;
  segs[0].end_event = BoundaryEvent::SlopeChange;
  segs[0].valid_whole_edge = true;
  segs[1].start_event = BoundaryEvent::JumpDown;
  segs[1].end_event = BoundaryEvent::LostGap;
  segs[2].forced_zero = true;

  std::stringstream buf;
  write_segments_jsonl(buf, segs);
  const auto back = read_segments_jsonl(buf);
  ASSERT_EQ(back.size(), segs.size());
  EXPECT_DOUBLE_EQ(back[0].s_d, segs[0].s_d);
  EXPECT_EQ(back[0].start_event, BoundaryEvent::AppearBelowMax);
  EXPECT_EQ(back[1].end_event, BoundaryEvent::LostGap);
  EXPECT_TRUE(back[2].forced_zero);

  std::vector<ConsecutivePair> pairs(2);
  pairs[0] = {3, 4, VertexKind::Concave, DetectionOrder::FirstNearerHead};
  pairs[1] = {7, 8, VertexKind::Convex, DetectionOrder::FirstNearerHead};
  std::stringstream pair_buf;
  write_pairs_jsonl(pair_buf, pairs);
  const auto pairs_back = read_pairs_jsonl(pair_buf);
  ASSERT_EQ(pairs_back.size(), 2u);
  EXPECT_EQ(pairs_back[0].vertex, VertexKind::Concave);
  EXPECT_EQ(pairs_back[1].first, 7);
}

TEST(IoConfig, ExperimentSpecParsing) {
  const auto j = json::parse(R"({
    "target": "truck",
    "sim": {"n_s": 500, "seed": 9, "p_b": 0.001},
    "estimator": {"s_small": 0.25, "n_c_min": 20},
    "runs": 3,
    "sweep": {"n_s": [100, 200]}
  })");
  const auto spec = experiment_spec_from_json(j);
  EXPECT_EQ(spec.target_name, "truck");
  EXPECT_EQ(spec.sim.n_s, 500);
  EXPECT_EQ(spec.sim.seed, 9u);
  EXPECT_DOUBLE_EQ(spec.pipeline.estimator.s_small, 0.25);
  EXPECT_EQ(spec.pipeline.estimator.n_c_min, 20);
  EXPECT_EQ(spec.runs, 3);
  ASSERT_TRUE(spec.sweep.has_value());
  EXPECT_EQ(spec.sweep->n_s.size(), 2u);

  EXPECT_THROW(experiment_spec_from_json(json::parse(R"({"runs": 0})")),
               std::invalid_argument);
  EXPECT_THROW(experiment_spec_from_json(json::parse(R"({"sim": {"p_b": 2.0}})")),
               std::invalid_argument);
}

TEST(IoCsv, DeterministicEmission) {
  ExperimentSpec spec;
  spec.target = make_triangle();
  spec.target_name = "triangle";
  spec.sim.omega_width = 1200.0;
  spec.sim.n_s = 250;
  spec.sim.seed = 21;
  spec.runs = 1;
  Sweep sweep;
  sweep.n_s = {150, 250};
  spec.sweep = sweep;
  const auto result = run_experiment(spec);
  ASSERT_EQ(result.points.size(), 2u);

  const auto dir1 = std::filesystem::temp_directory_path() / "shapesense_csv_a";
  const auto dir2 = std::filesystem::temp_directory_path() / "shapesense_csv_b";
  emit_plot_data(result, dir1);
  emit_plot_data(result, dir2);
  for (const char* name : {"rsr_mse_vs_ns.csv", "mse_vs_noise.csv", "mse_vs_speed.csv"}) {
    std::ifstream a(dir1 / name), b(dir2 / name);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str()) << name;
    EXPECT_FALSE(sa.str().empty());
  }

  // Row count: one per (sweep point, edge) in the RSR file.
  std::ifstream rsr(dir1 / "rsr_mse_vs_ns.csv");
  std::string line;
  int rows = 0;
  while (std::getline(rsr, line))
    if (!line.empty() && line[0] != '#' && line.rfind("n_s", 0) != 0) ++rows;
  EXPECT_EQ(rows, 2 * 3);

  // No points at all: header-only files.
  ExperimentResult empty;
  empty.spec = spec;
  const auto dir3 = std::filesystem::temp_directory_path() / "shapesense_csv_empty";
  emit_plot_data(empty, dir3);
  std::ifstream empty_rsr(dir3 / "rsr_mse_vs_ns.csv");
  int lines = 0, data_rows = 0;
  while (std::getline(empty_rsr, line)) {
    ++lines;
    if (!line.empty() && line[0] != '#' && line.rfind("n_s", 0) != 0) ++data_rows;
  }
  EXPECT_EQ(lines, 2);  // comment + column header
  EXPECT_EQ(data_rows, 0);
}
