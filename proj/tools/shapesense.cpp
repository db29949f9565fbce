// Command-line front end: simulate sensing fields, extract detection
// segments, run the shape estimator, evaluate against a known target, or run
// the whole chain with repetitions and sweeps.
//
// Exit codes: 0 success, 2 configuration error, 3 no detection,
// 4 estimation degenerate.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "shapesense/io.hpp"

namespace fs = std::filesystem;
using namespace shapesense;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoDetection = 3;
constexpr int kExitDegenerate = 4;

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
};

ExperimentSpec load_spec(const CommonOpts& opts) {
  ExperimentSpec spec;
  if (!opts.config_path.empty())
    spec = experiment_spec_from_json(load_json_file(opts.config_path));
  if (!opts.preset.empty()) {
    spec.target = make_preset(opts.preset);
    spec.target_name = opts.preset;
  }
  if (opts.seed) spec.sim.seed = *opts.seed;
  if (opts.runs) spec.runs = *opts.runs;
  spec.validate();
  return spec;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

int cmd_simulate(const CommonOpts& opts) {
  const auto spec = load_spec(opts);
  auto sim = simulate_traces(spec.target, spec.sim);
  inject_loss(sim.traces, spec.sim.p_b, spec.sim.seed);
  if (!sim.any_detection) {
    std::cerr << "warning: no sensor ever detected the target\n";
  }
  auto out = open_out(fs::path(opts.out_dir) / "traces.jsonl");
  write_traces_jsonl(out, sim.traces, spec.sim, sim.m_t);
  std::cout << "wrote traces for " << sim.traces.size() << " sensors (m_t = " << sim.m_t
            << ")\n";
  return sim.any_detection ? kExitOk : kExitNoDetection;
}

int cmd_extract(const CommonOpts& opts, const std::string& traces_path) {
  std::ifstream in(traces_path);
  if (!in) throw std::runtime_error("cannot open " + traces_path);
  const auto file = read_traces_jsonl(in);

  PipelineParams params;
  if (!opts.config_path.empty()) {
    const auto spec = experiment_spec_from_json(load_json_file(opts.config_path));
    params = spec.pipeline;
  }

  double m_t = 0.0, first = 0.0, last = 0.0;
  bool any = false;
  measure_detection_span(file.traces, m_t, first, last, any);
  if (!any) {
    std::cerr << "no detection in trace file\n";
    return kExitNoDetection;
  }
  const int n_r = count_nonzero_detectors(file.traces);
  const double v_hat = estimate_speed(n_r, m_t, file.config);
  if (!(v_hat > 0.0)) {
    std::cerr << "speed estimate degenerate (n_r = " << n_r << ")\n";
    return kExitDegenerate;
  }

  ExtractionParams xp = params.extraction;
  xp.dt = file.config.dt;
  xp.r_max = file.config.r_max;
  xp.v = v_hat;
  std::vector<DetectionSegment> segments;
  for (const auto& trace : file.traces)
    for (auto& seg : segment_trace(trace, xp))
      segments.push_back(finalize_sd(seg, v_hat, xp.zero_step_tol));
  apply_sd_noise(segments, file.config.sigma_s, file.config.seed);
  const auto pairs = pair_consecutive(segments, xp);

  auto seg_out = open_out(fs::path(opts.out_dir) / "segments.jsonl");
  write_segments_jsonl(seg_out, segments);
  auto pair_out = open_out(fs::path(opts.out_dir) / "pairs.jsonl");
  write_pairs_jsonl(pair_out, pairs);
  auto meta_out = open_out(fs::path(opts.out_dir) / "extract_meta.json");
  meta_out << json{{"v_hat", v_hat}, {"m_t", m_t}, {"n_r", n_r},
                   {"config", sim_config_to_json(file.config)}}
                  .dump(2)
           << '\n';
  std::cout << "extracted " << segments.size() << " segments, " << pairs.size()
            << " consecutive pairs (v_hat = " << v_hat << ")\n";
  return kExitOk;
}

int cmd_estimate(const CommonOpts& opts, const std::string& traces_path) {
  std::ifstream in(traces_path);
  if (!in) throw std::runtime_error("cannot open " + traces_path);
  const auto file = read_traces_jsonl(in);

  PipelineParams params;
  if (!opts.config_path.empty()) {
    const auto spec = experiment_spec_from_json(load_json_file(opts.config_path));
    params = spec.pipeline;
  }
  const auto result = run_pipeline(file.traces, file.config, params);
  if (!result.any_detection) {
    std::cerr << "no detection in trace file\n";
    return kExitNoDetection;
  }
  auto out = open_out(fs::path(opts.out_dir) / "estimate.json");
  out << estimate_to_json(result).dump(2) << '\n';
  std::cout << "v_hat = " << result.v_hat << ", " << result.estimates.size()
            << " edge estimates, shape "
            << (result.shape.complete ? "complete" : "incomplete") << '\n';
  return result.estimates.empty() ? kExitDegenerate : kExitOk;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& estimate_path) {
  const auto spec = load_spec(opts);
  const json j = load_json_file(estimate_path);
  std::vector<EdgeEstimate> estimates;
  for (const auto& e : j.at("edges")) {
    EdgeEstimate est;
    est.lambda_hat = e.at("lambda").get<double>();
    est.xi_candidates = {e.at("xi_candidates").at(0).get<double>(),
                         e.at("xi_candidates").at(1).get<double>()};
    est.n_e_hat = e.at("n_e").get<double>();
    est.n_e_rounded = e.at("n_e_rounded").get<int>();
    estimates.push_back(est);
  }
  const auto run = match_estimates(spec.target.edges(), estimates);
  json out_j;
  out_j["eps_sq"] = run.eps_sq;
  out_j["flagged"] = run.flagged;
  double total = 0.0;
  for (double e : run.eps_sq) total += e;
  out_j["total_eps_sq"] = total;
  auto out = open_out(fs::path(opts.out_dir) / "metrics.json");
  out << out_j.dump(2) << '\n';
  std::cout << "total squared error " << total << (run.flagged ? " (flagged)" : "") << '\n';
  return kExitOk;
}

int cmd_pipeline(const CommonOpts& opts) {
  const auto spec = load_spec(opts);
  const auto result = run_experiment(spec);

  json points = json::array();
  for (const auto& pt : result.points) {
    json runs = json::array();
    for (const auto& r : pt.report.runs) {
      runs.push_back({{"eps_sq", r.eps_sq},
                      {"v_hat", r.v_hat},
                      {"flagged", r.flagged},
                      {"closure_gap", r.closure_gap},
                      {"shape_complete", r.shape_complete}});
    }
    json rsr = json::array();
    for (std::size_t i = 0; i < pt.report.truth.size(); ++i)
      rsr.push_back(pt.report.rsr_mse(i));
    points.push_back({{"n_s", pt.sim.n_s},
                      {"v", pt.sim.v},
                      {"p_b", pt.sim.p_b},
                      {"sigma_s", pt.sim.sigma_s},
                      {"mse", pt.report.mse()},
                      {"rsr_mse", rsr},
                      {"mean_v_hat", pt.report.mean_v_hat()},
                      {"runs", runs}});
  }
  auto out = open_out(fs::path(opts.out_dir) / "report.json");
  out << json{{"target", spec.target_name.empty() ? "custom" : spec.target_name},
              {"runs", spec.runs},
              {"points", points}}
             .dump(2)
      << '\n';
  emit_plot_data(result, opts.out_dir);

  bool any_estimates = false;
  for (const auto& pt : result.points)
    for (const auto& r : pt.report.runs) any_estimates = any_estimates || r.estimates_found > 0;
  for (const auto& pt : result.points)
    std::cout << "n_s=" << pt.sim.n_s << " v=" << pt.sim.v << " p_b=" << pt.sim.p_b
              << " sigma_s=" << pt.sim.sigma_s << "  MSE=" << pt.report.mse()
              << "  mean v_hat=" << pt.report.mean_v_hat() << '\n';
  return any_estimates ? kExitOk : kExitDegenerate;
}

int cmd_presets() {
  for (const auto& name : preset_names()) {
    const auto poly = make_preset(name);
    std::cout << name << ": " << poly.edge_count() << " edges, perimeter "
              << poly.perimeter() << '\n';
    for (const auto& e : poly.edges())
      std::cout << "  lambda=" << e.length << " xi=" << e.direction.rad() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shape and speed estimation from location-unknown directional "
               "distance sensors"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string traces_path = "traces.jsonl";
  std::string estimate_path = "estimate.json";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
    cmd->add_option("--preset", opts.preset, "named target preset");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--runs", opts.runs, "repetition count override");
  };

  auto* sim_cmd = app.add_subcommand("simulate", "deploy sensors and write traces");
  add_common(sim_cmd);
  auto* extract_cmd = app.add_subcommand("extract", "segments and pairs from traces");
  add_common(extract_cmd);
  extract_cmd->add_option("--traces", traces_path, "input trace file");
  auto* estimate_cmd = app.add_subcommand("estimate", "full estimate from traces");
  add_common(estimate_cmd);
  estimate_cmd->add_option("--traces", traces_path, "input trace file");
  auto* eval_cmd = app.add_subcommand("evaluate", "score an estimate against the truth");
  add_common(eval_cmd);
  eval_cmd->add_option("--estimate", estimate_path, "estimate JSON file");
  auto* pipe_cmd = app.add_subcommand("pipeline", "simulate + extract + estimate + evaluate");
  add_common(pipe_cmd);
  auto* presets_cmd = app.add_subcommand("presets", "list named targets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) return cmd_simulate(opts);
    if (extract_cmd->parsed()) return cmd_extract(opts, traces_path);
    if (estimate_cmd->parsed()) return cmd_estimate(opts, traces_path);
    if (eval_cmd->parsed()) return cmd_evaluate(opts, estimate_path);
    if (pipe_cmd->parsed()) return cmd_pipeline(opts);
    if (presets_cmd->parsed()) return cmd_presets();
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
