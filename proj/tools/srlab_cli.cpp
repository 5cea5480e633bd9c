#include <array>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srlab/bench.hpp"
#include "srlab/errors.hpp"
#include "srlab/sac.hpp"
#include "srlab/segopt.hpp"
#include "srlab/srpath.hpp"
#include "srlab/topology.hpp"

namespace {

using json = nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw srlab::ValidationError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw srlab::ValidationError("cannot write file: " + path);
  out << text;
}

int run_segment(const std::vector<int>& nodes, const std::vector<double>& cdelays, int depth) {
  srlab::SegmentationProblem prob{nodes, cdelays, depth};
  const srlab::SegmentationResult optimal = srlab::segment_optimal(prob);
  const std::vector<int> greedy = srlab::segment_greedy(prob);
  double greedy_delay = 0.0;
  for (int h : greedy) greedy_delay = std::max(greedy_delay, cdelays[h]);
  json out{{"optimal", {{"heads", optimal.heads}, {"delay", optimal.delay_ms}}},
           {"greedy", {{"heads", greedy}, {"delay", greedy_delay}}}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_count(int n, int depth) {
  std::ostringstream count;
  count << srlab::count_segmentations(n, depth);
  json out{{"n", n}, {"M", depth}, {"count", count.str()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_forward(const std::string& topology_path, const std::string& plan_path) {
  const srlab::Topology topo = srlab::load_topology_file(topology_path);
  const srlab::LabelStackPlan plan = srlab::plan_from_json(slurp(plan_path));
  json out{{"trace", srlab::forward_packet(plan, topo)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_train(const std::string& config_path, const std::string& checkpoint_path,
              const std::string& log_path) {
  const srlab::ExperimentConfig cfg = srlab::load_experiment_config(config_path);
  const srlab::TrafficTrace trace = srlab::build_traffic_trace(cfg);
  srlab::TrainResult trained =
      srlab::train(cfg.topology, cfg.env_config(), trace.normalized, cfg.sac);
  const srlab::Checkpoint checkpoint{cfg.env_config(), cfg.sac, std::move(trained.policy),
                                     std::move(trained.q1), std::move(trained.q2),
                                     trained.alpha};
  srlab::save_checkpoint(checkpoint, checkpoint_path);
  write_file(log_path, srlab::training_log_csv(trained.log));
  std::cerr << "trained " << trained.log.size() << " episodes -> " << checkpoint_path << "\n";
  return 0;
}

int run_eval(const std::string& config_path, const std::string& checkpoint_path,
             const std::string& stem) {
  const srlab::ExperimentConfig cfg = srlab::load_experiment_config(config_path);
  const srlab::Checkpoint checkpoint = srlab::load_checkpoint(checkpoint_path);
  const srlab::ExperimentResult result = srlab::evaluate_policy(cfg, checkpoint);
  if (stem.empty()) {
    std::cout << srlab::rows_to_csv(result.rows);
  } else {
    srlab::export_results(result.rows, result.summary_json, stem);
  }
  return 0;
}

int run_compare(const std::string& config_path, const std::string& stem,
                const std::string& checkpoint_path, const std::string& log_path) {
  const srlab::ExperimentConfig cfg = srlab::load_experiment_config(config_path);
  const srlab::ExperimentResult result = srlab::run_experiment(cfg);
  srlab::export_results(result.rows, result.summary_json, stem);
  if (!checkpoint_path.empty()) srlab::save_checkpoint(result.checkpoint, checkpoint_path);
  if (!log_path.empty()) write_file(log_path, srlab::training_log_csv(result.training_log));
  std::cerr << "wrote " << stem << ".csv and " << stem << "_summary.json\n";
  return 0;
}

int run_gen_topo(int nodes, double extra, std::uint64_t seed, const std::string& out_path) {
  const srlab::Topology topo = srlab::make_random_topology(nodes, extra, seed);
  const std::string text = srlab::topology_to_json(topo);
  if (out_path.empty())
    std::cout << text << "\n";
  else
    write_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segment routing lab: joint route planning and swap-node selection"};
  app.require_subcommand(1);

  auto* segment = app.add_subcommand("segment", "optimal and greedy heads for a fixed path");
  std::vector<int> seg_nodes;
  std::vector<double> seg_cdelays;
  int seg_depth = 4;
  segment->add_option("--nodes", seg_nodes, "path node ids in order")->required()->delimiter(',');
  segment->add_option("--cdelays", seg_cdelays, "controller delay per path node (ms)")
      ->required()
      ->delimiter(',');
  segment->add_option("-M,--depth", seg_depth, "label stack depth limit")->required();

  auto* count = app.add_subcommand("count", "number of depth-bounded segmentations");
  int count_n = 0, count_depth = 0;
  count->add_option("-n", count_n, "path length in links")->required();
  count->add_option("-M,--depth", count_depth, "largest allowed part")->required();

  auto* forward = app.add_subcommand("forward", "replay a label stack plan");
  std::string fwd_topo, fwd_plan;
  forward->add_option("--topology", fwd_topo, "topology json")->required();
  forward->add_option("--plan", fwd_plan, "label stack plan json")->required();

  auto* train = app.add_subcommand("train", "train the routing agent");
  std::string train_cfg, train_ckpt = "checkpoint.json", train_log = "training_log.csv";
  train->add_option("--config", train_cfg, "experiment config json")->required();
  train->add_option("--checkpoint", train_ckpt, "checkpoint output path");
  train->add_option("--log", train_log, "training log csv path");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint over the traffic trace");
  std::string eval_cfg, eval_ckpt, eval_stem;
  eval->add_option("--config", eval_cfg, "experiment config json")->required();
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint json")->required();
  eval->add_option("--out", eval_stem, "output stem (default: rows to stdout)");

  auto* compare = app.add_subcommand("compare", "full train-and-compare experiment");
  std::string cmp_cfg, cmp_stem = "results", cmp_ckpt, cmp_log;
  compare->add_option("--config", cmp_cfg, "experiment config json")->required();
  compare->add_option("--out", cmp_stem, "output stem for csv/summary");
  compare->add_option("--checkpoint", cmp_ckpt, "also save the trained checkpoint");
  compare->add_option("--log", cmp_log, "also save the training log csv");

  auto* gen = app.add_subcommand("gen-topo", "generate a random connected topology");
  int gen_nodes = 10;
  double gen_extra = 0.2;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--nodes", gen_nodes, "node count");
  gen->add_option("--extra", gen_extra, "extra edge probability");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (segment->parsed()) return run_segment(seg_nodes, seg_cdelays, seg_depth);
    if (count->parsed()) return run_count(count_n, count_depth);
    if (forward->parsed()) return run_forward(fwd_topo, fwd_plan);
    if (train->parsed()) return run_train(train_cfg, train_ckpt, train_log);
    if (eval->parsed()) return run_eval(eval_cfg, eval_ckpt, eval_stem);
    if (compare->parsed()) return run_compare(cmp_cfg, cmp_stem, cmp_ckpt, cmp_log);
    if (gen->parsed()) return run_gen_topo(gen_nodes, gen_extra, gen_seed, gen_out);
  } catch (const srlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
