// Copyright 2026 The dgmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point: train, eval, render.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dgmem/agent.hpp"
#include "dgmem/baselines.hpp"
#include "dgmem/config.hpp"
#include "dgmem/error.hpp"
#include "dgmem/log.hpp"
#include "dgmem/metrics.hpp"
#include "dgmem/render.hpp"
#include "dgmem/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dgmem::Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw dgmem::Error("cannot write " + path.string());
    out << text;
  }
  fs::rename(tmp, path);
}

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;  // key=value
  std::string agent;
  long long seed = -1;
  long long steps = -1;
  double noise = -1.0;
};

dgmem::Config resolve_config(const CommonOptions& o) {
  dgmem::Config cfg = o.config.empty() ? dgmem::Config{}
                                       : dgmem::Config::load(o.config);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw dgmem::ConfigError(kv, "expected key=value");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.agent.empty()) cfg.agent = dgmem::parse_agent_kind(o.agent);
  if (o.seed >= 0) cfg.train.seed = static_cast<std::uint64_t>(o.seed);
  if (o.steps >= 0) cfg.train.steps = o.steps;
  if (o.noise >= 0.0) cfg.env.noise = o.noise;
  cfg.validate();
  return cfg;
}

// Keeps the coverage tracker and its curve alongside a training run.
struct CoverageLog {
  dgmem::CoverageTracker tracker;
  std::int64_t every;
  std::int64_t offset = 0;  // steps taken before a resume
  std::ostringstream csv;

  CoverageLog(const dgmem::GridMap& map, std::int64_t every)
      : tracker(map), every(every) {
    csv << "step,coverage,uniformity\n";
  }
  void observe(const dgmem::StepRecord& r) {
    tracker.visit(r.cell);
    const std::int64_t step = r.step + offset;
    if (!r.reset && step % every == 0) {
      csv << step << ',' << tracker.coverage() << ','
          << dgmem::uniformity(tracker.histogram(), tracker.reachable_count())
          << '\n';
    }
  }
  void save(const fs::path& path) const {
    json j{{"histogram", tracker.histogram()}, {"csv", csv.str()}};
    write_file(path, j.dump());
  }
  void load(const fs::path& path, const dgmem::GridMap& map) {
    const json j = json::parse(read_file(path));
    const auto hist = j.at("histogram").get<std::vector<std::int64_t>>();
    if (hist.size() != tracker.histogram().size()) {
      throw dgmem::Error("coverage state does not match the map");
    }
    for (std::size_t k = 0; k < hist.size(); ++k) {
      const dgmem::Cell c{static_cast<int>(k) % map.width(),
                          static_cast<int>(k) / map.width()};
      for (std::int64_t n = 0; n < hist[k]; ++n) tracker.visit(c);
    }
    csv.str(j.at("csv").get<std::string>());
    csv.seekp(0, std::ios::end);
  }
};

int cmd_train(const CommonOptions& opts, const std::string& out_dir) {
  const dgmem::Config cfg = resolve_config(opts);
  const fs::path out(out_dir);
  fs::create_directories(out);
  const fs::path state_dir = out / "state";

  const dgmem::GridMap map = dgmem::load_map(cfg.map);
  const dgmem::GridWorld env(map, cfg.env);
  const dgmem::Encoder encoder(cfg.env.patch_size, cfg.encoder.dim,
                               cfg.encoder.seed);
  const int actions = dgmem::action_count(cfg.env.actions);

  bool resume = false;
  if (fs::exists(state_dir / "trainer.json")) {
    if (dgmem::Config::load(out / "config.json") != cfg) {
      throw dgmem::Error(
          "output directory holds a run with a different config");
    }
    resume = true;
  }
  write_file(out / "config.json", cfg.to_json());

  std::unique_ptr<dgmem::Agent> agent =
      dgmem::make_baseline(cfg, encoder, actions);
  auto* learner = dynamic_cast<dgmem::DgmemAgent*>(agent.get());

  std::int64_t done = 0;
  if (resume && learner != nullptr) {
    learner->load_state(state_dir);
    done = learner->steps();
    spdlog::info("resuming at step {}", done);
  }

  std::ofstream log(out / "train.jsonl", resume ? std::ios::app : std::ios::trunc);
  std::ofstream rewards(out / "rewards.jsonl",
                        resume ? std::ios::app : std::ios::trunc);
  if (learner != nullptr) {
    learner->on_update = [&](const dgmem::UpdateLogRecord& r) {
      json j{{"step", r.step},
             {"lr", r.lr},
             {"policy_loss", r.ppo.policy_loss},
             {"value_loss", r.ppo.value_loss},
             {"entropy", r.ppo.entropy},
             {"approx_kl", r.ppo.approx_kl},
             {"clip_fraction", r.ppo.clip_fraction},
             {"aborted", r.ppo.aborted},
             {"il_ce", r.il.cross_entropy},
             {"il_samples", r.il.samples},
             {"rolling_success", r.rolling_success},
             {"nodes", r.nodes},
             {"edges", r.edges}};
      log << j.dump() << '\n';
    };
    learner->on_step = [&](const dgmem::TrainLogRecord& r) {
      rewards << fmt::format(
          "{{\"step\":{},\"r_d\":{},\"r_n\":{},\"r_s\":{},\"total\":{},"
          "\"done\":{},\"goal\":{},\"node\":{}}}\n",
          r.step, r.reward.r_d, r.reward.r_n, r.reward.r_s, r.reward.total,
          r.reward.done, r.goal, r.node);
    };
    if (!resume) {
      learner->save_state(state_dir);
      dgmem::save_checkpoint(learner->policy(), out / "policy.ckpt");
      write_file(out / "graph.txt", learner->graph().snapshot());
    }
  }

  dgmem::Harness harness(env, cfg.train.seed, cfg.train.reset_interval);
  CoverageLog coverage(map, 1000);
  if (resume && fs::exists(state_dir / "coverage.json")) {
    coverage.load(state_dir / "coverage.json", map);
  }
  coverage.offset = done;
  const auto observer = [&](const dgmem::StepRecord& r) { coverage.observe(r); };
  const std::int64_t interval =
      cfg.train.checkpoint_interval > 0 ? cfg.train.checkpoint_interval
                                        : cfg.train.steps;
  while (done < cfg.train.steps) {
    const std::int64_t chunk =
        std::min<std::int64_t>(interval - done % std::max<std::int64_t>(interval, 1),
                               cfg.train.steps - done);
    harness.run(*agent, chunk, observer);
    done += chunk;
    log.flush();
    rewards.flush();
    if (learner != nullptr) {
      learner->save_state(state_dir);
      coverage.save(state_dir / "coverage.json");
      spdlog::info("step {}: nodes {} edges {} rolling success {:.3f}", done,
                   learner->graph().size(), learner->graph().edges().size(),
                   learner->rolling_success());
    } else {
      spdlog::info("step {}: coverage {:.3f}", done, coverage.tracker.coverage());
    }
  }

  write_file(out / "coverage.csv", coverage.csv.str());
  json summary{{"agent", dgmem::agent_kind_name(cfg.agent)},
               {"steps", done},
               {"coverage", coverage.tracker.coverage()},
               {"uniformity", coverage.tracker.visited_count() > 0 ? dgmem::uniformity(
                                             coverage.tracker.histogram(),
                                             coverage.tracker.reachable_count())
                                       : 0.0}};
  if (learner != nullptr) {
    dgmem::save_checkpoint(learner->policy(), out / "policy.ckpt");
    dgmem::save_checkpoint(learner->best_policy(), out / "best.ckpt");
    write_file(out / "graph.txt", learner->graph().snapshot());
    summary["nodes"] = learner->graph().size();
    summary["edges"] = learner->graph().edges().size();
    summary["goal_episodes"] = learner->goal_episodes();
    summary["successes"] = learner->successes();
    summary["best_success"] = learner->best_success();
  }
  write_file(out / "summary.json", summary.dump(1) + "\n");
  spdlog::info("training finished: {}", summary.dump());
  return 0;
}

int cmd_eval(const CommonOptions& opts, const std::string& checkpoint,
             const std::string& graph_path, int episodes,
             const std::string& out_dir) {
  const dgmem::Config cfg = resolve_config(opts);
  const dgmem::GridMap map = dgmem::load_map(cfg.map);
  const dgmem::GridWorld env(map, cfg.env);
  const dgmem::Encoder encoder(cfg.env.patch_size, cfg.encoder.dim,
                               cfg.encoder.seed);
  const dgmem::nn::ActorCritic model = dgmem::load_checkpoint(checkpoint);
  if (model.inputs() != dgmem::policy_input_dim(encoder.feature_dim()) ||
      model.actions() != dgmem::action_count(cfg.env.actions)) {
    throw dgmem::VersionError("checkpoint does not match the configured encoder or action set");
  }
  const dgmem::GraphMemory graph =
      dgmem::GraphMemory::from_snapshot(read_file(graph_path), cfg.graph);
  for (const auto& n : graph.nodes()) {
    if (n.feature.size() != encoder.feature_dim()) {
      throw dgmem::VersionError("graph features do not match the encoder");
    }
  }
  dgmem::EvalSetup setup;
  setup.episodes = episodes >= 0 ? episodes : cfg.eval.episodes;
  setup.seed = cfg.eval.seed;
  setup.home = dgmem::Harness::home_for(env, cfg.train.seed).position;
  const dgmem::EvalReport report =
      dgmem::evaluate(env, graph, model, encoder, dgmem::nav_config(cfg), setup);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "report.json", report.to_json());
    write_file(fs::path(out_dir) / "episodes.csv", report.to_csv());
  }
  std::cout << json{{"sr", report.sr},
                    {"spl", report.spl},
                    {"mean_dts", report.mean_dts},
                    {"episodes", report.episodes.size()}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_render(const CommonOptions& opts, const std::string& graph_path,
               const std::string& map_path, const std::string& out_svg) {
  const dgmem::Config cfg = resolve_config(opts);
  dgmem::MapConfig mc = cfg.map;
  if (!map_path.empty()) mc.path = map_path;
  const dgmem::GridMap map = dgmem::load_map(mc);
  const dgmem::GridWorld env(map, cfg.env);
  const dgmem::GraphMemory graph =
      dgmem::GraphMemory::from_snapshot(read_file(graph_path), cfg.graph);
  const dgmem::Cell origin =
      dgmem::Harness::home_for(env, cfg.train.seed).position;
  write_file(out_svg, dgmem::render_svg(map, graph, origin));
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--set", o.overrides, "Override a config key (key=value)");
  cmd->add_option("--agent", o.agent, "dgmem|random|straight|dp|rnd");
  cmd->add_option("--seed", o.seed, "Training seed");
  cmd->add_option("--steps", o.steps, "Training budget in environment steps");
  cmd->add_option("--noise", o.noise, "Pose noise standard deviation");
}

}  // namespace

int main(int argc, char** argv) {
  dgmem::init_logging();
  CLI::App app{"Graph-memory goal-conditioned exploration in a gridworld"};
  app.require_subcommand(1);

  CommonOptions train_opts;
  std::string train_out = "run";
  auto* train = app.add_subcommand("train", "Train an agent");
  add_common(train, train_opts);
  train->add_option("--out", train_out, "Output directory");

  CommonOptions eval_opts;
  std::string checkpoint;
  std::string eval_graph;
  std::string eval_out;
  int episodes = -1;
  auto* eval = app.add_subcommand("eval", "Evaluate navigation");
  add_common(eval, eval_opts);
  eval->add_option("--checkpoint", checkpoint, "Policy checkpoint")->required();
  eval->add_option("--graph", eval_graph, "Graph snapshot")->required();
  eval->add_option("--episodes", episodes, "Number of episodes");
  eval->add_option("--out", eval_out, "Report directory");

  CommonOptions render_opts;
  std::string render_graph;
  std::string render_map;
  std::string render_out = "graph.svg";
  auto* render = app.add_subcommand("render", "Render a graph snapshot as SVG");
  add_common(render, render_opts);
  render->add_option("--graph", render_graph, "Graph snapshot")->required();
  render->add_option("--map", render_map, "Map file (default: from config)");
  render->add_option("--out", render_out, "Output SVG");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return cmd_train(train_opts, train_out);
    if (*eval) {
      return cmd_eval(eval_opts, checkpoint, eval_graph, episodes, eval_out);
    }
    if (*render) return cmd_render(render_opts, render_graph, render_map, render_out);
  } catch (const dgmem::ConfigError& e) {
    spdlog::error("config key '{}': {}", e.key(), e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
