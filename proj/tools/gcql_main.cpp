#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gcql/baselines.hpp"
#include "gcql/csv.hpp"
#include "gcql/eval.hpp"
#include "gcql/experiment.hpp"
#include "gcql/oracle.hpp"
#include "gcql/plot.hpp"
#include "gcql/serialize.hpp"

using namespace gcql;

namespace {

int cmd_gen_data(const std::string& env_id, int episodes, const std::string& mix_text,
                 const std::string& mode_text, uint64_t seed, const std::string& out) {
  EnvSpec spec = EnvSpec::by_id(env_id);
  Dataset d = generate_dataset(spec, parse_mix(mix_text), episodes, seed,
                               parse_data_mode(mode_text));
  save_dataset(d, out);
  std::cout << "wrote " << d.trajectories.size() << " trajectories ("
            << d.num_transitions() << " transitions) to " << out << '\n';
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& config_path,
              const std::string& method, uint64_t seed, const std::string& out_ckpt,
              const std::string& metrics_path) {
  Dataset d = load_dataset(data_path);
  EnvSpec spec = EnvSpec::by_id(d.env_id);
  KeyValueConfig cfg = config_path.empty() ? KeyValueConfig::parse_string("")
                                           : KeyValueConfig::parse_file(config_path);
  std::vector<MetricsRow> rows;
  if (method == "gcbc") {
    GcbcConfig gc;
    gc.seed = seed;
    gc.gradient_steps = static_cast<int>(cfg.get_int("steps", gc.gradient_steps));
    gc.adam.lr = cfg.get_double("lr", gc.adam.lr);
    GcbcResult r = gcbc_train(d, spec, gc);
    rows = std::move(r.metrics);
    if (!out_ckpt.empty()) {
      Checkpoint c;
      c.kind = "policy";
      for (int s : r.policy.net.sizes) c.dims.push_back(s);
      c.data = r.policy.net.flatten();
      save_checkpoint(c, out_ckpt);
    }
  } else {
    TrainConfig tc = train_config_from(cfg, seed);
    TrainResult r = method == "am"     ? train_offline(d, spec, tc)
                    : method == "her"  ? her_train(d, spec, tc, BaselineKind::HerNoReg)
                    : method == "her-rng"
                        ? her_train(d, spec, tc, BaselineKind::HerRandNegGoal)
                        : throw std::invalid_argument("unknown method '" + method +
                                                      "' (am|gcbc|her|her-rng)");
    rows = std::move(r.metrics);
    if (!out_ckpt.empty()) save_checkpoint(r.model.to_checkpoint(), out_ckpt);
  }
  if (!metrics_path.empty()) {
    CsvTable t;
    t.columns = {"step",       "loss_pos",    "loss_neg",    "mean_q_pos",
                 "mean_q_neg", "buffer_size", "eval_success"};
    for (const auto& r : rows)
      t.rows.push_back({std::to_string(r.step), format_double(r.loss_pos),
                        format_double(r.loss_neg), format_double(r.mean_q_pos),
                        format_double(r.mean_q_neg), std::to_string(r.buffer_size),
                        r.eval_success ? format_double(*r.eval_success) : std::string()});
    write_csv(t, metrics_path);
  }
  std::cout << "trained " << method << " for " << (rows.empty() ? 0 : rows.back().step)
            << " steps\n";
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& env_id, int episodes,
             double eps, uint64_t seed, const std::string& out) {
  EnvSpec spec = EnvSpec::by_id(env_id);
  Checkpoint c = load_checkpoint(ckpt_path);
  QModel model = QModel::from_checkpoint(c, InputCodec::for_env(spec));
  auto goals = fresh_goals(spec, episodes, seed);
  CemConfig cem;
  EvalReport rep = eval_policy(greedy_q_policy(model, spec.actions, cem), spec, goals, eps,
                               spec.horizon, seed);
  std::cout << "success " << rep.successes << "/" << rep.episodes << " = "
            << rep.success_rate << " (stderr " << rep.stderr_value << ")\n";
  if (!out.empty()) {
    CsvTable t;
    t.columns = {"episode", "success", "steps_to_goal"};
    for (int i = 0; i < rep.episodes; ++i)
      t.rows.push_back({std::to_string(i), rep.outcomes[static_cast<size_t>(i)] ? "1" : "0",
                        std::to_string(rep.steps_to_goal[static_cast<size_t>(i)])});
    write_csv(t, out);
  }
  return 0;
}

int cmd_oracle(const std::string& env_id, double gamma, const std::string& out) {
  EnvSpec spec = EnvSpec::by_id(env_id);
  if (gamma <= 0.0) gamma = spec.gamma;
  TabularQ q = value_iteration_goal(spec, gamma);
  Checkpoint c;
  c.kind = "tabular-q";
  c.dims = {q.n_states, q.n_actions, q.n_states};
  c.data = q.q;
  save_checkpoint(c, out);
  std::cout << "wrote oracle Q (" << q.n_states << " states x " << q.n_actions
            << " actions x " << q.n_states << " goals) to " << out << '\n';
  return 0;
}

int cmd_experiment(const std::string& config_path) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
  int failures = run_experiment(cfg);
  if (failures > 0) {
    std::cerr << failures << " run(s) failed\n";
    return 1;
  }
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& x_col,
             const std::vector<std::string>& y_cols, const std::string& title,
             const std::string& out) {
  CsvTable t = read_csv(csv_path);
  emit_plot(t, x_col, y_cols, {title, x_col, "", 720, 440}, out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-conditioned offline Q-learning workbench"};
  app.require_subcommand(1);

  std::string env_id = "four-rooms-7x7", mix = "1.0:1.0", mode = "task", out, data_path,
              config_path, method = "am", metrics_path, ckpt_path, csv_path, x_col = "step",
              title;
  std::vector<std::string> y_cols = {"eval_success"};
  int episodes = 1000;
  double eps = 0.05, gamma = 0.0;
  uint64_t seed = 1;

  auto* gen = app.add_subcommand("gen-data", "generate an offline dataset");
  gen->add_option("--env", env_id, "environment id")->required();
  gen->add_option("--episodes", episodes, "episode count");
  gen->add_option("--mix", mix, "competence mixture c:f,c:f,...");
  gen->add_option("--mode", mode, "goal|task|coverage");
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("--out", out, "output dataset file")->required();

  auto* train = app.add_subcommand("train", "train a model on a dataset");
  train->add_option("--data", data_path, "dataset file")->required();
  train->add_option("--config", config_path, "key-value config file");
  train->add_option("--method", method, "am|gcbc|her|her-rng");
  train->add_option("--seed", seed, "rng seed");
  train->add_option("--out", ckpt_path, "checkpoint output");
  train->add_option("--metrics", metrics_path, "metrics CSV output");

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on fresh goals");
  ev->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  ev->add_option("--env", env_id, "environment id")->required();
  ev->add_option("--episodes", episodes, "evaluation episodes");
  ev->add_option("--eps", eps, "goal-equality tolerance");
  ev->add_option("--seed", seed, "rng seed");
  ev->add_option("--out", out, "per-episode CSV output");

  auto* orc = app.add_subcommand("oracle", "dump exact tabular Q by value iteration");
  orc->add_option("--env", env_id, "environment id")->required();
  orc->add_option("--gamma", gamma, "discount (default: env gamma)");
  orc->add_option("--out", out, "checkpoint output")->required();

  auto* exp = app.add_subcommand("experiment", "run a configured experiment");
  exp->add_option("--config", config_path, "experiment config file")->required();

  auto* plot = app.add_subcommand("plot", "render a CSV as an SVG line plot");
  plot->add_option("--csv", csv_path, "input CSV")->required();
  plot->add_option("--x", x_col, "x column");
  plot->add_option("--y", y_cols, "y columns");
  plot->add_option("--title", title, "plot title");
  plot->add_option("--out", out, "output SVG")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(env_id, episodes, mix, mode, seed, out);
    if (train->parsed())
      return cmd_train(data_path, config_path, method, seed, ckpt_path, metrics_path);
    if (ev->parsed()) return cmd_eval(ckpt_path, env_id, episodes, eps, seed, out);
    if (orc->parsed()) return cmd_oracle(env_id, gamma, out);
    if (exp->parsed()) return cmd_experiment(config_path);
    if (plot->parsed()) return cmd_plot(csv_path, x_col, y_cols, title, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
