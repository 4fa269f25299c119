#include "gcql/experiment.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gcql/baselines.hpp"
#include "gcql/csv.hpp"
#include "gcql/eval.hpp"
#include "gcql/oracle.hpp"
#include "gcql/plot.hpp"
#include "gcql/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gcql {

std::string version_string() {
#ifdef GCQL_VERSION
  return std::string("gcql-") + GCQL_VERSION;
#else
  return "gcql-dev";
#endif
}

std::vector<MixComponent> parse_mix(const std::string& text) {
  std::vector<MixComponent> mix;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("mix component '" + item + "' is not of the form competence:fraction");
    mix.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  if (mix.empty()) throw ConfigError("empty mix");
  return mix;
}

DataMode parse_data_mode(const std::string& text) {
  if (text == "goal") return DataMode::Goal;
  if (text == "task") return DataMode::Task;
  if (text == "coverage") return DataMode::Coverage;
  throw ConfigError("unknown data mode '" + text + "' (goal|task|coverage)");
}

TrainConfig train_config_from(const KeyValueConfig& cfg, uint64_t seed) {
  TrainConfig tc;
  tc.seed = seed;
  tc.batch_size = static_cast<int>(cfg.get_int("batch", tc.batch_size));
  tc.gradient_steps = static_cast<int>(cfg.get_int("steps", tc.gradient_steps));
  tc.gamma = cfg.get_double("gamma", tc.gamma);
  tc.eps = cfg.get_double("eps", tc.eps);
  tc.buffer_capacity = static_cast<size_t>(cfg.get_int("buffer", 50000));
  tc.warmup_extracts = static_cast<int>(cfg.get_int("warmup", tc.warmup_extracts));
  tc.metrics_every = static_cast<int>(cfg.get_int("metrics_every", tc.metrics_every));
  tc.eval_every = static_cast<int>(cfg.get_int("eval_every", tc.eval_every));
  tc.model.adam.lr = cfg.get_double("lr", tc.model.adam.lr);
  tc.model.target_sync_period =
      static_cast<int>(cfg.get_int("target_sync", tc.model.target_sync_period));
  tc.model.init_output_prior = cfg.get_double("init_prior", tc.model.init_output_prior);
  if (cfg.has("hidden")) {
    tc.model.hidden.clear();
    for (int64_t h : cfg.get_int_list("hidden")) tc.model.hidden.push_back(static_cast<int>(h));
  }
  std::string loss = cfg.get_string("loss", "cross-entropy");
  if (loss == "cross-entropy")
    tc.model.loss = LossKind::CrossEntropy;
  else if (loss == "squared")
    tc.model.loss = LossKind::Squared;
  else
    throw ConfigError("unknown loss '" + loss + "' (cross-entropy|squared)");
  tc.relabel.chain_enabled = cfg.get_bool("chain", tc.relabel.chain_enabled);
  tc.relabel.cuts_per_trajectory =
      static_cast<int>(cfg.get_int("cuts", tc.relabel.cuts_per_trajectory));
  tc.relabel.chain_goals_per_trajectory =
      static_cast<int>(cfg.get_int("chain_goals", tc.relabel.chain_goals_per_trajectory));
  tc.relabel.chain_value_at_extract =
      cfg.get_bool("chain_value_at_extract", tc.relabel.chain_value_at_extract);
  tc.relabel.chain_intermediates =
      cfg.get_bool("chain_intermediates", tc.relabel.chain_intermediates);
  std::string sampler = cfg.get_string("goal_sampler", "uniform");
  if (sampler == "uniform")
    tc.relabel.goal_sampler = GoalSamplerMode::UniformDataset;
  else if (sampler == "q-skewed")
    tc.relabel.goal_sampler = GoalSamplerMode::QSkewed;
  else
    throw ConfigError("unknown goal_sampler '" + sampler + "' (uniform|q-skewed)");
  tc.relabel.skew_temperature = cfg.get_double("skew_temperature", tc.relabel.skew_temperature);
  std::string neg = cfg.get_string("neg_mode", "action-softmax");
  if (neg == "action-softmax")
    tc.neg_mode = NegMode::ActionSoftmax;
  else if (neg == "none")
    tc.neg_mode = NegMode::None;
  else if (neg == "random-goal")
    tc.neg_mode = NegMode::RandomGoal;
  else
    throw ConfigError("unknown neg_mode '" + neg + "' (action-softmax|none|random-goal)");
  tc.neg.temperature = cfg.get_double("neg_temperature", tc.neg.temperature);
  tc.neg.candidate_count = static_cast<int>(cfg.get_int("neg_candidates", tc.neg.candidate_count));
  tc.neg.min_action_distance = cfg.get_double("neg_min_distance", tc.neg.min_action_distance);
  return tc;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CsvTable metrics_table(const std::vector<MetricsRow>& rows) {
  CsvTable t;
  t.columns = {"step",       "loss_pos",   "loss_neg",   "mean_q_pos",
               "mean_q_neg", "buffer_size", "eval_success"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.step), format_double(r.loss_pos),
                      format_double(r.loss_neg), format_double(r.mean_q_pos),
                      format_double(r.mean_q_neg), std::to_string(r.buffer_size),
                      r.eval_success ? format_double(*r.eval_success) : std::string()});
  }
  return t;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

fs::path prepare_dir(const KeyValueConfig& cfg, const std::vector<int64_t>& seeds) {
  fs::path dir = cfg.get_string("out");
  fs::create_directories(dir);
  write_text(dir / "config.txt", cfg.serialize());
  std::ostringstream s;
  for (size_t i = 0; i < seeds.size(); ++i) s << (i ? "," : "") << seeds[i];
  s << '\n';
  write_text(dir / "seeds.txt", s.str());
  write_text(dir / "version.txt", version_string() + "\n");
  return dir;
}

// Mean eval-success learning curve across seeds, aligned by step.
PlotSeries mean_curve(const std::string& label,
                      const std::vector<std::vector<MetricsRow>>& runs) {
  std::map<int64_t, std::pair<double, int>> acc;
  for (const auto& rows : runs)
    for (const auto& r : rows)
      if (r.eval_success) {
        acc[r.step].first += *r.eval_success;
        acc[r.step].second += 1;
      }
  PlotSeries s;
  s.label = label;
  for (const auto& [step, sum_count] : acc) {
    if (sum_count.second != static_cast<int>(runs.size())) continue;
    s.x.push_back(static_cast<double>(step));
    s.y.push_back(sum_count.first / sum_count.second);
  }
  return s;
}

struct CompareOutcome {
  std::map<std::string, std::vector<double>> final_success;  // method -> per seed
  std::map<std::string, std::vector<std::vector<MetricsRow>>> curves;
};

int run_compare_methods(const KeyValueConfig& cfg, const fs::path& dir, json& summary) {
  EnvSpec spec = EnvSpec::by_id(cfg.get_string("env", "four-rooms-7x7"));
  auto seeds = cfg.get_int_list("seeds");
  auto mix = parse_mix(cfg.get_string("mix", "1.0:0.25,0.5:0.25,0.25:0.25,0.0:0.25"));
  DataMode mode = parse_data_mode(cfg.get_string("mode", "task"));
  const int episodes = static_cast<int>(cfg.get_int("episodes", 1200));
  const int eval_episodes = static_cast<int>(cfg.get_int("eval_episodes", 200));
  const int curve_eval_episodes = static_cast<int>(cfg.get_int("curve_eval_episodes", 60));
  const uint64_t data_seed = static_cast<uint64_t>(cfg.get_int("data_seed", 9000));
  const double eps = cfg.get_double("eps", 0.05);

  CompareOutcome out;
  const std::vector<std::string> methods = {"am", "gcbc", "her", "her-rng"};
  int failures = 0;
  for (int64_t seed : seeds) {
    Dataset d = generate_dataset(spec, mix, episodes, data_seed + static_cast<uint64_t>(seed),
                                 mode);
    auto final_goals = fresh_goals(spec, eval_episodes, 101 + static_cast<uint64_t>(seed));
    auto curve_goals = fresh_goals(spec, curve_eval_episodes, 202 + static_cast<uint64_t>(seed));
    for (const auto& method : methods) {
      try {
        std::vector<MetricsRow> rows;
        double final_success = 0.0;
        if (method == "gcbc") {
          GcbcConfig gc;
          gc.seed = static_cast<uint64_t>(seed);
          gc.gradient_steps = static_cast<int>(cfg.get_int("gcbc_steps", 3000));
          gc.adam.lr = cfg.get_double("lr", gc.adam.lr);
          GcbcResult r = gcbc_train(d, spec, gc);
          rows = r.metrics;
          final_success = eval_policy(gcbc_policy(r.policy), spec, final_goals, eps,
                                      spec.horizon, 400 + static_cast<uint64_t>(seed))
                              .success_rate;
        } else {
          TrainConfig tc = train_config_from(cfg, static_cast<uint64_t>(seed));
          EvalHook hook = [&](const QModel& m, int64_t) {
            return eval_policy(greedy_q_policy(m, spec.actions, tc.cem), spec, curve_goals, eps,
                               spec.horizon, 300 + static_cast<uint64_t>(seed))
                .success_rate;
          };
          if (tc.eval_every == 0) tc.eval_every = std::max(1, tc.gradient_steps / 8);
          TrainResult r = method == "am"
                              ? train_offline(d, spec, tc, hook)
                              : her_train(d, spec, tc,
                                          method == "her" ? BaselineKind::HerNoReg
                                                          : BaselineKind::HerRandNegGoal,
                                          hook);
          rows = r.metrics;
          final_success = eval_policy(greedy_q_policy(r.model, spec.actions, tc.cem), spec,
                                      final_goals, eps, spec.horizon,
                                      400 + static_cast<uint64_t>(seed))
                              .success_rate;
        }
        write_csv(metrics_table(rows),
                  (dir / ("metrics_" + method + "_seed" + std::to_string(seed) + ".csv"))
                      .string());
        out.final_success[method].push_back(final_success);
        out.curves[method].push_back(std::move(rows));
      } catch (const std::exception& e) {
        std::cerr << "compare-methods: " << method << " seed " << seed << " failed: " << e.what()
                  << '\n';
        ++failures;
      }
    }
  }

  std::vector<PlotSeries> curves;
  std::vector<std::string> bar_labels;
  std::vector<double> bar_values;
  for (const auto& method : methods) {
    if (out.curves.count(method)) curves.push_back(mean_curve(method, out.curves[method]));
    bar_labels.push_back(method);
    double med = median(out.final_success[method]);
    bar_values.push_back(med);
    json per_seed = json::array();
    for (double v : out.final_success[method]) per_seed.push_back(v);
    summary["final_success"][method] = {{"per_seed", per_seed}, {"median", med}};
  }
  write_text(dir / "curves.svg",
             render_line_svg(curves, {"goal-reaching success during training", "gradient step",
                                      "success", 720, 440}));
  write_text(dir / "final_success.svg",
             render_bar_svg(bar_labels, bar_values,
                            {"final goal-reaching success (median over seeds)", "", "success",
                             720, 440}));
  return failures;
}

int run_chaining_ablation(const KeyValueConfig& cfg, const fs::path& dir, json& summary) {
  EnvSpec spec = EnvSpec::by_id(cfg.get_string("env", "four-rooms-7x7"));
  auto seeds = cfg.get_int_list("seeds");
  auto mix = parse_mix(cfg.get_string("mix", "1.0:1.0"));
  const int episodes = static_cast<int>(cfg.get_int("episodes", 800));
  const uint64_t data_seed = static_cast<uint64_t>(cfg.get_int("data_seed", 9100));
  const double eps = cfg.get_double("eps", 0.05);

  // Cross-boundary probe: starts in the top-left room, goals around the
  // bottom-right task region; all demonstrations get split at the doors.
  TaskSpec task{spec.id, {spec.cell_at(5, 5), spec.cell_at(5, 4), spec.cell_at(4, 5)}, {}};
  std::vector<std::pair<State, Goal>> probe;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (int gcell : task.region_cells)
        probe.emplace_back(spec.make_state(spec.cell_at(r, c)),
                           Goal::of(spec.make_state(gcell)));

  int failures = 0;
  std::map<std::string, std::vector<double>> finals;
  std::map<std::string, std::vector<std::vector<MetricsRow>>> curves;
  for (int64_t seed : seeds) {
    Dataset raw = generate_dataset(spec, mix, episodes, data_seed + static_cast<uint64_t>(seed),
                                   DataMode::Task, {task});
    Dataset d = split_episodes(raw, spec, SplitRule{spec.door_cells},
                               data_seed + 77 + static_cast<uint64_t>(seed));
    EvidenceSet evidence = EvidenceSet::from_dataset(d, spec);
    for (bool chain : {true, false}) {
      const std::string arm = chain ? "chain-on" : "chain-off";
      try {
        TrainConfig tc = train_config_from(cfg, static_cast<uint64_t>(seed));
        tc.relabel.chain_enabled = chain;
        tc.neg.evidence = &evidence;
        if (tc.eval_every == 0) tc.eval_every = std::max(1, tc.gradient_steps / 8);
        EvalHook hook = [&](const QModel& m, int64_t) {
          return eval_pairs(greedy_q_policy(m, spec.actions, tc.cem), spec, probe, eps,
                            spec.horizon, 300 + static_cast<uint64_t>(seed))
              .success_rate;
        };
        TrainResult r = train_offline(d, spec, tc, hook);
        double final_success =
            eval_pairs(greedy_q_policy(r.model, spec.actions, tc.cem), spec, probe, eps,
                       spec.horizon, 400 + static_cast<uint64_t>(seed))
                .success_rate;
        write_csv(metrics_table(r.metrics),
                  (dir / ("metrics_" + arm + "_seed" + std::to_string(seed) + ".csv")).string());
        finals[arm].push_back(final_success);
        curves[arm].push_back(std::move(r.metrics));
      } catch (const std::exception& e) {
        std::cerr << "chaining-ablation: " << arm << " seed " << seed << " failed: " << e.what()
                  << '\n';
        ++failures;
      }
    }
  }
  std::vector<PlotSeries> series;
  for (const auto& [arm, runs] : curves) series.push_back(mean_curve(arm, runs));
  write_text(dir / "curves.svg",
             render_line_svg(series, {"cross-boundary goal success", "gradient step", "success",
                                      720, 440}));
  for (const auto& [arm, vals] : finals) {
    json per_seed = json::array();
    for (double v : vals) per_seed.push_back(v);
    summary["cross_boundary_success"][arm] = {{"per_seed", per_seed},
                                              {"median", median(vals)}};
  }
  return failures;
}

int run_pretrain_finetune(const KeyValueConfig& cfg, const fs::path& dir, json& summary) {
  EnvSpec spec = EnvSpec::by_id(cfg.get_string("env", "four-rooms-7x7"));
  auto seeds = cfg.get_int_list("seeds");
  auto mix = parse_mix(cfg.get_string("mix", "1.0:0.5,0.5:0.25,0.0:0.25"));
  const int episodes = static_cast<int>(cfg.get_int("episodes", 1000));
  const uint64_t data_seed = static_cast<uint64_t>(cfg.get_int("data_seed", 9200));
  TaskSpec task{spec.id, {spec.cell_at(5, 5)}, {}};

  int failures = 0;
  std::map<std::string, std::vector<double>> steps_to;
  std::map<std::string, std::vector<std::vector<MetricsRow>>> curves;
  for (int64_t seed : seeds) {
    Dataset d = generate_dataset(spec, mix, episodes, data_seed + static_cast<uint64_t>(seed),
                                 DataMode::Task);
    try {
      TrainConfig pre = train_config_from(cfg, static_cast<uint64_t>(seed));
      pre.gradient_steps = static_cast<int>(cfg.get_int("pretrain_steps", 3000));
      TaskTrainConfig fin;
      fin.base = train_config_from(cfg, static_cast<uint64_t>(seed));
      fin.max_insertions = static_cast<int>(cfg.get_int("max_insertions", 2500));
      fin.steps_per_insertion = static_cast<int>(cfg.get_int("steps_per_insertion", 4));
      fin.eval_every_insertions = static_cast<int>(cfg.get_int("eval_every_insertions", 25));
      fin.eval_episodes = static_cast<int>(cfg.get_int("task_eval_episodes", 50));
      const double budget = static_cast<double>(fin.max_insertions) * fin.steps_per_insertion;

      PretrainFinetuneResult pf = pretrain_finetune(d, spec, task, pre, fin);
      TaskTrainResult scratch = train_task(spec, task, nullptr, AuxConfig{0.0, task}, fin);

      auto record = [&](const std::string& arm, const TaskTrainResult& r) {
        double steps = r.steps_to_target < 0 ? budget : static_cast<double>(r.steps_to_target);
        steps_to[arm].push_back(steps);
        write_csv(metrics_table(r.metrics),
                  (dir / ("metrics_" + arm + "_seed" + std::to_string(seed) + ".csv")).string());
        curves[arm].push_back(r.metrics);
      };
      record("pretrained", pf.finetune);
      record("scratch", scratch);
      write_csv(metrics_table(pf.pretrain_metrics),
                (dir / ("metrics_pretrain_phase_seed" + std::to_string(seed) + ".csv")).string());
    } catch (const std::exception& e) {
      std::cerr << "pretrain-finetune: seed " << seed << " failed: " << e.what() << '\n';
      ++failures;
    }
  }
  std::vector<PlotSeries> series;
  for (const auto& [arm, runs] : curves) series.push_back(mean_curve(arm, runs));
  write_text(dir / "curves.svg",
             render_line_svg(series, {"task success during fine-tuning", "gradient step",
                                      "success", 720, 440}));
  for (const auto& [arm, vals] : steps_to) {
    json per_seed = json::array();
    for (double v : vals) per_seed.push_back(v);
    summary["steps_to_target"][arm] = {{"per_seed", per_seed}, {"median", median(vals)}};
  }
  return failures;
}

int run_aux_mixin(const KeyValueConfig& cfg, const fs::path& dir, json& summary) {
  EnvSpec spec = EnvSpec::by_id(cfg.get_string("env", "four-rooms-7x7"));
  auto seeds = cfg.get_int_list("seeds");
  auto mix = parse_mix(cfg.get_string("mix", "1.0:0.5,0.5:0.25,0.0:0.25"));
  const int episodes = static_cast<int>(cfg.get_int("episodes", 1000));
  const uint64_t data_seed = static_cast<uint64_t>(cfg.get_int("data_seed", 9300));
  const double xi = cfg.get_double("xi", 0.1);
  TaskSpec task{spec.id, {spec.cell_at(5, 5)}, {}};

  int failures = 0;
  std::map<std::string, std::vector<double>> episodes_to;
  std::map<std::string, std::vector<std::vector<MetricsRow>>> curves;
  for (int64_t seed : seeds) {
    Dataset d = generate_dataset(spec, mix, episodes, data_seed + static_cast<uint64_t>(seed),
                                 DataMode::Task);
    for (double arm_xi : {xi, 0.0}) {
      const std::string arm = arm_xi > 0.0 ? "mixin" : "task-only";
      try {
        TaskTrainConfig tcfg;
        tcfg.base = train_config_from(cfg, static_cast<uint64_t>(seed));
        tcfg.max_insertions = static_cast<int>(cfg.get_int("max_insertions", 2500));
        tcfg.steps_per_insertion = static_cast<int>(cfg.get_int("steps_per_insertion", 4));
        tcfg.eval_every_insertions = static_cast<int>(cfg.get_int("eval_every_insertions", 25));
        tcfg.eval_episodes = static_cast<int>(cfg.get_int("task_eval_episodes", 50));
        TaskTrainResult r = arm_xi > 0.0
                                ? train_aux_mixin(d, spec, AuxConfig{arm_xi, task}, tcfg)
                                : train_task(spec, task, nullptr, AuxConfig{0.0, task}, tcfg);
        double eps_to = r.episodes_to_target < 0
                            ? static_cast<double>(r.env_episodes)
                            : static_cast<double>(r.episodes_to_target);
        episodes_to[arm].push_back(eps_to);
        write_csv(metrics_table(r.metrics),
                  (dir / ("metrics_" + arm + "_seed" + std::to_string(seed) + ".csv")).string());
        curves[arm].push_back(std::move(r.metrics));
      } catch (const std::exception& e) {
        std::cerr << "aux-mixin: " << arm << " seed " << seed << " failed: " << e.what() << '\n';
        ++failures;
      }
    }
  }
  std::vector<PlotSeries> series;
  for (const auto& [arm, runs] : curves) series.push_back(mean_curve(arm, runs));
  write_text(dir / "curves.svg",
             render_line_svg(series, {"task success during online training", "gradient step",
                                      "success", 720, 440}));
  for (const auto& [arm, vals] : episodes_to) {
    json per_seed = json::array();
    for (double v : vals) per_seed.push_back(v);
    summary["env_episodes_to_target"][arm] = {{"per_seed", per_seed}, {"median", median(vals)}};
  }
  return failures;
}

// Enumerates every (state, action, goal) triple the relabeler can emit as a
// positive from this dataset: pairs (t, i) with t < i within one trajectory.
std::vector<std::array<int, 3>> seen_triples(const Dataset& d, const EnvSpec& spec) {
  std::vector<char> mark(static_cast<size_t>(spec.state_count()) * spec.actions.count *
                             spec.state_count(),
                         0);
  const int S = spec.state_count();
  const int A = spec.actions.count;
  for (const auto& tau : d.trajectories) {
    for (size_t t = 0; t < tau.actions.size(); ++t) {
      int s = spec.cell_of(tau.states[t]);
      int a = tau.actions[t].id;
      for (size_t i = t + 1; i < tau.states.size(); ++i) {
        int g = spec.cell_of(tau.states[i]);
        mark[static_cast<size_t>(s * A + a) * S + g] = 1;
      }
    }
  }
  std::vector<std::array<int, 3>> out;
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      for (int g = 0; g < S; ++g)
        if (mark[static_cast<size_t>(s * A + a) * S + g]) out.push_back({s, a, g});
  return out;
}

int run_oracle_check(const KeyValueConfig& cfg, const fs::path& dir, json& summary) {
  auto env_ids = cfg.get_list("envs");
  auto seeds = cfg.get_int_list("seeds");
  int failures = 0;
  for (const auto& env_id : env_ids) {
    EnvSpec spec = EnvSpec::by_id(env_id);
    TabularQ oracle = value_iteration_goal(spec, spec.gamma);
    for (int64_t seed : seeds) {
      try {
        Dataset d = generate_dataset(spec, {{1.0, 1.0}}, 1, static_cast<uint64_t>(seed),
                                     DataMode::Coverage);
        EvidenceSet evidence = EvidenceSet::from_dataset(d, spec);
        TrainConfig tc = train_config_from(cfg, static_cast<uint64_t>(seed));
        tc.gamma = spec.gamma;
        tc.neg.evidence = &evidence;
        TrainResult r = train_offline(d, spec, tc);
        double max_dev = 0.0;
        auto triples = seen_triples(d, spec);
        for (const auto& [s, a, g] : triples) {
          double q = r.model.q(spec.make_state(s), Goal::of(spec.make_state(g)),
                               Action::discrete(a));
          max_dev = std::max(max_dev, std::fabs(q - oracle.at(s, a, g)));
        }
        write_csv(metrics_table(r.metrics),
                  (dir / ("metrics_" + env_id + "_seed" + std::to_string(seed) + ".csv"))
                      .string());
        summary["oracle_deviation"][env_id]["seed" + std::to_string(seed)] = {
            {"max_abs_deviation", max_dev},
            {"seen_triples", triples.size()}};
        std::cout << "oracle-check " << env_id << " seed " << seed << ": max |Q - Q*| = "
                  << max_dev << " over " << triples.size() << " seen triples\n";
      } catch (const std::exception& e) {
        std::cerr << "oracle-check: " << env_id << " seed " << seed << " failed: " << e.what()
                  << '\n';
        ++failures;
      }
    }
  }
  return failures;
}

}  // namespace

int run_experiment(const KeyValueConfig& cfg) {
  const std::string name = cfg.get_string("experiment");
  auto seeds = cfg.get_int_list("seeds");
  fs::path dir = prepare_dir(cfg, seeds);
  json summary;
  summary["experiment"] = name;
  summary["version"] = version_string();

  int failures = 0;
  if (name == "compare-methods")
    failures = run_compare_methods(cfg, dir, summary);
  else if (name == "chaining-ablation")
    failures = run_chaining_ablation(cfg, dir, summary);
  else if (name == "pretrain-finetune")
    failures = run_pretrain_finetune(cfg, dir, summary);
  else if (name == "aux-mixin")
    failures = run_aux_mixin(cfg, dir, summary);
  else if (name == "oracle-check")
    failures = run_oracle_check(cfg, dir, summary);
  else
    throw ConfigError("unknown experiment '" + name + "'");

  summary["failed_runs"] = failures;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return failures;
}

}  // namespace gcql
