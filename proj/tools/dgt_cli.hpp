#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dgt/dgt.hpp"

namespace dgt::cli {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

struct TreeOptions {
  std::string data;
  std::string label_col = "-1";
  bool no_header = false;
  std::string task = "reg";
  int height = 2;
  int layers = 1;
  std::vector<int> hidden_dims;
  std::uint64_t seed = 0;
  std::string model_out;
  bool collapse = false;
  bool keep_layers = false;
};

struct BatchOptions {
  int epochs = 100;
  int batch = 128;
  double lr = 1e-2;
  double l1 = 0.0;
  double l2 = 0.0;
  double momentum = 0.0;
  double clip = 1e-2;
  std::string clip_mode = "norm";
  int restarts = 3;
  bool no_scheduler = false;
  double val_frac = 0.0;
  std::string log_out;
};

struct BanditOptions {
  std::string loss = "squared";
  std::string estimator = "one_point";
  std::size_t rounds = 50000;
  double delta_explore = 0.3;
  double delta_perturb = 0.5;
  int accumulate = 4;
  double lr = 1e-3;
  double momentum = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double val_frac = 0.2;
  std::size_t snapshot_every = 1000;
  std::string trace_out;
};

struct ForestOptions {
  int trees = 30;
  double fraction = 1.0;
  int threads = 1;
};

struct ApplyOptions {
  std::string model_in;
  std::string data;
  std::string label_col = "-1";
  bool no_header = false;
  std::string task;
  std::string out;
};

namespace detail {

inline Task parse_task(const std::string& s) { return s == "clf" ? Task::kClassification : Task::kRegression; }

inline std::string dims_text(const std::vector<int>& dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? ", " : "") << dims[i];
  os << ']';
  return os.str();
}

inline OverparamSpec resolve_spec(const TreeOptions& t, bool layers_given) {
  if (!t.hidden_dims.empty()) {
    const int implied = static_cast<int>(t.hidden_dims.size()) + 1;
    if (layers_given && implied != t.layers) throw ConfigError("--layers disagrees with --hidden-dims");
    for (int w : t.hidden_dims) {
      if (w < 1) throw ConfigError("hidden dimensions must be >= 1");
    }
    return OverparamSpec{t.hidden_dims};
  }
  if (t.layers == 1) return OverparamSpec::single();
  if (t.layers == 3) return OverparamSpec::standard_three_layer(t.height);
  throw ConfigError("--layers other than 1 or 3 needs --hidden-dims");
}

inline Dataset read_data(const std::string& path, const std::string& label_col, bool no_header, Task task,
                         std::vector<double> class_values = {}) {
  CsvOptions opts;
  opts.label_column = label_col;
  opts.has_header = !no_header;
  opts.task = task;
  opts.class_values = std::move(class_values);
  return load_csv(path, opts);
}

inline TrainConfig batch_config(const TreeOptions& t, const BatchOptions& b) {
  TrainConfig cfg;
  cfg.height = t.height;
  cfg.epochs = b.epochs;
  cfg.batch_size = b.batch;
  cfg.lr = b.lr;
  cfg.l1 = b.l1;
  cfg.l2 = b.l2;
  cfg.restarts = b.restarts;
  cfg.use_scheduler = !b.no_scheduler;
  cfg.optimizer.momentum = b.momentum;
  if (b.clip < 0.0) throw ConfigError("--clip must be >= 0");
  cfg.optimizer.clip = b.clip;
  cfg.optimizer.clip_mode = b.clip == 0.0 ? ClipMode::kNone : b.clip_mode == "value" ? ClipMode::kValue : ClipMode::kGlobalNorm;
  cfg.validate();
  return cfg;
}

inline nlohmann::ordered_json config_json(const TreeOptions& t, const OverparamSpec& spec) {
  nlohmann::ordered_json j;
  j["height"] = t.height;
  j["layers"] = spec.layers();
  j["hidden_dims"] = spec.dims_for(t.height);
  return j;
}

inline void add_batch_json(nlohmann::ordered_json& j, const TrainConfig& cfg) {
  j["epochs"] = cfg.epochs;
  j["batch"] = cfg.batch_size;
  j["lr"] = cfg.lr;
  j["l1"] = cfg.l1;
  j["l2"] = cfg.l2;
  j["momentum"] = cfg.optimizer.momentum;
  j["clip"] = cfg.optimizer.clip;
  j["restarts"] = cfg.restarts;
  j["scheduler"] = cfg.use_scheduler ? "cosine" : "none";
}

inline void echo_batch_config(std::ostream& out, const TreeOptions& t, const OverparamSpec& spec,
                              const TrainConfig& cfg) {
  out << "config: lr=" << cfg.lr << " batch=" << cfg.batch_size << " clip=" << cfg.optimizer.clip
      << " restarts=" << cfg.restarts << " epochs=" << cfg.epochs << " momentum=" << cfg.optimizer.momentum
      << " l1=" << cfg.l1 << " l2=" << cfg.l2 << " scheduler=" << (cfg.use_scheduler ? "cosine" : "none") << '\n';
  out << "tree: height=" << t.height << " layers=" << spec.layers() << " hidden_dims=" << dims_text(spec.dims_for(t.height))
      << '\n';
}

inline void write_epoch_log(const std::string& path, const std::vector<EpochRecord>& log) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << std::setprecision(10);
  for (const EpochRecord& r : log) {
    f << "epoch=" << r.epoch << " step=" << r.step << " lr=" << r.lr << " train_loss=" << r.train_loss;
    if (r.validation_metric) f << " val_metric=" << *r.validation_metric;
    f << '\n';
  }
}

inline std::string metric_text(Task task, double m) {
  std::ostringstream os;
  if (task == Task::kRegression) {
    os << "rmse=" << std::setprecision(6) << m;
  } else {
    os << "accuracy=" << std::fixed << std::setprecision(2) << 100.0 * m << '%';
  }
  return os.str();
}

// Splits off a held-out part when frac > 0, then normalizes with train stats.
inline std::pair<Dataset, std::optional<Dataset>> prepare(const Dataset& all, double frac, std::uint64_t seed) {
  if (frac < 0.0 || frac >= 1.0) throw ConfigError("held-out fraction must be in [0, 1)");
  std::pair<Dataset, std::optional<Dataset>> out;
  if (frac > 0.0) {
    std::vector<Dataset> parts = split(all, {1.0 - frac, frac}, seed);
    out.first = std::move(parts[0]);
    out.second = std::move(parts[1]);
    fit_apply_normalization(out.first, {&*out.second});
  } else {
    out.first = all;
    fit_apply_normalization(out.first);
  }
  return out;
}

inline ModelFile base_model(const Dataset& train, std::uint64_t seed, nlohmann::ordered_json config) {
  ModelFile m;
  m.task = train.task;
  m.class_values = train.class_values;
  m.normalization = train.normalization;
  m.config = std::move(config);
  m.seed = seed;
  return m;
}

inline void store_tree(ModelFile& m, TreeParams params, const TreeOptions& t) {
  if (t.collapse && t.keep_layers) throw ConfigError("--collapse and --keep-layers are exclusive");
  if (t.keep_layers) {
    m.payload = std::move(params);
  } else {
    m.payload = collapse(params);
  }
}

inline int cmd_train(const TreeOptions& t, const BatchOptions& b, bool layers_given, std::ostream& out) {
  const Task task = parse_task(t.task);
  const OverparamSpec spec = resolve_spec(t, layers_given);
  const TrainConfig cfg = batch_config(t, b);
  echo_batch_config(out, t, spec, cfg);
  const Dataset all = read_data(t.data, t.label_col, t.no_header, task);
  out << "data: n=" << all.size() << " d=" << all.dim() << '\n';
  auto [train, val] = prepare(all, b.val_frac, t.seed);

  const TrainResult res = train_batch(train, cfg, spec, t.seed, val ? &*val : nullptr);
  write_epoch_log(b.log_out.empty() ? t.model_out + ".log" : b.log_out, res.log);

  const PathTables tables(t.height);
  const auto predict = [&](const Vector& x) { return forward_hard(x, res.params, tables).value; };
  out << "train " << metric_text(task, task_metric(predict, train)) << '\n';
  if (val) out << "val " << metric_text(task, task_metric(predict, *val)) << '\n';

  nlohmann::ordered_json config = config_json(t, spec);
  add_batch_json(config, cfg);
  ModelFile m = base_model(train, t.seed, config);
  store_tree(m, res.params, t);
  save_model(m, t.model_out);
  out << "model written to " << t.model_out << '\n';
  return kOk;
}

inline int cmd_forest(const TreeOptions& t, const BatchOptions& b, const ForestOptions& f, bool layers_given,
                      std::ostream& out) {
  const Task task = parse_task(t.task);
  const OverparamSpec spec = resolve_spec(t, layers_given);
  const TrainConfig cfg = batch_config(t, b);
  if (f.threads < 1) throw ConfigError("--threads must be >= 1");
  echo_batch_config(out, t, spec, cfg);
  out << "forest: trees=" << f.trees << " fraction=" << f.fraction << '\n';
  const Dataset all = read_data(t.data, t.label_col, t.no_header, task);
  out << "data: n=" << all.size() << " d=" << all.dim() << '\n';
  auto [train, val] = prepare(all, b.val_frac, t.seed);

  ForestTrainResult res = train_forest(train, f.trees, cfg, spec, f.fraction, t.seed, f.threads);
  const auto predict = [&](const Vector& x) { return predict_forest(res.model, x); };
  out << "train " << metric_text(task, task_metric(predict, train)) << '\n';
  if (val) out << "val " << metric_text(task, task_metric(predict, *val)) << '\n';

  nlohmann::ordered_json config = config_json(t, spec);
  add_batch_json(config, cfg);
  config["trees"] = f.trees;
  config["fraction"] = f.fraction;
  ModelFile m = base_model(train, t.seed, config);
  m.payload = std::move(res.model);
  save_model(m, t.model_out);
  out << "model written to " << t.model_out << '\n';
  return kOk;
}

inline OracleLoss parse_loss(const std::string& s) {
  OracleLoss loss;
  if (s == "squared") {
    loss.kind = OracleLoss::Kind::kSquared;
  } else if (s == "zero_one") {
    loss.kind = OracleLoss::Kind::kZeroOne;
  } else if (s.rfind("huber", 0) == 0) {
    loss.kind = OracleLoss::Kind::kHuber;
    if (s.size() > 5) {
      if (s[5] != ':') throw ConfigError("huber loss is written huber:XI");
      try {
        std::size_t used = 0;
        loss.xi = std::stod(s.substr(6), &used);
        if (used != s.size() - 6) throw ConfigError("bad huber threshold in " + s);
      } catch (const std::logic_error&) {
        throw ConfigError("bad huber threshold in " + s);
      }
      if (!(loss.xi > 0.0)) throw ConfigError("huber threshold must be > 0");
    }
  } else {
    throw ConfigError("unknown loss " + s);
  }
  return loss;
}

inline Estimator parse_estimator(const std::string& s) {
  if (s == "one_point") return Estimator::kOnePoint;
  if (s == "two_point") return Estimator::kTwoPoint;
  if (s == "classification") return Estimator::kClassification;
  throw ConfigError("unknown estimator " + s);
}

inline int cmd_bandit_sim(const TreeOptions& t, const BanditOptions& o, bool layers_given, std::ostream& out) {
  const Task task = parse_task(t.task);
  const OverparamSpec spec = resolve_spec(t, layers_given);
  const bool zero_loss = o.loss == "zero";
  const OracleLoss loss = zero_loss ? OracleLoss{} : parse_loss(o.loss);
  BanditConfig cfg;
  cfg.estimator = parse_estimator(o.estimator);
  cfg.delta_explore = o.delta_explore;
  cfg.delta_perturb = o.delta_perturb;
  cfg.accumulate = o.accumulate;
  cfg.lr = o.lr;
  cfg.l1 = o.l1;
  cfg.l2 = o.l2;
  cfg.optimizer.momentum = o.momentum;
  cfg.snapshot_every = o.snapshot_every;
  cfg.seed = t.seed;
  cfg.validate();
  if (o.rounds < 1) throw ConfigError("--rounds must be >= 1");
  const bool clf_estimator = cfg.estimator == Estimator::kClassification;
  if (clf_estimator != (task == Task::kClassification)) throw ConfigError("estimator does not match the task");
  if (!zero_loss && (loss.kind == OracleLoss::Kind::kZeroOne) != clf_estimator) {
    throw ConfigError("loss does not match the estimator");
  }

  out << "bandit: estimator=" << estimator_name(cfg.estimator) << " loss=" << o.loss
      << " delta_explore=" << cfg.delta_explore << " delta_perturb=" << cfg.delta_perturb << " lr=" << cfg.lr
      << " accumulate=" << cfg.accumulate << " rounds=" << o.rounds << '\n';
  out << "tree: height=" << t.height << " layers=" << spec.layers() << " hidden_dims=" << dims_text(spec.dims_for(t.height))
      << '\n';
  const Dataset all = read_data(t.data, t.label_col, t.no_header, task);
  out << "data: n=" << all.size() << " d=" << all.dim() << '\n';
  auto [train, heldout] = prepare(all, o.val_frac, t.seed);

  std::mt19937_64 rng(t.seed);
  const int outputs = task == Task::kRegression ? 1 : train.num_classes;
  TreeParams init = init_params(t.height, train.dim(), outputs, spec, leaf_init_for(task), rng);
  const PathTables tables(t.height);

  // Labels stay inside the simulation; the learner only sees loss values.
  OracleLoss sim_loss = loss;
  if (zero_loss) sim_loss.kind = clf_estimator ? OracleLoss::Kind::kZeroOne : OracleLoss::Kind::kSquared;
  DatasetSimulation sim(train, sim_loss, o.rounds, splitmix64(t.seed));
  FunctionOracle zero([](double) { return 0.0; });
  LossOracle& oracle = zero_loss ? static_cast<LossOracle&>(zero) : static_cast<LossOracle&>(sim);

  const Dataset& eval_set = heldout ? *heldout : train;
  const auto evaluate = [&](const TreeParams& p) {
    return task_metric([&](const Vector& x) { return forward_hard(x, p, tables).value; }, eval_set);
  };
  const BanditResult res = train_bandit(sim, oracle, cfg, init, tables, evaluate);

  if (!o.trace_out.empty()) {
    std::ofstream f(o.trace_out);
    if (!f) throw DataError("cannot write " + o.trace_out);
    f << std::setprecision(10) << "round,cumulative_loss,queries,heldout_metric\n";
    for (const Snapshot& s : res.trace.snapshots) {
      const double cum = s.round == 0 ? 0.0 : res.trace.cumulative_loss[s.round - 1];
      f << s.round << ',' << cum << ',' << s.queries << ',' << s.metric << '\n';
    }
  }
  const double avg = res.trace.rounds() ? res.trace.cumulative_loss.back() / static_cast<double>(res.trace.rounds()) : 0.0;
  out << "rounds=" << res.trace.rounds() << " queries=" << res.trace.queries << " mean_loss=" << avg << '\n';
  out << (heldout ? "heldout " : "train ") << metric_text(task, res.trace.snapshots.back().metric) << '\n';

  if (!t.model_out.empty()) {
    nlohmann::ordered_json config = config_json(t, spec);
    config["estimator"] = estimator_name(cfg.estimator);
    config["loss"] = o.loss;
    config["rounds"] = o.rounds;
    config["delta_explore"] = cfg.delta_explore;
    config["delta_perturb"] = cfg.delta_perturb;
    config["lr"] = cfg.lr;
    config["accumulate"] = cfg.accumulate;
    ModelFile m = base_model(train, t.seed, config);
    store_tree(m, res.params, t);
    save_model(m, t.model_out);
    out << "model written to " << t.model_out << '\n';
  }
  return kOk;
}

inline Dataset load_for_model(const ModelFile& m, const ApplyOptions& a) {
  if (!a.task.empty() && parse_task(a.task) != m.task) {
    throw DataError(std::string("task mismatch: model is ") + task_name(m.task));
  }
  Dataset data = read_data(a.data, a.label_col, a.no_header, m.task, m.class_values);
  if (data.dim() != m.input_dim()) {
    throw DataError("data has " + std::to_string(data.dim()) + " features, model expects " +
                    std::to_string(m.input_dim()));
  }
  if (m.normalization) apply_normalization(data, *m.normalization);
  return data;
}

inline int cmd_eval(const ApplyOptions& a, std::ostream& out) {
  const ModelFile m = load_model(a.model_in);
  const Dataset data = load_for_model(m, a);
  if (!data.has_labels()) throw DataError("evaluation needs a label column");
  std::optional<PathTables> tables;
  if (const auto* p = std::get_if<TreeParams>(&m.payload)) tables.emplace(p->height);
  const auto predict = [&](const Vector& x) { return model_scores(m, tables ? &*tables : nullptr, x); };
  out << "n=" << data.size() << ' ' << metric_text(m.task, task_metric(predict, data)) << '\n';

  if (const auto* forest = std::get_if<ForestModel>(&m.payload)) {
    out << "members=" << forest->members.size() << '\n';
    return kOk;
  }
  const ObliqueTree tree = std::holds_alternative<ObliqueTree>(m.payload) ? std::get<ObliqueTree>(m.payload)
                                                                           : collapse(std::get<TreeParams>(m.payload));
  const PruneResult pr = prune_unreached(tree, data.features);
  out << "leaf_histogram=";
  for (std::size_t i = 0; i < pr.report.leaf_visits.size(); ++i) out << (i ? "," : "") << pr.report.leaf_visits[i];
  out << '\n';
  out << "reachable_nodes=" << pr.report.reachable_internal + pr.report.reachable_leaves
      << " reachable_internal=" << pr.report.reachable_internal << " reachable_leaves=" << pr.report.reachable_leaves
      << " total_nodes=" << num_internal(tree.height) + num_leaves(tree.height) << '\n';
  return kOk;
}

inline int cmd_predict(const ApplyOptions& a, std::ostream& out) {
  const ModelFile m = load_model(a.model_in);
  const Dataset data = load_for_model(m, a);
  std::optional<PathTables> tables;
  if (const auto* p = std::get_if<TreeParams>(&m.payload)) tables.emplace(p->height);

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw DataError("cannot write " + a.out);
  }
  std::ostream& dst = a.out.empty() ? out : file;
  dst << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector s = model_scores(m, tables ? &*tables : nullptr, data.x(i));
    if (m.task == Task::kRegression) {
      dst << (m.normalization ? m.normalization->inverse_target(s(0)) : s(0)) << '\n';
    } else {
      const auto k = static_cast<std::size_t>(argmax(s));
      dst << (k < m.class_values.size() ? m.class_values[k] : static_cast<double>(k)) << '\n';
    }
  }
  return kOk;
}

inline void add_tree_options(CLI::App* cmd, TreeOptions& t, bool model_required) {
  cmd->add_option("--data", t.data, "training CSV")->required();
  cmd->add_option("--label-col", t.label_col, "label column: index (negative from end) or header name");
  cmd->add_flag("--no-header", t.no_header, "CSV has no header row");
  cmd->add_option("--task", t.task, "reg or clf")->check(CLI::IsMember({"reg", "clf"}));
  cmd->add_option("--height", t.height, "tree height");
  cmd->add_option("--layers", t.layers, "linear layers in the node-weight stack (1 or 3)");
  cmd->add_option("--hidden-dims", t.hidden_dims, "hidden widths, e.g. 240,240")->delimiter(',');
  cmd->add_option("--seed", t.seed, "random seed");
  auto* model = cmd->add_option("--model-out", t.model_out, "model file to write");
  if (model_required) model->required();
  cmd->add_flag("--collapse", t.collapse, "store the collapsed tree (default)");
  cmd->add_flag("--keep-layers", t.keep_layers, "store the layered parameters");
}

inline void add_batch_options(CLI::App* cmd, BatchOptions& b) {
  cmd->add_option("--epochs", b.epochs);
  cmd->add_option("--batch", b.batch);
  cmd->add_option("--lr", b.lr);
  cmd->add_option("--l1", b.l1);
  cmd->add_option("--l2", b.l2);
  cmd->add_option("--momentum", b.momentum);
  cmd->add_option("--clip", b.clip, "clip threshold, 0 disables");
  cmd->add_option("--clip-mode", b.clip_mode)->check(CLI::IsMember({"norm", "value"}));
  cmd->add_option("--restarts", b.restarts, "cosine schedule cycles");
  cmd->add_flag("--no-scheduler", b.no_scheduler, "constant learning rate");
  cmd->add_option("--val-frac", b.val_frac, "fraction held out for validation");
  cmd->add_option("--log-out", b.log_out, "epoch log (default: <model-out>.log)");
}

inline void add_apply_options(CLI::App* cmd, ApplyOptions& a, const std::string& label_default) {
  a.label_col = label_default;
  cmd->add_option("--model-in", a.model_in)->required();
  cmd->add_option("--data", a.data)->required();
  cmd->add_option("--label-col", a.label_col, "label column; empty for unlabelled files");
  cmd->add_flag("--no-header", a.no_header);
  cmd->add_option("--task", a.task, "expected task")->check(CLI::IsMember({"reg", "clf"}));
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-trained oblique decision trees", "dgt"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  TreeOptions tree;
  BatchOptions batch;
  BanditOptions bandit;
  ForestOptions forest;
  ApplyOptions eval_opts;
  ApplyOptions predict_opts;

  auto* train = app.add_subcommand("train", "train one tree on a CSV dataset");
  detail::add_tree_options(train, tree, true);
  detail::add_batch_options(train, batch);

  auto* forest_cmd = app.add_subcommand("forest", "train a bagged forest");
  detail::add_tree_options(forest_cmd, tree, true);
  detail::add_batch_options(forest_cmd, batch);
  forest_cmd->add_option("--trees", forest.trees);
  forest_cmd->add_option("--fraction", forest.fraction, "bootstrap sample fraction");
  forest_cmd->add_option("--threads", forest.threads);

  auto* sim = app.add_subcommand("bandit-sim", "train from loss feedback on a labelled dataset");
  detail::add_tree_options(sim, tree, false);
  sim->add_option("--loss", bandit.loss, "squared, huber:XI, zero_one or zero");
  sim->add_option("--estimator", bandit.estimator)->check(CLI::IsMember({"one_point", "two_point", "classification"}));
  sim->add_option("--rounds", bandit.rounds);
  sim->add_option("--delta-explore", bandit.delta_explore);
  sim->add_option("--delta-perturb", bandit.delta_perturb);
  sim->add_option("--accumulate", bandit.accumulate);
  sim->add_option("--lr", bandit.lr);
  sim->add_option("--momentum", bandit.momentum);
  sim->add_option("--l1", bandit.l1);
  sim->add_option("--l2", bandit.l2);
  sim->add_option("--val-frac", bandit.val_frac, "fraction held out for the trace metric");
  sim->add_option("--snapshot-every", bandit.snapshot_every);
  sim->add_option("--trace-out", bandit.trace_out, "CSV trace");

  auto* eval = app.add_subcommand("eval", "score a model on a labelled CSV");
  detail::add_apply_options(eval, eval_opts, "-1");

  auto* predict = app.add_subcommand("predict", "write one prediction per row");
  detail::add_apply_options(predict, predict_opts, "");
  predict->add_option("--out", predict_opts.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const auto layers_given = [](CLI::App* cmd) { return cmd->count("--layers") > 0; };
    if (*train) return detail::cmd_train(tree, batch, layers_given(train), out);
    if (*forest_cmd) return detail::cmd_forest(tree, batch, forest, layers_given(forest_cmd), out);
    if (*sim) return detail::cmd_bandit_sim(tree, bandit, layers_given(sim), out);
    if (*eval) return detail::cmd_eval(eval_opts, out);
    if (*predict) return detail::cmd_predict(predict_opts, out);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const ShapeError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"dgt"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dgt::cli
