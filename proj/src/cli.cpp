#include "apichain/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "apichain/baseline.hpp"
#include "apichain/catalog.hpp"
#include "apichain/characterize.hpp"
#include "apichain/error.hpp"
#include "apichain/evaluation.hpp"
#include "apichain/feature_csv.hpp"
#include "apichain/manifest.hpp"
#include "apichain/model.hpp"
#include "apichain/pipeline.hpp"
#include "apichain/synthetic.hpp"

namespace apichain::cli {
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string mode = "family";
  std::string catalog;
  std::string policy = "reachable-edge";
  std::size_t pca = 0;  // 0: no projection
  std::string classifier = "rf";
  std::size_t trees = 0;
  std::size_t max_depth = 0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out = ".";

  std::string manifest;
  std::string features;
  std::string model;
  std::size_t folds = 10;
  std::optional<int> train_epoch;
  std::optional<int> test_epoch;

  std::string profiles = "disjoint";
  double separation = 0.5;
  std::size_t apps_per_class = 100;
  std::size_t epochs = 1;
  std::size_t min_edges = 60;
  std::size_t max_edges = 240;
  double drift = 0.0;
  double label_noise = 0.0;

  Mode parsed_mode() const { return parse_mode(mode); }
  fs::path catalog_path() const { return catalog.empty() ? shipped_catalog("catalog_eval.txt") : fs::path(catalog); }

  ModelSpec model_spec() const {
    ModelSpec s;
    s.classifier = ClassifierSpec::parse(classifier, parsed_mode());
    if (trees) s.classifier.forest.n_trees = trees;
    if (max_depth) s.classifier.forest.max_depth = max_depth;
    if (pca) s.pca_components = pca;
    return s;
  }
};

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--mode", c.mode, "Abstraction mode: family|package")->capture_default_str();
  sub->add_option("--catalog", c.catalog, "Package catalog (default: shipped catalog_eval.txt)");
  sub->add_option("--policy", c.policy, "Traversal policy: reachable-edge|path-enum[:depth]")->capture_default_str();
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--config", "key=value configuration file; flags override it");
}

void add_model_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--classifier", c.classifier, "rf|rf-family|rf-package|1nn|3nn")->capture_default_str();
  sub->add_option("--pca", c.pca, "Project onto k principal components (0: off)")->capture_default_str();
  sub->add_option("--trees", c.trees, "Override the random-forest tree count");
  sub->add_option("--max-depth", c.max_depth, "Override the random-forest depth limit");
}

void add_input(CLI::App* sub, RunConfig& c, bool allow_features) {
  sub->add_option("--manifest", c.manifest, "Manifest CSV (app_id,label,epoch,path)");
  if (allow_features) sub->add_option("--features", c.features, "Feature matrix CSV");
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  const auto path = fs::path(c.out) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

struct Loaded {
  LabeledDataset data;
  std::vector<CallGraph> graphs;
  StageTimes times;
};

Loaded load_inputs(const RunConfig& c, const Abstractor& abstractor, std::ostream& err, bool keep_graphs = false) {
  Loaded l;
  if (!c.features.empty() && !keep_graphs) {
    ScopedTimer timer(l.times, StageTimes::parse);
    l.data = read_feature_csv(fs::path(c.features));
    return l;
  }
  if (c.manifest.empty()) throw Error(keep_graphs ? "--manifest is required" : "--manifest or --features is required");
  auto r = featurize_manifest(load_manifest(c.manifest), abstractor, parse_policy(c.policy), c.workers, keep_graphs);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  for (const auto& s : r.skipped) err << "skipped " << s.app_id << ": " << s.reason << '\n';
  l.data = std::move(r.data);
  l.graphs = std::move(r.graphs);
  l.times = r.times;
  return l;
}

void check_width(const LabeledDataset& d, const StateSpace& space) {
  if (d.cols() != space.feature_count())
    throw Error("feature width " + std::to_string(d.cols()) + " does not match the " + std::string(to_string(space.mode())) +
                " layout of this catalog (" + std::to_string(space.feature_count()) + ")");
}

void write_timing(const RunConfig& c, const StageTimes& t) {
  auto out = open_out(c, "timing.csv");
  write_timing_csv(out, t);
}

int cmd_featurize(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto catalog = PackageCatalog::load(c.catalog_path());
  const Abstractor abstractor(catalog, c.parsed_mode());
  if (c.manifest.empty()) throw Error("--manifest is required");
  const auto manifest = load_manifest(c.manifest);
  const auto r = featurize_manifest(manifest, abstractor, parse_policy(c.policy), c.workers);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  {
    auto f = open_out(c, "features.csv");
    write_feature_csv(f, r.data);
  }
  {
    auto f = open_out(c, "skipped.csv");
    write_skip_report(f, r.skipped);
  }
  write_timing(c, r.times);
  out << "featurized " << r.data.rows() << " of " << manifest.entries.size() << " apps (" << r.skipped.size()
      << " skipped), " << r.data.cols() << " features\n";
  return kExitOk;
}

int cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto catalog = PackageCatalog::load(c.catalog_path());
  const Abstractor abstractor(catalog, c.parsed_mode());
  auto in = load_inputs(c, abstractor, err);
  check_width(in.data, abstractor.states());
  TrainedModel model;
  {
    ScopedTimer timer(in.times, StageTimes::classify);
    model = train_model(in.data, c.model_spec(), c.seed, c.workers, &abstractor.states());
  }
  {
    auto f = open_out(c, "model.json");
    f << model.to_json();
  }
  write_timing(c, in.times);
  out << "trained " << c.model_spec().classifier.name() << " on " << in.data.rows() << " apps\n";
  return kExitOk;
}

int cmd_predict(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.model.empty()) throw Error("--model is required");
  const auto model = TrainedModel::load(c.model);
  const auto catalog = PackageCatalog::load(c.catalog_path());
  const Abstractor abstractor(catalog, model.mode);
  if (!model.state_space.empty() && model.state_space != abstractor.states().names())
    throw Error("model state space does not match the catalog");
  auto in = load_inputs(c, abstractor, err);
  if (in.data.cols() != model.input_dim())
    throw Error("feature width " + std::to_string(in.data.cols()) + " incompatible with model input width " +
                std::to_string(model.input_dim()));
  std::vector<Label> predicted;
  {
    ScopedTimer timer(in.times, StageTimes::classify);
    predicted = model.predict_rows(in.data.X);
  }
  auto f = open_out(c, "predictions.csv");
  f << "app_id,label,prediction\n";
  for (std::size_t i = 0; i < predicted.size(); ++i)
    f << in.data.app_ids[i] << ',' << to_string(in.data.y[i]) << ',' << to_string(predicted[i]) << '\n';
  write_timing(c, in.times);
  out << "predicted " << predicted.size() << " apps\n";
  return kExitOk;
}

int cmd_cv(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto catalog = PackageCatalog::load(c.catalog_path());
  const Abstractor abstractor(catalog, c.parsed_mode());
  auto in = load_inputs(c, abstractor, err);
  CvResult cv;
  {
    ScopedTimer timer(in.times, StageTimes::classify);
    cv = kfold_cv(in.data, c.folds, c.model_spec(), c.seed, c.workers);
  }
  const ReportRow row{"all", std::to_string(c.folds) + "-fold", 0, cv.mean};
  {
    auto f = open_out(c, "metrics.csv");
    write_metrics_csv(f, std::span(&row, 1));
  }
  write_timing(c, in.times);
  out << "cv f_measure=" << format_value(cv.mean.f_measure) << " precision=" << format_value(cv.mean.precision)
      << " recall=" << format_value(cv.mean.recall) << '\n';
  return kExitOk;
}

std::string epoch_name(int e) { return "epoch-" + std::to_string(e); }

int cmd_temporal(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto catalog = PackageCatalog::load(c.catalog_path());
  const Abstractor abstractor(catalog, c.parsed_mode());
  auto in = load_inputs(c, abstractor, err);
  const auto epochs = in.data.epochs();
  if (epochs.empty()) throw Error("no data");
  const int train_epoch = c.train_epoch.value_or(epochs.front());
  if (!std::count(epochs.begin(), epochs.end(), train_epoch))
    throw Error("training epoch " + std::to_string(train_epoch) + " not present in the data");

  std::vector<ReportRow> rows;
  const auto spec = c.model_spec();
  ScopedTimer timer(in.times, StageTimes::classify);
  const auto train = in.data.epoch_slice(train_epoch);
  const auto same = kfold_cv(train, c.folds, spec, c.seed, c.workers);
  rows.push_back({epoch_name(train_epoch), epoch_name(train_epoch) + " " + std::to_string(c.folds) + "-fold", 0, same.mean});

  std::vector<LabeledDataset> tests;
  for (int e : epochs)
    if (e != train_epoch && (!c.test_epoch || *c.test_epoch == e)) tests.push_back(in.data.epoch_slice(e));
  for (const auto& r : temporal_eval(train, tests, spec, c.seed, c.workers))
    rows.push_back({epoch_name(r.train_epoch), epoch_name(r.test_epoch), r.delta(), r.metrics});
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::abs(a.delta_epoch) < std::abs(b.delta_epoch) ||
           (std::abs(a.delta_epoch) == std::abs(b.delta_epoch) && a.delta_epoch < b.delta_epoch);
  });
  {
    auto f = open_out(c, "metrics.csv");
    write_metrics_csv(f, rows);
  }
  for (const auto& r : rows) out << "delta=" << r.delta_epoch << " f_measure=" << format_value(r.metrics.f_measure) << '\n';
  return kExitOk;
}

int cmd_baseline(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto catalog = PackageCatalog::load(c.catalog_path());
  const Abstractor abstractor(catalog, c.parsed_mode());
  auto in = load_inputs(c, abstractor, err, true);
  const auto& d = in.data;

  std::vector<std::size_t> train_rows, test_rows;
  std::string train_set = "all", test_set = "all";
  int delta = 0;
  if (c.train_epoch || c.test_epoch) {
    if (!c.train_epoch || !c.test_epoch) throw Error("--train-epoch and --test-epoch must be given together");
    for (std::size_t i = 0; i < d.rows(); ++i) {
      if (d.epoch[i] == *c.train_epoch) train_rows.push_back(i);
      else if (d.epoch[i] == *c.test_epoch) test_rows.push_back(i);
    }
    train_set = epoch_name(*c.train_epoch);
    test_set = epoch_name(*c.test_epoch);
    delta = *c.test_epoch - *c.train_epoch;
  } else {
    std::tie(train_rows, test_rows) = baseline::split_two_thirds(d.rows(), c.seed);
    train_set = "two-thirds";
    test_set = "one-third";
  }
  if (train_rows.empty() || test_rows.empty()) throw Error("degenerate train/test split");

  ScopedTimer timer(in.times, StageTimes::classify);
  const auto train = d.subset(train_rows);
  const auto test = d.subset(test_rows);
  const auto model = train_model(train, c.model_spec(), c.seed, c.workers);
  const auto markov_metrics = compute_metrics(test.y, model.predict_rows(test.X));
  const auto freq = baseline::train_and_test(in.graphs, d.y, train_rows, test_rows);

  {
    auto f = open_out(c, "metrics.csv");
    f << "method,train_set,test_set,delta_epoch,precision,recall,f_measure\n";
    const auto line = [&](const char* method, const Metrics& m) {
      f << method << ',' << train_set << ',' << test_set << ',' << delta << ',' << format_value(m.precision) << ','
        << format_value(m.recall) << ',' << format_value(m.f_measure) << '\n';
    };
    line("markov-chain", markov_metrics);
    line("frequency-baseline", freq.metrics);
  }
  {
    auto f = open_out(c, "baseline_features.txt");
    for (const auto& call : freq.features) f << call << '\n';
  }
  out << "markov-chain f_measure=" << format_value(markov_metrics.f_measure)
      << " frequency-baseline f_measure=" << format_value(freq.metrics.f_measure) << '\n';
  return kExitOk;
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const auto catalog = PackageCatalog::load(c.catalog_path());
  synthetic::GeneratorSpec spec;
  spec.mode = c.parsed_mode();
  const auto states = catalog.state_space(spec.mode).size();
  std::tie(spec.benign_profile, spec.malware_profile) =
      synthetic::make_profiles(synthetic::parse_profile_kind(c.profiles), states, c.seed, c.separation);
  spec.apps_per_class = c.apps_per_class;
  spec.epochs = c.epochs;
  spec.min_edges = c.min_edges;
  spec.max_edges = c.max_edges;
  spec.drift = c.drift;
  spec.label_noise = c.label_noise;
  spec.seed = c.seed;
  const auto m = synthetic::generate_corpus(spec, catalog, c.out, c.workers);
  out << "generated " << m.entries.size() << " apps in " << c.out << '\n';
  return kExitOk;
}

int cmd_characterize(const RunConfig& c, std::ostream& out) {
  const auto catalog = PackageCatalog::load(c.catalog_path());
  const Abstractor abstractor(catalog, c.parsed_mode());
  if (c.manifest.empty()) throw Error("--manifest is required");
  const auto ch = characterize_corpus(load_manifest(c.manifest), abstractor, parse_policy(c.policy), c.workers);
  std::error_code ec;
  fs::create_directories(c.out, ec);
  write_characterization(c.out, ch);
  out << "characterized " << ch.unique_calls.size() << " apps\n";
  return kExitOk;
}

// Appends `--key value` for config entries the command line does not set and
// the selected subcommand understands.
std::vector<std::string> apply_config(const std::vector<std::string>& args, CLI::App& app) {
  std::string config;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config = args[i + 1];
  if (config.empty()) return args;

  CLI::App* sub = &app;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) break;
    CLI::App* next = nullptr;
    try {
      next = sub->get_subcommand(a);
    } catch (const CLI::OptionNotFound&) {
    }
    if (!next) break;
    sub = next;
  }
  auto out = args;
  for (const auto& [key, value] : read_config_file(config)) {
    const std::string flag = "--" + key;
    if (key == "config" || std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (!sub->get_option_no_throw(flag)) continue;
    out.push_back(flag);
    out.push_back(value);
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, line, "expected key=value");
    out.emplace_back(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::optional<int> train_epoch, test_epoch;
  CLI::App app{"Markov-chain API-call malware classification toolkit", "apichain"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* featurize = app.add_subcommand("featurize", "Call graphs -> Markov-chain feature matrix");
  add_common(featurize, c);
  add_input(featurize, c, false);

  auto* train = app.add_subcommand("train", "Train a classifier and write model.json");
  add_common(train, c);
  add_model_options(train, c);
  add_input(train, c, true);

  auto* predict = app.add_subcommand("predict", "Classify apps with a trained model");
  add_common(predict, c);
  add_input(predict, c, true);
  predict->add_option("--model", c.model, "Model JSON")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Evaluation protocols");
  evaluate->require_subcommand(1);
  auto* cv = evaluate->add_subcommand("cv", "k-fold cross-validation");
  auto* temporal = evaluate->add_subcommand("temporal", "Train on one epoch, test on the others");
  auto* base = evaluate->add_subcommand("baseline", "Markov-chain model vs frequency baseline");
  for (auto* sub : {cv, temporal, base}) {
    add_common(sub, c);
    add_model_options(sub, c);
    add_input(sub, c, sub != base);
  }
  for (auto* sub : {cv, temporal}) sub->add_option("--folds", c.folds, "Cross-validation folds")->capture_default_str();
  for (auto* sub : {temporal, base}) {
    sub->add_option("--train-epoch", train_epoch, "Training epoch");
    sub->add_option("--test-epoch", test_epoch, "Restrict testing to this epoch");
  }

  auto* gen = app.add_subcommand("gen-synthetic", "Generate a synthetic labeled corpus");
  add_common(gen, c);
  gen->add_option("--profiles", c.profiles, "disjoint|identical|overlap")->capture_default_str();
  gen->add_option("--separation", c.separation, "Malware/benign profile separation for overlap")->capture_default_str();
  gen->add_option("--apps-per-class", c.apps_per_class, "Apps per class and epoch")->capture_default_str();
  gen->add_option("--epochs", c.epochs, "Number of epochs")->capture_default_str();
  gen->add_option("--min-edges", c.min_edges, "Minimum call sites per app")->capture_default_str();
  gen->add_option("--max-edges", c.max_edges, "Maximum call sites per app")->capture_default_str();
  gen->add_option("--drift", c.drift, "Per-epoch malware profile drift")->capture_default_str();
  gen->add_option("--label-noise", c.label_noise, "Fraction of flipped labels")->capture_default_str();

  auto* charz = app.add_subcommand("characterize", "Corpus statistics and 2-component PCA scatter");
  add_common(charz, c);
  add_input(charz, c, false);

  std::vector<std::string> args;
  try {
    args = apply_config(raw_args, app);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  c.train_epoch = train_epoch;
  c.test_epoch = test_epoch;

  try {
    if (*featurize) return cmd_featurize(c, out, err);
    if (*train) return cmd_train(c, out, err);
    if (*predict) return cmd_predict(c, out, err);
    if (*cv) return cmd_cv(c, out, err);
    if (*temporal) return cmd_temporal(c, out, err);
    if (*base) return cmd_baseline(c, out, err);
    if (*gen) return cmd_generate(c, out);
    if (*charz) return cmd_characterize(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace apichain::cli
