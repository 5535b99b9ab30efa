// One PASS/FAIL line per acceptance criterion; exit status 1 when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "apichain/abstraction.hpp"
#include "apichain/baseline.hpp"
#include "apichain/cli.hpp"
#include "apichain/evaluation.hpp"
#include "apichain/knn.hpp"
#include "apichain/manifest.hpp"
#include "apichain/markov.hpp"
#include "apichain/metrics.hpp"
#include "apichain/pca.hpp"
#include "apichain/pipeline.hpp"
#include "apichain/synthetic.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace apichain;
using testing::TempDir;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct CorpusConfig {
  synthetic::ProfileKind kind = synthetic::ProfileKind::disjoint;
  double separation = 0.5;
  std::size_t apps_per_class = 100;
  std::size_t epochs = 1;
  std::size_t min_edges = 60;
  std::size_t max_edges = 240;
  double drift = 0.0;
  std::uint64_t seed = 1;
};

struct Corpus {
  Manifest manifest;
  FeaturizeResult features;
};

Corpus build_corpus(const CorpusConfig& c, const std::filesystem::path& dir, bool keep_graphs = false) {
  const auto& catalog = testing::eval_catalog();
  synthetic::GeneratorSpec spec;
  spec.mode = Mode::family;
  std::tie(spec.benign_profile, spec.malware_profile) =
      synthetic::make_profiles(c.kind, catalog.state_space(Mode::family).size(), c.seed, c.separation);
  spec.apps_per_class = c.apps_per_class;
  spec.epochs = c.epochs;
  spec.min_edges = c.min_edges;
  spec.max_edges = c.max_edges;
  spec.drift = c.drift;
  spec.seed = c.seed;
  Corpus out;
  out.manifest = synthetic::generate_corpus(spec, catalog, dir);
  const Abstractor abs(catalog, Mode::family);
  out.features = featurize_manifest(out.manifest, abs, TraversalPolicy{}, 1, keep_graphs);
  return out;
}

ModelSpec rf_family() {
  ModelSpec s;
  s.classifier = ClassifierSpec::parse("rf-family");
  return s;
}

Outcome golden_running_example() {
  const Abstractor abs(testing::eval_catalog(), Mode::family);
  const auto v = featurize_graph(parse_call_graph(testing::kRunningExample, "root"), abs);
  const auto& s = abs.states();
  const std::size_t n = s.size(), sd = s.require("self-defined");
  bool ok = v.values.size() == 64;
  for (std::size_t j = 0; ok && j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      double expected = 0.0;
      if (j == sd && k == sd) expected = 0.5;
      if (j == sd && (k == s.require("android") || k == s.require("java"))) expected = 0.25;
      ok = ok && v.values[j * n + k] == expected;
    }
  return {ok, "self-defined row: self-defined=" + fmt(v.values[sd * n + sd]) +
                  " android=" + fmt(v.values[sd * n + s.require("android")]) +
                  " java=" + fmt(v.values[sd * n + s.require("java")]) + ", all other entries 0"};
}

Outcome row_stochasticity() {
  const auto& catalog = testing::eval_catalog();
  std::size_t apps = 0, rows = 0, bad = 0;
  double worst = 0;
  for (Mode mode : {Mode::family, Mode::package}) {
    const Abstractor abs(catalog, mode);
    const std::size_t n = abs.states().size();
    synthetic::GeneratorSpec spec;
    spec.mode = mode;
    std::tie(spec.benign_profile, spec.malware_profile) = synthetic::make_profiles(synthetic::ProfileKind::overlap, n, 17);
    spec.min_edges = 1;
    spec.max_edges = 400;
    spec.seed = 17;
    for (std::size_t i = 0; i < 1000; ++i, ++apps) {
      const Label l = i % 2 ? Label::malware : Label::benign;
      const auto g = synthetic::generate_app(spec, abs, l == Label::malware ? spec.malware_profile : spec.benign_profile,
                                             l, 0, i);
      const auto v = featurize_graph(g, abs);
      for (std::size_t j = 0; j < n; ++j) {
        double sum = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const double x = v.values[j * n + k];
          if (!(x >= 0.0 && x <= 1.0)) ++bad;
          sum += x;
        }
        if (sum != 0.0) {
          ++rows;
          worst = std::max(worst, std::abs(sum - 1.0));
        }
      }
    }
  }
  return {bad == 0 && worst <= 1e-9 && rows > 0,
          std::to_string(apps) + " apps, " + std::to_string(rows) + " nonzero rows, max |sum-1|=" +
              sci(worst) + ", out-of-range entries=" + std::to_string(bad)};
}

Outcome oracle_equivalence(const TempDir& tmp) {
  CorpusConfig cfg;
  cfg.kind = synthetic::ProfileKind::overlap;
  cfg.apps_per_class = 150;
  cfg.seed = 23;
  const auto corpus = build_corpus(cfg, tmp / "oracle", true);
  const auto& d = corpus.features.data;

  // k-NN against exhaustive scan: 200 queries, half perturbed corpus rows, half random.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto split = baseline::split_two_thirds(d.rows(), 3);
  const auto train = d.subset(split.first);
  std::size_t knn_mismatch = 0;
  for (int q = 0; q < 200; ++q) {
    Eigen::VectorXd x(d.cols());
    if (q % 2) {
      x = d.X.row(static_cast<Eigen::Index>(split.second[q % split.second.size()])).transpose();
    } else {
      for (auto& v : x) v = u(rng) < 0.8 ? 0.0 : u(rng);
    }
    for (std::size_t k : {1u, 3u})
      knn_mismatch += knn_predict(train, x, k) != testing::knn_oracle(train.X, train.y, x, k);
  }

  // Markov counts against a direct edge tally through the free abstraction functions.
  const auto& catalog = testing::eval_catalog();
  const Abstractor abs(catalog, Mode::family);
  std::size_t tally_mismatch = 0;
  for (const auto& g : corpus.features.graphs) {
    const auto chain = build_chain(abs.abstract_transitions(g, transition_multiset(g)), abs.states());
    std::vector<std::uint64_t> tally(abs.states().size() * abs.states().size(), 0);
    for (const auto& e : g.edges()) {
      const auto a = abstract_to_family(g.nodes()[e.from], catalog);
      const auto b = abstract_to_family(g.nodes()[e.to], catalog);
      if (a && b) tally[abs.states().require(a->name) * abs.states().size() + abs.states().require(b->name)] += e.multiplicity;
    }
    tally_mismatch += !std::equal(tally.begin(), tally.end(), chain.counts().begin());
  }

  // PCA explained variance against Jacobi eigenvalues of the covariance.
  const auto pca = fit_pca(d.X, kDefaultPcaComponents);
  const auto eig = testing::covariance_eigenvalues(d.X);
  double pca_err = 0;
  for (std::size_t c = 0; c < kDefaultPcaComponents; ++c)
    pca_err = std::max(pca_err, std::abs(pca.explained_variance(static_cast<Eigen::Index>(c)) - eig[c]));

  return {knn_mismatch == 0 && tally_mismatch == 0 && pca_err <= 1e-6,
          "k-NN mismatches=" + std::to_string(knn_mismatch) + "/400, chain tally mismatches=" +
              std::to_string(tally_mismatch) + "/" + std::to_string(corpus.features.graphs.size()) +
              ", max PCA eigenvalue error=" + sci(pca_err)};
}

Outcome metric_arithmetic() {
  const double f = f_measure(0.95, 0.97);
  return {std::abs(f - 0.96) <= 0.005, "F(0.95, 0.97)=" + fmt(f)};
}

Outcome separable_and_null(const TempDir& tmp) {
  const auto start = std::chrono::steady_clock::now();
  CorpusConfig cfg;
  cfg.kind = synthetic::ProfileKind::disjoint;
  cfg.apps_per_class = 500;
  const auto sep = build_corpus(cfg, tmp / "separable");
  const auto cv = kfold_cv(sep.features.data, 10, rf_family(), 1);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  cfg.kind = synthetic::ProfileKind::identical;
  const auto null = build_corpus(cfg, tmp / "null");
  const auto ncv = kfold_cv(null.features.data, 10, rf_family(), 1);
  const bool ok = cv.mean.f_measure >= 0.95 && std::abs(ncv.mean.f_measure - 0.5) <= 0.1 && seconds <= 120.0;
  return {ok, "separable F=" + fmt(cv.mean.f_measure) + " (>= 0.95), null F=" + fmt(ncv.mean.f_measure) +
                  " (0.5 +- 0.1), 1000-app pipeline " + fmt(seconds) + " s single-worker (<= 120)"};
}

// F on the training epoch (10-fold CV) and on each later epoch.
std::vector<double> temporal_curve(const LabeledDataset& d) {
  const auto train = d.epoch_slice(0);
  std::vector<double> f{kfold_cv(train, 10, rf_family(), 1).mean.f_measure};
  std::vector<LabeledDataset> tests;
  for (int e : d.epochs())
    if (e) tests.push_back(d.epoch_slice(e));
  for (const auto& r : temporal_eval(train, tests, rf_family(), 1)) f.push_back(r.metrics.f_measure);
  return f;
}

Outcome temporal_drift(const TempDir& tmp) {
  CorpusConfig cfg;
  cfg.kind = synthetic::ProfileKind::overlap;
  cfg.separation = 1.0;
  cfg.apps_per_class = 300;
  cfg.epochs = 3;
  cfg.min_edges = 5;
  cfg.max_edges = 20;
  const auto frozen = temporal_curve(build_corpus(cfg, tmp / "frozen").features.data);
  cfg.drift = 0.3;
  const auto drifted = temporal_curve(build_corpus(cfg, tmp / "drifted").features.data);
  const bool ok = std::abs(frozen[1] - frozen[0]) <= 0.05 && drifted[0] - drifted[2] >= 0.05;
  return {ok, "drift 0: F(0)=" + fmt(frozen[0]) + " F(1)=" + fmt(frozen[1]) + "; drift 0.3: F(0)=" + fmt(drifted[0]) +
                  " F(2)=" + fmt(drifted[2])};
}

Outcome baseline_direction(const TempDir& tmp) {
  CorpusConfig cfg;
  cfg.kind = synthetic::ProfileKind::overlap;
  cfg.separation = 0.5;
  cfg.apps_per_class = 200;
  cfg.epochs = 3;
  cfg.drift = 0.3;
  const auto corpus = build_corpus(cfg, tmp / "baseline", true);
  const auto& d = corpus.features.data;
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (d.epoch[i] == 0) train_rows.push_back(i);
    if (d.epoch[i] == 2) test_rows.push_back(i);
  }
  const auto model = train_model(d.subset(train_rows), rf_family(), 1);
  const auto test = d.subset(test_rows);
  const double markov = compute_metrics(test.y, model.predict_rows(test.X)).f_measure;
  const auto base = baseline::train_and_test(corpus.features.graphs, d.y, train_rows, test_rows);
  return {markov >= base.metrics.f_measure, "train epoch 0, test epoch 2: Markov-chain RF F=" + fmt(markov) +
                                                ", frequency baseline F=" + fmt(base.metrics.f_measure) + " (" +
                                                std::to_string(base.features.size()) + " calls selected)"};
}

Outcome abstraction_correctness() {
  const auto& c = testing::eval_catalog();
  const auto ref = [](std::string_view t) { return parse_method_ref(t); };
  int passed = 0, total = 0;
  const auto expect = [&](bool ok) { passed += ok, ++total; };
  const auto get_message = ref("java.lang.Throwable: java.lang.String getMessage()");
  expect(abstract_to_package(get_message, c).name == "java.lang");
  expect(abstract_to_package(ref("android.util.Log: int d(java.lang.String,java.lang.String)"), c).name == "android.util");
  expect(abstract_to_package(ref("com.fa.a.b.d: void run()"), c).name == "obfuscated");
  expect(abstract_to_family(get_message, c)->name == "java");
  expect(abstract_to_family(ref("com.stericson.RootTools.RootTools: com.stericson.RootShell.execution.Shell getShell(boolean)"),
                            c)
             ->name == "self-defined");
  expect(!abstract_to_family(ref("org.w3c.dom.Document: org.w3c.dom.Element getDocumentElement()"), c).has_value());
  expect(is_obfuscated(ref("com.fa.a.b.d: void run()")));
  expect(!is_obfuscated(ref("com.fa.c.RootCommandExecutor: void Execute()")));
  const int examples = passed;

  const auto mini = PackageCatalog::parse("family java active\npackage java.lang java\n");
  const bool aligned = abstract_to_package(ref("java.language.X: void f()"), mini).name == "self-defined" &&
                       abstract_to_package(ref("java.language.X: void f()"), c).name != "java.lang";
  const auto fam = c.state_space(Mode::family).feature_count();
  const auto pkg = c.state_space(Mode::package).feature_count();
  return {examples == total && aligned && fam == 64 && pkg == 116281,
          "examples " + std::to_string(examples) + "/" + std::to_string(total) +
              ", java.language.X -> java.lang rejected: " + (aligned ? "yes" : "no") + ", feature lengths " +
              std::to_string(fam) + "/" + std::to_string(pkg)};
}

std::string directory_digest(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "timing.csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += std::filesystem::relative(f, root).string() + "\n" + testing::read_file(f);
  return all;
}

Outcome determinism(const TempDir& tmp) {
  const auto root = tmp / "determinism";
  std::vector<std::string> failed;
  std::size_t commands = 0;
  const auto twice = [&](const std::string& name, const std::vector<std::string>& args) {
    std::string digests[2];
    for (int run = 0; run < 2; ++run) {
      const auto out = (root / (name + "-" + std::to_string(run))).string();
      auto full = args;
      full.insert(full.end(), {"--out", out});
      std::ostringstream so, se;
      if (cli::run(full, so, se) != 0) {
        failed.push_back(name + " (exit: " + se.str() + ")");
        return;
      }
      digests[run] = directory_digest(out);
    }
    ++commands;
    if (digests[0] != digests[1] || digests[0].empty()) failed.push_back(name);
  };
  const auto corpus = (root / "gen-synthetic-0").string();
  const auto manifest = corpus + "/manifest.csv";
  const auto features = (root / "featurize-0/features.csv").string();
  twice("gen-synthetic", {"gen-synthetic", "--profiles", "overlap", "--apps-per-class", "30", "--epochs", "3", "--drift",
                          "0.3", "--label-noise", "0.05", "--seed", "8", "--workers", "2"});
  twice("featurize", {"featurize", "--manifest", manifest, "--workers", "2"});
  twice("featurize-package", {"featurize", "--manifest", manifest, "--mode", "package", "--policy", "path-enum:16"});
  twice("train-rf", {"train", "--features", features, "--seed", "3", "--workers", "2"});
  twice("train-3nn-pca", {"train", "--features", features, "--classifier", "3nn", "--pca", "10"});
  twice("predict", {"predict", "--model", (root / "train-rf-0/model.json").string(), "--manifest", manifest});
  twice("evaluate-cv", {"evaluate", "cv", "--features", features, "--pca", "10", "--seed", "5"});
  twice("evaluate-temporal", {"evaluate", "temporal", "--features", features, "--train-epoch", "0", "--folds", "5"});
  twice("evaluate-baseline", {"evaluate", "baseline", "--manifest", manifest, "--train-epoch", "0", "--test-epoch", "2"});
  twice("characterize", {"characterize", "--manifest", manifest});
  std::string detail = std::to_string(commands) + " subcommand runs byte-identical (timing.csv excluded)";
  for (const auto& f : failed) detail += "; differs/failed: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  TempDir tmp("acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"golden running example", golden_running_example},
      {"row stochasticity", row_stochasticity},
      {"oracle equivalence", [&] { return oracle_equivalence(tmp); }},
      {"metric arithmetic", metric_arithmetic},
      {"separable and null corpora", [&] { return separable_and_null(tmp); }},
      {"temporal drift shape", [&] { return temporal_drift(tmp); }},
      {"baseline comparison direction", [&] { return baseline_direction(tmp); }},
      {"abstraction correctness", abstraction_correctness},
      {"determinism", [&] { return determinism(tmp); }},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/" << criteria.size() << std::endl;
  return failures ? 1 : 0;
}
