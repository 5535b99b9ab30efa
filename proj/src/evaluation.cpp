#include "apichain/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_set>

#include "apichain/error.hpp"
#include "apichain/feature_csv.hpp"

namespace apichain {

void write_metrics_csv(std::ostream& out, std::span<const ReportRow> rows) {
  out << "train_set,test_set,delta_epoch,precision,recall,f_measure\n";
  for (const auto& r : rows) {
    out << r.train_set << ',' << r.test_set << ',' << r.delta_epoch << ',' << format_value(r.metrics.precision) << ','
        << format_value(r.metrics.recall) << ',' << format_value(r.metrics.f_measure) << '\n';
  }
}

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error("cross-validation needs at least two folds");
  if (n < folds) throw Error("cross-validation needs at least as many rows as folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t p = 0; p < n; ++p) fold_of[order[p]] = p * folds / n;
  return fold_of;
}

CvResult kfold_cv(const LabeledDataset& d, std::size_t folds, const ModelSpec& spec, std::uint64_t seed,
                  std::size_t workers) {
  d.validate();
  if (std::min(d.count(Label::benign), d.count(Label::malware)) < folds)
    throw Error("cross-validation: each class needs at least " + std::to_string(folds) + " rows");
  CvResult out;
  out.fold_of = fold_assignment(d.rows(), folds, seed);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < d.rows(); ++i) (out.fold_of[i] == f ? test : train).push_back(i);
    const auto train_set = d.subset(train);
    const auto test_set = d.subset(test);
    const auto model = train_model(train_set, spec, seed, workers);
    const auto predicted = model.predict_rows(test_set.X);
    out.folds.push_back(compute_metrics(test_set.y, predicted));
  }
  out.mean = average_metrics(out.folds);
  return out;
}

int single_epoch(const LabeledDataset& d) {
  const auto e = d.epochs();
  if (e.size() != 1) throw Error("temporal evaluation needs datasets covering exactly one epoch");
  return e.front();
}

std::vector<TemporalRow> temporal_eval(const LabeledDataset& train, std::span<const LabeledDataset> tests,
                                       const ModelSpec& spec, std::uint64_t seed, std::size_t workers) {
  const int train_epoch = single_epoch(train);
  const std::unordered_set<std::string> train_ids(train.app_ids.begin(), train.app_ids.end());
  for (const auto& t : tests) {
    for (const auto& id : t.app_ids)
      if (train_ids.count(id)) throw Error("app '" + id + "' appears in both training and test data");
  }
  const auto model = train_model(train, spec, seed, workers);
  std::vector<TemporalRow> rows;
  for (const auto& t : tests) {
    TemporalRow r;
    r.train_epoch = train_epoch;
    r.test_epoch = single_epoch(t);
    r.metrics = compute_metrics(t.y, model.predict_rows(t.X));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace apichain
