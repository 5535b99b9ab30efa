#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "apichain/dataset.hpp"
#include "apichain/metrics.hpp"
#include "apichain/model.hpp"

namespace apichain {

/// One line of a metrics report.
struct ReportRow {
  std::string train_set;
  std::string test_set;
  int delta_epoch = 0;
  Metrics metrics;
};

/// Header `train_set,test_set,delta_epoch,precision,recall,f_measure`.
void write_metrics_csv(std::ostream& out, std::span<const ReportRow> rows);

/// Seeded shuffle cut into `folds` contiguous, near-equal chunks; entry i is
/// the fold of row i.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed);

struct CvResult {
  Metrics mean;
  std::vector<Metrics> folds;
  std::vector<std::size_t> fold_of;
};

/// Train on folds-1 chunks, test on the remaining one, rotate; metrics averaged
/// over folds. Fails when a class has fewer rows than folds.
CvResult kfold_cv(const LabeledDataset& d, std::size_t folds, const ModelSpec& spec, std::uint64_t seed,
                  std::size_t workers = 1);

struct TemporalRow {
  int train_epoch = 0;
  int test_epoch = 0;
  int delta() const noexcept { return test_epoch - train_epoch; }
  Metrics metrics;
};

/// One model trained on `train`, evaluated on each test set. Every dataset must
/// cover a single epoch and test app ids must be disjoint from training ids.
/// Works in either direction (older -> newer or newer -> older).
std::vector<TemporalRow> temporal_eval(const LabeledDataset& train, std::span<const LabeledDataset> tests,
                                       const ModelSpec& spec, std::uint64_t seed, std::size_t workers = 1);

/// The single epoch covered by `d`; throws when it spans several.
int single_epoch(const LabeledDataset& d);

}  // namespace apichain
