#pragma once

#include <cstddef>
#include <span>

#include "apichain/dataset.hpp"

namespace apichain {

/// Detection metrics with malware as the positive class.
struct Metrics {
  double precision = 0;
  double recall = 0;
  double f_measure = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

/// 2pr/(p+r), or 0 when p + r == 0.
double f_measure(double precision, double recall);

/// Undefined precision/recall (empty denominators) are reported as 0.
Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted);

/// Fold average: mean precision and recall, F recomputed from those means,
/// confusion counts summed.
Metrics average_metrics(std::span<const Metrics> folds);

}  // namespace apichain
