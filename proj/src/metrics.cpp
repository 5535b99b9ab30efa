#include "apichain/metrics.hpp"

#include "apichain/error.hpp"

namespace apichain {

double f_measure(double precision, double recall) {
  const double s = precision + recall;
  return s > 0 ? 2 * precision * recall / s : 0.0;
}

Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw Error("metrics: label vectors differ in length");
  Metrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == Label::malware;
    const bool flagged = predicted[i] == Label::malware;
    if (actual && flagged) ++m.tp;
    else if (!actual && flagged) ++m.fp;
    else if (actual) ++m.fn;
    else ++m.tn;
  }
  m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  m.f_measure = f_measure(m.precision, m.recall);
  return m;
}

Metrics average_metrics(std::span<const Metrics> folds) {
  Metrics avg;
  if (folds.empty()) return avg;
  for (const auto& f : folds) {
    avg.precision += f.precision;
    avg.recall += f.recall;
    avg.tp += f.tp;
    avg.fp += f.fp;
    avg.fn += f.fn;
    avg.tn += f.tn;
  }
  avg.precision /= static_cast<double>(folds.size());
  avg.recall /= static_cast<double>(folds.size());
  avg.f_measure = f_measure(avg.precision, avg.recall);
  return avg;
}

}  // namespace apichain
