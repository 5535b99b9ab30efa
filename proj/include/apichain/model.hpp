#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "apichain/dataset.hpp"
#include "apichain/pca.hpp"
#include "apichain/random_forest.hpp"
#include "apichain/state_space.hpp"

namespace apichain {

struct ClassifierSpec {
  enum class Kind { random_forest, knn };
  Kind kind = Kind::random_forest;
  RandomForestParams forest = RandomForestParams::family_defaults();
  std::size_t k = 3;

  /// `rf-family`, `rf-package`, `rf` (defaults of `mode`), `1nn`, `3nn`.
  static ClassifierSpec parse(std::string_view name, Mode mode = Mode::family);
  std::string name() const;
};

/// k-NN "model": the stored training matrix.
struct KnnModel {
  std::size_t k = 3;
  Eigen::MatrixXd X;
  std::vector<Label> y;

  Label predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

using Classifier = std::variant<RandomForestModel, KnnModel>;

/// Width the classifier expects (after any PCA projection).
std::size_t classifier_input_dim(const Classifier& c);
Label classifier_predict(const Classifier& c, const Eigen::Ref<const Eigen::VectorXd>& x);

struct ModelSpec {
  ClassifierSpec classifier;
  std::optional<std::size_t> pca_components;
};

/// Persisted classifier with its feature layout and optional PCA projection.
struct TrainedModel {
  static constexpr int kLayoutVersion = 1;

  Mode mode = Mode::family;
  std::vector<std::string> state_space;  // empty when trained without layout information
  std::optional<PcaModel> pca;
  Classifier classifier;
  std::uint64_t seed = 0;
  int layout_version = kLayoutVersion;

  /// Raw feature width accepted by predict().
  std::size_t input_dim() const;
  /// Applies PCA (if any) then the classifier. Throws on width mismatch.
  Label predict(const Eigen::Ref<const Eigen::VectorXd>& raw) const;
  std::vector<Label> predict_rows(const Eigen::MatrixXd& raw) const;

  std::string to_json() const;
  static TrainedModel from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);
};

/// Fits PCA (when requested) on the training rows, then the classifier on the
/// projected rows. `space`, when provided, is recorded and checked against the width.
TrainedModel train_model(const LabeledDataset& d, const ModelSpec& spec, std::uint64_t seed, std::size_t workers = 1,
                         const StateSpace* space = nullptr);

}  // namespace apichain
