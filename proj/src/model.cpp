#include "apichain/model.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "apichain/error.hpp"
#include "apichain/knn.hpp"

namespace apichain {

using nlohmann::json;

ClassifierSpec ClassifierSpec::parse(std::string_view name, Mode mode) {
  ClassifierSpec s;
  if (name == "rf-family") {
    s.forest = RandomForestParams::family_defaults();
  } else if (name == "rf-package") {
    s.forest = RandomForestParams::package_defaults();
  } else if (name == "rf") {
    s.forest = mode == Mode::family ? RandomForestParams::family_defaults() : RandomForestParams::package_defaults();
  } else if (name == "1nn" || name == "3nn") {
    s.kind = Kind::knn;
    s.k = name == "1nn" ? 1 : 3;
  } else {
    throw Error("unknown classifier '" + std::string(name) + "' (expected rf-family|rf-package|rf|1nn|3nn)");
  }
  return s;
}

std::string ClassifierSpec::name() const {
  if (kind == Kind::knn) return std::to_string(k) + "nn";
  return "rf(" + std::to_string(forest.n_trees) + "," + std::to_string(forest.max_depth) + ")";
}

Label KnnModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::size_t malware = 0;
  const auto near = nearest_neighbors(X, x, std::min<std::size_t>(k, static_cast<std::size_t>(X.rows())));
  for (auto i : near) malware += y[i] == Label::malware;
  return 2 * malware >= near.size() ? Label::malware : Label::benign;
}

std::size_t classifier_input_dim(const Classifier& c) {
  if (const auto* rf = std::get_if<RandomForestModel>(&c)) return rf->n_features;
  return static_cast<std::size_t>(std::get<KnnModel>(c).X.cols());
}

Label classifier_predict(const Classifier& c, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, c);
}

std::size_t TrainedModel::input_dim() const { return pca ? pca->input_dim() : classifier_input_dim(classifier); }

Label TrainedModel::predict(const Eigen::Ref<const Eigen::VectorXd>& raw) const {
  if (static_cast<std::size_t>(raw.size()) != input_dim())
    throw Error("model expects " + std::to_string(input_dim()) + " features, got " + std::to_string(raw.size()));
  if (pca) return classifier_predict(classifier, pca->transform(raw));
  return classifier_predict(classifier, raw);
}

std::vector<Label> TrainedModel::predict_rows(const Eigen::MatrixXd& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != input_dim())
    throw Error("model expects " + std::to_string(input_dim()) + " features, got " + std::to_string(raw.cols()));
  const Eigen::MatrixXd z = pca ? pca->transform_rows(raw) : raw;
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) out.push_back(classifier_predict(classifier, z.row(i).transpose()));
  return out;
}

TrainedModel train_model(const LabeledDataset& d, const ModelSpec& spec, std::uint64_t seed, std::size_t workers,
                         const StateSpace* space) {
  d.validate();
  TrainedModel m;
  m.seed = seed;
  if (space) {
    if (space->feature_count() != d.cols())
      throw Error("feature width " + std::to_string(d.cols()) + " does not match the " +
                  std::string(to_string(space->mode())) + " layout (" + std::to_string(space->feature_count()) + ")");
    m.mode = space->mode();
    m.state_space = space->names();
  }

  LabeledDataset projected;
  const LabeledDataset* fit_on = &d;
  if (spec.pca_components) {
    m.pca = fit_pca(d.X, *spec.pca_components);
    projected = d;
    projected.X = m.pca->transform_rows(d.X);
    fit_on = &projected;
  }

  if (spec.classifier.kind == ClassifierSpec::Kind::random_forest) {
    m.classifier = train_random_forest(*fit_on, spec.classifier.forest, seed, workers);
  } else {
    if (fit_on->rows() == 0) throw Error("k-NN training set is empty");
    if (fit_on->rows() < spec.classifier.k) throw Error("k-NN needs at least k training rows");
    m.classifier = KnnModel{spec.classifier.k, fit_on->X, fit_on->y};
  }
  return m;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(cols)) throw Error("model matrix row has the wrong width");
    for (Eigen::Index j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][j].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json forest_to_json(const RandomForestModel& rf) {
  json trees = json::array();
  for (const auto& t : rf.trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         votes = json::array();
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      votes.push_back({n.votes[0], n.votes[1]});
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"votes", votes}});
  }
  return {{"kind", "random_forest"},
          {"params",
           {{"n_trees", rf.params.n_trees},
            {"max_depth", rf.params.max_depth},
            {"features_per_split", rf.params.features_per_split},
            {"bootstrap", rf.params.bootstrap},
            {"bootstrap_rate", rf.params.bootstrap_rate},
            {"min_samples_split", rf.params.min_samples_split},
            {"criterion", "gini"},
            {"tie", "malware"}}},
          {"n_features", rf.n_features},
          {"trees", trees}};
}

RandomForestModel forest_from_json(const json& j, std::uint64_t seed) {
  RandomForestModel rf;
  const auto& p = j.at("params");
  rf.params.n_trees = p.at("n_trees").get<std::size_t>();
  rf.params.max_depth = p.at("max_depth").get<std::size_t>();
  rf.params.features_per_split = p.at("features_per_split").get<std::size_t>();
  rf.params.bootstrap = p.at("bootstrap").get<bool>();
  rf.params.bootstrap_rate = p.at("bootstrap_rate").get<double>();
  rf.params.min_samples_split = p.at("min_samples_split").get<std::size_t>();
  rf.n_features = j.at("n_features").get<std::size_t>();
  rf.seed = seed;
  for (const auto& t : j.at("trees")) {
    DecisionTree tree;
    const auto& feature = t.at("feature");
    const auto n = feature.size();
    if (t.at("threshold").size() != n || t.at("left").size() != n || t.at("right").size() != n || t.at("votes").size() != n)
      throw Error("model tree arrays differ in length");
    for (std::size_t i = 0; i < n; ++i) {
      DecisionTree::Node node;
      node.feature = feature[i].get<int>();
      node.threshold = t["threshold"][i].get<double>();
      node.left = t["left"][i].get<std::int32_t>();
      node.right = t["right"][i].get<std::int32_t>();
      node.votes = {t["votes"][i][0].get<double>(), t["votes"][i][1].get<double>()};
      const auto in_range = [n](std::int32_t c) { return c > 0 && static_cast<std::size_t>(c) < n; };
      if (node.feature >= 0 && (static_cast<std::size_t>(node.feature) >= rf.n_features || !in_range(node.left) ||
                                !in_range(node.right)))
        throw Error("model tree node out of range");
      tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw Error("model contains an empty tree");
    rf.trees.push_back(std::move(tree));
  }
  return rf;
}

}  // namespace

std::string TrainedModel::to_json() const {
  json j;
  j["layout_version"] = layout_version;
  j["layout"] = "row-major";
  j["mode"] = std::string(to_string(mode));
  j["state_space"] = state_space;
  j["seed"] = seed;
  if (pca) {
    j["pca"] = {{"mean", vector_to_json(pca->mean)},
                {"components", matrix_to_json(pca->components)},
                {"explained_variance", vector_to_json(pca->explained_variance)},
                {"explained_variance_ratio", vector_to_json(pca->explained_variance_ratio)},
                {"degenerate", pca->degenerate}};
  } else {
    j["pca"] = nullptr;
  }
  if (const auto* rf = std::get_if<RandomForestModel>(&classifier)) {
    j["classifier"] = forest_to_json(*rf);
  } else {
    const auto& knn = std::get<KnnModel>(classifier);
    std::vector<std::string> labels;
    for (auto l : knn.y) labels.emplace_back(apichain::to_string(l));
    j["classifier"] = {{"kind", "knn"},
                       {"params", {{"k", knn.k}, {"metric", "euclidean"}, {"tie", "lower-index"}}},
                       {"n_features", knn.X.cols()},
                       {"train_matrix", matrix_to_json(knn.X)},
                       {"train_labels", labels}};
  }
  return j.dump() + "\n";
}

TrainedModel TrainedModel::from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    TrainedModel m;
    m.layout_version = j.at("layout_version").get<int>();
    if (m.layout_version != kLayoutVersion)
      throw Error("unsupported model layout version " + std::to_string(m.layout_version));
    m.mode = parse_mode(j.at("mode").get<std::string>());
    m.state_space = j.at("state_space").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("pca").is_null()) {
      const auto& p = j["pca"];
      PcaModel pca;
      pca.mean = vector_from_json(p.at("mean"));
      pca.components = matrix_from_json(p.at("components"), pca.mean.size());
      pca.explained_variance = vector_from_json(p.at("explained_variance"));
      pca.explained_variance_ratio = vector_from_json(p.at("explained_variance_ratio"));
      pca.degenerate = p.at("degenerate").get<bool>();
      m.pca = std::move(pca);
    }
    const auto& c = j.at("classifier");
    const auto kind = c.at("kind").get<std::string>();
    if (kind == "random_forest") {
      m.classifier = forest_from_json(c, m.seed);
    } else if (kind == "knn") {
      KnnModel knn;
      knn.k = c.at("params").at("k").get<std::size_t>();
      knn.X = matrix_from_json(c.at("train_matrix"), c.at("n_features").get<Eigen::Index>());
      for (const auto& l : c.at("train_labels")) knn.y.push_back(parse_label(l.get<std::string>()));
      if (knn.y.size() != static_cast<std::size_t>(knn.X.rows())) throw Error("k-NN labels do not match the matrix");
      m.classifier = std::move(knn);
    } else {
      throw Error("unknown classifier kind '" + kind + "'");
    }
    if (m.pca && m.pca->output_dim() != classifier_input_dim(m.classifier))
      throw Error("PCA output width does not match the classifier");
    if (!m.state_space.empty() && m.state_space.size() * m.state_space.size() != m.input_dim())
      throw Error("model state space does not match its input width");
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
}

void TrainedModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model '" + path.string() + "'");
  out << to_json();
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace apichain
