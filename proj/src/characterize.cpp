#include "apichain/characterize.hpp"

#include <fstream>
#include <map>
#include <set>

#include "apichain/error.hpp"
#include "apichain/feature_csv.hpp"
#include "apichain/pipeline.hpp"

namespace apichain {

std::size_t unique_callees(const CallGraph& g) {
  std::set<std::size_t> callees;
  for (const auto& e : g.edges()) callees.insert(e.to);
  return callees.size();
}

std::string characterization_family(const MethodRef& m, const PackageCatalog& catalog) {
  if (auto p = catalog.match(m.qualified_class())) return catalog.families()[catalog.packages()[*p].family].name;
  return std::string(is_obfuscated(m, catalog.obfuscation()) ? kObfuscated : kSelfDefined);
}

Characterization characterize_corpus(const Manifest& m, const Abstractor& abstractor, TraversalPolicy policy,
                                     std::size_t workers) {
  auto features = featurize_manifest(m, abstractor, policy, workers, true);
  Characterization c;
  const auto& catalog = abstractor.catalog();

  std::vector<std::string> family_order;
  for (const auto& f : catalog.families()) family_order.push_back(f.name);
  family_order.emplace_back(kSelfDefined);
  family_order.emplace_back(kObfuscated);

  std::map<std::string, std::map<std::string, std::size_t>> calls_by_dataset;
  std::map<std::string, std::size_t> totals;
  for (std::size_t i = 0; i < features.graphs.size(); ++i) {
    const auto& g = features.graphs[i];
    const auto label = features.data.y[i];
    const auto epoch = features.data.epoch[i];
    c.unique_calls.push_back({g.app_id(), label, epoch, unique_callees(g)});
    const std::string dataset = std::string(to_string(label)) + "-e" + std::to_string(epoch);
    auto& per_family = calls_by_dataset[dataset];
    for (const auto& e : g.edges()) {
      per_family[characterization_family(g.nodes()[e.to], catalog)] += e.multiplicity;
      totals[dataset] += e.multiplicity;
    }
  }
  for (const auto& [dataset, per_family] : calls_by_dataset) {
    const double total = static_cast<double>(totals[dataset]);
    for (const auto& fam : family_order) {
      const auto it = per_family.find(fam);
      const double n = it == per_family.end() ? 0.0 : static_cast<double>(it->second);
      c.family_fractions.push_back({dataset, fam, total > 0 ? n / total : 0.0});
    }
  }

  if (features.data.rows() >= 2) {
    c.pca = fit_pca(features.data.X, 2);
    const Eigen::MatrixXd z = c.pca.transform_rows(features.data.X);
    for (std::size_t i = 0; i < features.data.rows(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      c.pca_scatter.push_back({features.data.app_ids[i], features.data.y[i], features.data.epoch[i], z(r, 0), z(r, 1)});
    }
  }
  return c;
}

void write_characterization(const std::filesystem::path& out_dir, const Characterization& c) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto open = [&](const char* name) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw Error("cannot write '" + (out_dir / name).string() + "'");
    return out;
  };
  {
    auto out = open("unique_calls.csv");
    out << "app_id,label,epoch,unique_calls\n";
    for (const auto& r : c.unique_calls) out << r.app_id << ',' << to_string(r.label) << ',' << r.epoch << ',' << r.unique_calls << '\n';
  }
  {
    auto out = open("family_fractions.csv");
    out << "dataset,family,fraction\n";
    for (const auto& r : c.family_fractions) out << r.dataset << ',' << r.family << ',' << format_value(r.fraction) << '\n';
  }
  {
    auto out = open("pca_scatter.csv");
    out << "app_id,label,epoch,pc1,pc2\n";
    for (const auto& r : c.pca_scatter)
      out << r.app_id << ',' << to_string(r.label) << ',' << r.epoch << ',' << format_value(r.pc1) << ','
          << format_value(r.pc2) << '\n';
  }
}

}  // namespace apichain
