#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "apichain/abstraction.hpp"
#include "apichain/call_graph.hpp"
#include "apichain/manifest.hpp"
#include "apichain/pca.hpp"

namespace apichain {

struct UniqueCallsRow {
  std::string app_id;
  Label label;
  int epoch;
  std::size_t unique_calls;  // distinct callee signatures
};

struct FamilyFractionRow {
  std::string dataset;  // `<label>-e<epoch>`
  std::string family;
  double fraction;      // share of call sites whose callee is in the family
};

struct PcaScatterRow {
  std::string app_id;
  Label label;
  int epoch;
  double pc1;
  double pc2;
};

struct Characterization {
  std::vector<UniqueCallsRow> unique_calls;
  std::vector<FamilyFractionRow> family_fractions;
  std::vector<PcaScatterRow> pca_scatter;
  PcaModel pca;
};

/// Distinct callee signatures of one app.
std::size_t unique_callees(const CallGraph& g);

/// Family of a callee for corpus statistics: every catalog family counts,
/// including inactive ones, plus the two specials.
std::string characterization_family(const MethodRef& m, const PackageCatalog& catalog);

/// Builds the tables for the parsable apps of `m`. PCA coordinates come from a
/// 2-component fit over every app's feature vector in the abstractor's mode.
Characterization characterize_corpus(const Manifest& m, const Abstractor& abstractor, TraversalPolicy policy,
                                     std::size_t workers = 1);

/// Writes unique_calls.csv, family_fractions.csv and pca_scatter.csv.
void write_characterization(const std::filesystem::path& out_dir, const Characterization& c);

}  // namespace apichain
