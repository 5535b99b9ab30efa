#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "apichain/abstraction.hpp"
#include "apichain/call_graph.hpp"
#include "apichain/catalog.hpp"
#include "apichain/dataset.hpp"
#include "apichain/manifest.hpp"

namespace apichain::synthetic {

/// Row-major |S| x |S| row-stochastic matrix.
using Profile = std::vector<double>;

struct GeneratorSpec {
  Mode mode = Mode::family;
  Profile benign_profile;
  Profile malware_profile;
  std::size_t apps_per_class = 100;  // per epoch
  std::size_t epochs = 1;
  std::size_t min_edges = 60;
  std::size_t max_edges = 240;
  /// Per-epoch step: P_e = row-renormalized (1 - drift) P_{e-1} + drift U_e.
  double drift = 0.0;
  double label_noise = 0.0;
  std::uint64_t seed = 1;

  /// Throws unless profiles are row-stochastic over `states` and the scalars are in range.
  void validate(std::size_t states) const;
};

enum class ProfileKind { disjoint, identical, overlap };
ProfileKind parse_profile_kind(std::string_view text);

/// disjoint: benign rows put mass only on even-indexed targets, malware only on
/// odd ones. identical: one random profile for both. overlap: malware =
/// (1 - separation) benign + separation R for an independent random R.
std::pair<Profile, Profile> make_profiles(ProfileKind kind, std::size_t states, std::uint64_t seed,
                                          double separation = 0.5);

/// Random row-stochastic matrix (rows drawn uniformly from the simplex).
Profile random_profile(std::size_t states, std::uint64_t seed);

/// Malware profile after `epoch` drift steps.
Profile malware_profile_at(const GeneratorSpec& spec, std::size_t states, std::size_t epoch);

/// One synthetic call graph whose abstracted transitions follow `profile`.
/// Deterministic in (seed, label, epoch, index).
CallGraph generate_app(const GeneratorSpec& spec, const Abstractor& abstractor, const Profile& profile, Label label,
                       std::size_t epoch, std::size_t index);

std::string app_id(Label label, std::size_t epoch, std::size_t index);

/// Writes `<out_dir>/cg/<app_id>.cg` and `<out_dir>/manifest.csv`.
Manifest generate_corpus(const GeneratorSpec& spec, const PackageCatalog& catalog,
                         const std::filesystem::path& out_dir, std::size_t workers = 1);

}  // namespace apichain::synthetic
