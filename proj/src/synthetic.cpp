#include "apichain/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>

#include "apichain/error.hpp"
#include "apichain/parallel.hpp"

namespace apichain::synthetic {
namespace {

constexpr std::array kClassWords = {"Manager", "Service", "Helper",  "Factory", "Provider",
                                    "Client",  "Runtime", "Context", "Builder", "Handler"};
constexpr std::array kMethodWords = {"get", "set", "open", "close", "run", "load", "send", "read", "write", "query"};
constexpr std::array kModuleWords = {"core", "net", "ui", "data", "util", "task", "sync", "io"};
constexpr std::array kReturnTypes = {"void", "int", "boolean", "java.lang.String", "java.lang.Object"};
constexpr std::size_t kMethodsPerClass = 4;
constexpr double kZipfExponent = 1.5;

template <typename Rng>
std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

template <typename Rng>
std::size_t sample_row(Rng& rng, const double* row, std::size_t n) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (row[k] <= 0) continue;
    acc += row[k];
    last = k;
    if (u < acc) return k;
  }
  return last;
}

// Rank r drawn with weight (r+1)^-kZipfExponent: a few calls are common, most are rare, as in
// real API usage.
std::discrete_distribution<std::size_t> zipf(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) w[r] = std::pow(static_cast<double>(r + 1), -kZipfExponent);
  return std::discrete_distribution<std::size_t>(w.begin(), w.end());
}

bool class_like(std::string_view segment) { return !segment.empty() && std::isupper(static_cast<unsigned char>(segment[0])); }

// Signatures whose qualified class lands in catalog package `prefix`.
MethodRef api_signature(const std::string& prefix, std::size_t cls, std::size_t method) {
  MethodRef m;
  const auto dot = prefix.rfind('.');
  const std::string last = dot == std::string::npos ? prefix : prefix.substr(dot + 1);
  if (dot != std::string::npos && class_like(last)) {
    m.package = prefix.substr(0, dot);
    m.class_name = last + "$" + kClassWords[cls % kClassWords.size()];
  } else {
    m.package = prefix;
    m.class_name = kClassWords[cls % kClassWords.size()];
  }
  m.method_name = std::string(kMethodWords[method % kMethodWords.size()]) + std::to_string(method / kMethodWords.size());
  m.return_type = kReturnTypes[(cls + method) % kReturnTypes.size()];
  if (method % 3 == 1) m.params = {"int"};
  if (method % 3 == 2) m.params = {"java.lang.String", "int"};
  return m;
}

// Per-state pools of catalog packages used to build signatures.
std::vector<std::vector<std::string>> state_packages(const Abstractor& a) {
  const auto& catalog = a.catalog();
  std::vector<std::vector<std::string>> pools(a.states().size());
  for (std::size_t p = 0; p < catalog.packages().size(); ++p) {
    const auto& pkg = catalog.packages()[p];
    std::optional<std::size_t> state;
    if (a.mode() == Mode::package) {
      state = a.states().index_of(pkg.prefix);
    } else if (catalog.families()[pkg.family].active) {
      state = a.states().index_of(catalog.families()[pkg.family].name);
    }
    if (state) pools[*state].push_back(pkg.prefix);
  }
  return pools;
}

}  // namespace

void GeneratorSpec::validate(std::size_t states) const {
  const auto check = [states](const Profile& p, const char* which) {
    if (p.size() != states * states) throw Error(std::string(which) + " profile has the wrong size");
    for (std::size_t j = 0; j < states; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < states; ++k) {
        const double v = p[j * states + k];
        if (!(v >= 0)) throw Error(std::string(which) + " profile has a negative entry");
        s += v;
      }
      if (std::abs(s - 1.0) > 1e-9) throw Error(std::string(which) + " profile row " + std::to_string(j) + " is not stochastic");
    }
  };
  check(benign_profile, "benign");
  check(malware_profile, "malware");
  if (!(drift >= 0.0 && drift <= 1.0)) throw Error("drift must be in [0, 1]");
  if (!(label_noise >= 0.0 && label_noise < 0.5)) throw Error("label noise must be in [0, 0.5)");
  if (apps_per_class == 0 || epochs == 0) throw Error("corpus needs at least one app per class and one epoch");
  if (min_edges == 0 || min_edges > max_edges) throw Error("edge range must satisfy 1 <= min <= max");
}

ProfileKind parse_profile_kind(std::string_view text) {
  if (text == "disjoint") return ProfileKind::disjoint;
  if (text == "identical") return ProfileKind::identical;
  if (text == "overlap") return ProfileKind::overlap;
  throw Error("unknown profile kind '" + std::string(text) + "' (expected disjoint|identical|overlap)");
}

Profile random_profile(std::size_t states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> draw(1.0);
  Profile p(states * states);
  for (std::size_t j = 0; j < states; ++j) {
    double s = 0;
    for (std::size_t k = 0; k < states; ++k) s += p[j * states + k] = draw(rng);
    for (std::size_t k = 0; k < states; ++k) p[j * states + k] /= s;
  }
  return p;
}

std::pair<Profile, Profile> make_profiles(ProfileKind kind, std::size_t states, std::uint64_t seed, double separation) {
  if (states < 2) throw Error("profiles need at least two states");
  const auto benign = random_profile(states, mix_seed(seed, 101));
  if (kind == ProfileKind::identical) return {benign, benign};
  if (kind == ProfileKind::overlap) {
    if (!(separation >= 0 && separation <= 1)) throw Error("separation must be in [0, 1]");
    const auto other = random_profile(states, mix_seed(seed, 202));
    Profile malware(benign.size());
    for (std::size_t i = 0; i < benign.size(); ++i) malware[i] = (1 - separation) * benign[i] + separation * other[i];
    return {benign, malware};
  }
  auto restrict_to = [states](Profile p, std::size_t parity) {
    for (std::size_t j = 0; j < states; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < states; ++k) {
        if (k % 2 != parity) p[j * states + k] = 0;
        s += p[j * states + k];
      }
      for (std::size_t k = 0; k < states; ++k) p[j * states + k] /= s;
    }
    return p;
  };
  return {restrict_to(benign, 0), restrict_to(random_profile(states, mix_seed(seed, 202)), 1)};
}

Profile malware_profile_at(const GeneratorSpec& spec, std::size_t states, std::size_t epoch) {
  Profile p = spec.malware_profile;
  for (std::size_t e = 1; e <= epoch && spec.drift > 0; ++e) {
    const auto u = random_profile(states, mix_seed(spec.seed, 0xD00000 + e));
    for (std::size_t j = 0; j < states; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < states; ++k) {
        auto& v = p[j * states + k];
        v = (1 - spec.drift) * v + spec.drift * u[j * states + k];
        s += v;
      }
      for (std::size_t k = 0; k < states; ++k) p[j * states + k] /= s;
    }
  }
  return p;
}

std::string app_id(Label label, std::size_t epoch, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-e%zu-%05zu", label == Label::malware ? "mal" : "ben", epoch, index);
  return buf;
}

CallGraph generate_app(const GeneratorSpec& spec, const Abstractor& abstractor, const Profile& profile, Label label,
                       std::size_t epoch, std::size_t index) {
  const auto& states = abstractor.states();
  const std::size_t n = states.size();
  const auto pools = state_packages(abstractor);
  const std::size_t self_defined = states.require(kSelfDefined);
  const std::size_t obfuscated = states.require(kObfuscated);
  std::vector<std::discrete_distribution<std::size_t>> pool_rank;
  for (const auto& pool : pools) pool_rank.push_back(zipf(std::max<std::size_t>(1, pool.size())));
  auto class_rank = zipf(kClassWords.size());
  auto method_rank = zipf(kClassWords.size() * kMethodsPerClass);

  std::mt19937_64 rng(mix_seed(mix_seed(spec.seed, static_cast<std::uint64_t>(label)), epoch * 1000003 + index));
  const std::string id = app_id(label, epoch, index);
  const std::string app_pkg = "com.app" + std::to_string(spec.seed % 1000) + "x" + std::to_string(label == Label::malware) +
                              "e" + std::to_string(epoch) + "n" + std::to_string(index);

  const auto make_signature = [&](std::size_t state) {
    if (state == self_defined) {
      MethodRef m;
      m.package = app_pkg + "." + kModuleWords[pick(rng, kModuleWords.size())];
      m.class_name = std::string(kClassWords[pick(rng, kClassWords.size())]) + "Impl";
      m.method_name = std::string(kMethodWords[pick(rng, kMethodWords.size())]) + "Data";
      m.return_type = "void";
      return m;
    }
    if (state == obfuscated) {
      MethodRef m;
      m.package = app_pkg + "." + std::string(1, static_cast<char>('a' + pick(rng, 6)));
      m.class_name = std::string(1, static_cast<char>('a' + pick(rng, 26)));
      m.method_name = std::string(1, static_cast<char>('a' + pick(rng, 26)));
      m.return_type = "void";
      return m;
    }
    const auto& pool = pools[state];
    if (pool.empty()) throw Error("state '" + states.name(state) + "' has no catalog package to synthesize from");
    return api_signature(pool[pool_rank[state](rng)], class_rank(rng), method_rank(rng));
  };

  CallGraph g(id);
  std::vector<std::size_t> node_state;
  const auto add = [&](const MethodRef& m, std::size_t state) {
    const auto before = g.node_count();
    const auto idx = g.add_node(m);
    if (idx == before) node_state.push_back(state);
    return idx;
  };

  MethodRef entry = make_signature(self_defined);
  entry.class_name = "MainActivity";
  entry.method_name = "onCreate";
  entry.params = {"android.os.Bundle"};
  add(entry, self_defined);

  const std::size_t edges = spec.min_edges + pick(rng, spec.max_edges - spec.min_edges + 1);
  for (std::size_t e = 0; e < edges; ++e) {
    const std::size_t src = pick(rng, g.node_count());
    const std::size_t to_state = sample_row(rng, profile.data() + node_state[src] * n, n);
    const auto target = make_signature(to_state);
    if (abstractor.state_of(target) != to_state)
      throw Error("internal: synthesized signature '" + target.render() + "' does not abstract to '" +
                  states.name(to_state) + "'");
    const auto dst = add(target, to_state);
    g.add_edge(src, dst);
  }
  return g;
}

Manifest generate_corpus(const GeneratorSpec& spec, const PackageCatalog& catalog, const std::filesystem::path& out_dir,
                         std::size_t workers) {
  const Abstractor abstractor(catalog, spec.mode);
  const std::size_t n = abstractor.states().size();
  spec.validate(n);

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "cg", ec);
  if (ec) throw Error("cannot create output directory '" + (out_dir / "cg").string() + "': " + ec.message());

  std::vector<Profile> malware_by_epoch;
  for (std::size_t e = 0; e < spec.epochs; ++e) malware_by_epoch.push_back(malware_profile_at(spec, n, e));

  Manifest m;
  m.base_dir = out_dir;
  struct Job {
    Label label;
    std::size_t epoch;
    std::size_t index;
  };
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < spec.epochs; ++e)
    for (auto label : {Label::benign, Label::malware})
      for (std::size_t i = 0; i < spec.apps_per_class; ++i) jobs.push_back({label, e, i});
  m.entries.resize(jobs.size());

  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto& job = jobs[j];
    const auto& profile = job.label == Label::malware ? malware_by_epoch[job.epoch] : spec.benign_profile;
    const auto g = generate_app(spec, abstractor, profile, job.label, job.epoch, job.index);
    const auto rel = std::filesystem::path("cg") / (g.app_id() + ".cg");
    std::ofstream out(out_dir / rel, std::ios::binary);
    if (!out) throw Error("cannot write '" + (out_dir / rel).string() + "'");
    out << "# synthetic app " << g.app_id() << "\n" << render_call_graph(g);

    std::mt19937_64 noise(mix_seed(spec.seed ^ 0x4E4F495345ULL, j));
    Label written = job.label;
    if (spec.label_noise > 0 && std::uniform_real_distribution<double>(0, 1)(noise) < spec.label_noise)
      written = job.label == Label::malware ? Label::benign : Label::malware;
    m.entries[j] = {g.app_id(), written, static_cast<int>(job.epoch), rel};
  });
  write_manifest(out_dir / "manifest.csv", m);
  return m;
}

}  // namespace apichain::synthetic
