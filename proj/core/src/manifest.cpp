#include "fragile/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fragile/attacks.hpp"
#include "fragile/error.hpp"

namespace fragile {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<ExperimentKind, const char*>, 7> kKinds{{
    {ExperimentKind::bound_curves, "bound_curves"},
    {ExperimentKind::fingerprint_quality, "fingerprint_quality"},
    {ExperimentKind::roc, "roc"},
    {ExperimentKind::copy_attack, "copy_attack"},
    {ExperimentKind::dct_recovery, "dct_recovery"},
    {ExperimentKind::hsic, "hsic"},
    {ExperimentKind::triangle, "triangle"},
}};

const std::vector<int> kDefaultQualities{100, 95, 90, 85, 80, 75, 70};

std::vector<Cutoff> default_cutoffs() {
  return {Cutoff::full(), Cutoff::at(1), Cutoff::at(2), Cutoff::at(3), Cutoff::at(4), Cutoff::at(5)};
}

[[noreturn]] void fail(const std::string& what) { throw ManifestError(what); }

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_unsigned()) fail("");
    } else if constexpr (std::is_same_v<T, int>) {
      if (!it->is_number_integer()) fail("");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) fail("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) fail("");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    fail(std::string("key '") + key + "' in " + where + " has the wrong type");
  }
}

Cutoff cutoff_from_json(const json& v) {
  if (v.is_string() && v.get<std::string>() == "full") return Cutoff::full();
  if (v.is_number_integer()) return Cutoff::at(v.get<int>());
  fail("cutoffs must be integers or \"full\"");
}

RecoveryScope scope_from_string(const std::string& s) {
  if (s == "high") return RecoveryScope::high;
  if (s == "low") return RecoveryScope::low;
  fail("unknown recovery scope '" + s + "'");
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : kKinds) {
    if (name == n) return k;
  }
  throw ManifestError("unknown experiment '" + name + "'");
}

const char* to_string(RecoveryScope scope) { return scope == RecoveryScope::high ? "high" : "low"; }

ExperimentManifest default_manifest(ExperimentKind kind) {
  ExperimentManifest m;
  m.experiment = kind;
  m.qualities = kDefaultQualities;
  m.cutoffs = default_cutoffs();
  m.seeds = {1, 2, 3, 4, 5};
  m.scene.kind = sim::SceneKind::textured;
  m.scene.height = m.scene.width = 256;
  m.camera.count = 1;
  switch (kind) {
    case ExperimentKind::bound_curves:
      m.scene.kind = sim::SceneKind::laplacian_synthetic;
      m.scene.height = m.scene.width = 128;
      m.n_fingerprint = 250;
      m.n_attack = 250;
      break;
    case ExperimentKind::fingerprint_quality:
      m.scene.height = m.scene.width = 512;
      break;
    case ExperimentKind::roc:
      m.camera.count = 6;
      m.qualities.clear();
      m.seeds = {1};
      m.n_test = 40;
      break;
    case ExperimentKind::copy_attack:
      m.qualities = {100, 90, 85};
      m.seeds = {1};
      m.n_test = 20;
      m.alphas = log_grid(0.1, 100.0, 13);
      break;
    case ExperimentKind::dct_recovery:
      m.scene.height = m.scene.width = 64;
      m.qualities = {100, 95};
      m.cutoffs = {Cutoff::at(1)};
      m.seeds = {1};
      break;
    case ExperimentKind::hsic:
      m.qualities = {100, 95, 90, 85, 80};
      m.cutoffs = {Cutoff::at(1), Cutoff::at(2), Cutoff::at(3)};
      m.seeds = {1, 2, 3};
      break;
    case ExperimentKind::triangle:
      // Content-dominated residuals, as in natural photographs.
      m.scene.kind = sim::SceneKind::laplacian_synthetic;
      m.camera.sigma_prnu = 0.003;
      m.qualities.clear();
      m.cutoffs = {Cutoff::at(1)};
      m.seeds = {1};
      m.n_attack = 150;
      m.n_fingerprint = 25;
      m.n_test = 20;
      m.alphas = log_grid(0.1, 100.0, 13);
      break;
  }
  return m;
}

void validate(const ExperimentManifest& m) {
  if (m.schema_version != kManifestSchemaVersion) {
    fail("unsupported schema_version " + std::to_string(m.schema_version));
  }
  if (m.n_fingerprint == 0 || m.n_attack == 0 || m.n_test == 0 || m.n_negative < 2 || m.n_safe < 3) {
    fail("image counts must be > 0 (n_safe >= 3)");
  }
  if (m.camera.count == 0) fail("camera count must be > 0");
  if (!(m.camera.sigma_prnu >= 0.0) || !(m.camera.sigma_gamma >= 0.0)) {
    fail("camera noise levels must be >= 0");
  }
  if (m.seeds.empty()) fail("at least one seed is required");
  for (int q : m.qualities) {
    if (q < 1 || q > 100) fail("quality " + std::to_string(q) + " outside [1, 100]");
  }
  if (m.public_quality < 1 || m.public_quality > 100) fail("public_quality outside [1, 100]");
  for (const auto& c : m.cutoffs) {
    if (c.c && (*c.c < kMinCutoff || *c.c > kMaxCutoff)) {
      fail("cutoff " + c.label() + " outside [" + std::to_string(kMinCutoff) + ", " +
           std::to_string(kMaxCutoff) + "]");
    }
  }
  for (double a : m.alphas) {
    if (!(a >= 0.0)) fail("embedding strengths must be >= 0");
  }
  if (!(m.false_alarm > 0.0 && m.false_alarm < 1.0)) fail("false_alarm must lie in (0, 1)");
  if (!(m.sigma0 > 0.0)) fail("sigma0 must be > 0");
  if (m.hsic.block < 16 || m.hsic.block % 8 != 0) fail("hsic.block must be a multiple of 8, >= 16");
  if (!(m.hsic.alpha > 0.0 && m.hsic.alpha < 1.0)) fail("hsic.alpha must lie in (0, 1)");
  if (m.hsic.permutations == 0 || m.hsic.max_samples < 20) fail("hsic sizes too small");
  if (m.recovery.images == 0 || m.recovery.scopes.empty()) fail("recovery needs images and scopes");
  if (m.output_dir.empty()) fail("output_dir must not be empty");
  try {
    m.scene.validate();
  } catch (const ParameterError& e) {
    fail(std::string("scene: ") + e.what());
  }
  if (m.scene.height % kBlock != 0 || m.scene.width % kBlock != 0 || m.scene.height < 64 ||
      m.scene.width < 64) {
    fail("scene size must be a multiple of 8 and at least 64x64");
  }

  switch (m.experiment) {
    case ExperimentKind::bound_curves:
    case ExperimentKind::fingerprint_quality:
    case ExperimentKind::hsic:
      if (m.qualities.empty() || m.cutoffs.empty()) fail("qualities and cutoffs are required");
      break;
    case ExperimentKind::roc:
      if (m.cutoffs.empty()) fail("cutoffs are required");
      break;
    case ExperimentKind::copy_attack:
      if (m.qualities.empty() || m.cutoffs.empty() || m.alphas.empty()) {
        fail("qualities, cutoffs and alphas are required");
      }
      break;
    case ExperimentKind::dct_recovery:
      if (m.qualities.empty() || m.cutoffs.empty()) fail("qualities and cutoffs are required");
      for (const auto& c : m.cutoffs) {
        if (c.is_full()) fail("dct_recovery needs numeric cutoffs");
      }
      break;
    case ExperimentKind::triangle:
      if (m.cutoffs.size() != 1 || m.cutoffs[0].is_full() || m.alphas.empty()) {
        fail("triangle needs one numeric cutoff and alphas");
      }
      break;
  }
  if (m.experiment == ExperimentKind::hsic) {
    for (const auto& c : m.cutoffs) {
      if (c.is_full()) fail("hsic needs numeric cutoffs");
    }
  }
}

ExperimentManifest parse_manifest(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("manifest is not valid JSON: ") + e.what());
  }
  check_keys(doc, "manifest",
             {"schema_version", "experiment", "camera", "scene", "n_fingerprint", "n_attack",
              "n_test", "n_negative", "n_safe", "qualities", "cutoffs", "seeds", "alphas", "false_alarm", "sigma0", "hsic",
              "recovery", "public_quality", "output_dir", "real_corpus"});
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
    fail("manifest must name its experiment");
  }
  ExperimentManifest m = default_manifest(experiment_from_string(doc["experiment"].get<std::string>()));
  read(doc, "schema_version", m.schema_version, "manifest");
  read(doc, "n_fingerprint", m.n_fingerprint, "manifest");
  read(doc, "n_attack", m.n_attack, "manifest");
  read(doc, "n_test", m.n_test, "manifest");
  read(doc, "n_negative", m.n_negative, "manifest");
  read(doc, "n_safe", m.n_safe, "manifest");
  read(doc, "false_alarm", m.false_alarm, "manifest");
  read(doc, "sigma0", m.sigma0, "manifest");
  read(doc, "public_quality", m.public_quality, "manifest");
  read(doc, "output_dir", m.output_dir, "manifest");
  read(doc, "real_corpus", m.real_corpus, "manifest");

  auto list = [&](const char* key) -> const json* {
    auto it = doc.find(key);
    if (it == doc.end()) return nullptr;
    if (!it->is_array()) fail(std::string("'") + key + "' must be an array");
    return &*it;
  };
  if (const json* a = list("qualities")) {
    m.qualities.clear();
    for (const auto& v : *a) {
      if (!v.is_number_integer()) fail("qualities must be integers");
      m.qualities.push_back(v.get<int>());
    }
  }
  if (const json* a = list("cutoffs")) {
    m.cutoffs.clear();
    for (const auto& v : *a) m.cutoffs.push_back(cutoff_from_json(v));
  }
  if (const json* a = list("seeds")) {
    m.seeds.clear();
    for (const auto& v : *a) {
      if (!v.is_number_unsigned()) fail("seeds must be nonnegative integers");
      m.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  if (const json* a = list("alphas")) {
    m.alphas.clear();
    for (const auto& v : *a) {
      if (!v.is_number()) fail("alphas must be numbers");
      m.alphas.push_back(v.get<double>());
    }
  }
  if (auto it = doc.find("camera"); it != doc.end()) {
    check_keys(*it, "camera", {"sigma_prnu", "sigma_gamma", "count"});
    read(*it, "sigma_prnu", m.camera.sigma_prnu, "camera");
    read(*it, "sigma_gamma", m.camera.sigma_gamma, "camera");
    read(*it, "count", m.camera.count, "camera");
  }
  if (auto it = doc.find("scene"); it != doc.end()) {
    check_keys(*it, "scene",
               {"kind", "height", "width", "intensity", "scale_min", "scale_max", "scale_decay",
                "correlation_length"});
    std::string kind = sim::to_string(m.scene.kind);
    read(*it, "kind", kind, "scene");
    try {
      m.scene.kind = sim::scene_kind_from_string(kind);
    } catch (const ParameterError& e) {
      fail(e.what());
    }
    read(*it, "height", m.scene.height, "scene");
    read(*it, "width", m.scene.width, "scene");
    read(*it, "intensity", m.scene.intensity, "scene");
    read(*it, "scale_min", m.scene.scale_min, "scene");
    read(*it, "scale_max", m.scene.scale_max, "scene");
    read(*it, "scale_decay", m.scene.scale_decay, "scene");
    read(*it, "correlation_length", m.scene.correlation_length, "scene");
  }
  if (auto it = doc.find("hsic"); it != doc.end()) {
    check_keys(*it, "hsic", {"scenario", "block", "alpha", "permutations", "max_samples"});
    std::string scenario = to_string(m.hsic.scenario);
    read(*it, "scenario", scenario, "hsic");
    try {
      m.hsic.scenario = scenario_from_string(scenario);
    } catch (const ParameterError& e) {
      fail(e.what());
    }
    read(*it, "block", m.hsic.block, "hsic");
    read(*it, "alpha", m.hsic.alpha, "hsic");
    read(*it, "permutations", m.hsic.permutations, "hsic");
    read(*it, "max_samples", m.hsic.max_samples, "hsic");
  }
  if (auto it = doc.find("recovery"); it != doc.end()) {
    check_keys(*it, "recovery", {"scopes", "images"});
    read(*it, "images", m.recovery.images, "recovery");
    if (auto s = it->find("scopes"); s != it->end()) {
      if (!s->is_array()) fail("recovery.scopes must be an array");
      m.recovery.scopes.clear();
      for (const auto& v : *s) {
        if (!v.is_string()) fail("recovery.scopes must hold strings");
        m.recovery.scopes.push_back(scope_from_string(v.get<std::string>()));
      }
    }
  }
  validate(m);
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ManifestError("cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_manifest(ss.str());
}

std::string to_json(const ExperimentManifest& m) {
  json doc;
  doc["schema_version"] = m.schema_version;
  doc["experiment"] = to_string(m.experiment);
  doc["camera"] = {{"sigma_prnu", m.camera.sigma_prnu},
                   {"sigma_gamma", m.camera.sigma_gamma},
                   {"count", m.camera.count}};
  doc["scene"] = {{"kind", sim::to_string(m.scene.kind)},
                  {"height", m.scene.height},
                  {"width", m.scene.width},
                  {"intensity", m.scene.intensity},
                  {"scale_min", m.scene.scale_min},
                  {"scale_max", m.scene.scale_max},
                  {"scale_decay", m.scene.scale_decay},
                  {"correlation_length", m.scene.correlation_length}};
  doc["n_fingerprint"] = m.n_fingerprint;
  doc["n_attack"] = m.n_attack;
  doc["n_test"] = m.n_test;
  doc["n_negative"] = m.n_negative;
  doc["n_safe"] = m.n_safe;
  doc["qualities"] = m.qualities;
  json cutoffs = json::array();
  for (const auto& c : m.cutoffs) {
    if (c.is_full()) {
      cutoffs.push_back("full");
    } else {
      cutoffs.push_back(*c.c);
    }
  }
  doc["cutoffs"] = cutoffs;
  doc["seeds"] = m.seeds;
  doc["alphas"] = m.alphas;
  doc["false_alarm"] = m.false_alarm;
  doc["sigma0"] = m.sigma0;
  doc["hsic"] = {{"scenario", to_string(m.hsic.scenario)},
                 {"block", m.hsic.block},
                 {"alpha", m.hsic.alpha},
                 {"permutations", m.hsic.permutations},
                 {"max_samples", m.hsic.max_samples}};
  json scopes = json::array();
  for (auto s : m.recovery.scopes) scopes.push_back(to_string(s));
  doc["recovery"] = {{"scopes", scopes}, {"images", m.recovery.images}};
  doc["public_quality"] = m.public_quality;
  doc["output_dir"] = m.output_dir;
  doc["real_corpus"] = m.real_corpus;
  return doc.dump(2);  // keys come out sorted
}

std::uint64_t manifest_hash(const ExperimentManifest& m) {
  // Where the results go does not change what they are.
  ExperimentManifest copy = m;
  copy.output_dir = "-";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(copy)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fragile
