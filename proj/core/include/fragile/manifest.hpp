#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fragile/hsic.hpp"
#include "fragile/mask.hpp"
#include "fragile/sensor_sim.hpp"

namespace fragile {

inline constexpr int kManifestSchemaVersion = 1;

enum class ExperimentKind {
  bound_curves,
  fingerprint_quality,
  roc,
  copy_attack,
  dct_recovery,
  hsic,
  triangle,
};

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

// high recovers zero-quantized coefficients inside H_c, low inside L_c.
enum class RecoveryScope { high, low };

const char* to_string(RecoveryScope scope);

struct CameraParams {
  double sigma_prnu = sim::kDefaultSigmaPrnu;
  double sigma_gamma = sim::kDefaultSigmaGamma;
  std::size_t count = 6;
};

struct ExperimentManifest {
  int schema_version = kManifestSchemaVersion;
  ExperimentKind experiment = ExperimentKind::bound_curves;
  CameraParams camera;
  sim::SceneSpec scene;
  std::size_t n_fingerprint = 25;  // images behind Alice's estimate
  std::size_t n_attack = 50;       // N_E, Mallory's JPEG images
  std::size_t n_test = 100;        // query or forged images
  std::size_t n_negative = 100;    // unattacked foreign images behind PCE thresholds
  std::size_t n_safe = 100;        // triangle: unused images for the fit (and as many held out)
  std::vector<int> qualities;
  std::vector<Cutoff> cutoffs;
  std::vector<std::uint64_t> seeds;
  std::vector<double> alphas;  // copy-attack embedding strengths
  double false_alarm = 1e-3;
  double sigma0 = 5.0;  // denoiser noise level

  struct Hsic {
    IndependenceScenario scenario = IndependenceScenario::high_vs_high;
    std::size_t block = 64;
    double alpha = 0.05;
    std::size_t permutations = kDefaultPermutations;
    std::size_t max_samples = 2000;
  } hsic;

  struct Recovery {
    std::vector<RecoveryScope> scopes{RecoveryScope::high};
    std::size_t images = 1;
  } recovery;

  int public_quality = 90;  // triangle: JPEG quality of Alice's public images

  std::string output_dir = "results";
  std::string real_corpus;  // PGM/PNG directory; empty selects the simulator
};

// Per-experiment defaults (desk scale).
ExperimentManifest default_manifest(ExperimentKind kind);

// Missing keys keep the defaults for the named experiment; unknown keys,
// wrong types and out-of-range values raise ManifestError.
ExperimentManifest parse_manifest(const std::string& json_text);
ExperimentManifest load_manifest(const std::filesystem::path& path);

void validate(const ExperimentManifest& m);

// Canonical JSON with every field spelled out.
std::string to_json(const ExperimentManifest& m);
// FNV-1a over the canonical JSON, ignoring output_dir.
std::uint64_t manifest_hash(const ExperimentManifest& m);

}  // namespace fragile
