#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fragile/error.hpp"
#include "fragile/experiments.hpp"
#include "fragile/fingerprint.hpp"
#include "fragile/image_io.hpp"
#include "fragile/manifest.hpp"
#include "fragile/parallel.hpp"
#include "fragile/similarity.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitManifest = 2;
constexpr int kExitNumerical = 3;

struct RunOptions {
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 0;
  std::string real_corpus;
};

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--manifest", o.manifest, "experiment manifest (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "run a single seed instead of the manifest's list");
  cmd->add_option("--out-dir", o.out_dir, "directory for the CSV output");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("--real-corpus", o.real_corpus, "directory of PGM/PNG images");
}

int run(fragile::ExperimentKind kind, const RunOptions& o) {
  using namespace fragile;
  ExperimentManifest m = o.manifest.empty() ? default_manifest(kind) : load_manifest(o.manifest);
  if (m.experiment != kind) {
    throw ManifestError(std::string("manifest describes ") + to_string(m.experiment) + ", not " +
                        to_string(kind));
  }
  if (o.seed) m.seeds = {*o.seed};
  if (!o.out_dir.empty()) m.output_dir = o.out_dir;
  if (!o.real_corpus.empty()) m.real_corpus = o.real_corpus;
  validate(m);
  set_thread_count(o.threads);
  const ExperimentResult result = run_experiment(m);
  for (const auto& path : write_result(result, m, m.output_dir)) std::cout << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fragile;
  CLI::App app{"Fragile camera fingerprints toolkit", "fragile"};
  app.set_version_flag("--version", toolkit_version());
  app.require_subcommand(1);

  struct Experiment {
    const char* command;
    ExperimentKind kind;
    const char* help;
  };
  const Experiment experiments[] = {
      {"bound-curves", ExperimentKind::bound_curves, "rho, r and fingerprint correlations per quality and cut-off"},
      {"fingerprint-quality", ExperimentKind::fingerprint_quality, "phi1/phi2 grid over quality and cut-off"},
      {"roc", ExperimentKind::roc, "multi-camera identification ROC per cut-off"},
      {"copy-attack", ExperimentKind::copy_attack, "PCE of forged images versus embedding strength"},
      {"dct-recovery", ExperimentKind::dct_recovery, "LP recovery of zero-quantized coefficients"},
      {"hsic", ExperimentKind::hsic, "kernel independence test between fingerprints"},
      {"triangle", ExperimentKind::triangle, "triangle test versus fragile fingerprint defense"},
  };
  RunOptions run_opts;
  std::optional<ExperimentKind> chosen;
  for (const auto& e : experiments) {
    auto* cmd = app.add_subcommand(e.command, e.help);
    add_run_flags(cmd, run_opts);
    cmd->callback([&chosen, kind = e.kind] { chosen = kind; });
  }

  std::string images_dir, fp_out, estimator = "ml";
  bool clean = false;
  double sigma0 = 5.0;
  auto* estimate = app.add_subcommand("estimate", "estimate a fingerprint from a directory of images");
  estimate->add_option("--images", images_dir, "directory of PGM/PNG images")->required()->check(CLI::ExistingDirectory);
  estimate->add_option("--out", fp_out, "fingerprint file to write")->required();
  estimate->add_option("--estimator", estimator, "ml or mean")->check(CLI::IsMember({"ml", "mean"}));
  estimate->add_flag("--clean", clean, "remove row and column means");
  estimate->add_option("--sigma0", sigma0, "denoiser noise level");

  std::string query, fp_in, cutoff = "full", measure = "pce";
  double threshold = 60.0;
  auto* identify_cmd = app.add_subcommand("identify", "test whether an image matches a fingerprint");
  identify_cmd->add_option("--image", query, "query image")->required()->check(CLI::ExistingFile);
  identify_cmd->add_option("--fingerprint", fp_in, "fingerprint file")->required()->check(CLI::ExistingFile);
  identify_cmd->add_option("--cutoff", cutoff, "cut-off c or 'full'");
  identify_cmd->add_option("--measure", measure, "pce or ncc")->check(CLI::IsMember({"pce", "ncc"}));
  identify_cmd->add_option("--threshold", threshold, "decision threshold");
  identify_cmd->add_option("--sigma0", sigma0, "denoiser noise level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (chosen) return run(*chosen, run_opts);
    if (estimate->parsed()) {
      std::vector<ImagePlane> imgs;
      for (const auto& p : list_images(images_dir)) imgs.push_back(read_image(p));
      if (imgs.empty()) throw IoError("no images in " + images_dir);
      Fingerprint fp;
      if (estimator == "ml") {
        fp = estimate_fingerprint_ml(imgs, sigma0, clean);
      } else {
        std::vector<NoiseResidual> res;
        for (std::size_t i = 0; i < imgs.size(); ++i) {
          res.push_back(extract_residual(imgs[i], std::to_string(i), sigma0));
        }
        fp = estimate_fingerprint_mean(res);
        if (clean) fp = clean_fingerprint(std::move(fp));
      }
      save_fingerprint(fp_out, fp);
      std::cout << fp_out << " (" << fp.n_images << " images, " << fp.plane.height() << "x"
                << fp.plane.width() << ")\n";
      return kExitOk;
    }
    if (identify_cmd->parsed()) {
      const Fingerprint fp = load_fingerprint(fp_in);
      const ImagePlane img = read_image(query);
      Cutoff c = Cutoff::full();
      if (cutoff != "full") {
        try {
          c = Cutoff::at(std::stoi(cutoff));
        } catch (const std::exception&) {
          throw ParameterError("cut-off must be an integer or 'full'");
        }
      }
      const SimilarityReport r =
          identify(img, fp, c, measure == "pce" ? Measure::pce : Measure::ncc, threshold, sigma0);
      std::printf("measure=%s cutoff=%s value=%.6g threshold=%.6g decision=%s\n", to_string(r.measure),
                  c.label().c_str(), r.value, r.threshold, r.decision ? "match" : "no-match");
      return kExitOk;
    }
  } catch (const ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return kExitManifest;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
