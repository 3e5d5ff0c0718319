#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fragile/error.hpp"
#include "fragile/experiments.hpp"
#include "fragile/manifest.hpp"
#include "fragile/result_table.hpp"

using namespace fragile;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fragile_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentManifest tiny(ExperimentKind kind) {
  ExperimentManifest m = default_manifest(kind);
  m.scene.height = m.scene.width = 64;
  m.n_fingerprint = 6;
  m.n_attack = 6;
  m.n_test = 4;
  m.n_negative = 4;
  m.n_safe = 6;
  m.seeds = {1, 2};
  return m;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FRAGILE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Manifest, DefaultsValidateForEveryExperiment) {
  for (auto kind : {ExperimentKind::bound_curves, ExperimentKind::fingerprint_quality, ExperimentKind::roc,
                    ExperimentKind::copy_attack, ExperimentKind::dct_recovery, ExperimentKind::hsic,
                    ExperimentKind::triangle}) {
    const ExperimentManifest m = default_manifest(kind);
    EXPECT_NO_THROW(validate(m)) << to_string(kind);
    EXPECT_EQ(experiment_from_string(to_string(kind)), kind);
  }
}

TEST(Manifest, MissingKeysKeepDefaults) {
  const ExperimentManifest m = parse_manifest(R"({"experiment": "roc", "seeds": [7]})");
  const ExperimentManifest d = default_manifest(ExperimentKind::roc);
  EXPECT_EQ(m.seeds, std::vector<std::uint64_t>{7});
  EXPECT_EQ(m.camera.count, d.camera.count);
  EXPECT_EQ(m.n_test, d.n_test);
  EXPECT_EQ(m.cutoffs, d.cutoffs);
}

TEST(Manifest, RejectsMalformedInput) {
  EXPECT_THROW(parse_manifest("{"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"seeds": [1]})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "nope"})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "roc", "bogus": 1})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "roc", "camera": {"sigma": 1}})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "roc", "n_test": "ten"})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "roc", "n_test": -3})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "hsic", "qualities": [101]})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "hsic", "cutoffs": [9]})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "hsic", "cutoffs": ["full"]})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "roc", "schema_version": 2})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "roc", "scene": {"height": 60}})"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"experiment": "triangle", "cutoffs": [1, 2]})"), ManifestError);
}

TEST(Manifest, CanonicalJsonRoundTripsAndHashIgnoresOutputDir) {
  ExperimentManifest m = tiny(ExperimentKind::copy_attack);
  m.cutoffs = {Cutoff::full(), Cutoff::at(2)};
  const ExperimentManifest back = parse_manifest(to_json(m));
  EXPECT_EQ(to_json(back), to_json(m));
  EXPECT_EQ(manifest_hash(back), manifest_hash(m));

  ExperimentManifest moved = m;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(manifest_hash(moved), manifest_hash(m));
  ExperimentManifest other = m;
  other.seeds.push_back(9);
  EXPECT_NE(manifest_hash(other), manifest_hash(m));
}

TEST(ResultTable, CsvFormattingAndLookup) {
  ResultTable t({"seed", "c", "value"});
  t.set_provenance("experiment", "demo");
  t.add_row({Cell(std::uint64_t{18446744073709551615ULL}, 0), "full", 0.1});
  t.add_row({Cell(std::uint64_t{2}, 0), 3, 1.0 / 3.0});
  EXPECT_EQ(t.to_csv(),
            "# experiment: demo\n"
            "seed,c,value\n"
            "18446744073709551615,full,0.1\n"
            "2,3,0.3333333333\n");
  EXPECT_DOUBLE_EQ(t.number(1, "value"), 0.3333333333);
  EXPECT_EQ(t.column_index("c"), 1u);
  EXPECT_THROW(t.column_index("missing"), ParameterError);
  EXPECT_THROW(t.number(0, "c"), ParameterError);
  EXPECT_THROW(t.add_row({1, 2}), ParameterError);
  EXPECT_THROW(t.add_row({1, "a,b", 3}), ParameterError);
}

TEST(Experiments, SummarizeGroupsInFirstAppearanceOrder) {
  ResultTable t({"seed", "c", "v"});
  t.add_row({1, 2, 1.0});
  t.add_row({1, 1, 5.0});
  t.add_row({2, 2, 3.0});
  t.add_row({3, 2, 8.0});
  const ResultTable s = summarize(t, {"c"}, {"v"});
  ASSERT_EQ(s.rows(), 2u);
  EXPECT_EQ(s.at(0, 0), "2");
  EXPECT_EQ(s.number(0, "runs"), 3.0);
  EXPECT_EQ(s.number(0, "v_median"), 3.0);
  EXPECT_EQ(s.number(0, "v_mean"), 4.0);
  EXPECT_EQ(s.number(1, "v_mean"), 5.0);
}

TEST(Experiments, RowCountsFollowTheGrid) {
  ExperimentManifest m = tiny(ExperimentKind::fingerprint_quality);
  m.qualities = {100, 80};
  m.cutoffs = {Cutoff::full(), Cutoff::at(1), Cutoff::at(3)};
  const ExperimentResult fq = run_experiment(m);
  EXPECT_EQ(fq.table.rows(), 2u * 2u * 3u);
  EXPECT_EQ(fq.table.columns(), (std::vector<std::string>{"seed", "quality", "c", "phi1", "phi2"}));

  ExperimentManifest b = tiny(ExperimentKind::bound_curves);
  b.qualities = {90};
  b.cutoffs = {Cutoff::at(1), Cutoff::at(2)};
  const ExperimentResult bc = run_experiment(b);
  EXPECT_EQ(bc.table.rows(), 2u * 1u * 2u);
  for (std::size_t r = 0; r < bc.table.rows(); ++r) {
    EXPECT_LE(bc.table.number(r, "rho"), 1.0);
    EXPECT_LE(std::abs(bc.table.number(r, "r")), 1.0);
  }

  ExperimentManifest c = tiny(ExperimentKind::copy_attack);
  c.qualities = {90};
  c.cutoffs = {Cutoff::full(), Cutoff::at(1)};
  c.alphas = {0.0, 1.0, 10.0};
  c.seeds = {1};
  EXPECT_EQ(run_experiment(c).table.rows(), 1u * 2u * 3u);
}

TEST(Experiments, WrittenCsvIsByteIdenticalAcrossRuns) {
  ExperimentManifest m = tiny(ExperimentKind::roc);
  m.camera.count = 3;
  m.cutoffs = {Cutoff::full(), Cutoff::at(1)};
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  m.output_dir = a.string();
  const auto paths_a = write_result(run_experiment(m), m, a.string());
  m.output_dir = b.string();
  const auto paths_b = write_result(run_experiment(m), m, b.string());
  ASSERT_EQ(paths_a.size(), paths_b.size());
  ASSERT_GE(paths_a.size(), 2u);
  for (std::size_t i = 0; i < paths_a.size(); ++i) {
    EXPECT_EQ(fs::path(paths_a[i]).filename(), fs::path(paths_b[i]).filename());
    const std::string text = slurp(paths_a[i]);
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text, slurp(paths_b[i])) << paths_a[i];
  }
  EXPECT_NE(slurp(paths_a[0]).find("# manifest_hash: "), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("cli");
  EXPECT_EQ(run_cli("--version"), 0);
  EXPECT_NE(run_cli("no-such-command"), 0);
  EXPECT_NE(run_cli(""), 0);

  {
    std::ofstream(dir / "bad.json") << R"({"experiment": "roc", "n_test": 0})";
  }
  EXPECT_EQ(run_cli("roc --manifest " + (dir / "bad.json").string()), 2);
  {
    std::ofstream(dir / "wrong_kind.json") << R"({"experiment": "hsic"})";
  }
  EXPECT_EQ(run_cli("roc --manifest " + (dir / "wrong_kind.json").string()), 2);

  ExperimentManifest m = tiny(ExperimentKind::roc);
  m.camera.count = 2;
  m.seeds = {1};
  m.cutoffs = {Cutoff::at(1)};
  {
    std::ofstream(dir / "ok.json") << to_json(m);
  }
  const fs::path out = dir / "out";
  EXPECT_EQ(run_cli("roc --threads 1 --manifest " + (dir / "ok.json").string() + " --out-dir " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "roc.csv"));
  EXPECT_NE(run_cli("identify --image " + (dir / "missing.pgm").string() + " --fingerprint x"), 0);
}
