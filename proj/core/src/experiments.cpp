#include "fragile/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

#include "fragile/attacks.hpp"
#include "fragile/calibration.hpp"
#include "fragile/dct.hpp"
#include "fragile/denoise.hpp"
#include "fragile/error.hpp"
#include "fragile/fingerprint.hpp"
#include "fragile/hsic.hpp"
#include "fragile/image_io.hpp"
#include "fragile/jpeg.hpp"
#include "fragile/parallel.hpp"
#include "fragile/random.hpp"
#include "fragile/recovery.hpp"
#include "fragile/sensor_sim.hpp"
#include "fragile/similarity.hpp"
#include "fragile/theory.hpp"
#include "fragile/triangle.hpp"

#ifndef FRAGILE_VERSION
#define FRAGILE_VERSION "dev"
#endif

namespace fragile {

namespace {

// Top-level stream ids for derive_seed.
enum Stream : std::uint64_t { kCameraStream = 1, kSceneStream = 2, kNoiseStream = 3, kTestStream = 4 };

// Image roles inside one seed.
enum Role : std::uint64_t {
  kAlice = 1,    // behind Alice's fingerprint
  kMallory = 2,  // Mallory's JPEG set
  kQuery = 3,
  kForeign = 4,  // another camera, unattacked
  kTarget = 5,   // another camera, receives the forged fingerprint
  kSafe = 6,
  kHeldOut = 7,
  kRecovery = 8,
};

constexpr std::uint64_t kForeignCamera = 1000;

sim::SyntheticCamera make_camera(const ExperimentManifest& m, std::uint64_t seed,
                                 std::uint64_t index) {
  return sim::new_camera(m.camera.sigma_prnu, m.camera.sigma_gamma,
                         derive_seed(seed, {kCameraStream, index}), m.scene.height, m.scene.width);
}

std::vector<ImagePlane> capture_set(const sim::SyntheticCamera& cam, std::uint64_t cam_index,
                                    const sim::SceneSpec& spec, std::uint64_t seed, Role role,
                                    std::size_t count) {
  std::vector<ImagePlane> out(count);
  parallel_for(count, [&](std::size_t i) {
    const ImagePlane scene = sim::render_scene(spec, derive_seed(seed, {kSceneStream, role, cam_index, i}));
    out[i] = sim::capture(cam, scene, derive_seed(seed, {kNoiseStream, role, cam_index, i}));
  });
  return out;
}

std::vector<ImagePlane> roundtrip_all(std::span<const ImagePlane> images, const QuantTable& table) {
  std::vector<ImagePlane> out(images.size());
  parallel_for(images.size(), [&](std::size_t i) { out[i] = jpeg_roundtrip(images[i], table); });
  return out;
}

std::vector<ImagePlane> residuals_of(std::span<const ImagePlane> images, double sigma0) {
  std::vector<ImagePlane> out(images.size());
  parallel_for(images.size(), [&](std::size_t i) { out[i] = noise_residual(images[i], sigma0); });
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void stamp(ResultTable& t, const ExperimentManifest& m) {
  std::string seeds;
  for (std::size_t i = 0; i < m.seeds.size(); ++i) seeds += (i ? " " : "") + std::to_string(m.seeds[i]);
  t.set_provenance("experiment", to_string(m.experiment));
  t.set_provenance("manifest_hash", hex64(manifest_hash(m)));
  t.set_provenance("seeds", seeds);
  t.set_provenance("toolkit_version", toolkit_version());
}

ExperimentResult finish(ResultTable table, const ExperimentManifest& m,
                        const std::vector<std::string>& keys, const std::vector<std::string>& values) {
  stamp(table, m);
  ExperimentResult r{std::move(table), {}};
  ResultTable summary = summarize(r.table, keys, values);
  stamp(summary, m);
  r.extras.emplace_back("summary", std::move(summary));
  return r;
}

Cell seed_cell(std::uint64_t s) { return Cell(s, 0); }

// Real corpus: every readable image, center-cropped to the common size.
std::vector<ImagePlane> load_corpus(const std::string& dir) {
  std::vector<std::vector<double>> raw;
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  for (const auto& path : list_images(dir)) {
    ImagePlane p = read_image(path);
    dims.emplace_back(p.height(), p.width());
    raw.push_back(p.vector());
  }
  if (raw.empty()) throw IoError("no PGM/PNG images in " + dir);
  std::size_t h = dims[0].first, w = dims[0].second;
  for (auto [dh, dw] : dims) h = std::min(h, dh), w = std::min(w, dw);
  std::vector<ImagePlane> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    // read_image already returns multiples of 8; crop to the smallest.
    const ImagePlane full(dims[i].first, dims[i].second, raw[i]);
    std::vector<double> cropped(h * w);
    const std::size_t top = (dims[i].first - h) / 2, left = (dims[i].second - w) / 2;
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) cropped[r * w + c] = full(top + r, left + c);
    }
    out.emplace_back(h, w, std::move(cropped));
  }
  return out;
}

// Alice's and Mallory's uncompressed image sets for one seed.
struct ImageSets {
  std::vector<ImagePlane> alice;
  std::vector<ImagePlane> mallory;
};

ImageSets image_sets(const ExperimentManifest& m, std::uint64_t seed,
                     const std::vector<ImagePlane>* corpus) {
  ImageSets sets;
  if (corpus) {
    if (corpus->size() < m.n_fingerprint + m.n_attack) {
      throw ManifestError("real corpus holds " + std::to_string(corpus->size()) +
                          " images, need n_fingerprint + n_attack");
    }
    std::vector<std::size_t> order(corpus->size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng = make_rng(seed, {kTestStream});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (std::size_t i = 0; i < m.n_fingerprint; ++i) sets.alice.push_back((*corpus)[order[i]]);
    for (std::size_t i = 0; i < m.n_attack; ++i) {
      sets.mallory.push_back((*corpus)[order[m.n_fingerprint + i]]);
    }
    return sets;
  }
  const auto cam = make_camera(m, seed, 0);
  sets.alice = capture_set(cam, 0, m.scene, seed, kAlice, m.n_fingerprint);
  sets.mallory = capture_set(cam, 0, m.scene, seed, kMallory, m.n_attack);
  return sets;
}

ExperimentResult quality_grid(const ExperimentManifest& m, bool with_theory) {
  std::vector<ImagePlane> corpus;
  if (!m.real_corpus.empty()) corpus = load_corpus(m.real_corpus);
  ResultTable t(with_theory ? std::vector<std::string>{"seed", "n_images", "quality", "c", "rho", "r",
                                                        "phi1", "phi2", "dropped"}
                            : std::vector<std::string>{"seed", "quality", "c", "phi1", "phi2"});
  for (std::uint64_t seed : m.seeds) {
    const ImageSets sets = image_sets(m, seed, corpus.empty() ? nullptr : &corpus);
    const Fingerprint k_alice = estimate_fingerprint_ml(sets.alice, m.sigma0);
    std::optional<LaplaceSubbandModel> models;
    if (with_theory) models = fit_subband_models(sets.alice);
    for (int quality : m.qualities) {
      const QuantTable table = quant_table_for_quality(quality);
      const auto same = roundtrip_all(sets.alice, table);
      const auto other = roundtrip_all(sets.mallory, table);
      const Fingerprint k_same = estimate_fingerprint_ml(same, m.sigma0);
      const Fingerprint k_other = estimate_fingerprint_ml(other, m.sigma0);
      std::optional<SubbandMomentSums> sums;
      if (with_theory) sums = subband_moment_sums(*models, table);
      for (const Cutoff& c : m.cutoffs) {
        const SubbandMask mask = theory_mask(c);
        const double phi1 = dct_domain_correlation(k_alice.plane, k_same.plane, mask);
        const double phi2 = dct_domain_correlation(k_alice.plane, k_other.plane, mask);
        if (with_theory) {
          const RhoResult rho = rho_from_sums(*sums, mask);
          const double r = sample_r(sets.alice, same, mask);
          t.add_row({seed_cell(seed), sets.alice.size(), quality, c.label(), rho.rho, r, phi1, phi2,
                     rho.dropped});
        } else {
          t.add_row({seed_cell(seed), quality, c.label(), phi1, phi2});
        }
      }
    }
  }
  if (with_theory) {
    return finish(std::move(t), m, {"quality", "c"}, {"rho", "r", "phi1", "phi2"});
  }
  return finish(std::move(t), m, {"quality", "c"}, {"phi1", "phi2"});
}

std::optional<SubbandMask> identification_mask(const Cutoff& c) {
  if (c.is_full()) return std::nullopt;
  return build_mask(*c.c);
}

// Residuals projected onto the mask once per query.
std::vector<ImagePlane> masked(std::span<const ImagePlane> planes, const std::optional<SubbandMask>& mask) {
  std::vector<ImagePlane> out(planes.size());
  parallel_for(planes.size(), [&](std::size_t i) {
    out[i] = mask ? apply_mask(planes[i], *mask) : planes[i];
  });
  return out;
}

double masked_pce(const ImagePlane& masked_residual, const ImagePlane& image, const ImagePlane& fp,
                  const std::optional<SubbandMask>& mask) {
  const ImagePlane templ = hadamard(image, fp);
  return pce(masked_residual, mask ? apply_mask(templ, *mask) : templ);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string toolkit_version() { return FRAGILE_VERSION; }

ResultTable summarize(const ResultTable& table, const std::vector<std::string>& keys,
                      const std::vector<std::string>& values) {
  std::vector<std::string> cols = keys;
  cols.push_back("runs");
  for (const auto& v : values) {
    cols.push_back(v + "_median");
    cols.push_back(v + "_mean");
  }
  ResultTable out(cols);
  std::vector<std::size_t> key_idx;
  for (const auto& k : keys) key_idx.push_back(table.column_index(k));
  std::vector<std::vector<std::string>> order;
  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    std::vector<std::string> key;
    for (std::size_t i : key_idx) key.push_back(table.at(r, i));
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(r);
  }
  for (const auto& key : order) {
    const auto& rows = groups[key];
    std::vector<Cell> row;
    for (const auto& k : key) row.emplace_back(k);
    row.emplace_back(rows.size());
    for (const auto& v : values) {
      std::vector<double> xs;
      for (std::size_t r : rows) xs.push_back(table.number(r, v));
      double sum = 0.0;
      for (double x : xs) sum += x;
      row.emplace_back(median_of(xs));
      row.emplace_back(sum / static_cast<double>(xs.size()));
    }
    out.add_row(std::move(row));
  }
  return out;
}

ExperimentResult run_bound_curves(const ExperimentManifest& m) { return quality_grid(m, true); }

ExperimentResult run_fingerprint_quality(const ExperimentManifest& m) { return quality_grid(m, false); }

ExperimentResult run_roc(const ExperimentManifest& m) {
  if (m.camera.count < 2) throw ManifestError("roc needs at least two cameras");
  ResultTable t({"seed", "c", "positives", "negatives", "auc", "threshold", "tpr_at_threshold"});
  ResultTable points({"seed", "c", "threshold", "fpr", "tpr"});
  for (std::uint64_t seed : m.seeds) {
    const std::size_t cams = m.camera.count;
    std::vector<Fingerprint> fps;
    std::vector<ImagePlane> queries;
    std::vector<std::size_t> owner;
    for (std::size_t k = 0; k < cams; ++k) {
      const auto cam = make_camera(m, seed, k);
      fps.push_back(estimate_fingerprint_ml(capture_set(cam, k, m.scene, seed, kAlice, m.n_fingerprint),
                                            m.sigma0));
      for (auto& q : capture_set(cam, k, m.scene, seed, kQuery, m.n_test)) {
        queries.push_back(std::move(q));
        owner.push_back(k);
      }
    }
    const auto residuals = residuals_of(queries, m.sigma0);
    for (const Cutoff& c : m.cutoffs) {
      const auto mask = identification_mask(c);
      const auto w = masked(residuals, mask);
      std::vector<double> scores(queries.size() * cams);
      parallel_for(scores.size(), [&](std::size_t i) {
        const std::size_t q = i / cams, k = i % cams;
        scores[i] = masked_pce(w[q], queries[q], fps[k].plane, mask);
      });
      std::vector<double> pos, neg;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        (owner[i / cams] == i % cams ? pos : neg).push_back(scores[i]);
      }
      const double area = auc(pos, neg);
      const double thr = kde_threshold(neg, m.false_alarm);
      double tp = 0.0;
      for (double v : pos) tp += v > thr ? 1.0 : 0.0;
      t.add_row({seed_cell(seed), c.label(), pos.size(), neg.size(), area, thr,
                 tp / static_cast<double>(pos.size())});
      for (const RocPoint& p : roc_curve(pos, neg)) {
        points.add_row({seed_cell(seed), c.label(), p.threshold, p.fpr, p.tpr});
      }
    }
  }
  ExperimentResult r = finish(std::move(t), m, {"c"}, {"auc", "tpr_at_threshold"});
  stamp(points, m);
  r.extras.emplace_back("points", std::move(points));
  return r;
}

ExperimentResult run_copy_attack(const ExperimentManifest& m) {
  ResultTable t({"seed", "quality", "c", "alpha", "mean_pce", "median_pce", "threshold",
                 "above_threshold"});
  for (std::uint64_t seed : m.seeds) {
    const auto alice = make_camera(m, seed, 0);
    const auto foreign = make_camera(m, seed, kForeignCamera);
    const Fingerprint k = estimate_fingerprint_ml(
        capture_set(alice, 0, m.scene, seed, kAlice, m.n_fingerprint), m.sigma0);
    const auto public_raw = capture_set(alice, 0, m.scene, seed, kMallory, m.n_attack);
    const auto negatives = capture_set(foreign, kForeignCamera, m.scene, seed, kForeign, m.n_negative);
    const auto targets = capture_set(foreign, kForeignCamera, m.scene, seed, kTarget, m.n_test);
    const auto neg_residuals = residuals_of(negatives, m.sigma0);

    std::vector<double> thresholds;
    for (const Cutoff& c : m.cutoffs) {
      const auto mask = identification_mask(c);
      const auto w = masked(neg_residuals, mask);
      std::vector<double> scores(negatives.size());
      parallel_for(scores.size(), [&](std::size_t i) {
        scores[i] = masked_pce(w[i], negatives[i], k.plane, mask);
      });
      thresholds.push_back(kde_threshold(scores, m.false_alarm));
    }

    for (int quality : m.qualities) {
      const Fingerprint k_e =
          estimate_fingerprint_ml(roundtrip_all(public_raw, quant_table_for_quality(quality)), m.sigma0);
      for (double alpha : m.alphas) {
        std::vector<ImagePlane> forged(targets.size());
        parallel_for(targets.size(), [&](std::size_t i) {
          forged[i] = copy_attack(targets[i], k_e, CopyAttackConfig{alpha, true});
        });
        const auto residuals = residuals_of(forged, m.sigma0);
        for (std::size_t ci = 0; ci < m.cutoffs.size(); ++ci) {
          const auto mask = identification_mask(m.cutoffs[ci]);
          const auto w = masked(residuals, mask);
          std::vector<double> scores(forged.size());
          parallel_for(scores.size(), [&](std::size_t i) {
            scores[i] = masked_pce(w[i], forged[i], k.plane, mask);
          });
          double sum = 0.0, above = 0.0;
          for (double v : scores) sum += v, above += v > thresholds[ci] ? 1.0 : 0.0;
          const double n = static_cast<double>(scores.size());
          t.add_row({seed_cell(seed), quality, m.cutoffs[ci].label(), alpha, sum / n, median_of(scores),
                     thresholds[ci], above / n});
        }
      }
    }
  }
  return finish(std::move(t), m, {"quality", "c", "alpha"}, {"mean_pce", "threshold", "above_threshold"});
}

ExperimentResult run_dct_recovery(const ExperimentManifest& m) {
  std::vector<std::string> cols{"seed", "quality", "c", "scope", "count"};
  const char* names[3] = {"neg", "zero", "pos"};
  for (auto* tr : names) {
    for (auto* pr : names) cols.push_back(std::string(tr) + "_" + pr);
  }
  for (const char* extra : {"diagonal", "free_coefficients", "infeasible_blocks"}) cols.push_back(extra);
  ResultTable t(cols);
  for (std::uint64_t seed : m.seeds) {
    const auto cam = make_camera(m, seed, 0);
    const auto images = capture_set(cam, 0, m.scene, seed, kRecovery, m.recovery.images);
    std::vector<DctPlane> originals;
    for (const auto& img : images) {
      ImagePlane shifted = img;
      for (auto& v : shifted.values()) v -= 128.0;
      originals.push_back(block_dct(shifted));
    }
    for (int quality : m.qualities) {
      const QuantTable table = quant_table_for_quality(quality);
      for (const Cutoff& c : m.cutoffs) {
        for (RecoveryScope scope : m.recovery.scopes) {
          const SubbandMask mask = scope == RecoveryScope::high ? build_mask(*c.c) : build_low_mask(*c.c);
          std::vector<SignContingency> tables;
          std::size_t free = 0, infeasible = 0;
          for (std::size_t i = 0; i < images.size(); ++i) {
            const DctPlane dq = jpeg_compress(images[i], table);
            const ImageRecovery rec = recover_image(dq, mask);
            tables.push_back(sign_contingency(rec.coefficients, originals[i], recoverable_positions(dq, mask)));
            free += rec.free_coefficients;
            infeasible += rec.infeasible_blocks;
          }
          const SignContingency total = merge_contingency(tables);
          std::vector<Cell> row{seed_cell(seed), quality, c.label(), to_string(scope), total.count};
          for (int tr = 0; tr < 3; ++tr) {
            for (int pr = 0; pr < 3; ++pr) row.emplace_back(total.cells[tr][pr]);
          }
          row.emplace_back(total.diagonal());
          row.emplace_back(free);
          row.emplace_back(infeasible);
          t.add_row(std::move(row));
        }
      }
    }
  }
  return finish(std::move(t), m, {"quality", "c", "scope"}, {"diagonal"});
}

ExperimentResult run_hsic(const ExperimentManifest& m) {
  ResultTable t({"seed", "quality", "c", "scenario", "acceptance", "tiles"});
  ResultTable tiles({"seed", "quality", "c", "offset", "row", "col", "statistic", "threshold", "reject"});
  IndependenceConfig cfg;
  cfg.block = m.hsic.block;
  cfg.alpha = m.hsic.alpha;
  cfg.permutations = m.hsic.permutations;
  cfg.max_samples = m.hsic.max_samples;
  for (std::uint64_t seed : m.seeds) {
    const ImageSets sets = image_sets(m, seed, nullptr);
    const Fingerprint k = estimate_fingerprint_ml(sets.alice, m.sigma0);
    for (std::size_t qi = 0; qi < m.qualities.size(); ++qi) {
      const int quality = m.qualities[qi];
      const Fingerprint k_e =
          estimate_fingerprint_ml(roundtrip_all(sets.mallory, quant_table_for_quality(quality)), m.sigma0);
      for (std::size_t ci = 0; ci < m.cutoffs.size(); ++ci) {
        const int c = *m.cutoffs[ci].c;
        const IndependenceReport rep = fingerprint_independence(
            k.plane, k_e.plane, c, m.hsic.scenario, cfg, derive_seed(seed, {kTestStream, qi, ci}));
        t.add_row({seed_cell(seed), quality, c, to_string(m.hsic.scenario), rep.acceptance,
                   rep.tiles.size()});
        for (const TileOutcome& o : rep.tiles) {
          tiles.add_row({seed_cell(seed), quality, c, o.offset, o.row, o.col, o.outcome.statistic,
                         o.outcome.threshold, o.outcome.reject ? 1 : 0});
        }
      }
    }
  }
  ExperimentResult r = finish(std::move(t), m, {"quality", "c", "scenario"}, {"acceptance"});
  stamp(tiles, m);
  r.extras.emplace_back("tiles", std::move(tiles));
  return r;
}

ExperimentResult run_triangle(const ExperimentManifest& m) {
  ResultTable t({"seed", "alpha", "triangle_ratio", "safe_false_alarm", "fragile_ratio",
                 "mean_fragile_pce", "threshold"});
  const SubbandMask fragile_mask = build_mask(*m.cutoffs.front().c);
  const QuantTable public_table = quant_table_for_quality(m.public_quality);
  for (std::uint64_t seed : m.seeds) {
    const auto alice = make_camera(m, seed, 0);
    const auto foreign = make_camera(m, seed, kForeignCamera);
    const Fingerprint k = estimate_fingerprint_ml(
        capture_set(alice, 0, m.scene, seed, kAlice, m.n_fingerprint), m.sigma0);
    const auto used = roundtrip_all(capture_set(alice, 0, m.scene, seed, kMallory, m.n_attack), public_table);
    const auto safe = roundtrip_all(capture_set(alice, 0, m.scene, seed, kSafe, m.n_safe), public_table);
    const auto held = roundtrip_all(capture_set(alice, 0, m.scene, seed, kHeldOut, m.n_safe), public_table);
    const Fingerprint k_e = estimate_fingerprint_ml(used, m.sigma0);

    auto views = [&](const std::vector<ImagePlane>& imgs) {
      std::vector<AliceView> out(imgs.size());
      parallel_for(imgs.size(), [&](std::size_t i) { out[i] = alice_view(imgs[i], k.plane, m.sigma0); });
      return out;
    };
    const auto used_views = views(used), safe_views = views(safe), held_views = views(held);

    // Fragile defense threshold from unattacked foreign images.
    const auto negatives = capture_set(foreign, kForeignCamera, m.scene, seed, kForeign, m.n_negative);
    const auto neg_w = masked(residuals_of(negatives, m.sigma0), fragile_mask);
    std::vector<double> neg_scores(negatives.size());
    parallel_for(negatives.size(), [&](std::size_t i) {
      neg_scores[i] = masked_pce(neg_w[i], negatives[i], k.plane, fragile_mask);
    });
    const double threshold = kde_threshold(neg_scores, m.false_alarm);
    const auto targets = capture_set(foreign, kForeignCamera, m.scene, seed, kTarget, m.n_test);

    for (double alpha : m.alphas) {
      const std::size_t n = targets.size();
      std::vector<double> ratio(n), false_alarm(n), pce_value(n);
      parallel_for(n, [&](std::size_t j) {
        const ImagePlane forged = copy_attack(targets[j], k_e, CopyAttackConfig{alpha, true});
        const ForgedView fv = forged_view(forged, k.plane, m.sigma0);
        std::vector<TrianglePoint> fit_points;
        for (const auto& v : safe_views) fit_points.push_back(triangle_point(v, fv));
        const TriangleModel model = fit_triangle(fit_points, m.false_alarm);
        double flagged = 0.0, alarms = 0.0;
        for (const auto& v : used_views) flagged += triangle_decide(triangle_point(v, fv), model).flagged;
        for (const auto& v : held_views) alarms += triangle_decide(triangle_point(v, fv), model).flagged;
        ratio[j] = flagged / static_cast<double>(used_views.size());
        false_alarm[j] = alarms / static_cast<double>(held_views.size());
        pce_value[j] = masked_pce(apply_mask(fv.residual, fragile_mask), forged, k.plane, fragile_mask);
      });
      double r = 0.0, fa = 0.0, secure = 0.0, mean_pce = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        r += ratio[j];
        fa += false_alarm[j];
        secure += pce_value[j] <= threshold ? 1.0 : 0.0;
        mean_pce += pce_value[j];
      }
      const double dn = static_cast<double>(n);
      t.add_row({seed_cell(seed), alpha, r / dn, fa / dn, secure / dn, mean_pce / dn, threshold});
    }
  }
  return finish(std::move(t), m, {"alpha"},
                {"triangle_ratio", "safe_false_alarm", "fragile_ratio", "mean_fragile_pce"});
}

ExperimentResult run_experiment(const ExperimentManifest& m) {
  validate(m);
  if (!m.real_corpus.empty() && m.experiment != ExperimentKind::bound_curves &&
      m.experiment != ExperimentKind::fingerprint_quality) {
    throw ManifestError("real_corpus is supported by bound_curves and fingerprint_quality only");
  }
  switch (m.experiment) {
    case ExperimentKind::bound_curves: return run_bound_curves(m);
    case ExperimentKind::fingerprint_quality: return run_fingerprint_quality(m);
    case ExperimentKind::roc: return run_roc(m);
    case ExperimentKind::copy_attack: return run_copy_attack(m);
    case ExperimentKind::dct_recovery: return run_dct_recovery(m);
    case ExperimentKind::hsic: return run_hsic(m);
    case ExperimentKind::triangle: return run_triangle(m);
  }
  throw ManifestError("unknown experiment");
}

std::vector<std::string> write_result(const ExperimentResult& result, const ExperimentManifest& m,
                                      const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  const std::string stem = to_string(m.experiment);
  std::vector<std::string> written;
  const auto main_path = dir / (stem + ".csv");
  result.table.write_csv(main_path);
  written.push_back(main_path.string());
  for (const auto& [suffix, table] : result.extras) {
    const auto p = dir / (stem + "_" + suffix + ".csv");
    table.write_csv(p);
    written.push_back(p.string());
  }
  return written;
}

}  // namespace fragile
