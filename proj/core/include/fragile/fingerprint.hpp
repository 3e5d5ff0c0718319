#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fragile/denoise.hpp"
#include "fragile/plane.hpp"

namespace fragile {

struct NoiseResidual {
  ImagePlane plane;
  std::string source_id;
};

// W = I - F(I).
NoiseResidual extract_residual(const ImagePlane& img, std::string source_id,
                               double sigma0 = kDefaultDenoiseSigma);

enum class Estimator : std::uint8_t { ml = 0, mean = 1 };
const char* to_string(Estimator e);

struct Fingerprint {
  ImagePlane plane;  // K-hat
  Estimator estimator = Estimator::ml;
  std::size_t n_images = 0;
  bool cleaned = false;
  // Pixels whose ML denominator was zero and were set to 0.
  std::size_t degenerate_pixels = 0;

  bool degenerate() const { return degenerate_pixels > 0; }
};

// Running sums for K-hat = sum(W * I) / sum(I^2). Accumulators can be merged,
// so batches may be reduced in any grouping.
class MlAccumulator {
 public:
  MlAccumulator(std::size_t height, std::size_t width);
  void add(const ImagePlane& img, const ImagePlane& residual);
  void merge(const MlAccumulator& other);
  std::size_t count() const { return count_; }
  Fingerprint finish(bool clean = false) const;

 private:
  ImagePlane numerator_;
  ImagePlane denominator_;
  std::size_t count_ = 0;
};

Fingerprint estimate_fingerprint_ml(std::span<const ImagePlane> images,
                                    double sigma0 = kDefaultDenoiseSigma, bool clean = false);

// Pixel-wise average of residuals.
Fingerprint estimate_fingerprint_mean(std::span<const NoiseResidual> residuals);

// Subtracts row means, then column means.
Fingerprint clean_fingerprint(Fingerprint fp);

// 16-byte header (magic, height, width, code) as little-endian uint32, then
// row-major little-endian float64 samples. code = estimator | cleaned << 8.
void save_fingerprint(const std::filesystem::path& path, const Fingerprint& fp);
Fingerprint load_fingerprint(const std::filesystem::path& path);

}  // namespace fragile
