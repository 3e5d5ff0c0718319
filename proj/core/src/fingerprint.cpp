#include "fragile/fingerprint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "fragile/parallel.hpp"

namespace fragile {

namespace {

constexpr std::uint32_t kMagic = 0x50464b46;  // "FKFP" when read little-endian

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated fingerprint header");
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
         std::uint32_t{b[3]} << 24;
}

}  // namespace

NoiseResidual extract_residual(const ImagePlane& img, std::string source_id, double sigma0) {
  return {noise_residual(img, sigma0), std::move(source_id)};
}

const char* to_string(Estimator e) { return e == Estimator::ml ? "ml" : "mean"; }

MlAccumulator::MlAccumulator(std::size_t height, std::size_t width)
    : numerator_(height, width), denominator_(height, width) {}

void MlAccumulator::add(const ImagePlane& img, const ImagePlane& residual) {
  require_same_shape(img, numerator_, "fingerprint accumulation");
  require_same_shape(residual, numerator_, "fingerprint accumulation");
  for (std::size_t i = 0; i < img.size(); ++i) {
    numerator_[i] += residual[i] * img[i];
    denominator_[i] += img[i] * img[i];
  }
  ++count_;
}

void MlAccumulator::merge(const MlAccumulator& other) {
  require_same_shape(other.numerator_, numerator_, "fingerprint accumulation");
  for (std::size_t i = 0; i < numerator_.size(); ++i) {
    numerator_[i] += other.numerator_[i];
    denominator_[i] += other.denominator_[i];
  }
  count_ += other.count_;
}

Fingerprint MlAccumulator::finish(bool clean) const {
  if (count_ == 0) throw ParameterError("fingerprint needs at least one image");
  Fingerprint fp;
  fp.plane = ImagePlane(numerator_.height(), numerator_.width());
  fp.estimator = Estimator::ml;
  fp.n_images = count_;
  for (std::size_t i = 0; i < numerator_.size(); ++i) {
    if (denominator_[i] == 0.0) {
      ++fp.degenerate_pixels;
    } else {
      fp.plane[i] = numerator_[i] / denominator_[i];
    }
  }
  return clean ? clean_fingerprint(std::move(fp)) : fp;
}

Fingerprint estimate_fingerprint_ml(std::span<const ImagePlane> images, double sigma0, bool clean) {
  if (images.empty()) throw ParameterError("fingerprint needs at least one image");
  for (const auto& img : images) require_same_shape(img, images.front(), "fingerprint estimation");
  std::vector<ImagePlane> residuals(images.size());
  parallel_for(images.size(), [&](std::size_t k) { residuals[k] = noise_residual(images[k], sigma0); });
  MlAccumulator acc(images.front().height(), images.front().width());
  for (std::size_t k = 0; k < images.size(); ++k) acc.add(images[k], residuals[k]);
  return acc.finish(clean);
}

Fingerprint estimate_fingerprint_mean(std::span<const NoiseResidual> residuals) {
  if (residuals.empty()) throw ParameterError("fingerprint needs at least one residual");
  const ImagePlane& first = residuals.front().plane;
  ImagePlane sum(first.height(), first.width());
  for (const auto& r : residuals) {
    require_same_shape(r.plane, first, "fingerprint estimation");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += r.plane[i];
  }
  Fingerprint fp;
  fp.plane = sum * (1.0 / static_cast<double>(residuals.size()));
  fp.estimator = Estimator::mean;
  fp.n_images = residuals.size();
  return fp;
}

Fingerprint clean_fingerprint(Fingerprint fp) {
  ImagePlane& k = fp.plane;
  const std::size_t h = k.height(), w = k.width();
  for (std::size_t r = 0; r < h; ++r) {
    double m = 0.0;
    for (std::size_t c = 0; c < w; ++c) m += k(r, c);
    m /= static_cast<double>(w);
    for (std::size_t c = 0; c < w; ++c) k(r, c) -= m;
  }
  for (std::size_t c = 0; c < w; ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < h; ++r) m += k(r, c);
    m /= static_cast<double>(h);
    for (std::size_t r = 0; r < h; ++r) k(r, c) -= m;
  }
  fp.cleaned = true;
  return fp;
}

void save_fingerprint(const std::filesystem::path& path, const Fingerprint& fp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  put_u32(out, kMagic);
  put_u32(out, static_cast<std::uint32_t>(fp.plane.height()));
  put_u32(out, static_cast<std::uint32_t>(fp.plane.width()));
  put_u32(out, static_cast<std::uint32_t>(fp.estimator) | (fp.cleaned ? 1u << 8 : 0u));
  for (double v : fp.plane.values()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Fingerprint load_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (get_u32(in) != kMagic) throw IoError(path.string() + " is not a fingerprint file");
  const std::uint32_t h = get_u32(in), w = get_u32(in), code = get_u32(in);
  if ((code & 0xff) > 1) throw IoError("unknown estimator code in " + path.string());
  std::vector<double> data(std::size_t{h} * w);
  for (double& v : data) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated fingerprint data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t{b[i]} << (8 * i);
    v = std::bit_cast<double>(bits);
  }
  Fingerprint fp;
  fp.plane = ImagePlane(h, w, std::move(data));
  fp.estimator = static_cast<Estimator>(code & 0xff);
  fp.cleaned = (code >> 8) & 1;
  return fp;
}

}  // namespace fragile
