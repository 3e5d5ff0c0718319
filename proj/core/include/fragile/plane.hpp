#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fragile/error.hpp"

namespace fragile {

inline constexpr std::size_t kBlock = 8;

// Row-major real-valued matrix whose height and width are positive multiples
// of 8. The tag keeps spatial planes and blockwise DCT planes apart.
template <class Tag>
class Plane {
 public:
  Plane() = default;

  Plane(std::size_t height, std::size_t width, double fill = 0.0)
      : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(height * width, fill);
  }

  Plane(std::size_t height, std::size_t width, std::vector<double> data)
      : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != height * width) {
      throw ShapeError("plane data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(height) + "x" +
                       std::to_string(width));
    }
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::size_t blocks_down() const { return height_ / kBlock; }
  std::size_t blocks_across() const { return width_ / kBlock; }
  std::size_t block_count() const { return blocks_down() * blocks_across(); }

  double operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  double& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }
  const std::vector<double>& vector() const { return data_; }

  bool same_shape(const Plane& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  static void check_dims(std::size_t height, std::size_t width) {
    if (height == 0 || width == 0 || height % kBlock != 0 || width % kBlock != 0) {
      throw ShapeError("plane dimensions must be positive multiples of 8, got " +
                       std::to_string(height) + "x" + std::to_string(width));
    }
  }

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

struct SpatialTag {};
struct DctTag {};

// Images, residuals and fingerprints.
using ImagePlane = Plane<SpatialTag>;
// Per-8x8-block orthonormal DCT-II coefficients; coefficient (u, v) of block
// (bi, bj) lives at (8*bi + u, 8*bj + v).
using DctPlane = Plane<DctTag>;

template <class Tag>
void require_same_shape(const Plane<Tag>& a, const Plane<Tag>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.height()) +
                     "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) +
                     "x" + std::to_string(b.width()));
  }
}

// Elementwise arithmetic on spatial planes.
ImagePlane operator+(const ImagePlane& a, const ImagePlane& b);
ImagePlane operator-(const ImagePlane& a, const ImagePlane& b);
ImagePlane operator*(const ImagePlane& a, double s);
inline ImagePlane operator*(double s, const ImagePlane& a) { return a * s; }
ImagePlane hadamard(const ImagePlane& a, const ImagePlane& b);
ImagePlane clamp(const ImagePlane& a, double lo, double hi);

double mean(std::span<const double> v);
double stddev(std::span<const double> v);  // population standard deviation

}  // namespace fragile
