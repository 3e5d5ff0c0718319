#include "fragile/plane.hpp"

#include <algorithm>
#include <cmath>

namespace fragile {

namespace {

template <class Op>
ImagePlane zip(const ImagePlane& a, const ImagePlane& b, const char* what, Op op) {
  require_same_shape(a, b, what);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return ImagePlane(a.height(), a.width(), std::move(out));
}

}  // namespace

ImagePlane operator+(const ImagePlane& a, const ImagePlane& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}

ImagePlane operator-(const ImagePlane& a, const ImagePlane& b) {
  return zip(a, b, "subtract", [](double x, double y) { return x - y; });
}

ImagePlane hadamard(const ImagePlane& a, const ImagePlane& b) {
  return zip(a, b, "hadamard", [](double x, double y) { return x * y; });
}

ImagePlane operator*(const ImagePlane& a, double s) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * s;
  return ImagePlane(a.height(), a.width(), std::move(out));
}

ImagePlane clamp(const ImagePlane& a, double lo, double hi) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(a[i], lo, hi);
  return ImagePlane(a.height(), a.width(), std::move(out));
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace fragile
