#pragma once

#include <filesystem>
#include <vector>

#include "fragile/plane.hpp"

namespace fragile {

// Largest centered crop whose sides are multiples of 8.
struct CropWindow {
  std::size_t top = 0, left = 0, height = 0, width = 0;
};
CropWindow center_crop_window(std::size_t height, std::size_t width);

// Center-crops a raw row-major buffer to a multiple-of-8 plane.
ImagePlane center_crop(std::size_t height, std::size_t width, const std::vector<double>& raw);

// Binary PGM (P5), 8 or 16 bit. Samples are rescaled to [0, 255] by maxval.
ImagePlane read_pgm(const std::filesystem::path& path);
// Grayscale PNG, 1 to 16 bit, alpha ignored. Color images are rejected.
ImagePlane read_png(const std::filesystem::path& path);
// Dispatches on the file signature.
ImagePlane read_image(const std::filesystem::path& path);

// Writes an 8-bit P5 PGM; samples are rounded and clamped to [0, 255].
void write_pgm(const std::filesystem::path& path, const ImagePlane& img);

// Image files (.pgm, .png) directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace fragile
