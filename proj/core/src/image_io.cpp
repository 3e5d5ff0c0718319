#include "fragile/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>

namespace fragile {

CropWindow center_crop_window(std::size_t height, std::size_t width) {
  CropWindow w;
  w.height = height - height % kBlock;
  w.width = width - width % kBlock;
  if (w.height == 0 || w.width == 0) {
    throw ShapeError("image " + std::to_string(height) + "x" + std::to_string(width) +
                     " is smaller than one 8x8 block");
  }
  w.top = (height - w.height) / 2;
  w.left = (width - w.width) / 2;
  return w;
}

ImagePlane center_crop(std::size_t height, std::size_t width, const std::vector<double>& raw) {
  if (raw.size() != height * width) throw ShapeError("raw buffer size mismatch");
  const CropWindow w = center_crop_window(height, width);
  std::vector<double> out;
  out.reserve(w.height * w.width);
  for (std::size_t r = 0; r < w.height; ++r) {
    const auto* row = raw.data() + (w.top + r) * width + w.left;
    out.insert(out.end(), row, row + w.width);
  }
  return ImagePlane(w.height, w.width, std::move(out));
}

namespace {

// Reads the next header token of a PNM file, skipping whitespace and comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

std::size_t parse_positive(const std::string& tok, const std::filesystem::path& path) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || v == 0) throw IoError(path.string() + ": malformed PGM header");
  return v;
}

}  // namespace

ImagePlane read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  if (magic == "P6" || magic == "P3") throw IoError(path.string() + ": color PNM is not supported");
  if (magic != "P5") throw IoError(path.string() + ": not a binary PGM (P5)");
  const std::size_t width = parse_positive(pnm_token(in), path);
  const std::size_t height = parse_positive(pnm_token(in), path);
  const std::size_t maxval = parse_positive(pnm_token(in), path);
  if (maxval > 65535) throw IoError(path.string() + ": maxval exceeds 16 bits");
  const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> buf(width * height * bytes_per_sample);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    throw IoError(path.string() + ": truncated pixel data");
  }
  std::vector<double> raw(width * height);
  const double scale = 255.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned v = bytes_per_sample == 1 ? buf[i] : (unsigned{buf[2 * i]} << 8) | buf[2 * i + 1];
    raw[i] = static_cast<double>(v) * scale;
  }
  return center_crop(height, width, raw);
}

namespace {

struct PngReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadState() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace

ImagePlane read_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());
  std::array<unsigned char, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), file.get()) != sig.size() ||
      png_sig_cmp(sig.data(), 0, sig.size()) != 0) {
    throw IoError(path.string() + ": not a PNG file");
  }

  PngReadState st;
  st.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!st.png) throw IoError("libpng initialisation failed");
  st.info = png_create_info_struct(st.png);
  if (!st.info) throw IoError("libpng initialisation failed");

  std::size_t width = 0, height = 0;
  int bit_depth = 0;
  std::vector<unsigned char> pixels;
  bool color = false;
  // Only trivially destructible locals are touched between setjmp and longjmp.
  if (setjmp(png_jmpbuf(st.png))) {
    throw IoError(path.string() + ": corrupt PNG data");
  }
  png_init_io(st.png, file.get());
  png_set_sig_bytes(st.png, static_cast<int>(sig.size()));
  png_read_info(st.png, st.info);
  const int color_type = png_get_color_type(st.png, st.info);
  color = (color_type & PNG_COLOR_MASK_COLOR) != 0;
  if (!color) {
    width = png_get_image_width(st.png, st.info);
    height = png_get_image_height(st.png, st.info);
    bit_depth = png_get_bit_depth(st.png, st.info);
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(st.png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(st.png);
    png_read_update_info(st.png, st.info);
    const std::size_t rowbytes = png_get_rowbytes(st.png, st.info);
    pixels.resize(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (std::size_t r = 0; r < height; ++r) rows[r] = pixels.data() + r * rowbytes;
    png_read_image(st.png, rows.data());
    png_read_end(st.png, nullptr);
  }
  if (color) throw IoError(path.string() + ": color PNG is not supported, convert to grayscale");

  const bool wide = bit_depth == 16;
  const double scale = wide ? 255.0 / 65535.0 : 1.0;
  std::vector<double> raw(width * height);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned v = wide ? (unsigned{pixels[2 * i]} << 8) | pixels[2 * i + 1] : pixels[i];
    raw[i] = static_cast<double>(v) * scale;
  }
  return center_crop(height, width, raw);
}

ImagePlane read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 2> head{};
  in.read(head.data(), 2);
  if (head[0] == 'P' && (head[1] >= '1' && head[1] <= '7')) return read_pgm(path);
  if (static_cast<unsigned char>(head[0]) == 0x89 && head[1] == 'P') return read_png(path);
  throw IoError(path.string() + ": unsupported image format");
}

void write_pgm(const std::filesystem::path& path, const ImagePlane& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> buf(img.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i] = static_cast<unsigned char>(std::lround(std::clamp(img[i], 0.0, 255.0)));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm" || ext == ".png") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fragile
