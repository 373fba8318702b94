#pragma once

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stereolab/geometry.hpp"
#include "stereolab/grid.hpp"

namespace stereolab {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw FormatError("cannot open '" + path + "'");
  return f;
}

inline float swap_float(float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  bits = ((bits & 0xff000000u) >> 24) | ((bits & 0x00ff0000u) >> 8) |
         ((bits & 0x0000ff00u) << 8) | ((bits & 0x000000ffu) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace detail

// 16-bit grayscale PNG, depth = pixel/256 m, pixel 0 = invalid.
inline DepthMap read_kitti_depth_png(const std::string& path) {
  detail::FilePtr file = detail::open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError("libpng init failed");
  }
  std::vector<std::vector<png_byte>> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path + "' is not a readable PNG");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth != 16 || color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path + "': expected 16-bit single-channel PNG, got bit depth " +
                      std::to_string(bit_depth) + ", color type " + std::to_string(color_type));
  }
  rows.assign(height, std::vector<png_byte>(static_cast<std::size_t>(width) * 2));
  std::vector<png_bytep> row_ptrs(height);
  for (png_uint_32 r = 0; r < height; ++r) row_ptrs[r] = rows[r].data();
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  DepthMap map(static_cast<int>(height), static_cast<int>(width));
  for (png_uint_32 r = 0; r < height; ++r)
    for (png_uint_32 c = 0; c < width; ++c) {
      const std::uint16_t px = static_cast<std::uint16_t>((rows[r][2 * c] << 8) | rows[r][2 * c + 1]);
      map(static_cast<int>(r), static_cast<int>(c)) =
          px == 0 ? kInvalid : static_cast<float>(px) / 256.0f;
    }
  return map;
}

inline void write_kitti_depth_png(const DepthMap& map, const std::string& path) {
  detail::FilePtr file = detail::open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw FormatError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("cannot write '" + path + "'");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(map.cols()), static_cast<png_uint_32>(map.rows()),
               16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(map.cols()) * 2);
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const float v = map(r, c);
      long px = 0;
      if (is_valid(v) && v > 0.0f) px = std::clamp(std::lround(v * 256.0f), 1L, 65535L);
      row[2 * static_cast<std::size_t>(c)] = static_cast<png_byte>((px >> 8) & 0xff);
      row[2 * static_cast<std::size_t>(c) + 1] = static_cast<png_byte>(px & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// 8-bit PNG (gray or RGB) as floats in [0,1]; palette/alpha/16-bit inputs are
// normalized to 8-bit gray or RGB.
inline Image read_image_png(const std::string& path) {
  detail::FilePtr file = detail::open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path + "' is not a readable PNG");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path + "': unsupported channel count " + std::to_string(channels));
  }
  std::vector<std::vector<png_byte>> rows(height,
      std::vector<png_byte>(static_cast<std::size_t>(width) * static_cast<std::size_t>(channels)));
  std::vector<png_bytep> row_ptrs(height);
  for (png_uint_32 r = 0; r < height; ++r) row_ptrs[r] = rows[r].data();
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(static_cast<int>(height), static_cast<int>(width), channels);
  for (png_uint_32 r = 0; r < height; ++r)
    for (png_uint_32 c = 0; c < width; ++c)
      for (int k = 0; k < channels; ++k)
        img(static_cast<int>(r), static_cast<int>(c), k) =
            static_cast<float>(rows[r][c * static_cast<png_uint_32>(channels) +
                                       static_cast<png_uint_32>(k)]) / 255.0f;
  return img;
}

// [0,1] floats to 8-bit gray or RGB.
inline void write_image_png(const Image& img, const std::string& path) {
  if (img.channels() != 1 && img.channels() != 3)
    throw std::invalid_argument("write_image_png: need 1 or 3 channels");
  detail::FilePtr file = detail::open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw FormatError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("cannot write '" + path + "'");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols()), static_cast<png_uint_32>(img.rows()),
               8, img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(img.cols()) * static_cast<std::size_t>(img.channels()));
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c)
      for (int k = 0; k < img.channels(); ++k) {
        const float v = std::min(std::max(img(r, c, k), 0.0f), 1.0f);
        row[static_cast<std::size_t>(c) * img.channels() + k] =
            static_cast<png_byte>(std::lround(v * 255.0f));
      }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// PFM: 'Pf' single channel / 'PF' three channels, negative scale = little
// endian, rows stored bottom-up.
inline Grid<float> read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::string magic;
  int width = 0, height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  if (!in || (magic != "Pf" && magic != "PF") || width <= 0 || height <= 0 || scale == 0.0)
    throw FormatError("'" + path + "' is not a valid PFM");
  in.get();  // single whitespace byte before the raster
  const int channels = magic == "PF" ? 3 : 1;
  Grid<float> map(height, width, channels);
  std::vector<float> row(static_cast<std::size_t>(width) * static_cast<std::size_t>(channels));
  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;
  for (int r = height - 1; r >= 0; --r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw FormatError("'" + path + "': truncated PFM raster");
    for (int c = 0; c < width; ++c)
      for (int k = 0; k < channels; ++k) {
        float v = row[static_cast<std::size_t>(c) * channels + k];
        if (file_little != host_little) v = detail::swap_float(v);
        map(r, c, k) = v;
      }
  }
  return map;
}

inline void write_pfm(const Grid<float>& map, const std::string& path) {
  if (map.channels() != 1 && map.channels() != 3)
    throw std::invalid_argument("write_pfm: need 1 or 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  const bool host_little = std::endian::native == std::endian::little;
  out << (map.channels() == 3 ? "PF" : "Pf") << "\n"
      << map.cols() << " " << map.rows() << "\n"
      << (host_little ? "-1.0" : "1.0") << "\n";
  std::vector<float> row(static_cast<std::size_t>(map.cols()) * static_cast<std::size_t>(map.channels()));
  for (int r = map.rows() - 1; r >= 0; --r) {
    for (int c = 0; c < map.cols(); ++c)
      for (int k = 0; k < map.channels(); ++k)
        row[static_cast<std::size_t>(c) * map.channels() + k] = map(r, c, k);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw FormatError("cannot write '" + path + "'");
}

namespace detail {

inline double parse_double(const std::string& tok, const std::string& context) {
  double v = 0.0;
  const auto* begin = tok.data();
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw FormatError(context + ": bad number '" + tok + "'");
  return v;
}

inline long parse_long(const std::string& tok, const std::string& context) {
  long v = 0;
  const auto* begin = tok.data();
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw FormatError(context + ": bad integer '" + tok + "'");
  return v;
}

}  // namespace detail

// Text format: '# sparse-points v1 H W unit=<m|px>' then 'row col value
// [confidence]' lines. Order-preserving.
inline SparsePointSet read_sparse_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("'" + path + "': missing header");
  std::istringstream hs(line);
  std::string hash, name, version, unit_tok;
  int rows = 0, cols = 0;
  hs >> hash >> name >> version >> rows >> cols >> unit_tok;
  if (hash != "#" || name != "sparse-points" || version != "v1" || rows <= 0 || cols <= 0 ||
      (unit_tok != "unit=m" && unit_tok != "unit=px"))
    throw FormatError("'" + path + "': bad header '" + line + "'");

  SparsePointSet set;
  set.rows = rows;
  set.cols = cols;
  set.unit = unit_tok == "unit=m" ? ValueUnit::Meters : ValueUnit::Pixels;
  std::set<std::pair<int, int>> seen;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    const std::string ctx = "'" + path + "' line " + std::to_string(lineno);
    if (toks.size() != 3 && toks.size() != 4) throw FormatError(ctx + ": expected 3 or 4 fields");
    SparsePoint p;
    p.row = static_cast<int>(detail::parse_long(toks[0], ctx));
    p.col = static_cast<int>(detail::parse_long(toks[1], ctx));
    p.value = static_cast<float>(detail::parse_double(toks[2], ctx));
    p.confidence = toks.size() == 4 ? static_cast<float>(detail::parse_double(toks[3], ctx)) : 1.0f;
    if (p.row < 0 || p.row >= rows || p.col < 0 || p.col >= cols)
      throw FormatError(ctx + ": coordinate (" + std::to_string(p.row) + ", " +
                        std::to_string(p.col) + ") out of frame");
    if (!(p.value > 0.0f) || !std::isfinite(p.value))
      throw FormatError(ctx + ": value must be finite and positive");
    if (!seen.insert({p.row, p.col}).second)
      throw FormatError(ctx + ": duplicate coordinate (" + std::to_string(p.row) + ", " +
                        std::to_string(p.col) + ")");
    set.points.push_back(p);
  }
  return set;
}

inline void write_sparse_points(const SparsePointSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << "# sparse-points v1 " << set.rows << " " << set.cols
      << (set.unit == ValueUnit::Meters ? " unit=m" : " unit=px") << "\n";
  char buf[64];
  for (const auto& p : set.points) {
    std::snprintf(buf, sizeof(buf), "%d %d %.9g", p.row, p.col, static_cast<double>(p.value));
    out << buf;
    if (p.confidence != 1.0f) {
      std::snprintf(buf, sizeof(buf), " %.9g", static_cast<double>(p.confidence));
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw FormatError("cannot write '" + path + "'");
}

// '# tensor v1 H W C f32le' header plus raw little-endian floats, row-major.
inline void write_tensor(const Grid<float>& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << "# tensor v1 " << t.rows() << " " << t.cols() << " " << t.channels() << " f32le\n";
  const bool host_little = std::endian::native == std::endian::little;
  for (int r = 0; r < t.rows(); ++r)
    for (int c = 0; c < t.cols(); ++c)
      for (int k = 0; k < t.channels(); ++k) {
        float v = t(r, c, k);
        if (!host_little) v = detail::swap_float(v);
        out.write(reinterpret_cast<const char*>(&v), sizeof(float));
      }
  if (!out) throw FormatError("cannot write '" + path + "'");
}

inline Grid<float> read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("'" + path + "': missing header");
  std::istringstream hs(line);
  std::string hash, name, version, layout;
  int rows = 0, cols = 0, channels = 0;
  hs >> hash >> name >> version >> rows >> cols >> channels >> layout;
  if (hash != "#" || name != "tensor" || version != "v1" || rows <= 0 || cols <= 0 ||
      channels <= 0 || layout != "f32le")
    throw FormatError("'" + path + "': bad header '" + line + "'");
  Grid<float> t(rows, cols, channels);
  const bool host_little = std::endian::native == std::endian::little;
  std::vector<float> buf(static_cast<std::size_t>(cols) * static_cast<std::size_t>(channels));
  for (int r = 0; r < rows; ++r) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw FormatError("'" + path + "': truncated tensor raster");
    for (int c = 0; c < cols; ++c)
      for (int k = 0; k < channels; ++k) {
        float v = buf[static_cast<std::size_t>(c) * channels + k];
        if (!host_little) v = detail::swap_float(v);
        t(r, c, k) = v;
      }
  }
  return t;
}

// key=value lines: focal_px, baseline_m, cx, cy. '#' starts a comment.
inline CameraRig read_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  CameraRig rig;
  bool got_f = false, got_b = false, got_cx = false, got_cy = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string stripped;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) stripped += ch;
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    const std::string ctx = "'" + path + "' line " + std::to_string(lineno);
    if (eq == std::string::npos) throw FormatError(ctx + ": expected key=value");
    const std::string key = stripped.substr(0, eq);
    const double value = detail::parse_double(stripped.substr(eq + 1), ctx);
    if (key == "focal_px") rig.focal_px = value, got_f = true;
    else if (key == "baseline_m") rig.baseline_m = value, got_b = true;
    else if (key == "cx") rig.cx = value, got_cx = true;
    else if (key == "cy") rig.cy = value, got_cy = true;
    else throw FormatError(ctx + ": unknown key '" + key + "'");
  }
  if (!got_f || !got_b || !got_cx || !got_cy)
    throw FormatError("'" + path + "': needs focal_px, baseline_m, cx and cy");
  return rig;
}

inline void write_calibration(const CameraRig& rig, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "focal_px=%.17g\nbaseline_m=%.17g\ncx=%.17g\ncy=%.17g\n",
                rig.focal_px, rig.baseline_m, rig.cx, rig.cy);
  out << buf;
}

struct Scene {
  std::string name;
  Image left;
  Image right;
  DisparityMap gt;
};

// Scene directories under root, each with left.pfm, right.pfm and gt.pfm;
// sorted by name.
inline std::vector<Scene> load_corpus(const std::string& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw FormatError("'" + root + "' is not a directory");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  std::vector<Scene> scenes;
  for (const auto& name : names) {
    const fs::path dir = fs::path(root) / name;
    if (!fs::exists(dir / "left.pfm") || !fs::exists(dir / "right.pfm") ||
        !fs::exists(dir / "gt.pfm"))
      continue;
    scenes.push_back({name, read_pfm((dir / "left.pfm").string()),
                      read_pfm((dir / "right.pfm").string()),
                      read_pfm((dir / "gt.pfm").string())});
  }
  if (scenes.empty()) throw FormatError("'" + root + "': no scene directories found");
  return scenes;
}

}  // namespace stereolab
