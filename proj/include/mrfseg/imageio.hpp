#pragma once

#include <fnmatch.h>
#include <png.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "mrfseg/error.hpp"
#include "mrfseg/grid.hpp"

namespace mrfseg {

namespace fs = std::filesystem;

/// Integer luma with round-half-up: (299 R + 587 G + 114 B + 500) / 1000.
constexpr std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

namespace detail {

inline bool has_pgm_magic(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[2] = {};
  in.read(magic, 2);
  return in && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '2');
}

inline GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  in >> magic;
  auto next_int = [&]() -> long {
    // Header tokens may be separated by comment lines.
    while (in >> std::ws && in.peek() == '#') {
      std::string skip;
      std::getline(in, skip);
    }
    long v = -1;
    in >> v;
    return v;
  };
  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (!in || width < 0 || height < 0 || maxval <= 0 || maxval > 255)
    fail(Errc::decode_failure, "unsupported or malformed PGM header: " + path.string());
  if (width == 0 || height == 0) fail(Errc::empty_image, "zero-sized image: " + path.string());

  std::vector<std::uint8_t> data(static_cast<std::size_t>(width * height));
  if (magic == "P5") {
    in.get();  // single whitespace byte before the raster
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size()))
      fail(Errc::decode_failure, "truncated PGM raster: " + path.string());
  } else {
    for (auto& v : data) {
      const long s = next_int();
      if (s < 0 || s > maxval) fail(Errc::decode_failure, "malformed PGM sample: " + path.string());
      v = static_cast<std::uint8_t>(s);
    }
  }
  if (maxval != 255) {
    for (auto& v : data) v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  }
  return GrayImage(static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(data));
}

inline GrayImage read_png(const fs::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    std::string msg = img.message;
    png_image_free(&img);
    fail(Errc::decode_failure, "cannot decode " + path.string() + ": " + msg);
  }
  if (img.width == 0 || img.height == 0) {
    png_image_free(&img);
    fail(Errc::empty_image, "zero-sized image: " + path.string());
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool wide = (img.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  // Keep the source's channel layout and depth so libpng applies no colour
  // or gamma conversion; reduction to 8-bit gray happens below.
  img.format = wide ? (color ? PNG_FORMAT_LINEAR_RGB : PNG_FORMAT_LINEAR_Y) : (color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY);
  const std::size_t width = img.width;
  const std::size_t height = img.height;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    fail(Errc::decode_failure, "cannot decode " + path.string() + ": " + msg);
  }
  if (wide) {
    const std::size_t samples = width * height * (color ? 3 : 1);
    std::vector<std::uint8_t> narrow(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * i, 2);
      narrow[i] = static_cast<std::uint8_t>((v + 128u) / 257u);
    }
    buffer = std::move(narrow);
  }
  if (!color) return GrayImage(width, height, std::move(buffer));

  std::vector<std::uint8_t> gray(width * height);
  for (std::size_t i = 0; i < gray.size(); ++i)
    gray[i] = luma(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]);
  return GrayImage(width, height, std::move(gray));
}

inline void write_png(const fs::path& path, std::size_t width, std::size_t height,
                      const std::uint8_t* pixels) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.c_str(), 0, pixels, 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    fail(Errc::io_failure, "cannot write " + path.string() + ": " + msg);
  }
}

}  // namespace detail

/// Loads an 8-bit grayscale image from PNG or PGM. Colour PNGs are converted
/// with `luma`; 16-bit samples are rounded to 8 bits (v / 257).
inline GrayImage load_gray(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) detail::fail(Errc::file_not_found, "no such file: " + path.string());
  if (detail::has_pgm_magic(path)) return detail::read_pgm(path);
  return detail::read_png(path);
}

/// Loads a ground-truth mask: foreground iff intensity >= threshold. The
/// default of 1 treats every labelled cell id as foreground.
inline BinaryMask load_mask(const fs::path& path, int threshold = 1) {
  if (threshold < 1 || threshold > 255)
    detail::fail(Errc::invalid_argument, "mask threshold must be in [1,255]");
  const GrayImage gray = load_gray(path);
  std::vector<std::uint8_t> bits(gray.size());
  std::transform(gray.begin(), gray.end(), bits.begin(),
                 [threshold](std::uint8_t v) { return static_cast<std::uint8_t>(v >= threshold); });
  return BinaryMask(gray.width(), gray.height(), std::move(bits));
}

inline void save_gray(const GrayImage& image, const fs::path& path) {
  detail::write_png(path, image.width(), image.height(), image.values().data());
}

/// Writes 0 -> 0 and 1 -> 255.
inline void save_mask(const BinaryMask& mask, const fs::path& path) {
  std::vector<std::uint8_t> bytes(mask.size());
  std::transform(mask.begin(), mask.end(), bytes.begin(),
                 [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
  detail::write_png(path, mask.width(), mask.height(), bytes.data());
}

struct DatasetEntry {
  fs::path image;
  std::optional<fs::path> mask;
};

/// Enumerates images in `dir` matching `image_glob`, sorted by file name, and
/// pairs each with `<stem><mask_suffix>.png` (looked up in `mask_dir` when
/// given, otherwise next to the image). Files that are themselves masks are
/// not listed as images.
inline std::vector<DatasetEntry> list_dataset(const fs::path& dir, const std::string& image_glob = "*.png",
                                              const std::string& mask_suffix = "_gt",
                                              const std::optional<fs::path>& mask_dir = std::nullopt) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) detail::fail(Errc::directory_not_found, "no such directory: " + dir.string());
  const fs::path masks = mask_dir.value_or(dir);
  if (mask_dir && !fs::is_directory(masks, ec))
    detail::fail(Errc::directory_not_found, "no such directory: " + masks.string());

  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (fnmatch(image_glob.c_str(), name.c_str(), 0) != 0) continue;
    const std::string stem = entry.path().stem().string();
    if (!mask_suffix.empty() && masks == dir && stem.size() >= mask_suffix.size() &&
        stem.compare(stem.size() - mask_suffix.size(), mask_suffix.size(), mask_suffix) == 0)
      continue;
    images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  std::vector<DatasetEntry> out;
  out.reserve(images.size());
  for (auto& image : images) {
    fs::path mask = masks / (image.stem().string() + mask_suffix + ".png");
    DatasetEntry e{std::move(image), std::nullopt};
    if (fs::is_regular_file(mask, ec)) e.mask = std::move(mask);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace mrfseg
