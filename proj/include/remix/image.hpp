#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace remix {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Integer luminance, round(0.299 R + 0.587 G + 0.114 B).
int luminance(Rgb px);

/// Dense 8-bit RGB raster, row-major.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb px);

  std::span<const std::uint8_t> bytes() const noexcept { return data_; }

  /// Copy of the sub-rectangle [x0, x0+w) x [y0, y0+h).
  Image crop(int x0, int y0, int w, int h) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

enum class ImageFormat { Unknown, Png, Jpeg };

ImageFormat sniff_format(std::span<const std::uint8_t> bytes);
std::string content_type(ImageFormat format);

/// Decodes PNG or JPEG bytes. Throws Error(IMAGE_DECODE_FAILED).
Image decode_image(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Image& image);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
Image load_image(const std::filesystem::path& path);
void save_png(const Image& image, const std::filesystem::path& path);

}  // namespace remix
