#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gsift {

/// 8-bit RGB raster, row-major, channels interleaved as R,G,B.
class RgbImage {
 public:
  /// Black image of the given size.
  RgbImage(int width, int height);
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  const std::uint8_t* pixel(int x, int y) const noexcept { return &data_[index(x, y)]; }
  std::uint8_t* pixel(int x, int y) noexcept { return &data_[index(x, y)]; }

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    auto* p = pixel(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Real-valued single-channel raster with intensities in [0,1].
class GrayImage {
 public:
  /// Constant image.
  GrayImage(int width, int height, double fill = 0.0);
  /// Takes ownership of `data`; every sample must be finite and inside [0,1].
  GrayImage(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }

  double at(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  /// Stores `v` clamped to [0,1].
  void set(int x, int y, double v) noexcept;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> data_;
};

/// Grayscale as the mean of the three channels scaled to [0,1].
GrayImage to_gray(const RgbImage& img);

/// Normalized sampled Gaussian of radius ceil(3*sigma); size 2*radius+1.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian convolution with edge replication at the borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Bilinear resampling with corner-aligned sample grids, so the first and
/// last rows/columns map onto the source's first and last rows/columns.
GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height);

/// Keeps the top-left sample of every 2x2 block.
GrayImage downsample_half(const GrayImage& img);

/// Rectangular sub-image; the rectangle must lie inside `img`.
GrayImage crop(const GrayImage& img, int x, int y, int w, int h);

/// Rounds every sample to the nearest multiple of 1/255.
GrayImage quantize_8bit(const GrayImage& img);

}  // namespace gsift
