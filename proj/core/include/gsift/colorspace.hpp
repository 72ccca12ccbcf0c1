#pragma once

#include <cstdint>
#include <vector>

#include "gsift/image.hpp"

namespace gsift {

/// Hue in degrees [0,360); saturation and value on a 0..255 scale.
struct HsvPixel {
  double hue = 0.0;
  double saturation = 0.0;
  double value = 0.0;
};

/// Arc-cosine hue, min-based saturation and mean-intensity value. Achromatic
/// pixels (R=G=B, including black) get hue 0 and saturation 0.
HsvPixel rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Open intervals on each channel. The defaults are the experimentally
/// chosen skin bounds; all three predicates must hold.
struct SkinThresholds {
  double hue_min = 20.0;
  double hue_max = 200.0;
  double saturation_min = 30.0;
  double saturation_max = 160.0;
  double value_min = 150.0;
  double value_max = 255.0;
};

bool is_skin(const HsvPixel& p, const SkinThresholds& t = {}) noexcept;

class SkinMask {
 public:
  SkinMask(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool at(int x, int y) const noexcept { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) noexcept { bits_[static_cast<std::size_t>(y) * width_ + x] = v; }

  std::size_t count() const noexcept;

  friend bool operator==(const SkinMask&, const SkinMask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

SkinMask skin_mask(const RgbImage& img, const SkinThresholds& t = {});

/// 3x3 dilation followed by 3x3 erosion. Pixels outside the image count as
/// background for the dilation and as foreground for the erosion, so the
/// closing never eats into regions touching the border.
SkinMask close_3x3(const SkinMask& mask);

/// Mask rendered as a gray image, members at 1.0.
GrayImage mask_to_gray(const SkinMask& mask);

struct RoiBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  /// Pixel count of the connected component.
  long area = 0;

  friend bool operator==(const RoiBox&, const RoiBox&) = default;
};

inline constexpr long kDefaultMinRoiArea = 400;

/// Closes the mask once, labels 8-connected components and returns the tight
/// bounding box of every component with at least `min_area` pixels, sorted
/// by (y, x) of the top-left corner.
std::vector<RoiBox> extract_rois(const SkinMask& mask, long min_area = kDefaultMinRoiArea);

}  // namespace gsift
