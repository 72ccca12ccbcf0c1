#include "gsift/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "gsift/error.hpp"

namespace gsift {

HsvPixel rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) noexcept {
  const double r = r8;
  const double g = g8;
  const double b = b8;
  const double sum = r + g + b;

  HsvPixel out;
  out.value = sum / 3.0;
  if (sum > 0.0) {
    out.saturation = 255.0 * (1.0 - 3.0 * std::min({r, g, b}) / sum);
  }

  const double den = std::sqrt((r - g) * (r - g) + (r - b) * (g - b));
  if (den == 0.0) {
    // Achromatic: hue undefined, pinned to 0.
    out.saturation = 0.0;
    return out;
  }
  const double num = 0.5 * ((r - g) + (r - b));
  const double theta = std::acos(std::clamp(num / den, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  out.hue = b <= g ? theta : 360.0 - theta;
  if (out.hue >= 360.0) out.hue -= 360.0;
  return out;
}

bool is_skin(const HsvPixel& p, const SkinThresholds& t) noexcept {
  return p.hue > t.hue_min && p.hue < t.hue_max && p.saturation > t.saturation_min &&
         p.saturation < t.saturation_max && p.value > t.value_min && p.value < t.value_max;
}

SkinMask::SkinMask(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw Error(Errc::invalid_argument, "mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t SkinMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

SkinMask skin_mask(const RgbImage& img, const SkinThresholds& t) {
  SkinMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto* p = img.pixel(x, y);
      mask.set(x, y, is_skin(rgb_to_hsv(p[0], p[1], p[2]), t));
    }
  }
  return mask;
}

namespace {

SkinMask morph_3x3(const SkinMask& in, bool dilate) {
  SkinMask out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      bool acc = !dilate;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx;
          const int yy = y + dy;
          const bool inside = xx >= 0 && yy >= 0 && xx < in.width() && yy < in.height();
          const bool v = inside ? in.at(xx, yy) : !dilate;
          acc = dilate ? (acc || v) : (acc && v);
        }
      }
      out.set(x, y, acc);
    }
  }
  return out;
}

}  // namespace

SkinMask close_3x3(const SkinMask& mask) { return morph_3x3(morph_3x3(mask, true), false); }

GrayImage mask_to_gray(const SkinMask& mask) {
  GrayImage out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out.set(x, y, mask.at(x, y) ? 1.0 : 0.0);
  }
  return out;
}

std::vector<RoiBox> extract_rois(const SkinMask& mask, long min_area) {
  if (min_area < 1) throw Error(Errc::invalid_argument, "min_area must be at least 1");
  const SkinMask closed = close_3x3(mask);
  const int w = closed.width();
  const int h = closed.height();

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::pair<int, int>> stack;
  std::vector<RoiBox> boxes;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!closed.at(x, y) || seen[idx]) continue;

      int x0 = x, x1 = x, y0 = y, y1 = y;
      long area = 0;
      seen[idx] = 1;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++area;
        x0 = std::min(x0, cx);
        x1 = std::max(x1, cx);
        y0 = std::min(y0, cy);
        y1 = std::max(y1, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
            if (seen[n] || !closed.at(nx, ny)) continue;
            seen[n] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
      if (area >= min_area) boxes.push_back({x0, y0, x1 - x0 + 1, y1 - y0 + 1, area});
    }
  }

  std::sort(boxes.begin(), boxes.end(), [](const RoiBox& a, const RoiBox& b) {
    return std::tie(a.y, a.x, a.h, a.w) < std::tie(b.y, b.x, b.h, b.w);
  });
  return boxes;
}

}  // namespace gsift
