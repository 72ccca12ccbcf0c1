#pragma once

// Scene builders shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "gsift/face_detect.hpp"
#include "gsift/image.hpp"
#include "gsift/synthetic.hpp"

namespace gsift::fixture {

inline constexpr std::uint8_t kSkin[3] = {255, 225, 150};
inline constexpr std::uint8_t kBlue[3] = {70, 90, 150};

/// Skin tone scaled by k; stays inside the default skin thresholds for
/// k in [0.75, 1].
inline void put_skin(RgbImage& img, int x, int y, double k) {
  img.set(x, y, static_cast<std::uint8_t>(std::lround(kSkin[0] * k)),
          static_cast<std::uint8_t>(std::lround(kSkin[1] * k)),
          static_cast<std::uint8_t>(std::lround(kSkin[2] * k)));
}

inline RgbImage blue_canvas(int w = 256, int h = 256) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.set(x, y, kBlue[0], kBlue[1], kBlue[2]);
  }
  return img;
}

/// Flat skin rectangle.
inline void skin_rect(RgbImage& img, int x0, int y0, int w, int h, double k = 0.9) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) put_skin(img, x, y, k);
  }
}

/// Writes `t` (values in [0,1]) at (x0, y0) as skin of brightness 0.75..1.
inline void plant(RgbImage& img, const GrayImage& t, int x0, int y0) {
  for (int y = 0; y < t.height(); ++y) {
    for (int x = 0; x < t.width(); ++x) put_skin(img, x0 + x, y0 + y, 0.75 + 0.25 * t.at(x, y));
  }
}

/// Face-like template: a synthetic face crop shrunk to `side`.
inline FaceTemplate face_template(int side = kDefaultTemplateSide) {
  const GrayImage face = synthetic_face_crop(-1, 12345);
  return {side, resize_bilinear(face, side, side), 1};
}

/// Multiplies every channel by `factor`, clipping at 255.
inline RgbImage brighten(const RgbImage& img, double factor) {
  RgbImage out = img;
  for (auto& v : out.data()) v = static_cast<std::uint8_t>(std::min(255L, std::lround(v * factor)));
  return out;
}

/// The textured face used by the SIFT invariance checks.
inline GrayImage textured_face() { return synthetic_face_crop(-1, 100); }

inline GrayImage rotate90(const GrayImage& img) {
  GrayImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(img.height() - 1 - y, x, img.at(x, y));
  }
  return out;
}

}  // namespace gsift::fixture
