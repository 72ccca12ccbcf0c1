#include "gsift/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "gsift/error.hpp"
#include "gsift/face_detect.hpp"
#include "gsift/pnm.hpp"
#include "gsift/rng.hpp"

namespace gsift {

namespace fs = std::filesystem;

namespace {

// Skin tone: hue ~44 deg, saturation ~73, value 210 on the 0..255 scale.
constexpr std::array<double, 3> kSkin{255.0, 225.0, 150.0};
// Background: hue ~226 deg, value ~103; never passes the skin test.
constexpr std::array<double, 3> kBackground{70.0, 90.0, 150.0};

constexpr double kBarDepth = 0.2;
constexpr double kMaleBarPeriod = 30.0;
constexpr double kFemaleBarPeriod = 12.0;
constexpr double kBarWidth = 1.5;
constexpr double kBlobDepth = 0.65;
constexpr int kFemaleFreckles = 14;
constexpr double kFreckleDepth = 0.45;
constexpr double kFreckleRadius = 2.2;

struct FaceLayout {
  double cx, cy;   // centre
  double ax, ay;   // semi-axes before rotation
  double angle;    // radians
  double brightness;
  std::vector<std::array<double, 3>> blobs;  // (u, v, radius) in normalized face coords
  std::vector<std::array<double, 2>> freckles;  // (u, v)
};

double uniform(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

FaceLayout layout_for(int label, std::uint64_t seed) {
  SplitMix64 rng(seed);
  FaceLayout f;
  f.cx = 128.0 + uniform(rng, -12.0, 12.0);
  f.cy = 128.0 + uniform(rng, -12.0, 12.0);
  f.ax = 54.0 + uniform(rng, -4.0, 4.0);
  f.ay = 70.0 + uniform(rng, -4.0, 4.0);
  f.angle = uniform(rng, -10.0, 10.0) * std::numbers::pi / 180.0;
  f.brightness = uniform(rng, 0.95, 1.0);

  auto jitter = [&rng] { return uniform(rng, -0.04, 0.04); };
  const double r = 0.11;
  f.blobs.push_back({-0.4 + jitter(), -0.25 + jitter(), r});
  f.blobs.push_back({0.4 + jitter(), -0.25 + jitter(), r});
  if (label < 0) f.blobs.push_back({0.0 + jitter(), 0.45 + jitter(), r});
  const int n_freckles = label < 0 ? kFemaleFreckles : 0;
  while (static_cast<int>(f.freckles.size()) < n_freckles) {
    const double u = uniform(rng, -0.8, 0.8), v = uniform(rng, -0.8, 0.8);
    if (u * u + v * v < 0.64) f.freckles.push_back({u, v});
  }
  return f;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// Bounding box of the (rotated) ellipse, clipped to the image.
FaceBox ellipse_box(const FaceLayout& f) {
  const double c = std::cos(f.angle), s = std::sin(f.angle);
  const double hx = std::sqrt(f.ax * f.ax * c * c + f.ay * f.ay * s * s);
  const double hy = std::sqrt(f.ax * f.ax * s * s + f.ay * f.ay * c * c);
  FaceBox b;
  b.x = std::max(0, static_cast<int>(std::floor(f.cx - hx)));
  b.y = std::max(0, static_cast<int>(std::floor(f.cy - hy)));
  b.w = std::min(kSyntheticSide, static_cast<int>(std::ceil(f.cx + hx)) + 1) - b.x;
  b.h = std::min(kSyntheticSide, static_cast<int>(std::ceil(f.cy + hy)) + 1) - b.y;
  return b;
}

}  // namespace

RgbImage render_synthetic_face(int label, std::uint64_t seed) {
  const FaceLayout f = layout_for(label, seed);
  SplitMix64 noise(derive_seed(seed, 0x6E6F697365ULL));
  const double c = std::cos(f.angle), s = std::sin(f.angle);
  const bool horizontal = label > 0;
  const double period = horizontal ? kMaleBarPeriod : kFemaleBarPeriod;

  RgbImage img(kSyntheticSide, kSyntheticSide);
  for (int y = 0; y < kSyntheticSide; ++y) {
    for (int x = 0; x < kSyntheticSide; ++x) {
      // Face-local coordinates (pixels), axis-aligned with the ellipse.
      const double dx = x - f.cx, dy = y - f.cy;
      const double lx = c * dx + s * dy;
      const double ly = -s * dx + c * dy;
      const double u = lx / f.ax, v = ly / f.ay;
      const double jitter = (noise.uniform() - 0.5) * 6.0;

      if (u * u + v * v > 1.0) {
        img.set(x, y, to_byte(kBackground[0] + jitter), to_byte(kBackground[1] + jitter),
                to_byte(kBackground[2] + jitter));
        continue;
      }
      const double along = horizontal ? ly : lx;
      // Thin dark lines, one per period, phase-locked to the centre.
      const double off = along / period - std::round(along / period);
      const double dist = off * period;
      double shade = 1.0 - kBarDepth * std::exp(-dist * dist / (2.0 * kBarWidth * kBarWidth));
      for (const auto& blob : f.blobs) {
        const double bu = (u - blob[0]) * f.ax, bv = (v - blob[1]) * f.ay;
        const double rad = blob[2] * f.ax;
        shade *= 1.0 - kBlobDepth * std::exp(-(bu * bu + bv * bv) / (2.0 * rad * rad));
      }
      for (const auto& fr : f.freckles) {
        const double fu = (u - fr[0]) * f.ax, fv = (v - fr[1]) * f.ay;
        shade *= 1.0 - kFreckleDepth * std::exp(-(fu * fu + fv * fv) / (2.0 * kFreckleRadius * kFreckleRadius));
      }
      const double k = f.brightness * shade;
      img.set(x, y, to_byte(kSkin[0] * k + jitter), to_byte(kSkin[1] * k + jitter),
              to_byte(kSkin[2] * k + jitter));
    }
  }
  return img;
}

GrayImage synthetic_face_crop(int label, std::uint64_t seed) {
  const RgbImage img = render_synthetic_face(label, seed);
  return crop_face(img, ellipse_box(layout_for(label, seed))).gray;
}

Dataset generate_synthetic_dataset(int n_per_class, const fs::path& out_dir, std::uint64_t seed) {
  if (n_per_class < 1) throw Error(Errc::invalid_argument, "n_per_class must be >= 1");
  for (int label : {kMaleLabel, kFemaleLabel}) {
    const fs::path dir = out_dir / label_name(label);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
    for (int i = 0; i < n_per_class; ++i) {
      const std::uint64_t item_seed =
          derive_seed(derive_seed(seed, label > 0 ? 1 : 0), static_cast<std::uint64_t>(i));
      char name[32];
      std::snprintf(name, sizeof name, "%s_%04d.ppm", label_name(label), i);
      save_ppm(render_synthetic_face(label, item_seed), dir / name);
    }
  }
  return load_dataset(out_dir);
}

}  // namespace gsift
