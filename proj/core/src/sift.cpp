#include "gsift/sift.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <tuple>

#include "gsift/error.hpp"

namespace gsift {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr int kOrientationBins = 36;
constexpr double kOrientationPeakRatio = 0.8;
constexpr double kOrientationRadiusFactor = 4.5;
constexpr double kOrientationSigmaFactor = 1.5;

constexpr int kDescriptorWidth = 4;    // cells per side
constexpr int kDescriptorBins = 8;     // orientation bins per cell
constexpr int kDescriptorSamples = 16; // samples per side
constexpr double kDescriptorCellWidth = 3.0;  // cell side in units of sigma
constexpr double kDescriptorWeightSigma = 8.0;  // in samples
constexpr double kDescriptorClamp = 0.2;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

// Fixed point of repeated clamp-and-renormalize: the largest entries sit at
// the clamp and the rest share the remaining energy. Needs at least 25
// nonzero entries; returns false otherwise.
bool clamp_unit(std::span<double> v) {
  constexpr double c2 = kDescriptorClamp * kDescriptorClamp;
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<double> tail(sorted.size() + 1, 0.0);
  for (std::size_t i = sorted.size(); i-- > 0;) tail[i] = tail[i + 1] + sorted[i] * sorted[i];
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double budget = 1.0 - c2 * static_cast<double>(k);
    if (budget <= 0.0 || !(tail[k] > 0.0)) return false;
    const double s = std::sqrt(budget / tail[k]);
    if (s * sorted[k] <= kDescriptorClamp) {
      for (double& x : v) x = std::min(x * s, kDescriptorClamp);
      return true;
    }
  }
  return false;
}

// Clamped central-difference gradient of L at arbitrary real coordinates,
// bilinearly interpolated from the four surrounding pixels.
std::pair<double, double> gradient_bilinear(const GrayImage& L, double px, double py) {
  const int w = L.width();
  const int h = L.height();
  const int x0 = static_cast<int>(std::floor(px));
  const int y0 = static_cast<int>(std::floor(py));
  const double tx = px - x0;
  const double ty = py - y0;
  auto pixel_grad = [&](int x, int y) {
    const int xc = std::clamp(x, 0, w - 1);
    const int yc = std::clamp(y, 0, h - 1);
    const double gx = L.at(std::min(xc + 1, w - 1), yc) - L.at(std::max(xc - 1, 0), yc);
    const double gy = L.at(xc, std::min(yc + 1, h - 1)) - L.at(xc, std::max(yc - 1, 0));
    return std::pair{gx, gy};
  };
  const auto [g00x, g00y] = pixel_grad(x0, y0);
  const auto [g10x, g10y] = pixel_grad(x0 + 1, y0);
  const auto [g01x, g01y] = pixel_grad(x0, y0 + 1);
  const auto [g11x, g11y] = pixel_grad(x0 + 1, y0 + 1);
  const double w00 = (1 - tx) * (1 - ty), w10 = tx * (1 - ty), w01 = (1 - tx) * ty, w11 = tx * ty;
  return {w00 * g00x + w10 * g10x + w01 * g01x + w11 * g11x,
          w00 * g00y + w10 * g10y + w01 * g01y + w11 * g11y};
}

}  // namespace

double ScaleSpaceParams::k() const { return std::pow(2.0, 1.0 / scales_per_octave); }

double ScaleSpaceParams::level_sigma(int level) const { return base_sigma * std::pow(k(), level); }

void ScaleSpaceParams::validate() const {
  if (octaves < 1) throw Error(Errc::invalid_argument, "octaves must be >= 1");
  if (scales_per_octave < 1) throw Error(Errc::invalid_argument, "scales per octave must be >= 1");
  if (!(base_sigma > kAssumedInputBlur)) {
    throw Error(Errc::invalid_argument, "base sigma must exceed the assumed input blur (0.5)");
  }
  if (!(contrast_threshold > 0.0)) throw Error(Errc::invalid_argument, "contrast threshold must be > 0");
  if (!(edge_ratio > 1.0)) throw Error(Errc::invalid_argument, "edge ratio must be > 1");
}

int max_octaves(int width, int height) {
  int n = 0;
  int side = std::min(width, height);
  while (side >= kMinOctaveSide) {
    ++n;
    side /= 2;
  }
  return n;
}

GaussianPyramid build_gaussian_pyramid(const GrayImage& img, const ScaleSpaceParams& params) {
  params.validate();
  if (img.width() < 32 || img.height() < 32) {
    throw Error(Errc::image_too_small, "scale space needs at least a 32x32 image");
  }
  if (params.octaves > max_octaves(img.width(), img.height())) {
    throw Error(Errc::image_too_small, std::to_string(params.octaves) + " octaves requested but a " +
                                           std::to_string(img.width()) + "x" +
                                           std::to_string(img.height()) + " image supports " +
                                           std::to_string(max_octaves(img.width(), img.height())));
  }

  const int levels = params.scales_per_octave + 3;
  std::vector<double> increments(levels, 0.0);
  for (int i = 1; i < levels; ++i) {
    const double prev = params.level_sigma(i - 1);
    const double cur = params.level_sigma(i);
    increments[i] = std::sqrt(cur * cur - prev * prev);
  }

  GaussianPyramid pyr;
  pyr.params = params;
  pyr.octaves.reserve(params.octaves);
  for (int o = 0; o < params.octaves; ++o) {
    std::vector<GrayImage> octave;
    octave.reserve(levels);
    if (o == 0) {
      const double s0 = params.base_sigma;
      octave.push_back(
          gaussian_blur(img, std::sqrt(s0 * s0 - kAssumedInputBlur * kAssumedInputBlur)));
    } else {
      // Level s of the previous octave carries blur 2*base_sigma.
      octave.push_back(downsample_half(pyr.octaves.back()[params.scales_per_octave]));
    }
    for (int i = 1; i < levels; ++i) octave.push_back(gaussian_blur(octave.back(), increments[i]));
    pyr.octaves.push_back(std::move(octave));
  }
  return pyr;
}

DogPyramid build_dog(const GaussianPyramid& pyr) {
  DogPyramid dog;
  dog.params = pyr.params;
  for (const auto& octave : pyr.octaves) {
    std::vector<DogImage> levels;
    for (std::size_t i = 0; i + 1 < octave.size(); ++i) {
      const auto lo = octave[i].data();
      const auto hi = octave[i + 1].data();
      DogImage d{octave[i].width(), octave[i].height(), std::vector<double>(lo.size())};
      for (std::size_t p = 0; p < lo.size(); ++p) d.data[p] = hi[p] - lo[p];
      levels.push_back(std::move(d));
    }
    dog.octaves.push_back(std::move(levels));
  }
  return dog;
}

std::vector<RawKeypoint> detect_extrema(const DogPyramid& dog) {
  std::vector<RawKeypoint> out;
  const int s = dog.params.scales_per_octave;
  for (int o = 0; o < static_cast<int>(dog.octaves.size()); ++o) {
    const auto& levels = dog.octaves[o];
    for (int l = 1; l <= s && l + 1 < static_cast<int>(levels.size()); ++l) {
      const DogImage& below = levels[l - 1];
      const DogImage& cur = levels[l];
      const DogImage& above = levels[l + 1];
      for (int y = 1; y < cur.height - 1; ++y) {
        for (int x = 1; x < cur.width - 1; ++x) {
          const double v = cur.at(x, y);
          bool is_max = true;
          bool is_min = true;
          for (const DogImage* img : {&below, &cur, &above}) {
            for (int dy = -1; dy <= 1 && (is_max || is_min); ++dy) {
              for (int dx = -1; dx <= 1; ++dx) {
                if (img == &cur && dx == 0 && dy == 0) continue;
                const double n = img->at(x + dx, y + dy);
                if (!(v > n)) is_max = false;
                if (!(v < n)) is_min = false;
              }
            }
          }
          if (is_max || is_min) out.push_back({o, l, x, y, v});
        }
      }
    }
  }
  return out;
}

std::vector<RawKeypoint> filter_keypoints(std::span<const RawKeypoint> raw, const DogPyramid& dog,
                                          const ScaleSpaceParams& params) {
  const double r = params.edge_ratio;
  const double edge_bound = (r + 1.0) * (r + 1.0) / r;
  std::vector<RawKeypoint> out;
  for (const auto& kp : raw) {
    const DogImage& d = dog.octaves.at(kp.octave).at(kp.level);
    if (kp.x < 1 || kp.y < 1 || kp.x >= d.width - 1 || kp.y >= d.height - 1) continue;
    const double v = d.at(kp.x, kp.y);
    if (std::abs(v) < params.contrast_threshold) continue;

    const double dxx = d.at(kp.x + 1, kp.y) + d.at(kp.x - 1, kp.y) - 2.0 * v;
    const double dyy = d.at(kp.x, kp.y + 1) + d.at(kp.x, kp.y - 1) - 2.0 * v;
    const double dxy = (d.at(kp.x + 1, kp.y + 1) - d.at(kp.x + 1, kp.y - 1) -
                        d.at(kp.x - 1, kp.y + 1) + d.at(kp.x - 1, kp.y - 1)) /
                       4.0;
    const double tr = dxx + dyy;
    const double det = dxx * dyy - dxy * dxy;
    if (det <= 0.0 || tr * tr / det >= edge_bound) continue;
    out.push_back(kp);
  }
  return out;
}

Gradient gradient_at(const GrayImage& L, int x, int y) {
  if (x < 1 || y < 1 || x >= L.width() - 1 || y >= L.height() - 1) {
    throw Error(Errc::out_of_bounds, "gradient_at needs an interior pixel");
  }
  const double dx = L.at(x + 1, y) - L.at(x - 1, y);
  const double dy = L.at(x, y + 1) - L.at(x, y - 1);
  return {std::sqrt(dx * dx + dy * dy), wrap_angle(std::atan2(dy, dx))};
}

std::vector<OrientedKeypoint> assign_orientations(const GaussianPyramid& pyr,
                                                  std::span<const RawKeypoint> kps) {
  std::vector<OrientedKeypoint> out;
  for (const auto& kp : kps) {
    const GrayImage& L = pyr.octaves.at(kp.octave).at(kp.level);
    const double sigma = pyr.params.level_sigma(kp.level);
    const double radius = kOrientationRadiusFactor * sigma;
    const int r = static_cast<int>(std::ceil(radius));
    const double weight_sigma = kOrientationSigmaFactor * sigma;
    const double denom = 2.0 * weight_sigma * weight_sigma;

    std::array<double, kOrientationBins> hist{};
    double total = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx * dx + dy * dy > radius * radius) continue;
        const int px = kp.x + dx;
        const int py = kp.y + dy;
        if (px < 1 || py < 1 || px >= L.width() - 1 || py >= L.height() - 1) continue;
        const Gradient g = gradient_at(L, px, py);
        const double w = g.magnitude * std::exp(-(dx * dx + dy * dy) / denom);
        int bin = static_cast<int>(g.angle / kTwoPi * kOrientationBins);
        if (bin >= kOrientationBins) bin -= kOrientationBins;
        hist[bin] += w;
        total += w;
      }
    }
    if (!(total > 0.0)) continue;

    const double peak = *std::max_element(hist.begin(), hist.end());
    for (int b = 0; b < kOrientationBins; ++b) {
      const double left = hist[(b + kOrientationBins - 1) % kOrientationBins];
      const double right = hist[(b + 1) % kOrientationBins];
      const double c = hist[b];
      // Strict on the left, inclusive on the right: a two-bin plateau yields one peak.
      if (!(c > left && c >= right && c >= kOrientationPeakRatio * peak)) continue;
      const double curvature = left - 2.0 * c + right;
      const double offset = curvature != 0.0 ? 0.5 * (left - right) / curvature : 0.0;
      const double bin = b + 0.5 + offset;
      out.push_back({kp, wrap_angle(bin * kTwoPi / kOrientationBins)});
    }
  }
  return out;
}

std::vector<Keypoint> compute_descriptors(const GaussianPyramid& pyr,
                                          std::span<const OrientedKeypoint> kps) {
  std::vector<Keypoint> out;
  const double half = 0.5 * (kDescriptorSamples - 1);
  const double samples_per_cell = static_cast<double>(kDescriptorSamples) / kDescriptorWidth;
  const double weight_denom = 2.0 * kDescriptorWeightSigma * kDescriptorWeightSigma;

  for (const auto& okp : kps) {
    const RawKeypoint& kp = okp.raw;
    const GrayImage& L = pyr.octaves.at(kp.octave).at(kp.level);
    const double sigma = pyr.params.level_sigma(kp.level);
    const double spacing = kDescriptorCellWidth * sigma / samples_per_cell;
    const double c = std::cos(okp.orientation);
    const double s = std::sin(okp.orientation);

    std::array<double, kDescriptorSize> hist{};
    bool any_inside = false;
    for (int i = 0; i < kDescriptorSamples; ++i) {
      for (int j = 0; j < kDescriptorSamples; ++j) {
        const double u = (j - half) * spacing;
        const double v = (i - half) * spacing;
        const double px = kp.x + c * u - s * v;
        const double py = kp.y + s * u + c * v;
        if (px < 0.0 || py < 0.0 || px > L.width() - 1 || py > L.height() - 1) continue;
        any_inside = true;

        const auto [gx, gy] = gradient_bilinear(L, px, py);
        const double mag = std::sqrt(gx * gx + gy * gy);
        if (mag == 0.0) continue;
        const double weight =
            mag * std::exp(-((j - half) * (j - half) + (i - half) * (i - half)) / weight_denom);
        const double rel = wrap_angle(std::atan2(gy, gx) - okp.orientation);

        // Continuous bin coordinates; cell centres sit on integers.
        const double cx = (j - (samples_per_cell - 1) * 0.5) / samples_per_cell;
        const double cy = (i - (samples_per_cell - 1) * 0.5) / samples_per_cell;
        const double co = rel / kTwoPi * kDescriptorBins;
        const int x0 = static_cast<int>(std::floor(cx));
        const int y0 = static_cast<int>(std::floor(cy));
        const int o0 = static_cast<int>(std::floor(co));
        const double fx = cx - x0, fy = cy - y0, fo = co - o0;

        for (int dy = 0; dy <= 1; ++dy) {
          const int yy = y0 + dy;
          if (yy < 0 || yy >= kDescriptorWidth) continue;
          const double wy = dy ? fy : 1.0 - fy;
          for (int dx = 0; dx <= 1; ++dx) {
            const int xx = x0 + dx;
            if (xx < 0 || xx >= kDescriptorWidth) continue;
            const double wx = dx ? fx : 1.0 - fx;
            for (int dob = 0; dob <= 1; ++dob) {
              const int ob = (o0 + dob) % kDescriptorBins;
              const double wo = dob ? fo : 1.0 - fo;
              hist[(yy * kDescriptorWidth + xx) * kDescriptorBins + ob] += weight * wx * wy * wo;
            }
          }
        }
      }
    }
    if (!any_inside) continue;

    auto normalize = [&hist]() {
      double norm = 0.0;
      for (double v : hist) norm += v * v;
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) return false;
      for (double& v : hist) v /= norm;
      return true;
    };
    if (!normalize() || !clamp_unit(hist)) continue;

    const double scale = std::ldexp(1.0, kp.octave);
    Keypoint k;
    k.x = static_cast<float>(kp.x * scale);
    k.y = static_cast<float>(kp.y * scale);
    k.sigma = static_cast<float>(sigma * scale);
    k.orientation = static_cast<float>(okp.orientation);
    if (k.orientation >= static_cast<float>(kTwoPi)) k.orientation = 0.0f;
    k.response = static_cast<float>(std::abs(kp.response));
    for (std::size_t d = 0; d < kDescriptorSize; ++d) {
      k.descriptor[d] = static_cast<float>(hist[d]);
    }
    out.push_back(k);
  }
  return out;
}

std::vector<Keypoint> extract(const GrayImage& img, const ScaleSpaceParams& params) {
  ScaleSpaceParams p = params;
  p.octaves = std::min(p.octaves, max_octaves(img.width(), img.height()));
  const GaussianPyramid pyr = build_gaussian_pyramid(img, p);
  const DogPyramid dog = build_dog(pyr);
  const auto raw = detect_extrema(dog);
  const auto kept = filter_keypoints(raw, dog, p);
  const auto oriented = assign_orientations(pyr, kept);
  auto kps = compute_descriptors(pyr, oriented);
  std::sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.response != b.response) return a.response > b.response;
    return std::tie(a.y, a.x, a.sigma, a.orientation) < std::tie(b.y, b.x, b.sigma, b.orientation);
  });
  return kps;
}

double descriptor_distance(const Keypoint& a, const Keypoint& b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < kDescriptorSize; ++i) {
    const double d = static_cast<double>(a.descriptor[i]) - b.descriptor[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<KeypointMatch> match_keypoints(std::span<const Keypoint> a, std::span<const Keypoint> b,
                                           double max_distance, double ratio) {
  std::vector<KeypointMatch> out;
  if (a.empty() || b.empty()) return out;

  std::vector<double> dist(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) dist[i * b.size() + j] = descriptor_distance(a[i], b[j]);
  }
  std::vector<std::size_t> best_a_for_b(b.size(), 0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (std::size_t i = 1; i < a.size(); ++i) {
      if (dist[i * b.size() + j] < dist[best_a_for_b[j] * b.size() + j]) best_a_for_b[j] = i;
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = dist[i * b.size() + j];
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = j;
      } else if (d < d2) {
        d2 = d;
      }
    }
    if (d1 >= max_distance) continue;
    if (std::isfinite(d2) && !(d1 < ratio * d2)) continue;
    if (best_a_for_b[best] != i) continue;
    out.push_back({i, best, d1});
  }
  return out;
}

void save_keypoints(std::span<const Keypoint> kps, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  out << std::setprecision(9);
  for (const auto& k : kps) {
    out << k.x << ' ' << k.y << ' ' << k.sigma << ' ' << k.orientation;
    for (float d : k.descriptor) out << ' ' << d;
    out << '\n';
  }
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

std::vector<Keypoint> load_keypoints(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());
  std::vector<Keypoint> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    Keypoint k;
    fields >> k.x >> k.y >> k.sigma >> k.orientation;
    for (float& d : k.descriptor) fields >> d;
    std::string extra;
    if (!fields || (fields >> extra)) {
      throw Error(Errc::malformed_file,
                  path.string() + ":" + std::to_string(line_no) + ": expected 132 fields");
    }
    out.push_back(k);
  }
  return out;
}

RgbImage render_keypoints(const GrayImage& base, std::span<const Keypoint> kps) {
  RgbImage out(base.width(), base.height());
  for (int y = 0; y < base.height(); ++y) {
    for (int x = 0; x < base.width(); ++x) {
      const auto v = static_cast<std::uint8_t>(std::lround(base.at(x, y) * 255.0));
      out.set(x, y, v, v, v);
    }
  }
  auto plot = [&out](double x, double y) {
    const int xi = static_cast<int>(std::lround(x));
    const int yi = static_cast<int>(std::lround(y));
    if (out.contains(xi, yi)) out.set(xi, yi, 255, 0, 0);
  };
  for (const auto& k : kps) {
    const double len = std::max(4.0, 3.0 * k.sigma);
    const double ex = k.x + len * std::cos(k.orientation);
    const double ey = k.y + len * std::sin(k.orientation);
    const int steps = static_cast<int>(std::ceil(len)) * 2;
    for (int t = 0; t <= steps; ++t) {
      const double f = static_cast<double>(t) / steps;
      plot(k.x + f * (ex - k.x), k.y + f * (ey - k.y));
    }
    // Arrow head.
    for (double side : {2.6, -2.6}) {
      const double hx = ex + 0.3 * len * std::cos(k.orientation + side);
      const double hy = ey + 0.3 * len * std::sin(k.orientation + side);
      for (int t = 0; t <= steps / 2; ++t) {
        const double f = static_cast<double>(t) / (steps / 2);
        plot(ex + f * (hx - ex), ey + f * (hy - ey));
      }
    }
  }
  return out;
}

}  // namespace gsift
