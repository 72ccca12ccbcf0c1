#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "gsift/image.hpp"

namespace gsift {

/// Blur already present in an input image, in pixels. Level 0 of the first
/// octave is blurred from this up to base_sigma.
inline constexpr double kAssumedInputBlur = 0.5;
inline constexpr std::size_t kDescriptorSize = 128;
/// Smallest side any octave may have.
inline constexpr int kMinOctaveSide = 8;

struct ScaleSpaceParams {
  int octaves = 4;
  int scales_per_octave = 3;
  double base_sigma = 1.6;
  /// On DoG values of [0,1] images.
  double contrast_threshold = 0.03;
  /// Principal-curvature ratio bound for the edge test.
  double edge_ratio = 10.0;

  /// Scale step between adjacent levels, 2^(1/s).
  double k() const;
  /// Within-octave blur of Gaussian level `level`.
  double level_sigma(int level) const;
  void validate() const;
};

/// Signed real raster used for difference-of-Gaussian levels.
struct DogImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  double at(int x, int y) const noexcept {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

struct GaussianPyramid {
  ScaleSpaceParams params;
  /// octaves[o] holds s+3 levels with within-octave blur base_sigma * k^i.
  std::vector<std::vector<GrayImage>> octaves;
};

struct DogPyramid {
  ScaleSpaceParams params;
  /// octaves[o][i] = L[o][i+1] - L[o][i]; s+2 levels per octave.
  std::vector<std::vector<DogImage>> octaves;
};

struct RawKeypoint {
  int octave = 0;
  int level = 0;
  int x = 0;
  int y = 0;
  double response = 0.0;
};

struct OrientedKeypoint {
  RawKeypoint raw;
  double orientation = 0.0;
};

struct Keypoint {
  float x = 0.0f;
  float y = 0.0f;
  float sigma = 0.0f;
  /// Radians in [0, 2pi).
  float orientation = 0.0f;
  /// |DoG| at detection.
  float response = 0.0f;
  std::array<float, kDescriptorSize> descriptor{};
};

struct Gradient {
  double magnitude = 0.0;
  /// Radians in [0, 2pi).
  double angle = 0.0;
};

/// Largest octave count that keeps every octave at least kMinOctaveSide.
int max_octaves(int width, int height);

GaussianPyramid build_gaussian_pyramid(const GrayImage& img, const ScaleSpaceParams& params = {});
DogPyramid build_dog(const GaussianPyramid& pyr);

/// Strict 26-neighbourhood extrema on DoG levels 1..s, border pixels
/// excluded, sorted by (octave, level, y, x).
std::vector<RawKeypoint> detect_extrema(const DogPyramid& dog);

/// Drops low-contrast points and points whose 2x2 DoG Hessian signals an
/// edge (Tr^2/Det >= (r+1)^2/r) or a saddle (Det <= 0).
std::vector<RawKeypoint> filter_keypoints(std::span<const RawKeypoint> raw, const DogPyramid& dog,
                                          const ScaleSpaceParams& params);

/// Central-difference gradient. Throws for border pixels.
Gradient gradient_at(const GrayImage& L, int x, int y);

std::vector<OrientedKeypoint> assign_orientations(const GaussianPyramid& pyr,
                                                  std::span<const RawKeypoint> kps);

std::vector<Keypoint> compute_descriptors(const GaussianPyramid& pyr,
                                          std::span<const OrientedKeypoint> kps);

/// Whole pipeline. Octave count is capped by max_octaves() for small
/// images. Output is ordered by (response desc, y, x, orientation).
std::vector<Keypoint> extract(const GrayImage& img, const ScaleSpaceParams& params = {});

double descriptor_distance(const Keypoint& a, const Keypoint& b) noexcept;

struct KeypointMatch {
  std::size_t a = 0;
  std::size_t b = 0;
  double distance = 0.0;
};

/// Mutual nearest neighbours under Euclidean descriptor distance that pass
/// an absolute distance bound and the nearest/second-nearest ratio test.
std::vector<KeypointMatch> match_keypoints(std::span<const Keypoint> a, std::span<const Keypoint> b,
                                           double max_distance = 0.35, double ratio = 0.8);

/// Text dump, one keypoint per line: "x y sigma orientation d0 ... d127",
/// 9 significant digits. The response is not stored and loads as 0.
void save_keypoints(std::span<const Keypoint> kps, const std::filesystem::path& path);
std::vector<Keypoint> load_keypoints(const std::filesystem::path& path);

/// Gray image with one red arrow per keypoint (length ~ scale, along the
/// orientation).
RgbImage render_keypoints(const GrayImage& base, std::span<const Keypoint> kps);

}  // namespace gsift
