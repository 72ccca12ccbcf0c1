#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsift/colorspace.hpp"
#include "gsift/dataset.hpp"
#include "gsift/face_detect.hpp"
#include "gsift/feature_encode.hpp"
#include "gsift/sift.hpp"

namespace gsift {

/// Every knob of the image -> feature vector path.
struct PipelineConfig {
  SkinThresholds skin;
  long min_area = kDefaultMinRoiArea;
  DetectParams detect;
  ScaleSpaceParams sift;
  std::size_t slots = kDefaultSlots;
  int template_side = kDefaultTemplateSide;

  /// Stable text rendering of all fields; part of cache keys.
  std::string fingerprint() const;
};

struct FaceLocation {
  FaceBox box;
  /// False when the box is a fallback (no detection above threshold).
  bool detected = false;
};

/// Square window of side min(w, h) centred in the ROI.
FaceBox centered_square(const RoiBox& roi);

/// Best template match over the skin ROIs. Falls back to the centred square
/// of the largest ROI, then to the centred square of the whole image.
FaceLocation locate_face(const RgbImage& img, const FaceTemplate* templ, const PipelineConfig& cfg);

struct FaceAnalysis {
  FaceLocation location;
  FaceImage face;
  std::vector<Keypoint> keypoints;
  FeatureVector features;
};

FaceAnalysis analyze_face(const RgbImage& img, const FaceTemplate* templ, const PipelineConfig& cfg,
                          std::string source = {});

/// Label-free template: mean of the centred squares of each image's largest
/// skin ROI (images without a ROI contribute nothing).
FaceTemplate template_from_images(std::span<const RgbImage> images, const PipelineConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;

/// Feature vectors keyed by (file bytes, pipeline fingerprint, template
/// bytes). Always memoizes in memory; persists GSFV1 files when a directory
/// is given. Thread-safe.
class FeatureCache {
 public:
  explicit FeatureCache(std::optional<std::filesystem::path> dir = std::nullopt);

  FeatureVector get_or_compute(const std::filesystem::path& image, const FaceTemplate* templ,
                               const PipelineConfig& cfg);

  std::size_t hits() const;
  std::size_t misses() const;

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  std::map<std::uint64_t, FeatureVector> memo_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

/// Feature vectors for every dataset item, in item order. Work is spread
/// over `threads` workers; results do not depend on the thread count.
std::vector<FeatureVector> dataset_features(const Dataset& ds, const FaceTemplate* templ,
                                            const PipelineConfig& cfg, FeatureCache& cache,
                                            unsigned threads = 1);

}  // namespace gsift
