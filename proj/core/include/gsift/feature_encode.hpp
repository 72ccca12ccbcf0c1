#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "gsift/sift.hpp"

namespace gsift {

inline constexpr std::size_t kDefaultSlots = 150;

/// Fixed-length face descriptor: `slots` keypoint descriptors laid end to
/// end, unused slots zero.
struct FeatureVector {
  std::vector<float> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Strongest `n` keypoints by response (ties by y, x, sigma), returned in
/// (y, x) order so slot position follows face geometry.
std::vector<Keypoint> select_keypoints(std::span<const Keypoint> kps, std::size_t n = kDefaultSlots);

/// Slot i holds the descriptor of kps[i]. Throws if more than `n` keypoints.
FeatureVector encode(std::span<const Keypoint> kps, std::size_t n = kDefaultSlots);

/// "GSFV1 <len>" header, then one value per line with 9 significant digits.
void save_features(const FeatureVector& fv, const std::filesystem::path& path);
FeatureVector load_features(const std::filesystem::path& path);

}  // namespace gsift
