#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gsift {

inline constexpr int kMaleLabel = 1;
inline constexpr int kFemaleLabel = -1;

const char* label_name(int label) noexcept;

struct DatasetItem {
  std::filesystem::path path;
  int label = kMaleLabel;
};

struct Dataset {
  std::vector<DatasetItem> items;

  std::size_t size() const noexcept { return items.size(); }
  std::size_t count(int label) const noexcept;
};

/// Reads root/male/*.ppm and root/female/*.ppm, sorted by path.
Dataset load_dataset(const std::filesystem::path& root);

/// Indices into Dataset::items, each list ascending.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per class: shuffle that class's items (in dataset order) with a
/// splitmix64 stream seeded by derive_seed(seed, male ? 1 : 0), then send
/// the first round(count * test_fraction) to the test side.
Split stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/// Percentage of positions where prediction and label agree.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

}  // namespace gsift
