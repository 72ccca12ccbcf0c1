#include "gsift/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "gsift/error.hpp"
#include "gsift/rng.hpp"

namespace gsift {

namespace fs = std::filesystem;

const char* label_name(int label) noexcept { return label > 0 ? "male" : "female"; }

std::size_t Dataset::count(int label) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      items.begin(), items.end(), [label](const DatasetItem& it) { return it.label == label; }));
}

Dataset load_dataset(const fs::path& root) {
  Dataset ds;
  for (int label : {kMaleLabel, kFemaleLabel}) {
    const fs::path dir = root / label_name(label);
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      throw Error(Errc::missing_file, "dataset directory missing: " + dir.string());
    }
    std::size_t found = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".ppm") continue;
      std::ifstream probe(entry.path(), std::ios::binary);
      if (!probe) throw Error(Errc::io_error, "unreadable dataset file: " + entry.path().string());
      ds.items.push_back({entry.path(), label});
      ++found;
    }
    if (found == 0) throw Error(Errc::empty_input, "no .ppm images in " + dir.string());
  }
  std::sort(ds.items.begin(), ds.items.end(),
            [](const DatasetItem& a, const DatasetItem& b) { return a.path < b.path; });
  return ds;
}

Split stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(Errc::invalid_argument, "test fraction must lie strictly between 0 and 1");
  }
  Split split;
  for (int label : {kMaleLabel, kFemaleLabel}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
      if (ds.items[i].label == label) members.push_back(i);
    }
    const auto n_test = static_cast<std::size_t>(std::llround(members.size() * test_fraction));
    if (members.empty() || n_test == 0 || n_test >= members.size()) {
      throw Error(Errc::degenerate_split,
                  std::string(label_name(label)) + ": " + std::to_string(members.size()) +
                      " items cannot be split with test fraction " + std::to_string(test_fraction));
    }
    SplitMix64 rng(derive_seed(seed, label > 0 ? 1 : 0));
    shuffle(std::span<std::size_t>(members), rng);
    split.test.insert(split.test.end(), members.begin(),
                      members.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test),
                       members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(Errc::dimension_mismatch, "prediction and label counts differ");
  }
  if (predictions.empty()) throw Error(Errc::empty_input, "accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace gsift
