#include "gsift/feature_encode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>
#include <tuple>

#include "gsift/error.hpp"

namespace gsift {

std::vector<Keypoint> select_keypoints(std::span<const Keypoint> kps, std::size_t n) {
  if (n < 1) throw Error(Errc::invalid_argument, "slot count must be at least 1");
  std::vector<Keypoint> sorted(kps.begin(), kps.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.response != b.response) return a.response > b.response;
    return std::tie(a.y, a.x, a.sigma) < std::tie(b.y, b.x, b.sigma);
  });
  if (sorted.size() > n) sorted.resize(n);
  std::stable_sort(sorted.begin(), sorted.end(), [](const Keypoint& a, const Keypoint& b) {
    return std::tie(a.y, a.x, a.sigma, a.orientation) < std::tie(b.y, b.x, b.sigma, b.orientation);
  });
  return sorted;
}

FeatureVector encode(std::span<const Keypoint> kps, std::size_t n) {
  if (kps.size() > n) {
    throw Error(Errc::invalid_argument, std::to_string(kps.size()) + " keypoints exceed " +
                                            std::to_string(n) + " slots; select first");
  }
  FeatureVector fv;
  fv.values.assign(n * kDescriptorSize, 0.0f);
  for (std::size_t i = 0; i < kps.size(); ++i) {
    std::copy(kps[i].descriptor.begin(), kps[i].descriptor.end(),
              fv.values.begin() + static_cast<std::ptrdiff_t>(i * kDescriptorSize));
  }
  return fv;
}

void save_features(const FeatureVector& fv, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  out << "GSFV1 " << fv.size() << '\n' << std::setprecision(9);
  for (float v : fv.values) out << v << '\n';
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

FeatureVector load_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());
  std::string magic;
  std::size_t len = 0;
  in >> magic;
  if (magic != "GSFV1") throw Error(Errc::version_mismatch, path.string() + ": expected GSFV1");
  if (!(in >> len) || len == 0) throw Error(Errc::malformed_file, path.string() + ": bad length");
  FeatureVector fv;
  fv.values.resize(len);
  for (float& v : fv.values) {
    if (!(in >> v) || !std::isfinite(v)) {
      throw Error(Errc::malformed_file, path.string() + ": truncated or non-finite value");
    }
  }
  std::string extra;
  if (in >> extra) throw Error(Errc::malformed_file, path.string() + ": trailing data");
  return fv;
}

}  // namespace gsift
