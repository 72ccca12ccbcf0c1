#include "gsift/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include "gsift/error.hpp"
#include "gsift/pnm.hpp"

namespace gsift {

namespace fs = std::filesystem;

std::string PipelineConfig::fingerprint() const {
  std::ostringstream out;
  out.precision(17);
  out << "skin " << skin.hue_min << ' ' << skin.hue_max << ' ' << skin.saturation_min << ' '
      << skin.saturation_max << ' ' << skin.value_min << ' ' << skin.value_max << ";area " << min_area
      << ";detect " << detect.threshold << ' ' << detect.stride << ' ' << detect.nms_overlap;
  for (double s : detect.scales) out << ' ' << s;
  out << ";sift " << sift.octaves << ' ' << sift.scales_per_octave << ' ' << sift.base_sigma << ' '
      << sift.contrast_threshold << ' ' << sift.edge_ratio << ";slots " << slots << ";side "
      << template_side;
  return out.str();
}

FaceBox centered_square(const RoiBox& roi) {
  const int side = std::min(roi.w, roi.h);
  FaceBox b;
  b.x = roi.x + (roi.w - side) / 2;
  b.y = roi.y + (roi.h - side) / 2;
  b.w = side;
  b.h = side;
  return b;
}

namespace {

std::optional<RoiBox> largest_roi(std::span<const RoiBox> rois) {
  if (rois.empty()) return std::nullopt;
  // First maximum in (y, x) order.
  return *std::max_element(rois.begin(), rois.end(),
                           [](const RoiBox& a, const RoiBox& b) { return a.area < b.area; });
}

}  // namespace

FaceLocation locate_face(const RgbImage& img, const FaceTemplate* templ, const PipelineConfig& cfg) {
  const auto rois = extract_rois(skin_mask(img, cfg.skin), cfg.min_area);
  if (templ != nullptr && !rois.empty()) {
    const auto faces = detect_faces(img, *templ, rois, cfg.detect);
    if (!faces.empty()) return {faces.front(), true};
  }
  if (const auto roi = largest_roi(rois)) return {centered_square(*roi), false};
  return {centered_square(RoiBox{0, 0, img.width(), img.height(),
                                 static_cast<long>(img.width()) * img.height()}),
          false};
}

FaceAnalysis analyze_face(const RgbImage& img, const FaceTemplate* templ, const PipelineConfig& cfg,
                          std::string source) {
  FaceAnalysis out{locate_face(img, templ, cfg), {GrayImage(1, 1), {}, {}}, {}, {}};
  out.face = crop_face(img, out.location.box, std::move(source));
  out.keypoints = extract(out.face.gray, cfg.sift);
  out.features = encode(select_keypoints(out.keypoints, cfg.slots), cfg.slots);
  return out;
}

FaceTemplate template_from_images(std::span<const RgbImage> images, const PipelineConfig& cfg) {
  std::vector<GrayImage> windows;
  for (const auto& img : images) {
    const auto rois = extract_rois(skin_mask(img, cfg.skin), cfg.min_area);
    const auto roi = largest_roi(rois);
    if (!roi) continue;
    const FaceBox b = centered_square(*roi);
    windows.push_back(crop(to_gray(img), b.x, b.y, b.w, b.h));
  }
  if (windows.empty()) throw Error(Errc::empty_input, "no skin region found in any template source");
  return build_template(windows, cfg.template_side);
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t h) noexcept {
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

FeatureCache::FeatureCache(std::optional<fs::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    std::error_code ec;
    fs::create_directories(*dir_, ec);
    if (ec) throw Error(Errc::io_error, "cannot create cache directory " + dir_->string());
  }
}

std::size_t FeatureCache::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::size_t FeatureCache::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

FeatureVector FeatureCache::get_or_compute(const fs::path& image, const FaceTemplate* templ,
                                           const PipelineConfig& cfg) {
  std::ifstream in(image, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, image.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  std::uint64_t key = fnv1a64(bytes);
  const std::string fp = cfg.fingerprint();
  key = fnv1a64({reinterpret_cast<const std::uint8_t*>(fp.data()), fp.size()}, key);
  if (templ != nullptr) {
    const auto px = templ->data.data();
    key = fnv1a64({reinterpret_cast<const std::uint8_t*>(px.data()), px.size_bytes()}, key);
  }

  char name[40];
  std::snprintf(name, sizeof name, "%016llx.gsfv", static_cast<unsigned long long>(key));
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++hits_;
      return it->second;
    }
  }
  if (dir_ && fs::exists(*dir_ / name)) {
    FeatureVector fv = load_features(*dir_ / name);
    std::lock_guard lock(mu_);
    ++hits_;
    memo_.emplace(key, fv);
    return fv;
  }

  FeatureVector fv = analyze_face(load_ppm(image), templ, cfg, image.string()).features;
  if (dir_) {
    // Write-then-rename so concurrent readers never see a partial file.
    const fs::path tmp = *dir_ / (std::string(name) + ".tmp" +
                                  std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
    save_features(fv, tmp);
    std::error_code ec;
    fs::rename(tmp, *dir_ / name, ec);
    if (ec) fs::remove(tmp, ec);
  }
  std::lock_guard lock(mu_);
  ++misses_;
  memo_.emplace(key, fv);
  return fv;
}

std::vector<FeatureVector> dataset_features(const Dataset& ds, const FaceTemplate* templ,
                                            const PipelineConfig& cfg, FeatureCache& cache,
                                            unsigned threads) {
  std::vector<FeatureVector> out(ds.items.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < ds.items.size(); i = next++) {
      try {
        out[i] = cache.get_or_compute(ds.items[i].path, templ, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ds.items.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace gsift
