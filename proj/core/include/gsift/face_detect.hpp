#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gsift/colorspace.hpp"
#include "gsift/image.hpp"

namespace gsift {

inline constexpr int kDefaultTemplateSide = 64;
inline constexpr int kFaceSide = 128;

/// Mean grayscale face used for template matching.
struct FaceTemplate {
  int side;
  GrayImage data;
  int n_sources;
};

/// Averages `faces` after resizing each to side x side. Throws on an empty
/// list or side < 16.
FaceTemplate build_template(std::span<const GrayImage> faces, int side = kDefaultTemplateSide);

/// Zero-mean normalized cross-correlation in [-1,1]. Returns 0 when either
/// argument has (numerically) zero variance.
double ncc_score(const GrayImage& window, const GrayImage& templ);
double ncc_score(const GrayImage& window, const FaceTemplate& templ);

struct FaceBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  double score = 0.0;
};

/// Intersection over union of two boxes.
double overlap(const FaceBox& a, const FaceBox& b) noexcept;

struct DetectParams {
  double threshold = 0.5;
  /// Window side relative to the ROI's shorter side.
  std::vector<double> scales{0.8, 1.0, 1.25};
  /// Scan stride in template pixels.
  int stride = 4;
  /// Boxes overlapping a stronger one by more than this IoU are suppressed.
  double nms_overlap = 0.3;
};

/// Scans every ROI at each scale with template-sized windows, keeps local
/// score maxima above the threshold and applies greedy non-maximum
/// suppression. Result is sorted by descending score, then (y, x).
std::vector<FaceBox> detect_faces(const RgbImage& img, const FaceTemplate& templ,
                                  std::span<const RoiBox> rois, const DetectParams& params = {});

struct FaceImage {
  GrayImage gray;
  std::string source;
  FaceBox box;
};

/// Grayscale crop of `box`, resized to kFaceSide x kFaceSide.
FaceImage crop_face(const RgbImage& img, const FaceBox& box, std::string source = {});

/// Writes `pgm_path` (8-bit quantized template) and the sidecar
/// `<pgm_path>.txt` holding "GSTPL1 side n_sources".
void save_template(const FaceTemplate& templ, const std::filesystem::path& pgm_path);
FaceTemplate load_template(const std::filesystem::path& pgm_path);
std::filesystem::path template_sidecar_path(const std::filesystem::path& pgm_path);

}  // namespace gsift
