#include "gsift/face_detect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "gsift/error.hpp"
#include "gsift/pnm.hpp"

namespace gsift {

FaceTemplate build_template(std::span<const GrayImage> faces, int side) {
  if (faces.empty()) throw Error(Errc::empty_input, "build_template needs at least one face");
  if (side < 16) throw Error(Errc::invalid_argument, "template side must be at least 16");

  std::vector<double> acc(static_cast<std::size_t>(side) * side, 0.0);
  for (const auto& face : faces) {
    const GrayImage resized = resize_bilinear(face, side, side);
    const auto px = resized.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += px[i];
  }
  const double n = static_cast<double>(faces.size());
  for (double& v : acc) v = std::clamp(v / n, 0.0, 1.0);
  return {side, GrayImage(side, side, std::move(acc)), static_cast<int>(faces.size())};
}

double ncc_score(const GrayImage& window, const GrayImage& templ) {
  if (window.width() != templ.width() || window.height() != templ.height()) {
    throw Error(Errc::dimension_mismatch, "ncc window and template sizes differ");
  }
  const auto a = window.data();
  const auto b = templ.data();
  const double n = static_cast<double>(a.size());

  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;

  double cross = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cross += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  // Constant inputs leave only rounding residue in the variances.
  constexpr double kMinVariance = 1e-20;
  if (var_a <= kMinVariance * n || var_b <= kMinVariance * n) return 0.0;
  return std::clamp(cross / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double ncc_score(const GrayImage& window, const FaceTemplate& templ) {
  return ncc_score(window, templ.data);
}

double overlap(const FaceBox& a, const FaceBox& b) noexcept {
  const int ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const int iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = static_cast<double>(ix) * iy;
  const double uni = static_cast<double>(a.w) * a.h + static_cast<double>(b.w) * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

bool by_score(const FaceBox& a, const FaceBox& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.y, a.x, a.w, a.h) < std::tie(b.y, b.x, b.w, b.h);
}

void scan_roi(const GrayImage& gray, const FaceTemplate& templ, const RoiBox& roi, double scale,
              const DetectParams& params, std::vector<FaceBox>& out) {
  const int side = templ.side;
  const int win = static_cast<int>(std::lround(scale * std::min(roi.w, roi.h)));
  if (win < 4 || win > gray.width() || win > gray.height()) return;

  // Search region: the ROI grown to at least one window per axis, kept inside the image.
  auto fit = [](int start, int len, int need, int limit) {
    if (len < need) {
      start -= (need - len) / 2;
      len = need;
    }
    start = std::clamp(start, 0, std::max(0, limit - len));
    len = std::min(len, limit - start);
    return std::pair{start, len};
  };
  const auto [rx, rw] = fit(roi.x, roi.w, win, gray.width());
  const auto [ry, rh] = fit(roi.y, roi.h, win, gray.height());

  const double f = static_cast<double>(side) / win;
  const int sw = std::max(side, static_cast<int>(std::lround(rw * f)));
  const int sh = std::max(side, static_cast<int>(std::lround(rh * f)));
  const GrayImage region = resize_bilinear(crop(gray, rx, ry, rw, rh), sw, sh);

  const int stride = std::max(1, params.stride);
  const int nx = (sw - side) / stride + 1;
  const int ny = (sh - side) / stride + 1;
  std::vector<double> scores(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      scores[static_cast<std::size_t>(j) * nx + i] =
          ncc_score(crop(region, i * stride, j * stride, side, side), templ.data);
    }
  }

  const double back = static_cast<double>(win) / side;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double s = scores[static_cast<std::size_t>(j) * nx + i];
      if (!(s > params.threshold)) continue;
      bool is_max = true;
      for (int dj = -1; dj <= 1 && is_max; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
          if (scores[static_cast<std::size_t>(jj) * nx + ii] > s) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      FaceBox box;
      box.x = rx + static_cast<int>(std::lround(i * stride * back));
      box.y = ry + static_cast<int>(std::lround(j * stride * back));
      box.w = win;
      box.h = win;
      box.x = std::clamp(box.x, 0, gray.width() - win);
      box.y = std::clamp(box.y, 0, gray.height() - win);
      box.score = s;
      out.push_back(box);
    }
  }
}

}  // namespace

std::vector<FaceBox> detect_faces(const RgbImage& img, const FaceTemplate& templ,
                                  std::span<const RoiBox> rois, const DetectParams& params) {
  if (!(params.threshold > 0.0 && params.threshold <= 1.0)) {
    throw Error(Errc::invalid_argument, "detection threshold must lie in (0,1]");
  }
  const GrayImage gray = to_gray(img);
  std::vector<FaceBox> candidates;
  for (const auto& roi : rois) {
    for (double scale : params.scales) scan_roi(gray, templ, roi, scale, params, candidates);
  }

  std::sort(candidates.begin(), candidates.end(), by_score);
  std::vector<FaceBox> kept;
  for (const auto& c : candidates) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const FaceBox& k) {
      return overlap(c, k) > params.nms_overlap;
    });
    if (!suppressed) kept.push_back(c);
  }
  return kept;
}

FaceImage crop_face(const RgbImage& img, const FaceBox& box, std::string source) {
  if (box.w < 1 || box.h < 1 || box.x < 0 || box.y < 0 || box.x + box.w > img.width() ||
      box.y + box.h > img.height()) {
    throw Error(Errc::out_of_bounds, "face box outside image");
  }
  const GrayImage gray = crop(to_gray(img), box.x, box.y, box.w, box.h);
  return {resize_bilinear(gray, kFaceSide, kFaceSide), std::move(source), box};
}

std::filesystem::path template_sidecar_path(const std::filesystem::path& pgm_path) {
  return pgm_path.string() + ".txt";
}

void save_template(const FaceTemplate& templ, const std::filesystem::path& pgm_path) {
  save_pgm(templ.data, pgm_path);
  std::ofstream side(template_sidecar_path(pgm_path), std::ios::trunc);
  if (!side) throw Error(Errc::io_error, "cannot write template sidecar for " + pgm_path.string());
  side << "GSTPL1 " << templ.side << ' ' << templ.n_sources << '\n';
  if (!side) throw Error(Errc::io_error, "template sidecar write failed");
}

FaceTemplate load_template(const std::filesystem::path& pgm_path) {
  const auto sidecar = template_sidecar_path(pgm_path);
  std::ifstream in(sidecar);
  if (!in) throw Error(Errc::missing_file, sidecar.string());
  std::string line;
  std::getline(in, line);
  std::istringstream fields(line);
  std::string magic;
  int side = 0, n_sources = 0;
  fields >> magic;
  if (magic != "GSTPL1") throw Error(Errc::version_mismatch, sidecar.string() + ": expected GSTPL1");
  if (!(fields >> side >> n_sources) || side < 16 || n_sources < 1) {
    throw Error(Errc::malformed_file, sidecar.string() + ": bad template sidecar");
  }
  GrayImage data = load_pgm(pgm_path);
  if (data.width() != side || data.height() != side) {
    throw Error(Errc::dimension_mismatch, pgm_path.string() + ": template size disagrees with sidecar");
  }
  return {side, std::move(data), n_sources};
}

}  // namespace gsift
