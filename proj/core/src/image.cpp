#include "gsift/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsift/error.hpp"

namespace gsift {

namespace {

void require_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(Errc::invalid_argument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

}  // namespace

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
  require_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height * 3, 0);
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(Errc::dimension_mismatch, "RGB payload length does not match dimensions");
  }
}

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
  require_dims(width, height);
  if (!std::isfinite(fill) || fill < 0.0 || fill > 1.0) {
    throw Error(Errc::invalid_argument, "gray fill value outside [0,1]");
  }
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(Errc::dimension_mismatch, "gray payload length does not match dimensions");
  }
  for (double v : data_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(Errc::invalid_argument, "gray sample outside [0,1]");
    }
  }
}

void GrayImage::set(int x, int y, double v) noexcept {
  data_[static_cast<std::size_t>(y) * width_ + x] = std::clamp(v, 0.0, 1.0);
}

GrayImage to_gray(const RgbImage& img) {
  std::vector<double> out(static_cast<std::size_t>(img.width()) * img.height());
  const auto src = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int sum = src[3 * i] + src[3 * i + 1] + src[3 * i + 2];
    out[i] = static_cast<double>(sum) / (3.0 * 255.0);
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::invalid_argument, "gaussian sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[i + radius] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width();
  const int h = img.height();
  const auto src = img.data();

  std::vector<double> tmp(src.size());
  for (int y = 0; y < h; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int xx = std::clamp(x + k, 0, w - 1);
        acc += kernel[k + radius] * row[xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }

  std::vector<double> out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int yy = std::clamp(y + k, 0, h - 1);
        acc += kernel[k + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = std::clamp(acc, 0.0, 1.0);
    }
  }
  return GrayImage(w, h, std::move(out));
}

GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1) {
    throw Error(Errc::invalid_argument, "resize target dimensions must be positive");
  }
  const int w = img.width();
  const int h = img.height();
  if (new_width == w && new_height == h) return img;

  const double sx = new_width > 1 ? static_cast<double>(w - 1) / (new_width - 1) : 0.0;
  const double sy = new_height > 1 ? static_cast<double>(h - 1) / (new_height - 1) : 0.0;

  std::vector<double> out(static_cast<std::size_t>(new_width) * new_height);
  for (int y = 0; y < new_height; ++y) {
    const double fy = y * sy;
    const int y0 = std::min(static_cast<int>(fy), h - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double ty = fy - y0;
    for (int x = 0; x < new_width; ++x) {
      const double fx = x * sx;
      const int x0 = std::min(static_cast<int>(fx), w - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const double tx = fx - x0;
      const double top = img.at(x0, y0) * (1.0 - tx) + img.at(x1, y0) * tx;
      const double bottom = img.at(x0, y1) * (1.0 - tx) + img.at(x1, y1) * tx;
      out[static_cast<std::size_t>(y) * new_width + x] =
          std::clamp(top * (1.0 - ty) + bottom * ty, 0.0, 1.0);
    }
  }
  return GrayImage(new_width, new_height, std::move(out));
}

GrayImage downsample_half(const GrayImage& img) {
  if (img.width() < 2 || img.height() < 2) {
    throw Error(Errc::image_too_small, "downsample_half needs at least a 2x2 image");
  }
  const int w = img.width() / 2;
  const int h = img.height() / 2;
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out[static_cast<std::size_t>(y) * w + x] = img.at(2 * x, 2 * y);
    }
  }
  return GrayImage(w, h, std::move(out));
}

GrayImage crop(const GrayImage& img, int x, int y, int w, int h) {
  if (w < 1 || h < 1 || x < 0 || y < 0 || x + w > img.width() || y + h > img.height()) {
    throw Error(Errc::out_of_bounds, "crop rectangle outside image");
  }
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      out[static_cast<std::size_t>(yy) * w + xx] = img.at(x + xx, y + yy);
    }
  }
  return GrayImage(w, h, std::move(out));
}

GrayImage quantize_8bit(const GrayImage& img) {
  std::vector<double> out(img.data().begin(), img.data().end());
  for (double& v : out) v = std::round(v * 255.0) / 255.0;
  return GrayImage(img.width(), img.height(), std::move(out));
}

}  // namespace gsift
