#pragma once

#include <filesystem>

#include "gsift/image.hpp"

namespace gsift {

// Binary netpbm codecs (P6 colour, P5 gray), maxval 255 only. Headers may
// carry '#' comments; writers emit the canonical "Pn\nW H\n255\n" header.

RgbImage load_ppm(const std::filesystem::path& path);
GrayImage load_pgm(const std::filesystem::path& path);

void save_ppm(const RgbImage& img, const std::filesystem::path& path);
/// Samples are quantized as round(v * 255).
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Loads either a P6 or P5 file as grayscale (P6 via to_gray).
GrayImage load_gray_any(const std::filesystem::path& path);

}  // namespace gsift
