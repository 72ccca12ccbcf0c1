#pragma once

#include <cstdint>
#include <filesystem>

#include "gsift/dataset.hpp"
#include "gsift/image.hpp"

namespace gsift {

inline constexpr int kSyntheticSide = 256;

/// Procedural stand-in for a face photograph: a skin-coloured ellipse on a
/// blue-grey, non-skin background. Male (+1) faces carry horizontal bars and
/// two dark blobs, female (-1) faces vertical bars and three blobs. Position,
/// size, rotation and brightness are drawn from a splitmix64 stream.
RgbImage render_synthetic_face(int label, std::uint64_t seed);

/// Gray 128x128 crop of the face region of render_synthetic_face(), the
/// fixture used for SIFT checks.
GrayImage synthetic_face_crop(int label, std::uint64_t seed);

/// Writes n_per_class images per class under out_dir/{male,female}/ as
/// 256x256 PPM files and returns the loaded listing.
Dataset generate_synthetic_dataset(int n_per_class, const std::filesystem::path& out_dir,
                                   std::uint64_t seed);

}  // namespace gsift
