#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gsift/colorspace.hpp"
#include "gsift/face_detect.hpp"
#include "gsift/pnm.hpp"
#include "test_support.hpp"

using namespace gsift;

namespace {

double ncc_direct(const GrayImage& a, const GrayImage& b) {
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a.data()[i], mb += b.data()[i];
  ma /= a.size();
  mb /= b.size();
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double da = a.data()[i] - ma, db = b.data()[i] - mb;
    sab += da * db, saa += da * da, sbb += db * db;
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

GrayImage affine(const GrayImage& img, double a, double b) {
  std::vector<double> d;
  for (double v : img.data()) d.push_back(a * v + b);
  return GrayImage(img.width(), img.height(), d);
}

}  // namespace

TEST(BuildTemplate, MeanOfFaces) {
  const GrayImage face = test::random_gray(50, 50, 1);
  const std::vector<GrayImage> same(3, face);
  const FaceTemplate t = build_template(same, 50);
  EXPECT_EQ(t.n_sources, 3);
  for (std::size_t i = 0; i < face.size(); ++i) EXPECT_NEAR(t.data.data()[i], face.data()[i], 1e-15);

  const std::vector<GrayImage> bw{GrayImage(70, 40, 0.0), GrayImage(30, 30, 1.0)};
  const FaceTemplate half = build_template(bw, 32);
  EXPECT_EQ(half.data.width(), 32);
  for (double v : half.data.data()) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(BuildTemplate, RejectsEmptyListAndTinySide) {
  EXPECT_ERRC(build_template({}, 64), Errc::empty_input);
  const std::vector<GrayImage> one{GrayImage(20, 20, 0.3)};
  EXPECT_ERRC(build_template(one, 8), Errc::invalid_argument);
}

TEST(Ncc, SelfAffineAndConstant) {
  const GrayImage t = test::random_gray(24, 24, 2);
  EXPECT_NEAR(ncc_score(t, t), 1.0, 1e-12);
  EXPECT_NEAR(ncc_score(affine(t, 0.4, 0.3), t), 1.0, 1e-9);
  EXPECT_NEAR(ncc_score(t, affine(t, 0.5, 0.1)), 1.0, 1e-9);
  EXPECT_NEAR(ncc_score(affine(t, 0.5, 0.0), affine(t, -0.5, 1.0)), -1.0, 1e-9);
  EXPECT_EQ(ncc_score(GrayImage(24, 24, 0.7), t), 0.0);
  EXPECT_EQ(ncc_score(t, GrayImage(24, 24, 0.7)), 0.0);
}

TEST(Ncc, MatchesDirectFormulaAndIsSymmetric) {
  for (std::uint32_t s = 0; s < 20; ++s) {
    const GrayImage a = test::random_gray(16, 16, 10 + s), b = test::random_gray(16, 16, 50 + s);
    EXPECT_NEAR(ncc_score(a, b), ncc_direct(a, b), 1e-12);
    EXPECT_NEAR(ncc_score(a, b), ncc_score(b, a), 1e-14);
  }
}

TEST(Ncc, DimensionMismatch) {
  EXPECT_ERRC(ncc_score(GrayImage(4, 4), GrayImage(5, 4)), Errc::dimension_mismatch);
}

TEST(DetectFaces, PlantedTemplateIsRecovered) {
  const FaceTemplate t = fixture::face_template();
  RgbImage img = fixture::blue_canvas();
  fixture::skin_rect(img, 40, 30, 80, 120);
  fixture::plant(img, t.data, 48, 62);
  const auto rois = extract_rois(skin_mask(img));
  ASSERT_EQ(rois.size(), 1u);
  DetectParams p;
  p.threshold = 0.8;
  const auto boxes = detect_faces(img, t, rois, p);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0].x, 48);
  EXPECT_EQ(boxes[0].y, 62);
  EXPECT_EQ(boxes[0].w, 64);
  EXPECT_GT(boxes[0].score, 0.99);
}

TEST(DetectFaces, NoiseRegionYieldsNothing) {
  const FaceTemplate t = fixture::face_template();
  RgbImage img = fixture::blue_canvas();
  std::mt19937 gen(77);
  std::uniform_real_distribution<double> u(0.75, 1.0);
  for (int y = 30; y < 150; ++y) {
    for (int x = 40; x < 120; ++x) fixture::put_skin(img, x, y, u(gen));
  }
  const auto rois = extract_rois(skin_mask(img));
  ASSERT_EQ(rois.size(), 1u);
  DetectParams p;
  p.threshold = 0.8;
  EXPECT_TRUE(detect_faces(img, t, rois, p).empty());
}

TEST(DetectFaces, TwoRegionsTwoFaces) {
  const FaceTemplate t = fixture::face_template();
  RgbImage img = fixture::blue_canvas();
  fixture::skin_rect(img, 20, 40, 80, 120);
  fixture::skin_rect(img, 150, 60, 80, 120);
  fixture::plant(img, t.data, 28, 100);
  fixture::plant(img, t.data, 158, 64);
  const auto rois = extract_rois(skin_mask(img));
  ASSERT_EQ(rois.size(), 2u);
  DetectParams p;
  p.threshold = 0.8;
  const auto boxes = detect_faces(img, t, rois, p);
  ASSERT_EQ(boxes.size(), 2u);
  for (const auto& b : boxes) EXPECT_TRUE((b.x == 28 && b.y == 100) || (b.x == 158 && b.y == 64));
}

TEST(DetectFaces, SurvivorsRespectSuppressionOverlap) {
  const FaceTemplate t = fixture::face_template();
  // A long strip so many non-overlapping windows fit.
  RgbImage img = fixture::blue_canvas(400, 100);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.75, 1.0);
  for (int y = 10; y < 90; ++y) {
    for (int x = 10; x < 390; ++x) fixture::put_skin(img, x, y, u(gen));
  }
  fixture::plant(img, t.data, 60, 18);
  DetectParams p;
  p.threshold = 0.05;
  const auto boxes = detect_faces(img, t, extract_rois(skin_mask(img)), p);
  ASSERT_GT(boxes.size(), 1u);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (i > 0) {
      EXPECT_GE(boxes[i - 1].score, boxes[i].score);
    }
    for (std::size_t j = i + 1; j < boxes.size(); ++j) EXPECT_LE(overlap(boxes[i], boxes[j]), 0.3 + 1e-12);
  }
}

TEST(Overlap, IntersectionOverUnion) {
  EXPECT_DOUBLE_EQ(overlap({0, 0, 10, 10, 0}, {0, 0, 10, 10, 0}), 1.0);
  EXPECT_DOUBLE_EQ(overlap({0, 0, 10, 10, 0}, {5, 0, 10, 10, 0}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(overlap({0, 0, 10, 10, 0}, {20, 20, 5, 5, 0}), 0.0);
}

TEST(CropFace, IdentityUpsampleAndBounds) {
  RgbImage img(128, 128);
  std::mt19937 gen(1);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(gen() & 0xff);
  const FaceImage whole = crop_face(img, {0, 0, 128, 128, 1.0});
  EXPECT_EQ(whole.gray, to_gray(img));

  RgbImage flat(100, 100);
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 100; ++x) flat.set(x, y, 30, 60, 90);
  }
  const FaceImage up = crop_face(flat, {10, 10, 64, 64, 1.0});
  EXPECT_EQ(up.gray.width(), kFaceSide);
  EXPECT_EQ(up.gray.height(), kFaceSide);
  for (double v : up.gray.data()) EXPECT_NEAR(v, 60.0 / 255.0, 1e-15);

  EXPECT_ERRC(crop_face(flat, {50, 50, 64, 64, 1.0}), Errc::out_of_bounds);
}

TEST(TemplateFile, RoundTripIsEightBitExact) {
  test::TempDir dir("tpl");
  const FaceTemplate t = fixture::face_template(48);
  save_template(t, dir / "t.pgm");
  EXPECT_EQ(test::read_bytes(template_sidecar_path(dir / "t.pgm")), "GSTPL1 48 1\n");
  const FaceTemplate back = load_template(dir / "t.pgm");
  EXPECT_EQ(back.side, 48);
  EXPECT_EQ(back.n_sources, 1);
  EXPECT_EQ(back.data, quantize_8bit(t.data));
  save_template(back, dir / "u.pgm");
  EXPECT_EQ(load_template(dir / "u.pgm").data, back.data);
}

TEST(TemplateFile, SidecarMismatchIsRejected) {
  test::TempDir dir("tpl");
  save_template(fixture::face_template(32), dir / "t.pgm");
  test::write_bytes(template_sidecar_path(dir / "t.pgm"), "GSTPL1 40 1\n");
  EXPECT_TRUE(test::thrown_code([&] { load_template(dir / "t.pgm"); }).has_value());
  test::write_bytes(template_sidecar_path(dir / "t.pgm"), "GSTPL9 32 1\n");
  EXPECT_TRUE(test::thrown_code([&] { load_template(dir / "t.pgm"); }).has_value());
}
