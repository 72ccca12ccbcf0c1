#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <random>
#include <tuple>

#include "gsift/colorspace.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gsift;

namespace {

SkinMask random_mask(int w, int h, double density, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::bernoulli_distribution on(density);
  SkinMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(x, y, on(gen));
  }
  return m;
}

// Closing written out per definition: outside is 0 for dilation, 1 for erosion.
SkinMask closing_oracle(const SkinMask& m) {
  const int w = m.width(), h = m.height();
  SkinMask d(w, h), e(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool any = false;
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          const int xx = x + i, yy = y + j;
          if (xx >= 0 && yy >= 0 && xx < w && yy < h && m.at(xx, yy)) any = true;
        }
      }
      d.set(x, y, any);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool all = true;
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          const int xx = x + i, yy = y + j;
          if (xx >= 0 && yy >= 0 && xx < w && yy < h && !d.at(xx, yy)) all = false;
        }
      }
      e.set(x, y, all);
    }
  }
  return e;
}

// Flood fill over 8-neighbours.
std::vector<RoiBox> components_oracle(const SkinMask& m, long min_area) {
  const int w = m.width(), h = m.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<RoiBox> out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y) || seen[y * w + x]) continue;
      int x0 = x, x1 = x, y0 = y, y1 = y;
      long area = 0;
      std::queue<std::pair<int, int>> q;
      q.push({x, y});
      seen[y * w + x] = 1;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        ++area;
        x0 = std::min(x0, cx), x1 = std::max(x1, cx), y0 = std::min(y0, cy), y1 = std::max(y1, cy);
        for (int j = -1; j <= 1; ++j) {
          for (int i = -1; i <= 1; ++i) {
            const int nx = cx + i, ny = cy + j;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || !m.at(nx, ny) || seen[ny * w + nx]) continue;
            seen[ny * w + nx] = 1;
            q.push({nx, ny});
          }
        }
      }
      if (area >= min_area) out.push_back({x0, y0, x1 - x0 + 1, y1 - y0 + 1, area});
    }
  }
  std::sort(out.begin(), out.end(), [](const RoiBox& a, const RoiBox& b) {
    return std::tie(a.y, a.x) < std::tie(b.y, b.x);
  });
  return out;
}

}  // namespace

TEST(RgbToHsv, ReferenceColors) {
  const HsvPixel red = rgb_to_hsv(255, 0, 0);
  EXPECT_NEAR(red.hue, 0.0, 1e-9);
  EXPECT_NEAR(red.saturation, 255.0, 1e-9);
  EXPECT_NEAR(red.value, 85.0, 1e-9);

  const HsvPixel gray = rgb_to_hsv(100, 100, 100);
  EXPECT_EQ(gray.hue, 0.0);
  EXPECT_EQ(gray.saturation, 0.0);
  EXPECT_NEAR(gray.value, 100.0, 1e-12);

  const HsvPixel blue = rgb_to_hsv(0, 0, 255);
  EXPECT_NEAR(blue.hue, 240.0, 1e-9);
  EXPECT_NEAR(blue.saturation, 255.0, 1e-9);
  EXPECT_NEAR(blue.value, 85.0, 1e-9);

  const HsvPixel black = rgb_to_hsv(0, 0, 0);
  EXPECT_EQ(black.hue, 0.0);
  EXPECT_EQ(black.saturation, 0.0);
  EXPECT_EQ(black.value, 0.0);
}

TEST(RgbToHsv, AgreesWithArccosAndAtan2Forms) {
  std::mt19937 gen(17);
  std::uniform_int_distribution<int> c(0, 255);
  for (int i = 0; i < 5000; ++i) {
    const int r = c(gen), g = c(gen), b = c(gen);
    const HsvPixel p = rgb_to_hsv(r, g, b);
    const auto want = oracle::hsv_arccos(r, g, b);
    EXPECT_NEAR(p.hue, static_cast<double>(want.hue), 1e-6) << r << ' ' << g << ' ' << b;
    EXPECT_NEAR(p.saturation, static_cast<double>(want.saturation), 1e-6);
    EXPECT_NEAR(p.value, static_cast<double>(want.value), 1e-6);
    if (!(r == g && g == b)) {
      // The two closed forms agree up to the 0/360 seam.
      double d = std::abs(p.hue - static_cast<double>(oracle::hue_atan2(r, g, b)));
      d = std::min(d, 360.0 - d);
      EXPECT_LT(d, 1e-6);
    }
    EXPECT_GE(p.hue, 0.0);
    EXPECT_LT(p.hue, 360.0);
    EXPECT_GE(p.saturation, 0.0);
    EXPECT_LE(p.saturation, 255.0);
  }
}

TEST(RgbToHsv, PermutationSymmetry) {
  std::mt19937 gen(23);
  std::uniform_int_distribution<int> c(0, 255);
  for (int i = 0; i < 2000; ++i) {
    const int r = c(gen), g = c(gen), b = c(gen);
    const HsvPixel p = rgb_to_hsv(r, g, b);
    const std::array<std::array<int, 3>, 5> perms{{{r, b, g}, {g, r, b}, {g, b, r}, {b, r, g}, {b, g, r}}};
    for (const auto& q : perms) {
      const HsvPixel o = rgb_to_hsv(q[0], q[1], q[2]);
      EXPECT_NEAR(o.saturation, p.saturation, 1e-9);
      EXPECT_NEAR(o.value, p.value, 1e-9);
    }
    if (b < g) {
      // Swapping G and B reflects the hue.
      const HsvPixel s = rgb_to_hsv(r, b, g);
      EXPECT_NEAR(s.hue, p.hue == 0.0 ? 0.0 : 360.0 - p.hue, 1e-9);
    }
  }
}

TEST(SkinTest, OpenIntervalsOnAllThreeChannels) {
  EXPECT_TRUE(is_skin({100.0, 90.0, 200.0}));
  EXPECT_FALSE(is_skin(rgb_to_hsv(0, 0, 255)));
  EXPECT_FALSE(is_skin({20.0, 90.0, 200.0}));
  EXPECT_FALSE(is_skin({100.0, 160.0, 200.0}));
  EXPECT_FALSE(is_skin({100.0, 90.0, 150.0}));
  EXPECT_FALSE(is_skin({100.0, 90.0, 255.0}));
  SkinThresholds wide;
  wide.value_min = 0.0;
  EXPECT_TRUE(is_skin({100.0, 90.0, 150.0}, wide));
}

TEST(SkinMask, BlackImageIsEmptyAndMaskIsPointwise) {
  EXPECT_EQ(skin_mask(RgbImage(16, 16)).count(), 0u);

  std::mt19937 gen(2);
  std::uniform_int_distribution<int> c(0, 255);
  RgbImage a(32, 32);
  for (auto& v : a.data()) v = static_cast<std::uint8_t>(c(gen));
  // Mostly skin-like pixels so both outcomes occur.
  for (int y = 0; y < 32; y += 2) {
    for (int x = 0; x < 32; ++x) a.set(x, y, 230, 190, 140 + c(gen) % 40);
  }
  RgbImage b = a;
  for (int x = 0; x < 32; ++x) b.set(x, 5, 0, 0, 255);
  const SkinMask ma = skin_mask(a), mb = skin_mask(b);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (y != 5) {
        EXPECT_EQ(ma.at(x, y), mb.at(x, y));
      }
      const auto* p = a.pixel(x, y);
      EXPECT_EQ(ma.at(x, y), is_skin(rgb_to_hsv(p[0], p[1], p[2])));
    }
  }
  EXPECT_GT(ma.count(), 0u);
}

TEST(Closing, MatchesDefinition) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const SkinMask m = random_mask(23, 19, 0.3 + 0.02 * seed, seed);
    EXPECT_EQ(close_3x3(m), closing_oracle(m)) << seed;
  }
}

TEST(Closing, FillsPinholesAndKeepsRectangles) {
  SkinMask m(20, 20);
  for (int y = 4; y < 14; ++y) {
    for (int x = 3; x < 17; ++x) m.set(x, y, true);
  }
  const SkinMask rect = m;
  EXPECT_EQ(close_3x3(rect), rect);
  m.set(8, 8, false);
  EXPECT_EQ(close_3x3(m), rect);
}

TEST(ExtractRois, TwoBlocks) {
  SkinMask m(40, 30);
  for (int y = 2; y < 12; ++y) {
    for (int x = 2; x < 12; ++x) m.set(x, y, true);
    for (int x = 25; x < 35; ++x) m.set(x, y + 15, true);
  }
  const auto rois = extract_rois(m, 50);
  ASSERT_EQ(rois.size(), 2u);
  EXPECT_EQ(rois[0], (RoiBox{2, 2, 10, 10, 100}));
  EXPECT_EQ(rois[1], (RoiBox{25, 17, 10, 10, 100}));
}

TEST(ExtractRois, EmptyAndTinyInputs) {
  EXPECT_TRUE(extract_rois(SkinMask(30, 30), 1).empty());
  SkinMask dot(30, 30);
  dot.set(15, 15, true);
  EXPECT_TRUE(extract_rois(dot, 400).empty());
  EXPECT_EQ(extract_rois(dot, 1).size(), 1u);
}

TEST(ExtractRois, MatchesFloodFillOnClosedMask) {
  for (std::uint32_t seed = 0; seed < 15; ++seed) {
    const SkinMask m = random_mask(48, 40, 0.12 + 0.01 * seed, 100 + seed);
    const long min_area = 1 + seed % 4 * 3;
    const auto got = extract_rois(m, min_area);
    EXPECT_EQ(got, components_oracle(closing_oracle(m), min_area)) << seed;
  }
}

TEST(ExtractRois, BoxesAreTight) {
  const SkinMask m = random_mask(64, 64, 0.2, 9);
  const SkinMask closed = close_3x3(m);
  for (const auto& r : extract_rois(m, 1)) {
    EXPECT_LE(r.area, static_cast<long>(r.w) * r.h);
    auto row_has = [&](int y) {
      for (int x = r.x; x < r.x + r.w; ++x) {
        if (closed.at(x, y)) return true;
      }
      return false;
    };
    auto col_has = [&](int x) {
      for (int y = r.y; y < r.y + r.h; ++y) {
        if (closed.at(x, y)) return true;
      }
      return false;
    };
    EXPECT_TRUE(row_has(r.y));
    EXPECT_TRUE(row_has(r.y + r.h - 1));
    EXPECT_TRUE(col_has(r.x));
    EXPECT_TRUE(col_has(r.x + r.w - 1));
  }
}

TEST(MaskToGray, MembersAreWhite) {
  SkinMask m(3, 1);
  m.set(1, 0, true);
  const GrayImage g = mask_to_gray(m);
  EXPECT_EQ(g.at(0, 0), 0.0);
  EXPECT_EQ(g.at(1, 0), 1.0);
}
