#include <gtest/gtest.h>

#include <random>

#include "lbsim/env.hpp"
#include "test_support.hpp"

namespace lbsim {
namespace {

std::shared_ptr<const Geometry> strip() {
  return test::geometry_of("LAYOUT 6 4\nRECT METAL1 0 0 5 1\nRECT DIFF 0 2 5 3\nRECT POLY 2 2 3 3\n");
}

TEST(ReceptiveField, CornerIsClipped) {
  Environment env(strip());
  EXPECT_EQ(env.read_receptive_field({0, 0}).present(), 4);
  EXPECT_EQ(env.read_receptive_field({5, 3}).present(), 4);
  EXPECT_EQ(env.read_receptive_field({2, 0}).present(), 6);
  EXPECT_EQ(env.read_receptive_field({2, 1}).present(), 9);
  EXPECT_THROW(env.read_receptive_field({6, 0}), EnvironmentError);
}

TEST(ReceptiveField, MatchesDirectReads) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> dim(1, 9);
    const int w = dim(rng), h = dim(rng);
    std::vector<Rect> rects;
    for (int i = 0; i < 4; ++i) {
      std::uniform_int_distribution<int> xs(0, w - 1), ys(0, h - 1), layer(0, kLayerCount - 1);
      const int x0 = xs(rng), x1 = xs(rng), y0 = ys(rng), y1 = ys(rng);
      rects.push_back({static_cast<Layer>(layer(rng)), std::min(x0, x1), std::min(y0, y1),
                       std::max(x0, x1), std::max(y0, y1)});
    }
    std::shared_ptr<const Geometry> geo;
    try {
      geo = std::make_shared<const Geometry>(LayoutGrid(w, h, rects));
    } catch (const LayoutRuleViolation&) {
      continue;  // random rectangles may break design rules
    }
    ++checked;
    Environment env(geo);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const ReceptiveField f = env.read_receptive_field({x, y});
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Point p{x + dx, y + dy};
            if (env.grid().in_bounds(p)) {
              ASSERT_EQ(f.at(dx, dy), &env.cell(p));
              EXPECT_EQ(f.at(dx, dy)->layer_bits, env.grid().bits(p));
            } else {
              ASSERT_EQ(f.at(dx, dy), nullptr);
            }
          }
      }
  }
  EXPECT_GE(checked, 30);
}

TEST(WriteLabel, Dominance) {
  Environment env(strip());
  EXPECT_EQ(env.write_label({0, 0}, Layer::Metal1, 7), std::nullopt);
  EXPECT_EQ(env.cell({0, 0}).label_on(Layer::Metal1), 7u);

  EXPECT_EQ(env.write_label({1, 0}, Layer::Metal1, 12), std::nullopt);
  EXPECT_EQ(env.write_label({1, 0}, Layer::Metal1, 7), std::optional<Label>(12));
  EXPECT_EQ(env.cell({1, 0}).label_on(Layer::Metal1), 12u);

  EXPECT_EQ(env.write_label({0, 0}, Layer::Metal1, 12), std::optional<Label>(7));
  EXPECT_EQ(env.cell({0, 0}).label_on(Layer::Metal1), 12u);
}

TEST(WriteLabel, RejectsAbsentLayerAndZero) {
  Environment env(strip());
  EXPECT_THROW(env.write_label({0, 0}, Layer::Poly, 3), EnvironmentError);
  EXPECT_THROW(env.write_label({2, 2}, Layer::Diff, 3), EnvironmentError);  // channel cell
  EXPECT_THROW(env.write_label({0, 0}, Layer::Metal1, 0), EnvironmentError);
}

TEST(FetLabel, Dominance) {
  Environment env(strip());
  EXPECT_EQ(env.write_fet_label({2, 2}, 3), std::nullopt);
  EXPECT_EQ(env.write_fet_label({2, 2}, 9), std::optional<FetLabel>(3));
  EXPECT_EQ(env.write_fet_label({2, 2}, 4), std::optional<FetLabel>(9));
  EXPECT_EQ(env.cell({2, 2}).fet_label, 9u);
  EXPECT_THROW(env.write_fet_label({0, 2}, 1), EnvironmentError);
}

TEST(Seal, IdempotentAndMonotone) {
  Environment env(strip());
  EXPECT_FALSE(env.sealed(5));
  env.seal_label(5);
  env.seal_label(5);
  EXPECT_TRUE(env.sealed(5));
  EXPECT_EQ(env.sealed_count(), 1u);
  env.seal_label(2);
  EXPECT_TRUE(env.sealed(5));
  EXPECT_EQ(env.sealed_count(), 2u);
  EXPECT_FALSE(env.sealed(0));
}

TEST(Flags, DirectorImpliesBoundary) {
  Environment env(strip());
  env.set_director_mark({0, 0}, Layer::Metal1);
  EXPECT_TRUE(env.cell({0, 0}).director_marked(Layer::Metal1));
  EXPECT_TRUE(env.cell({0, 0}).boundary_marked(Layer::Metal1));
  env.set_boundary_mark({1, 0}, Layer::Metal1);
  EXPECT_FALSE(env.cell({1, 0}).director_marked(Layer::Metal1));
}

TEST(Stable, NeedsSealAndDirectorOnBoundary) {
  Environment env(test::geometry_of("LAYOUT 5 5\nRECT METAL1 0 0 4 4\n"));
  env.write_label({0, 0}, Layer::Metal1, 4);
  env.write_label({2, 2}, Layer::Metal1, 4);
  EXPECT_FALSE(env.stable({0, 0}, Layer::Metal1));
  EXPECT_FALSE(env.stable({2, 2}, Layer::Metal1));
  env.seal_label(4);
  EXPECT_FALSE(env.stable({0, 0}, Layer::Metal1));
  EXPECT_TRUE(env.stable({2, 2}, Layer::Metal1));
  env.set_director_mark({0, 0}, Layer::Metal1);
  EXPECT_TRUE(env.stable({0, 0}, Layer::Metal1));
}

TEST(Emit, TimeIsCurrentStep) {
  Environment env(strip());
  for (int i = 0; i < 148; ++i) env.advance_step();
  env.emit_contact({0, 1, 2, 0});
  EXPECT_EQ(statement_time(env.emitted().back()), 148u);
  env.advance_step();
  env.emit_fet({Polarity::NFET, 5, 1, 2, 3, 2, 2, 0}, 0);
  EXPECT_EQ(statement_time(env.emitted().back()), 149u);
  EXPECT_EQ(env.emitted().size(), 2u);
}

TEST(Complete, EmptyLayoutAtStepZero) {
  Environment env(test::geometry_of("LAYOUT 8 8\n"));
  EXPECT_TRUE(env.is_complete());
}

TEST(Complete, FreshNonEmptyIsNot) {
  Environment env(strip());
  EXPECT_FALSE(env.is_complete());
}

TEST(Complete, AllConditionsRequired) {
  auto geo = test::geometry_of("LAYOUT 4 4\nRECT METAL1 0 0 3 1\nRECT POLY 0 1 3 3\nRECT CONTACT 1 1 1 1\n");
  Environment env(geo);
  for (int i = 0; i < 16; ++i) {
    const Point p = env.grid().point(i);
    if (env.grid().member(p, Layer::Metal1)) env.write_label(p, Layer::Metal1, 1);
    if (env.grid().member(p, Layer::Poly)) env.write_label(p, Layer::Poly, 2);
  }
  env.seal_label(1);
  env.seal_label(2);
  EXPECT_FALSE(env.is_complete());
  env.set_contact_captured({1, 1});
  EXPECT_FALSE(env.is_complete());
  env.emit_contact({0, 1, 2, 0});
  EXPECT_TRUE(env.is_complete());
}

}  // namespace
}  // namespace lbsim
