#include <gtest/gtest.h>

#include <random>

#include <opencv2/imgcodecs.hpp>

#include "actbench/fixture.hpp"

namespace fs = std::filesystem;
using namespace actbench;
using namespace actbench::dataset;
using actbench::fixture::FixtureOptions;

TEST(Fixture, SplitsSevenOneTwo) {
  auto ds = fixture::make_fixture({.tasks = 50});
  auto stats = dataset_stats(ds);
  EXPECT_EQ(stats.total, 50u);
  EXPECT_EQ(stats.split_totals[0], 35u);
  EXPECT_EQ(stats.split_totals[1], 5u);
  EXPECT_EQ(stats.split_totals[2], 10u);
}

TEST(Fixture, CleanFixtureHasNoFindings) {
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    auto ds = fixture::make_fixture({.tasks = 50, .seed = seed});
    auto filtered = filter_records(ds);
    EXPECT_TRUE(filtered.rejected.empty()) << seed << ": " << filtered.rejected[0].message;
    EXPECT_TRUE(check_split_integrity(ds).ok()) << seed;
  }
}

TEST(Fixture, CoversEveryActionFamily) {
  auto stats = dataset_stats(fixture::make_fixture({.tasks = 50}));
  for (auto a : script::kAllActions) EXPECT_GT(stats.action_counts[static_cast<std::size_t>(a)], 0u) << script::to_string(a);
  for (auto p : kAllPlatforms) EXPECT_GT(stats.platform_totals[static_cast<std::size_t>(p)], 0u);
}

TEST(Fixture, Deterministic) {
  auto a = fixture::make_fixture({.seed = 5});
  auto b = fixture::make_fixture({.seed = 5});
  ASSERT_EQ(a.tasks.size(), b.tasks.size());
  for (std::size_t i = 0; i < a.tasks.size(); ++i) {
    EXPECT_EQ(a.tasks[i].task_text, b.tasks[i].task_text);
    EXPECT_EQ(a.tasks[i].script, b.tasks[i].script);
  }
}

TEST(Fixture, EachInjectionYieldsOneFinding) {
  auto syntax = fixture::make_fixture({.inject_bad_syntax = true});
  auto r = filter_records(syntax);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].reason, RejectReason::kSyntaxError);
  EXPECT_TRUE(check_split_integrity(syntax).ok());

  auto outside = fixture::make_fixture({.inject_out_of_box = true});
  r = filter_records(outside);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].reason, RejectReason::kCoordinateOutsideBox);
  EXPECT_TRUE(check_split_integrity(outside).ok());

  auto cross = fixture::make_fixture({.inject_cross_split = true});
  EXPECT_TRUE(filter_records(cross).rejected.empty());
  auto v = check_split_integrity(cross);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0].kind, SplitViolation::Kind::kRephrasingAcrossSplits);
}

TEST(Fixture, WrittenFixtureLoadsWithImages) {
  const fs::path root = fs::temp_directory_path() / ("actbench_fx_" + std::to_string(std::random_device{}()));
  auto written = fixture::write_fixture(root, {.tasks = 20, .screens = 4, .inject_bad_syntax = true});
  auto ds = load_dataset(root);
  EXPECT_TRUE(ds.warnings.empty());
  EXPECT_EQ(ds.tasks.size(), 20u);
  auto img = cv::imread(ds.screens[0].image.string());
  EXPECT_EQ(img.cols, ds.screens[0].width);
  EXPECT_EQ(img.rows, ds.screens[0].height);
  EXPECT_EQ(filter_records(ds).rejected.size(), 1u);
  fs::remove_all(root);
}
