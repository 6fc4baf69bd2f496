#pragma once

// Synthetic benchmark data for tests and demos. Screens are flat mock-ups
// (title bar, labeled widgets) rendered with OpenCV; tasks cover every
// action family and are split 7:1:2.

#include <cstdint>
#include <filesystem>

#include <opencv2/core.hpp>

#include "actbench/dataset.hpp"

namespace actbench::fixture {

struct FixtureOptions {
  std::size_t tasks = 50;
  std::size_t screens = 8;
  std::uint64_t seed = 1;

  // Each injection breaks exactly one record.
  bool inject_bad_syntax = false;     // a labeled script with an unclosed call
  bool inject_out_of_box = false;     // an explicit script clicking outside its target
  bool inject_cross_split = false;    // a rephrasing equal to a task in another split
};

dataset::Dataset make_fixture(const FixtureOptions& options = {});

// Draws the screen: widgets filled by kind, label text centered in each box.
cv::Mat render_screen(const dataset::Screen& screen);

// make_fixture + save_dataset + one PNG per screen.
dataset::Dataset write_fixture(const std::filesystem::path& root, const FixtureOptions& options = {});

}  // namespace actbench::fixture
