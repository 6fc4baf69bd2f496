#pragma once

#include <stdexcept>
#include <string>

#include "actbench/script.hpp"

namespace actbench {

using script::Coordinate;

// Axis-aligned box in screen pixels, inclusive of its boundary.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double diagonal() const;
  bool valid() const;
  bool contains(Coordinate p) const;

  friend bool operator==(const Rect&, const Rect&) = default;
  friend auto operator<=>(const Rect&, const Rect&) = default;
};

// Throws std::invalid_argument when x_min > x_max or y_min > y_max.
Rect make_rect(double x_min, double y_min, double x_max, double y_max);

// Smallest Euclidean distance from p to any point of r; 0 inside or on the
// boundary.
double dist_to_rect(Coordinate p, const Rect& r);

// Midpoint rounded half-up to whole pixels.
Coordinate pixel_center(const Rect& r);

double intersection_area(const Rect& a, const Rect& b);
double iou(const Rect& a, const Rect& b);

std::string to_string(const Rect& r);

}  // namespace actbench
