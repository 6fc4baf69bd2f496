#include "actbench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace actbench {

double Rect::diagonal() const { return std::hypot(width(), height()); }

bool Rect::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) && std::isfinite(y_max) &&
         x_min <= x_max && y_min <= y_max;
}

bool Rect::contains(Coordinate p) const {
  return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
}

Rect make_rect(double x_min, double y_min, double x_max, double y_max) {
  Rect r{x_min, y_min, x_max, y_max};
  if (!r.valid()) throw std::invalid_argument("invalid rect " + to_string(r));
  return r;
}

double dist_to_rect(Coordinate p, const Rect& r) {
  const double dx = std::max({r.x_min - p.x, 0.0, p.x - r.x_max});
  const double dy = std::max({r.y_min - p.y, 0.0, p.y - r.y_max});
  return std::hypot(dx, dy);
}

Coordinate pixel_center(const Rect& r) {
  // Sub-pixel boxes can round outside themselves; keep the exact midpoint then.
  auto axis = [](double lo, double hi) {
    const double mid = (lo + hi) / 2.0;
    const double rounded = std::floor(mid + 0.5);
    return (rounded >= lo && rounded <= hi) ? rounded : mid;
  };
  return {axis(r.x_min, r.x_max), axis(r.y_min, r.y_max)};
}

double intersection_area(const Rect& a, const Rect& b) {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const Rect& a, const Rect& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::string to_string(const Rect& r) {
  std::ostringstream os;
  os << '[' << r.x_min << ", " << r.y_min << ", " << r.x_max << ", " << r.y_max << ']';
  return os.str();
}

}  // namespace actbench
