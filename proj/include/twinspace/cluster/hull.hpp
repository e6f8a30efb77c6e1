#pragma once

#include "twinspace/common.hpp"

#include <map>
#include <vector>

namespace twinspace::cluster {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

// Andrew's monotone chain; counter-clockwise, no repeated first vertex.
// Collinear input yields the two extreme points, a single point yields one.
std::vector<Point2> convex_hull(std::vector<Point2> points);

// Hulls of the rows of an n x 2 matrix grouped by label.
std::map<int, std::vector<Point2>> convex_hulls(const Matrix& points, const std::vector<int>& group_of);

} // namespace twinspace::cluster
