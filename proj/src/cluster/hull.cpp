#include "twinspace/cluster/hull.hpp"

#include "twinspace/error.hpp"

#include <algorithm>

namespace twinspace::cluster {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

} // namespace

std::vector<Point2> convex_hull(std::vector<Point2> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

std::map<int, std::vector<Point2>> convex_hulls(const Matrix& points, const std::vector<int>& group_of)
{
    if (points.cols() != 2 || points.rows() != static_cast<Eigen::Index>(group_of.size())) {
        throw Error("hulls need an n x 2 matrix and one group per row");
    }
    std::map<int, std::vector<Point2>> grouped;
    for (std::size_t i = 0; i < group_of.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        grouped[group_of[i]].push_back({points(r, 0), points(r, 1)});
    }
    for (auto& [g, pts] : grouped) pts = convex_hull(std::move(pts));
    return grouped;
}

} // namespace twinspace::cluster
