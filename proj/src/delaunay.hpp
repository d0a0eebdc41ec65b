#pragma once

#include "cavernsim/mesh.hpp"

#include <array>
#include <vector>

namespace cavernsim::detail {

/// Incremental Bowyer-Watson triangulation of a point set. Triangles are
/// counter-clockwise and reference indices into the input vector.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points);

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

} // namespace cavernsim::detail
