#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "plidar/geometry.hpp"

namespace plidar {

struct Neighbor {
    std::size_t index = 0;
    double squared_distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact nearest-neighbor index over a fixed point set.
///
/// Nodes split at the median of the widest bounding-box axis until at most
/// `leaf_size` points remain. Subtrees are pruned against the squared
/// distance to their bounding box, which is computed in the same x, y, z
/// order as `squared_distance` so the bound never exceeds a stored point's
/// computed distance. Ties between equally distant points resolve to the
/// lowest original index, so results agree bit-for-bit with
/// `nearest_brute`.
///
/// The tree is immutable after construction; all queries are const and
/// safe to run concurrently.
class KdTree {
public:
    static constexpr std::size_t kDefaultLeafSize = 16;

    explicit KdTree(std::span<const Point3> points, std::size_t leaf_size = kDefaultLeafSize);
    explicit KdTree(const PointCloud& pc, std::size_t leaf_size = kDefaultLeafSize)
        : KdTree(std::span<const Point3>(pc.points), leaf_size) {}

    Neighbor nearest(const Point3& q) const;

    /// Up to `k` nearest points with squared distance <= max_squared_distance,
    /// ordered by (squared distance, index).
    std::vector<Neighbor> nearest_k(const Point3& q, std::size_t k,
                                    double max_squared_distance = std::numeric_limits<double>::infinity()) const;

    std::size_t size() const { return points_.size(); }
    std::size_t leaf_size() const { return leaf_size_; }
    /// Longest root-to-leaf path; a single leaf has depth 0.
    std::size_t depth() const { return depth_; }

private:
    struct Node {
        Point3 lo;
        Point3 hi;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;

        bool is_leaf() const { return left < 0; }
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end, std::size_t level);
    void search_nearest(std::int32_t node, const Point3& q, Neighbor& best) const;
    void search_k(std::int32_t node, const Point3& q, std::size_t k, double max_sq, std::vector<Neighbor>& heap) const;

    static double box_distance(const Node& n, const Point3& q);

    std::size_t leaf_size_;
    std::size_t depth_ = 0;
    std::vector<Point3> points_;
    std::vector<std::size_t> ids_;
    std::vector<Node> nodes_;
};

/// Linear-scan reference for KdTree::nearest with the same tie rule.
Neighbor nearest_brute(std::span<const Point3> points, const Point3& q);
inline Neighbor nearest_brute(const PointCloud& pc, const Point3& q) {
    return nearest_brute(std::span<const Point3>(pc.points), q);
}

}  // namespace plidar
