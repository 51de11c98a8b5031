#include "plidar/spatial_index.hpp"

#include <algorithm>
#include <numeric>

#include "plidar/errors.hpp"

namespace plidar {

namespace {

double coord(const Point3& p, int axis) {
    switch (axis) {
        case 0:
            return p.x;
        case 1:
            return p.y;
        default:
            return p.z;
    }
}

double axis_gap(double q, double lo, double hi) {
    if (q < lo) {
        const double d = lo - q;
        return d * d;
    }
    if (q > hi) {
        const double d = q - hi;
        return d * d;
    }
    return 0.0;
}

bool better(const Neighbor& a, const Neighbor& b) {
    return a.squared_distance < b.squared_distance ||
           (a.squared_distance == b.squared_distance && a.index < b.index);
}

}  // namespace

KdTree::KdTree(std::span<const Point3> points, std::size_t leaf_size) : leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    if (points.empty()) {
        throw EmptyCloudError("cannot build a KdTree over an empty cloud");
    }
    if (points.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidArgumentError("KdTree supports at most 2^32-1 points");
    }
    ids_.resize(points.size());
    std::iota(ids_.begin(), ids_.end(), std::size_t{0});
    points_.assign(points.begin(), points.end());
    nodes_.reserve(2 * (points.size() / leaf_size_ + 1));
    build(0, static_cast<std::uint32_t>(points.size()), 0);

    // Reorder point storage to match the leaf layout for cache locality.
    std::vector<Point3> ordered(points_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        ordered[i] = points[ids_[i]];
    }
    points_ = std::move(ordered);
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::size_t level) {
    depth_ = std::max(depth_, level);
    const auto self = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    Point3 lo = points_[ids_[begin]];
    Point3 hi = lo;
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        const Point3& p = points_[ids_[i]];
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    nodes_[self].lo = lo;
    nodes_[self].hi = hi;
    nodes_[self].begin = begin;
    nodes_[self].end = end;

    if (end - begin <= leaf_size_) {
        return self;
    }

    const double ext[3] = {hi.x - lo.x, hi.y - lo.y, hi.z - lo.z};
    int axis = 0;
    if (ext[1] > ext[axis]) axis = 1;
    if (ext[2] > ext[axis]) axis = 2;

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(ids_.begin() + begin, ids_.begin() + mid, ids_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                         const double ca = coord(points_[a], axis);
                         const double cb = coord(points_[b], axis);
                         return ca < cb || (ca == cb && a < b);
                     });

    const std::int32_t left = build(begin, mid, level + 1);
    const std::int32_t right = build(mid, end, level + 1);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

double KdTree::box_distance(const Node& n, const Point3& q) {
    return axis_gap(q.x, n.lo.x, n.hi.x) + axis_gap(q.y, n.lo.y, n.hi.y) + axis_gap(q.z, n.lo.z, n.hi.z);
}

Neighbor KdTree::nearest(const Point3& q) const {
    Neighbor best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
    search_nearest(0, q, best);
    return best;
}

void KdTree::search_nearest(std::int32_t index, const Point3& q, Neighbor& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    if (node.is_leaf()) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const Neighbor cand{ids_[i], squared_distance(q, points_[i])};
            if (better(cand, best)) {
                best = cand;
            }
        }
        return;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    const double dl = box_distance(l, q);
    const double dr = box_distance(r, q);
    // Equal bounds may still hide a lower index, so prune only on strict excess.
    if (dl <= dr) {
        if (dl <= best.squared_distance) search_nearest(node.left, q, best);
        if (dr <= best.squared_distance) search_nearest(node.right, q, best);
    } else {
        if (dr <= best.squared_distance) search_nearest(node.right, q, best);
        if (dl <= best.squared_distance) search_nearest(node.left, q, best);
    }
}

std::vector<Neighbor> KdTree::nearest_k(const Point3& q, std::size_t k, double max_squared_distance) const {
    std::vector<Neighbor> heap;
    if (k == 0) {
        return heap;
    }
    heap.reserve(k + 1);
    search_k(0, q, k, max_squared_distance, heap);
    std::sort_heap(heap.begin(), heap.end(), better);
    return heap;
}

void KdTree::search_k(std::int32_t index, const Point3& q, std::size_t k, double max_sq,
                      std::vector<Neighbor>& heap) const {
    const auto bound = [&] { return heap.size() < k ? max_sq : std::min(max_sq, heap.front().squared_distance); };
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    if (node.is_leaf()) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const Neighbor cand{ids_[i], squared_distance(q, points_[i])};
            if (cand.squared_distance > max_sq) {
                continue;
            }
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end(), better);
            } else if (better(cand, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), better);
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end(), better);
            }
        }
        return;
    }
    const double dl = box_distance(nodes_[static_cast<std::size_t>(node.left)], q);
    const double dr = box_distance(nodes_[static_cast<std::size_t>(node.right)], q);
    const std::int32_t first = dl <= dr ? node.left : node.right;
    const std::int32_t second = dl <= dr ? node.right : node.left;
    const double d_first = std::min(dl, dr);
    const double d_second = std::max(dl, dr);
    if (d_first <= bound()) search_k(first, q, k, max_sq, heap);
    if (d_second <= bound()) search_k(second, q, k, max_sq, heap);
}

Neighbor nearest_brute(std::span<const Point3> points, const Point3& q) {
    if (points.empty()) {
        throw EmptyCloudError("nearest_brute over an empty cloud");
    }
    Neighbor best{0, squared_distance(q, points[0])};
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double d = squared_distance(q, points[i]);
        if (d < best.squared_distance) {
            best = {i, d};
        }
    }
    return best;
}

}  // namespace plidar
