#include "plidar/losses.hpp"

#include <cmath>

#include "plidar/errors.hpp"
#include "plidar/metrics.hpp"
#include "plidar/spatial_index.hpp"

namespace plidar {

void LossWeights::validate() const {
    if (!(w1 >= 0.0) || !(w2 >= 0.0) || !std::isfinite(w1) || !std::isfinite(w2)) {
        throw InvalidArgumentError("loss weights must be finite and non-negative");
    }
}

double depth_loss(const DepthMap& pred, const DepthMap& gt) {
    if (!pred.same_shape(gt)) {
        throw DimensionError("depth_loss: prediction and ground truth differ in size");
    }
    double sum = 0.0;
    const auto p = pred.depths();
    const auto g = gt.depths();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] > 0.0) {
            const double e = p[i] - g[i];
            sum += e * e;
        }
    }
    return sum;
}

double reconstruction_loss(const PointCloud& pred, const PointCloud& gt) {
    return chamfer(pred, gt).sum;
}

std::vector<Point3> reconstruction_loss_grad(const PointCloud& pred, const PointCloud& gt) {
    if (pred.empty() || gt.empty()) {
        throw EmptyCloudError("reconstruction_loss_grad needs two non-empty clouds");
    }
    const KdTree gt_tree(gt);
    const KdTree pred_tree(pred);
    std::vector<Point3> grad(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const Point3& p = pred.points[i];
        grad[i] = 2.0 * (p - gt.points[gt_tree.nearest(p).index]);
    }
    for (const auto& g : gt.points) {
        const std::size_t j = pred_tree.nearest(g).index;
        grad[j] = grad[j] + 2.0 * (pred.points[j] - g);
    }
    return grad;
}

double total_loss(const DepthMap& pred_depth, const DepthMap& gt_depth, const PointCloud& pred_pc,
                  const PointCloud& gt_pc, const LossWeights& w) {
    w.validate();
    return w.w1 * depth_loss(pred_depth, gt_depth) + w.w2 * reconstruction_loss(pred_pc, gt_pc);
}

double batch_loss(std::span<const CloudPair> samples) {
    if (samples.empty()) {
        throw InvalidArgumentError("batch_loss needs at least one sample");
    }
    double sum = 0.0;
    for (const auto& s : samples) {
        if (s.pred == nullptr || s.gt == nullptr) {
            throw InvalidArgumentError("batch_loss sample is missing a cloud");
        }
        sum += reconstruction_loss(*s.pred, *s.gt);
    }
    return sum;
}

double batch_loss(const std::vector<std::pair<PointCloud, PointCloud>>& samples) {
    std::vector<CloudPair> refs;
    refs.reserve(samples.size());
    for (const auto& [pred, gt] : samples) {
        refs.push_back({&pred, &gt});
    }
    return batch_loss(refs);
}

}  // namespace plidar
