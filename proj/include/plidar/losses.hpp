#pragma once

#include <span>
#include <utility>
#include <vector>

#include "plidar/geometry.hpp"

namespace plidar {

struct LossWeights {
    double w1 = 1.0;  // depth term
    double w2 = 1.0;  // reconstruction term

    void validate() const;
};

/// Sum of squared errors (m^2) over the pixels where gt > 0.
double depth_loss(const DepthMap& pred, const DepthMap& gt);

/// Symmetric Chamfer sum between prediction and ground truth, m^2.
double reconstruction_loss(const PointCloud& pred, const PointCloud& gt);

/// Gradient of reconstruction_loss with respect to every pred point, with
/// nearest-neighbor correspondences held fixed:
///   2 (p - nn_gt(p)) + sum over g with nn_pred(g) = p of 2 (p - g).
std::vector<Point3> reconstruction_loss_grad(const PointCloud& pred, const PointCloud& gt);

double total_loss(const DepthMap& pred_depth, const DepthMap& gt_depth, const PointCloud& pred_pc,
                  const PointCloud& gt_pc, const LossWeights& w = {});

struct CloudPair {
    const PointCloud* pred = nullptr;
    const PointCloud* gt = nullptr;
};

/// Sum of reconstruction_loss over samples.
double batch_loss(std::span<const CloudPair> samples);
double batch_loss(const std::vector<std::pair<PointCloud, PointCloud>>& samples);

}  // namespace plidar
