#pragma once

#include <cstddef>
#include <vector>

#include "plidar/geometry.hpp"

namespace plidar {

/// Per-frame evaluation values. Depth errors are in mm, inverse-depth
/// errors in 1/km, Chamfer values in m^2.
struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    double irmse = 0.0;
    double imae = 0.0;
    double cd_sum = 0.0;
    double cd_mean = 0.0;
    /// Pixels with gt > 0.
    std::size_t n_valid = 0;
    /// Subset of n_valid where pred > 0 as well; the inverse metrics use these.
    std::size_t n_inverse = 0;
    std::size_t n_pred = 0;
    std::size_t n_gt = 0;
};

/// RMSE/MAE over pixels with gt > 0 (missing predictions count as 0 m),
/// iRMSE/iMAE over the pixels where pred > 0 too. Fills the depth fields only.
MetricsReport depth_metrics(const DepthMap& pred, const DepthMap& gt);

/// Sum over `a` (in index order) of the squared distance to the nearest
/// point of `b`.
double chamfer_directional(const PointCloud& a, const PointCloud& b);

/// Same value via linear scans; reference for the indexed version.
double chamfer_directional_brute(const PointCloud& a, const PointCloud& b);

struct ChamferResult {
    double sum = 0.0;
    double mean = 0.0;
};

/// sum = d(a,b) + d(b,a); mean = d(a,b)/|a| + d(b,a)/|b|.
ChamferResult chamfer(const PointCloud& a, const PointCloud& b);

struct EmdResult {
    double cost = 0.0;
    /// assignment[i] is the index in b matched to a[i].
    std::vector<std::size_t> assignment;
};

inline constexpr std::size_t kMaxEmdPoints = 512;

/// Minimum total (unsquared) Euclidean distance over bijections a -> b.
EmdResult emd_exact(const PointCloud& a, const PointCloud& b);

/// Optimal assignment for a square cost matrix in row-major order. Returns
/// the column chosen for each row. O(n^3).
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

}  // namespace plidar
