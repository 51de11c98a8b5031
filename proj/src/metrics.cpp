#include "plidar/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "plidar/errors.hpp"
#include "plidar/spatial_index.hpp"

namespace plidar {

namespace {

constexpr double kMillimetersPerMeter = 1000.0;
// 1/m -> 1/km
constexpr double kInverseKmPerInverseM = 1000.0;

void require_non_empty(const PointCloud& a, const PointCloud& b, const char* what) {
    if (a.empty() || b.empty()) {
        throw EmptyCloudError(std::string(what) + " needs two non-empty clouds");
    }
}

}  // namespace

MetricsReport depth_metrics(const DepthMap& pred, const DepthMap& gt) {
    if (!pred.same_shape(gt)) {
        throw DimensionError("prediction and ground truth differ in size");
    }
    MetricsReport r;
    double sq = 0.0;
    double abs_sum = 0.0;
    double inv_sq = 0.0;
    double inv_abs = 0.0;
    const auto p = pred.depths();
    const auto g = gt.depths();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] > 0.0)) {
            continue;
        }
        ++r.n_valid;
        const double err_mm = (p[i] - g[i]) * kMillimetersPerMeter;
        sq += err_mm * err_mm;
        abs_sum += std::abs(err_mm);
        if (p[i] > 0.0) {
            ++r.n_inverse;
            const double inv_err = (1.0 / p[i] - 1.0 / g[i]) * kInverseKmPerInverseM;
            inv_sq += inv_err * inv_err;
            inv_abs += std::abs(inv_err);
        }
    }
    if (r.n_valid == 0) {
        throw InvalidArgumentError("ground truth has no valid pixels");
    }
    const auto n = static_cast<double>(r.n_valid);
    r.rmse = std::sqrt(sq / n);
    r.mae = abs_sum / n;
    if (r.n_inverse > 0) {
        const auto m = static_cast<double>(r.n_inverse);
        r.irmse = std::sqrt(inv_sq / m);
        r.imae = inv_abs / m;
    }
    return r;
}

double chamfer_directional(const PointCloud& a, const PointCloud& b) {
    require_non_empty(a, b, "chamfer_directional");
    const KdTree tree(b);
    double sum = 0.0;
    for (const auto& p : a.points) {
        sum += tree.nearest(p).squared_distance;
    }
    return sum;
}

double chamfer_directional_brute(const PointCloud& a, const PointCloud& b) {
    require_non_empty(a, b, "chamfer_directional_brute");
    double sum = 0.0;
    for (const auto& p : a.points) {
        sum += nearest_brute(b, p).squared_distance;
    }
    return sum;
}

ChamferResult chamfer(const PointCloud& a, const PointCloud& b) {
    const double ab = chamfer_directional(a, b);
    const double ba = chamfer_directional(b, a);
    return {ab + ba, ab / static_cast<double>(a.size()) + ba / static_cast<double>(b.size())};
}

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
    if (cost.size() != n * n) {
        throw SizeMismatchError("cost matrix is not n x n");
    }
    // Shortest augmenting path with row/column potentials, 1-based with a
    // virtual column 0.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> row_pot(n + 1, 0.0);
    std::vector<double> col_pot(n + 1, 0.0);
    std::vector<std::size_t> col_owner(n + 1, 0);
    std::vector<std::size_t> prev_col(n + 1, 0);
    std::vector<double> min_slack(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        col_owner[0] = row;
        std::size_t col = 0;
        std::fill(min_slack.begin(), min_slack.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col] = 1;
            const std::size_t r = col_owner[col];
            double delta = kInf;
            std::size_t next = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double slack = cost[(r - 1) * n + (j - 1)] - row_pot[r] - col_pot[j];
                if (slack < min_slack[j]) {
                    min_slack[j] = slack;
                    prev_col[j] = col;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    next = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    row_pot[col_owner[j]] += delta;
                    col_pot[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            col = next;
        } while (col_owner[col] != 0);
        do {
            const std::size_t back = prev_col[col];
            col_owner[col] = col_owner[back];
            col = back;
        } while (col != 0);
    }

    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) {
        assignment[col_owner[j] - 1] = j - 1;
    }
    return assignment;
}

EmdResult emd_exact(const PointCloud& a, const PointCloud& b) {
    if (a.size() != b.size()) {
        throw SizeMismatchError("emd_exact needs equal-size clouds (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
    }
    const std::size_t n = a.size();
    if (n > kMaxEmdPoints) {
        throw InvalidArgumentError("emd_exact is limited to " + std::to_string(kMaxEmdPoints) +
                                   " points; subsample both clouds first");
    }
    EmdResult out;
    if (n == 0) {
        return out;
    }
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cost[i * n + j] = std::sqrt(squared_distance(a.points[i], b.points[j]));
        }
    }
    out.assignment = solve_assignment(cost, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.cost += cost[i * n + out.assignment[i]];
    }
    return out;
}

}  // namespace plidar
