#pragma once

// p-step regressor batches and train/validation splits.
//
// Row for anchor instant k (0-based) of order o and horizon p:
//   [ y(k) .. y(k-o+1) | u(k-1) .. u(k-o+1) | u(k) .. u(k+p-1) ]  -> target y(k+p)
// Rows exist only where both windows are complete, k in [o-1, N-p-1].

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smid/timeseries.hpp"
#include "smid/types.hpp"

namespace smid {

struct RegressorBatch {
    int p = 1;
    int o = 1;
    Matrix phi;                        ///< N_p x (2o-1+p)
    Vector targets;                    ///< measured y(k+p)
    std::vector<std::size_t> anchors;  ///< k of each row
    double d_bound = 0.0;

    Eigen::Index rows() const noexcept { return phi.rows(); }
    Eigen::Index dim() const noexcept { return phi.cols(); }

    /// Batch restricted to the given row indices (in the given order).
    RegressorBatch select_rows(std::span<const Eigen::Index> rows) const;
};

/// 2o - 1 + p
constexpr Eigen::Index regressor_dim(int o, int p) { return 2 * o - 1 + p; }

/// y_lag0.., u_lag1.., u_fut0.. in row order.
std::vector<std::string> regressor_names(int o, int p);

/// Throws std::invalid_argument for o < 1, p < 1 or a series shorter than o + p.
RegressorBatch build_regressors(const TimeSeriesDataset& ds, int o, int p);

struct SplitSpec {
    double train_fraction = 1.0;  ///< in (0, 1]
    bool contiguous = true;
};

/// Training prefix and validation suffix. Fraction 1 leaves validation empty.
std::pair<TimeSeriesDataset, TimeSeriesDataset> split(const TimeSeriesDataset& ds,
                                                      const SplitSpec& spec);

/// Number of samples kept by a prefix of the given fraction.
std::size_t prefix_length(std::size_t total, double fraction);

}  // namespace smid
