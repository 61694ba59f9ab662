#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace smid {

/// Sampled input u, noisy output y = z + d, and optionally the noise-free z.
struct TimeSeriesDataset {
    std::vector<double> u;
    std::vector<double> y;
    std::optional<std::vector<double>> z;  ///< clean output; benchmark data only
    double d_bound = 0.0;                  ///< |d(k)| <= d_bound
    double Ts = 1.0;

    std::size_t size() const noexcept { return u.size(); }

    /// Throws std::invalid_argument when lengths disagree, d_bound < 0, Ts <= 0,
    /// or a clean sample is farther than d_bound from its measurement.
    void validate() const;

    /// Samples [first, first + count).
    TimeSeriesDataset slice(std::size_t first, std::size_t count) const;
};

}  // namespace smid
