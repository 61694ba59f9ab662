#include "smid/timeseries.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace smid {

void TimeSeriesDataset::validate() const {
    if (u.size() != y.size())
        throw std::invalid_argument("dataset: u has " + std::to_string(u.size()) +
                                    " samples but y has " + std::to_string(y.size()));
    if (!(d_bound >= 0.0)) throw std::invalid_argument("dataset: d_bound must be >= 0");
    if (!(Ts > 0.0)) throw std::invalid_argument("dataset: Ts must be > 0");
    if (!z) return;
    if (z->size() != y.size())
        throw std::invalid_argument("dataset: z and y lengths differ");
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t k = 0; k < y.size(); ++k) {
        // y = z + d is rounded once, so allow a few ulps beyond the bound.
        const double slack = 4.0 * eps * std::max(std::abs(y[k]), std::abs((*z)[k]));
        if (std::abs(y[k] - (*z)[k]) > d_bound + slack)
            throw std::invalid_argument("dataset: |y - z| exceeds d_bound at k=" + std::to_string(k));
    }
}

TimeSeriesDataset TimeSeriesDataset::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw std::invalid_argument("dataset: slice out of range");
    const auto cut = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(first),
                                   v.begin() + static_cast<std::ptrdiff_t>(first + count));
    };
    TimeSeriesDataset out;
    out.u = cut(u);
    out.y = cut(y);
    if (z) out.z = cut(*z);
    out.d_bound = d_bound;
    out.Ts = Ts;
    return out;
}

}  // namespace smid
