#include "smid/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace smid {

std::vector<std::string> regressor_names(int o, int p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(regressor_dim(o, p)));
    for (int i = 0; i < o; ++i) names.push_back("y_lag" + std::to_string(i));
    for (int i = 1; i < o; ++i) names.push_back("u_lag" + std::to_string(i));
    for (int i = 0; i < p; ++i) names.push_back("u_fut" + std::to_string(i));
    return names;
}

RegressorBatch build_regressors(const TimeSeriesDataset& ds, int o, int p) {
    if (o < 1) throw std::invalid_argument("build_regressors: order must be >= 1");
    if (p < 1) throw std::invalid_argument("build_regressors: horizon must be >= 1");
    if (ds.u.size() != ds.y.size()) throw std::invalid_argument("build_regressors: u/y length mismatch");
    const std::size_t n = ds.size();
    const auto uo = static_cast<std::size_t>(o);
    const auto up = static_cast<std::size_t>(p);
    if (n < uo + up)
        throw std::invalid_argument("build_regressors: series of length " + std::to_string(n) +
                                    " is too short for o=" + std::to_string(o) + ", p=" +
                                    std::to_string(p) + " (need at least " +
                                    std::to_string(uo + up) + " samples)");

    const std::size_t rows = n - uo - up + 1;
    RegressorBatch batch;
    batch.o = o;
    batch.p = p;
    batch.d_bound = ds.d_bound;
    batch.phi.resize(static_cast<Eigen::Index>(rows), regressor_dim(o, p));
    batch.targets.resize(static_cast<Eigen::Index>(rows));
    batch.anchors.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t k = uo - 1 + r;
        auto row = batch.phi.row(static_cast<Eigen::Index>(r));
        Eigen::Index c = 0;
        for (std::size_t i = 0; i < uo; ++i) row(c++) = ds.y[k - i];
        for (std::size_t i = 1; i < uo; ++i) row(c++) = ds.u[k - i];
        for (std::size_t i = 0; i < up; ++i) row(c++) = ds.u[k + i];
        batch.targets(static_cast<Eigen::Index>(r)) = ds.y[k + up];
        batch.anchors[r] = k;
    }
    return batch;
}

RegressorBatch RegressorBatch::select_rows(std::span<const Eigen::Index> rows) const {
    RegressorBatch out;
    out.o = o;
    out.p = p;
    out.d_bound = d_bound;
    out.phi.resize(static_cast<Eigen::Index>(rows.size()), dim());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
    out.anchors.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Eigen::Index r = rows[i];
        if (r < 0 || r >= this->rows()) throw std::out_of_range("select_rows: row index out of range");
        out.phi.row(static_cast<Eigen::Index>(i)) = phi.row(r);
        out.targets(static_cast<Eigen::Index>(i)) = targets(r);
        out.anchors.push_back(anchors[static_cast<std::size_t>(r)]);
    }
    return out;
}

std::size_t prefix_length(std::size_t total, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("fraction must lie in (0, 1]");
    // The epsilon keeps 0.3 * 500 at 150 despite binary rounding.
    return std::min(total, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 1e-9)));
}

std::pair<TimeSeriesDataset, TimeSeriesDataset> split(const TimeSeriesDataset& ds,
                                                      const SplitSpec& spec) {
    if (!spec.contiguous)
        throw std::invalid_argument(
            "split: only contiguous splits are supported; interleaving breaks the regressor windows");
    const std::size_t n_train = prefix_length(ds.size(), spec.train_fraction);
    return {ds.slice(0, n_train), ds.slice(n_train, ds.size() - n_train)};
}

}  // namespace smid
