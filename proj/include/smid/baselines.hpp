#pragma once

// Comparison predictors: one least-squares model per horizon, and the
// worst-case bound obtained by iterating the 1-step model.

#include <vector>

#include "smid/dataset.hpp"
#include "smid/smident.hpp"
#include "smid/types.hpp"

namespace smid {

enum class BaselineKind { least_squares, iterated_one_step };

const char* to_string(BaselineKind kind);

struct LeastSquaresFit {
    Vector theta;
    bool regularized = false;  ///< rank-deficient data, ridge fallback used
};

/// argmin sum_i (y~_i - phi_i' theta)^2. Rank-deficient batches get a ridge
/// penalty of 1e-8 * trace(Phi' Phi) / q and a warning on stderr.
LeastSquaresFit least_squares_model(const RegressorBatch& batch);

/// e_1 = tau_hat_1,  e_j = tau_hat_1 + sum_{i=1..min(j-1,o)} |a_i| e_{j-i},
/// with a_i = theta_1(i-1) the output coefficients. Returns e_1..e_{p_max}.
std::vector<double> iterated_one_step_bound(const Vector& theta_1, double tau_hat_1, int o, int p_max);

struct BaselineResult {
    BaselineKind kind = BaselineKind::least_squares;
    std::vector<Vector> thetas;     ///< per p, least squares only
    std::vector<bool> regularized;  ///< per p, least squares only
    std::vector<double> bounds;     ///< tau_hat for p = 1..p_max
};

/// LS model for every p and its bound over the FPS of `models` (same data).
BaselineResult least_squares_baseline(const TimeSeriesDataset& ds, const MultiStepModelSet& models);

/// Iterates theta*_1 with its bound tau_hat_1.
BaselineResult iterated_baseline(const MultiStepModelSet& models);

}  // namespace smid
