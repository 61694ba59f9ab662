#pragma once

// Set Membership identification of multi-step predictors.
//
// For each horizon p the pipeline is
//   1. lambda_p: smallest uniform residual bound consistent with the data
//      and the noise bound (one LP),
//   2. eps_hat_p = alpha * lambda_p and the feasible parameter set
//      FPS = { theta : |y~_i - phi_i' theta| <= eps_hat_p + d_bar for all i },
//   3. the nominal model minimizing the worst-case spread
//      max_i max_{theta in FPS} |phi_i'(theta - theta_p)| over theta_p in FPS,
//      computed from the 2 N_p support values c_j of the FPS along the signed
//      regressors plus one epigraph LP.

#include <cstdint>
#include <vector>

#include "smid/dataset.hpp"
#include "smid/lpcore.hpp"
#include "smid/timeseries.hpp"
#include "smid/types.hpp"

namespace smid {

/// How gamma inflates the data-based bound tau_under.
enum class TauInflation {
    spread_only,  ///< tau_hat = gamma * (tau_under - eps_hat) + eps_hat
    whole,        ///< tau_hat = gamma * tau_under
};

const char* to_string(TauInflation mode);
TauInflation parse_tau_inflation(const std::string& text);

struct SmConfig {
    int order = 3;
    int p_max = 10;
    double d_bound = 0.2;
    double alpha = 1.2;
    double gamma = 1.2;
    double omega_box = 1e6;  ///< half-width of the parameter box Omega
    TauInflation inflation = TauInflation::spread_only;
    LpOptions lp{};

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct LambdaEstimate {
    double lambda = 0.0;
    Vector theta;  ///< a minimizer of the worst-case residual
};

/// min lambda  s.t.  |y~_i - phi_i' theta| <= lambda + d_bound, theta in omega, lambda >= 0.
LambdaEstimate estimate_lambda(const RegressorBatch& batch, double d_bound, const Polytope& omega,
                               const LpOptions& lp = {});

/// 2 N_p rows: [phi; -phi] theta <= [y~; -y~] + (eps_hat + d_bound).
/// Row j is the signed regressor used by the nominal-model reformulation.
Polytope build_fps(const RegressorBatch& batch, double eps_hat, double d_bound);

/// c_j = max_{theta in FPS} a_j' theta for every FPS row a_j.
/// Throws UnboundedFpsError(batch.p) when any of them is infinite.
Vector fps_support_values(const RegressorBatch& batch, const Polytope& fps, const LpOptions& lp = {});

struct TauBounds {
    double tau_under = 0.0;
    double tau_hat = 0.0;
};

double inflate_tau(double tau_under, double eps_hat, double gamma, TauInflation mode);

/// Worst-case bound of an arbitrary model theta_p, from precomputed support values.
TauBounds tau_for_model(const Vector& theta_p, const Polytope& fps, const Vector& support_values,
                        double eps_hat, double gamma, TauInflation mode = TauInflation::spread_only);

/// Same, solving the 2 N_p support LPs first.
TauBounds tau_for_model(const Vector& theta_p, const RegressorBatch& batch, const Polytope& fps,
                        double eps_hat, double gamma, TauInflation mode = TauInflation::spread_only,
                        const LpOptions& lp = {});

struct NominalModel {
    Vector theta;
    double spread = 0.0;  ///< min-max-max value
    TauBounds bounds;
    Vector support_values;  ///< c_j, reusable by tau_for_model
};

NominalModel nominal_model(const RegressorBatch& batch, const Polytope& fps, double eps_hat,
                           double gamma, TauInflation mode = TauInflation::spread_only,
                           const LpOptions& lp = {});

struct StepResult {
    int p = 0;
    double lambda_under = 0.0;
    double eps_hat = 0.0;
    Polytope fps;
    Vector theta_star;
    double tau_under_star = 0.0;
    double tau_hat_star = 0.0;
    Vector support_values;  ///< empty when loaded from disk
};

struct Provenance {
    std::uint64_t dataset_hash = 0;
    std::uint64_t seed = 0;
};

struct MultiStepModelSet {
    SmConfig config;
    std::vector<StepResult> steps;  ///< steps[p - 1]
    Provenance provenance;

    const StepResult& step(int p) const;
};

/// Runs the three identification stages on one batch.
StepResult identify_step(const RegressorBatch& batch, const SmConfig& config);

/// identify_step for p = 1..p_max. Steps run on up to `threads` workers
/// (0 picks the hardware concurrency); the result does not depend on it.
/// UnboundedFpsError carries the offending p.
MultiStepModelSet identify_all(const TimeSeriesDataset& ds, const SmConfig& config,
                               unsigned threads = 1);

/// phi' theta*_p. Throws std::invalid_argument on a dimension mismatch.
double predict(const MultiStepModelSet& models, const Vector& phi, int p);

/// FNV-1a over the raw bytes of u and y.
std::uint64_t dataset_hash(const TimeSeriesDataset& ds);

}  // namespace smid
