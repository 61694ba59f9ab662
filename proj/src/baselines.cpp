#include "smid/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace smid {

const char* to_string(BaselineKind kind) {
    return kind == BaselineKind::least_squares ? "least_squares" : "iterated_one_step";
}

LeastSquaresFit least_squares_model(const RegressorBatch& batch) {
    const Eigen::Index q = batch.dim();
    if (batch.rows() == 0 || q == 0) throw std::invalid_argument("least_squares_model: empty batch");
    const Eigen::MatrixXd phi = batch.phi;
    LeastSquaresFit fit;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    if (qr.rank() == q) {
        fit.theta = qr.solve(batch.targets);
        return fit;
    }
    const Eigen::MatrixXd gram = phi.transpose() * phi;
    double mu = 1e-8 * gram.trace() / static_cast<double>(q);
    if (!(mu > 0.0)) mu = 1e-8;
    fit.theta = (gram + mu * Eigen::MatrixXd::Identity(q, q)).ldlt().solve(phi.transpose() * batch.targets);
    fit.regularized = true;
    std::cerr << "warning: least-squares data for p=" << batch.p << " has rank " << qr.rank()
              << " < " << q << "; using ridge penalty " << mu << "\n";
    return fit;
}

std::vector<double> iterated_one_step_bound(const Vector& theta_1, double tau_hat_1, int o, int p_max) {
    if (o < 1 || p_max < 1) throw std::invalid_argument("iterated_one_step_bound: o and p_max must be >= 1");
    if (theta_1.size() != regressor_dim(o, 1))
        throw std::invalid_argument("iterated_one_step_bound: theta_1 has " +
                                    std::to_string(theta_1.size()) + " entries, expected " +
                                    std::to_string(regressor_dim(o, 1)));
    std::vector<double> e(static_cast<std::size_t>(p_max));
    for (int j = 1; j <= p_max; ++j) {
        double v = tau_hat_1;
        for (int i = 1; i <= std::min(j - 1, o); ++i)
            v += std::abs(theta_1(i - 1)) * e[static_cast<std::size_t>(j - i - 1)];
        e[static_cast<std::size_t>(j - 1)] = v;
    }
    return e;
}

BaselineResult least_squares_baseline(const TimeSeriesDataset& ds, const MultiStepModelSet& models) {
    const SmConfig& cfg = models.config;
    BaselineResult r;
    r.kind = BaselineKind::least_squares;
    for (const StepResult& s : models.steps) {
        const RegressorBatch batch = build_regressors(ds, cfg.order, s.p);
        LeastSquaresFit fit = least_squares_model(batch);
        const TauBounds t =
            s.support_values.size() == s.fps.rows()
                ? tau_for_model(fit.theta, s.fps, s.support_values, s.eps_hat, cfg.gamma, cfg.inflation)
                : tau_for_model(fit.theta, batch, s.fps, s.eps_hat, cfg.gamma, cfg.inflation, cfg.lp);
        r.thetas.push_back(std::move(fit.theta));
        r.regularized.push_back(fit.regularized);
        r.bounds.push_back(t.tau_hat);
    }
    return r;
}

BaselineResult iterated_baseline(const MultiStepModelSet& models) {
    BaselineResult r;
    r.kind = BaselineKind::iterated_one_step;
    const StepResult& one = models.step(1);
    r.bounds = iterated_one_step_bound(one.theta_star, one.tau_hat_star, models.config.order,
                                       static_cast<int>(models.steps.size()));
    return r;
}

}  // namespace smid
