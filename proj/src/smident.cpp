#include "smid/smident.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <limits>
#include <string>
#include <thread>

#include "smid/kernels.hpp"

namespace smid {

const char* to_string(TauInflation mode) {
    return mode == TauInflation::whole ? "whole" : "spread_only";
}

TauInflation parse_tau_inflation(const std::string& text) {
    if (text == "spread_only") return TauInflation::spread_only;
    if (text == "whole") return TauInflation::whole;
    throw ConfigError("unknown tau inflation mode '" + text + "' (expected spread_only or whole)");
}

void SmConfig::validate() const {
    if (order < 1) throw ConfigError("order must be >= 1");
    if (p_max < 1) throw ConfigError("p_max must be >= 1");
    if (!(d_bound >= 0.0)) throw ConfigError("d_bound must be >= 0");
    if (!(alpha > 1.0)) throw ConfigError("alpha must be > 1");
    if (!(gamma > 1.0)) throw ConfigError("gamma must be > 1");
    if (!(omega_box > 0.0)) throw ConfigError("omega_box must be > 0");
}

LambdaEstimate estimate_lambda(const RegressorBatch& batch, double d_bound, const Polytope& omega,
                               const LpOptions& lp) {
    const Eigen::Index n = batch.rows();
    const Eigen::Index q = batch.dim();
    if (n == 0) throw std::invalid_argument("estimate_lambda: empty batch");
    if (!(d_bound >= 0.0)) throw std::invalid_argument("estimate_lambda: d_bound must be >= 0");
    if (omega.dim() != q) throw std::invalid_argument("estimate_lambda: Omega dimension mismatch");

    // Variables (theta, lambda).
    const Eigen::Index rows = 2 * n + 1 + omega.rows();
    Matrix A = Matrix::Zero(rows, q + 1);
    Vector b(rows);
    A.topLeftCorner(n, q) = batch.phi;
    A.block(n, 0, n, q) = -batch.phi;
    A.block(0, q, 2 * n, 1).setConstant(-1.0);
    b.head(n) = batch.targets.array() + d_bound;
    b.segment(n, n) = -batch.targets.array() + d_bound;
    A(2 * n, q) = -1.0;
    b(2 * n) = 0.0;
    A.bottomLeftCorner(omega.rows(), q) = omega.A();
    b.tail(omega.rows()) = omega.b();

    Vector c = Vector::Zero(q + 1);
    c(q) = 1.0;
    const LpSolution sol = solve_lp(c, Polytope(std::move(A), std::move(b)), Sense::minimize, lp);
    if (!sol.optimal())
        throw NumericalError(std::string("estimate_lambda: LP ended ") + to_string(sol.status) +
                             " for p=" + std::to_string(batch.p));
    LambdaEstimate out;
    // The LP keeps lambda >= 0; only basis-solve rounding can dip below.
    out.lambda = std::max(0.0, sol.argmin(q));
    out.theta = sol.argmin.head(q);
    return out;
}

Polytope build_fps(const RegressorBatch& batch, double eps_hat, double d_bound) {
    if (!(eps_hat >= 0.0)) throw std::invalid_argument("build_fps: eps_hat must be >= 0");
    const Eigen::Index n = batch.rows();
    Matrix A(2 * n, batch.dim());
    A.topRows(n) = batch.phi;
    A.bottomRows(n) = -batch.phi;
    Vector b(2 * n);
    const double width = eps_hat + d_bound;
    b.head(n) = batch.targets.array() + width;
    b.tail(n) = -batch.targets.array() + width;
    return {std::move(A), std::move(b)};
}

Vector fps_support_values(const RegressorBatch& batch, const Polytope& fps, const LpOptions& lp) {
    Vector c(fps.rows());
    for (Eigen::Index j = 0; j < fps.rows(); ++j) {
        const double h = support(fps, fps.A().row(j).transpose(), lp);
        if (!std::isfinite(h))
            throw UnboundedFpsError(batch.p, "support along signed regressor " + std::to_string(j) +
                                                 " is infinite");
        c(j) = h;
    }
    return c;
}

double inflate_tau(double tau_under, double eps_hat, double gamma, TauInflation mode) {
    return mode == TauInflation::whole ? gamma * tau_under
                                       : gamma * (tau_under - eps_hat) + eps_hat;
}

namespace {

// max_j (c_j - a_j' theta), floored at zero.
double spread_of(const Vector& theta_p, const Polytope& fps, const Vector& support_values) {
    if (support_values.size() != fps.rows())
        throw std::invalid_argument("tau_for_model: support values do not match the FPS rows");
    if (theta_p.size() != fps.dim())
        throw std::invalid_argument("tau_for_model: parameter dimension mismatch");
    if (fps.rows() == 0) return 0.0;
    Vector proj(fps.rows());
    kernels::active().gemv(fps.A().data(), static_cast<std::size_t>(fps.rows()),
                           static_cast<std::size_t>(fps.dim()), static_cast<std::size_t>(fps.dim()),
                           theta_p.data(), proj.data());
    return std::max(0.0, (support_values - proj).maxCoeff());
}

}  // namespace

TauBounds tau_for_model(const Vector& theta_p, const Polytope& fps, const Vector& support_values,
                        double eps_hat, double gamma, TauInflation mode) {
    TauBounds t;
    t.tau_under = spread_of(theta_p, fps, support_values) + eps_hat;
    t.tau_hat = inflate_tau(t.tau_under, eps_hat, gamma, mode);
    return t;
}

TauBounds tau_for_model(const Vector& theta_p, const RegressorBatch& batch, const Polytope& fps,
                        double eps_hat, double gamma, TauInflation mode, const LpOptions& lp) {
    return tau_for_model(theta_p, fps, fps_support_values(batch, fps, lp), eps_hat, gamma, mode);
}

NominalModel nominal_model(const RegressorBatch& batch, const Polytope& fps, double eps_hat,
                           double gamma, TauInflation mode, const LpOptions& lp) {
    if (batch.rows() == 0) throw std::invalid_argument("nominal_model: empty batch");
    NominalModel out;
    out.support_values = fps_support_values(batch, fps, lp);

    // min zeta over (theta_p, zeta):  theta_p in FPS,  c_j - a_j' theta_p <= zeta.
    const Eigen::Index m = fps.rows();
    const Eigen::Index q = fps.dim();
    Matrix A = Matrix::Zero(2 * m, q + 1);
    Vector b(2 * m);
    A.topLeftCorner(m, q) = fps.A();
    b.head(m) = fps.b();
    A.bottomLeftCorner(m, q) = -fps.A();
    A.block(m, q, m, 1).setConstant(-1.0);
    b.tail(m) = -out.support_values;
    Vector c = Vector::Zero(q + 1);
    c(q) = 1.0;
    const LpSolution sol = solve_lp(c, Polytope(std::move(A), std::move(b)), Sense::minimize, lp);
    if (sol.status == LpStatus::unbounded)
        throw UnboundedFpsError(batch.p, "nominal-model problem is unbounded");
    if (!sol.optimal())
        throw NumericalError(std::string("nominal_model: LP ended ") + to_string(sol.status) +
                             " for p=" + std::to_string(batch.p));
    out.theta = sol.argmin.head(q);
    out.bounds = tau_for_model(out.theta, fps, out.support_values, eps_hat, gamma, mode);
    out.spread = out.bounds.tau_under - eps_hat;
    return out;
}

StepResult identify_step(const RegressorBatch& batch, const SmConfig& config) {
    config.validate();
    const Eigen::Index q = batch.dim();
    StepResult r;
    r.p = batch.p;
    const LambdaEstimate est =
        estimate_lambda(batch, config.d_bound, Polytope::box(q, config.omega_box), config.lp);
    r.lambda_under = est.lambda;
    r.eps_hat = config.alpha * est.lambda;
    r.fps = build_fps(batch, r.eps_hat, config.d_bound);

    // eps_hat >= lambda, so the lambda minimizer is feasible.
    const double scale = 1.0 + batch.targets.cwiseAbs().maxCoeff();
    if (!r.fps.contains(est.theta, 1e3 * config.lp.feasibility_tol * scale))
        throw NumericalError("FPS for p=" + std::to_string(batch.p) +
                             " does not contain the lambda minimizer");
    if (!is_bounded(r.fps, config.lp))
        throw UnboundedFpsError(batch.p, std::to_string(batch.rows()) + " data rows for " +
                                             std::to_string(q) + " parameters");

    NominalModel nominal =
        nominal_model(batch, r.fps, r.eps_hat, config.gamma, config.inflation, config.lp);
    r.theta_star = std::move(nominal.theta);
    r.tau_under_star = nominal.bounds.tau_under;
    r.tau_hat_star = nominal.bounds.tau_hat;
    r.support_values = std::move(nominal.support_values);
    return r;
}

MultiStepModelSet identify_all(const TimeSeriesDataset& ds, const SmConfig& config,
                               unsigned threads) {
    config.validate();
    // Fails early with the length diagnostic for the largest horizon.
    (void)build_regressors(ds, config.order, config.p_max);

    MultiStepModelSet out;
    out.config = config;
    out.provenance.dataset_hash = dataset_hash(ds);
    out.steps.resize(static_cast<std::size_t>(config.p_max));

    const auto run = [&](int p) {
        out.steps[static_cast<std::size_t>(p - 1)] =
            identify_step(build_regressors(ds, config.order, p), config);
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || config.p_max == 1) {
        for (int p = 1; p <= config.p_max; ++p) run(p);
        return out;
    }
    // Strided assignment; each worker owns distinct slots of out.steps. The
    // first failure in p order is rethrown.
    std::vector<std::future<void>> workers;
    const int nworkers = static_cast<int>(std::min<unsigned>(threads, static_cast<unsigned>(config.p_max)));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.p_max));
    for (int w = 0; w < nworkers; ++w) {
        workers.push_back(std::async(std::launch::async, [&, w] {
            for (int p = 1 + w; p <= config.p_max; p += nworkers) {
                try {
                    run(p);
                } catch (...) {
                    errors[static_cast<std::size_t>(p - 1)] = std::current_exception();
                }
            }
        }));
    }
    for (auto& f : workers) f.get();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

const StepResult& MultiStepModelSet::step(int p) const {
    if (p < 1 || p > static_cast<int>(steps.size()))
        throw std::out_of_range("model set has no step p=" + std::to_string(p));
    return steps[static_cast<std::size_t>(p - 1)];
}

double predict(const MultiStepModelSet& models, const Vector& phi, int p) {
    const StepResult& s = models.step(p);
    if (phi.size() != s.theta_star.size())
        throw std::invalid_argument("predict: regressor has " + std::to_string(phi.size()) +
                                    " entries, model for p=" + std::to_string(p) + " expects " +
                                    std::to_string(s.theta_star.size()));
    return kernels::dot({phi.data(), static_cast<std::size_t>(phi.size())},
                        {s.theta_star.data(), static_cast<std::size_t>(s.theta_star.size())});
}

std::uint64_t dataset_hash(const TimeSeriesDataset& ds) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&](const std::vector<double>& v) {
        for (double x : v) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &x, sizeof(double));
            for (unsigned char byte : bytes) {
                h ^= byte;
                h *= 0x100000001b3ULL;
            }
        }
    };
    mix(ds.u);
    mix(ds.y);
    return h;
}

}  // namespace smid
