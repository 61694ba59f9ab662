#include <cmath>
#include <random>

#include "doctest.h"
#include "smid/baselines.hpp"
#include "smid/lti_bench.hpp"
#include "test_util.hpp"

using namespace smid;
using smid::testing::random_matrix;
using smid::testing::random_vector;

namespace {

RegressorBatch make_batch(const Matrix& phi, const Vector& targets) {
    RegressorBatch b;
    b.phi = phi;
    b.targets = targets;
    b.anchors.assign(static_cast<std::size_t>(phi.rows()), 0);
    return b;
}

}  // namespace

TEST_CASE("least squares on the scalar example is the mean") {
    Matrix phi(2, 1);
    phi << 1.0, 1.0;
    Vector y(2);
    y << 0.0, 2.0;
    const LeastSquaresFit fit = least_squares_model(make_batch(phi, y));
    CHECK(fit.theta(0) == doctest::Approx(1.0));
    CHECK_FALSE(fit.regularized);
}

TEST_CASE("least-squares residual is orthogonal to the regressors") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index q = std::uniform_int_distribution<Eigen::Index>(1, 8)(rng);
        const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(q, 60)(rng);
        const Matrix phi = random_matrix(rng, n, q);
        const Vector y = random_vector(rng, n, -3.0, 3.0);
        const LeastSquaresFit fit = least_squares_model(make_batch(phi, y));
        const Vector normal = phi.transpose() * (y - phi * fit.theta);
        CHECK(normal.cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("rank-deficient data falls back to ridge") {
    Matrix phi(4, 2);
    phi << 1, 1, 2, 2, 3, 3, -1, -1;
    const Vector y = phi.col(0);
    const LeastSquaresFit fit = least_squares_model(make_batch(phi, y));
    CHECK(fit.regularized);
    CHECK((phi * fit.theta - y).norm() <= 1e-6);
    // Ridge picks the minimum-norm split of the duplicated column.
    CHECK(fit.theta(0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("least squares reproduces noiseless targets") {
    BenchmarkConfig bc;
    bc.noise_bound = 0.0;
    bc.samples = 200;
    const TimeSeriesDataset ds = make_benchmark_dataset(bc);
    for (int p : {1, 5}) {
        const RegressorBatch b = build_regressors(ds, 3, p);
        const LeastSquaresFit fit = least_squares_model(b);
        CHECK((b.phi * fit.theta - b.targets).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("iterated one-step bound") {
    SUBCASE("FIR model does not feed errors back") {
        const Vector theta = Vector::Zero(regressor_dim(2, 1));
        for (double e : iterated_one_step_bound(theta, 0.3, 2, 6)) CHECK(e == 0.3);
    }
    SUBCASE("geometric series for a first-order model") {
        Vector theta(regressor_dim(1, 1));
        theta << 0.5, 7.0;
        const auto e = iterated_one_step_bound(theta, 1.0, 1, 30);
        CHECK(e[0] == 1.0);
        CHECK(e[1] == 1.5);
        CHECK(e[2] == 1.75);
        for (std::size_t j = 0; j < e.size(); ++j)
            CHECK(e[j] == doctest::Approx(2.0 - std::pow(0.5, static_cast<double>(j))));
    }
    SUBCASE("recursion matches direct evaluation and is nondecreasing") {
        std::mt19937_64 rng(8);
        const int o = 3;
        const Vector theta = random_vector(rng, regressor_dim(o, 1), -0.8, 0.8);
        const auto e = iterated_one_step_bound(theta, 0.2, o, 12);
        for (std::size_t j = 1; j < e.size(); ++j) CHECK(e[j] >= e[j - 1]);
        // e_4 written out.
        const double a1 = std::abs(theta(0)), a2 = std::abs(theta(1)), a3 = std::abs(theta(2));
        const double e1 = 0.2, e2 = 0.2 + a1 * e1, e3 = 0.2 + a1 * e2 + a2 * e1;
        CHECK(e[3] == doctest::Approx(0.2 + a1 * e3 + a2 * e2 + a3 * e1));
    }
    SUBCASE("unstable coefficient sum grows without settling") {
        Vector theta(regressor_dim(2, 1));
        theta << 0.8, -0.6, 1.0;
        const auto e = iterated_one_step_bound(theta, 0.1, 2, 40);
        CHECK(e.back() > 100.0 * e.front());
    }
    CHECK_THROWS_AS(iterated_one_step_bound(Vector::Zero(4), 0.1, 3, 5), std::invalid_argument);
}

TEST_CASE("benchmark baselines") {
    BenchmarkConfig bc;
    bc.samples = 200;
    const TimeSeriesDataset ds = make_benchmark_dataset(bc);
    SmConfig cfg;
    cfg.p_max = 4;
    const MultiStepModelSet models = identify_all(ds, cfg);
    const BaselineResult ls = least_squares_baseline(ds, models);
    const BaselineResult it = iterated_baseline(models);
    REQUIRE(ls.bounds.size() == 4);
    REQUIRE(it.bounds.size() == 4);
    CHECK(it.bounds[0] == models.step(1).tau_hat_star);
    for (int p = 1; p <= 4; ++p) {
        const StepResult& s = models.step(p);
        // theta* minimizes the spread over the FPS, LS is scored on the same FPS.
        CHECK(s.tau_hat_star <= ls.bounds[static_cast<std::size_t>(p - 1)] + 1e-9);
        // Cached support values give the same bound as re-solving.
        const RegressorBatch b = build_regressors(ds, 3, p);
        const TauBounds fresh = tau_for_model(ls.thetas[static_cast<std::size_t>(p - 1)], b, s.fps,
                                              s.eps_hat, cfg.gamma);
        CHECK(fresh.tau_hat == doctest::Approx(ls.bounds[static_cast<std::size_t>(p - 1)]).epsilon(1e-9));
    }
}
