#include "smid/lti_bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

namespace smid {

namespace {

// Controllable canonical realization of a strictly proper, validated tf.
void canonical_realization(const TransferFunctionC& tf, Eigen::MatrixXd& A, Eigen::VectorXd& B,
                           Eigen::RowVectorXd& C) {
    const auto n = static_cast<Eigen::Index>(tf.den.size() - 1);
    const double lead = tf.den.front();
    A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) A(0, j) = -tf.den[static_cast<std::size_t>(j + 1)] / lead;
    for (Eigen::Index i = 1; i < n; ++i) A(i, i - 1) = 1.0;
    B = Eigen::VectorXd::Zero(n);
    B(0) = 1.0;
    // Numerator right-aligned onto s^{n-1} .. s^0.
    C = Eigen::RowVectorXd::Zero(n);
    std::size_t first = 0;
    while (first + 1 < tf.num.size() && tf.num[first] == 0.0) ++first;
    const auto offset = n - static_cast<Eigen::Index>(tf.num.size() - first);
    for (std::size_t i = first; i < tf.num.size(); ++i)
        C(offset + static_cast<Eigen::Index>(i - first)) = tf.num[i] / lead;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

}  // namespace

void TransferFunctionC::validate() const {
    if (den.empty() || den.front() == 0.0)
        throw ConfigError("transfer function: denominator leading coefficient must be nonzero");
    if (num.empty()) throw ConfigError("transfer function: empty numerator");
    // Leading zeros in the numerator do not count towards its degree.
    std::size_t first = 0;
    while (first + 1 < num.size() && num[first] == 0.0) ++first;
    if (num.size() - first >= den.size())
        throw ConfigError("transfer function must be strictly proper (deg num < deg den)");
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    canonical_realization(*this, A, B, C);
    if (A.rows() == 0) return;
    const Eigen::VectorXcd poles = A.eigenvalues();
    for (Eigen::Index i = 0; i < poles.size(); ++i)
        if (!(poles(i).real() < 0.0))
            throw ConfigError("transfer function is not open-loop stable: pole at " +
                              std::to_string(poles(i).real()) + (poles(i).imag() >= 0 ? "+" : "") +
                              std::to_string(poles(i).imag()) + "i");
}

TransferFunctionC TransferFunctionC::shook_benchmark() {
    // (s + 1)(s^2 + 30 s + 229) = s^3 + 31 s^2 + 259 s + 229
    return {{2.0 * 229.0}, {1.0, 31.0, 259.0, 229.0}};
}

void StateSpaceD::validate() const {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.size() != n || C.size() != n)
        throw ConfigError("state space: inconsistent dimensions");
    if (!(Ts > 0.0)) throw ConfigError("state space: Ts must be > 0");
    if (n > 0 && !(spectral_radius() < 1.0))
        throw ConfigError("state space: spectral radius must be < 1");
}

double StateSpaceD::spectral_radius() const {
    if (A.rows() == 0) return 0.0;
    return A.eigenvalues().cwiseAbs().maxCoeff();
}

double StateSpaceD::dc_gain() const {
    const Eigen::Index n = A.rows();
    return C * (Eigen::MatrixXd::Identity(n, n) - A).partialPivLu().solve(B);
}

StateSpaceD discretize_zoh(const TransferFunctionC& tf, double Ts) {
    tf.validate();
    if (!(Ts > 0.0)) throw ConfigError("discretize_zoh: Ts must be > 0");
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    canonical_realization(tf, A, B, C);
    const Eigen::Index n = A.rows();

    // exp([A B; 0 0] Ts) = [Ad Bd; 0 1]
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = A * Ts;
    aug.topRightCorner(n, 1) = B * Ts;
    const Eigen::MatrixXd e = aug.exp();

    StateSpaceD ss{e.topLeftCorner(n, n), e.topRightCorner(n, 1), C, Ts};
    ss.validate();
    return ss;
}

std::vector<double> simulate(const StateSpaceD& ss, std::span<const double> u, const Vector& x0) {
    if (x0.size() != ss.order())
        throw std::invalid_argument("simulate: x0 has " + std::to_string(x0.size()) +
                                    " entries, system order is " + std::to_string(ss.order()));
    if (u.empty()) throw std::invalid_argument("simulate: empty input sequence");
    std::vector<double> z(u.size());
    Vector x = x0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        z[k] = ss.C.dot(x);
        x = ss.A * x + ss.B * u[k];
    }
    return z;
}

std::vector<double> gen_input_three_level(std::span<const double> levels, double hold_seconds,
                                          std::size_t duration_samples, double Ts,
                                          std::uint64_t seed) {
    if (levels.empty()) throw ConfigError("input generator: empty level set");
    if (!(Ts > 0.0)) throw ConfigError("input generator: Ts must be > 0");
    const double ratio = hold_seconds / Ts;
    const double block = std::round(ratio);
    if (!(block >= 1.0) || std::abs(ratio - block) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("input generator: hold time must be a positive multiple of Ts");

    auto rng = stream(seed, 1);
    std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
    std::vector<double> u(duration_samples);
    const auto hold = static_cast<std::size_t>(block);
    double level = 0.0;
    for (std::size_t k = 0; k < duration_samples; ++k) {
        if (k % hold == 0) level = levels[pick(rng)];
        u[k] = level;
    }
    return u;
}

std::vector<double> gen_colored_noise(std::size_t length, double bound, double filter_tc, double Ts,
                                      std::uint64_t seed) {
    if (!(bound >= 0.0)) throw ConfigError("noise generator: bound must be >= 0");
    if (!(filter_tc > 0.0)) throw ConfigError("noise generator: filter time constant must be > 0");
    if (!(Ts > 0.0)) throw ConfigError("noise generator: Ts must be > 0");
    std::vector<double> d(length, 0.0);
    if (bound == 0.0 || length == 0) return d;

    auto rng = stream(seed, 2);
    std::uniform_real_distribution<double> white(-bound, bound);
    const double a = std::exp(-Ts / filter_tc);
    double state = 0.0;
    double peak = 0.0;
    for (auto& v : d) {
        state = a * state + (1.0 - a) * white(rng);
        v = state;
        peak = std::max(peak, std::abs(state));
    }
    if (peak == 0.0) return d;
    const double gain = bound / peak;
    for (auto& v : d) v = std::clamp(v * gain, -bound, bound);
    return d;
}

TimeSeriesDataset make_benchmark_dataset(const BenchmarkConfig& config) {
    if (config.samples == 0) throw ConfigError("benchmark: sample count must be positive");
    const StateSpaceD ss = discretize_zoh(config.plant, config.Ts);
    TimeSeriesDataset ds;
    ds.Ts = config.Ts;
    ds.d_bound = config.noise_bound;
    ds.u = gen_input_three_level(config.levels, config.hold_seconds, config.samples, config.Ts,
                                 config.seed);
    std::vector<double> z = simulate(ss, ds.u, Vector::Zero(ss.order()));
    const std::vector<double> d =
        gen_colored_noise(config.samples, config.noise_bound, config.filter_tc, config.Ts, config.seed);
    ds.y.resize(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) ds.y[k] = z[k] + d[k];
    ds.z = std::move(z);
    return ds;
}

Vector multistep_parameters(const StateSpaceD& ss, int order, int step) {
    const Eigen::Index n = ss.order();
    if (order < 1 || step < 1) throw std::invalid_argument("multistep_parameters: order, step >= 1");
    if (order < n)
        throw std::invalid_argument("multistep_parameters: order " + std::to_string(order) +
                                    " is below the system order " + std::to_string(n));
    const Eigen::Index o = order;
    const Eigen::Index p = step;

    // Window z(k-o+1..k) = O x(k-o+1) + T u(k-o+1..k-1), oldest first.
    Eigen::MatrixXd O(o, n);
    Eigen::RowVectorXd cak = ss.C;
    std::vector<double> markov(static_cast<std::size_t>(std::max(o, p) + 1), 0.0);  // C A^i B
    for (Eigen::Index i = 0; i < o; ++i) {
        O.row(i) = cak;
        cak = cak * ss.A;
    }
    {
        Eigen::RowVectorXd ca = ss.C;
        for (std::size_t i = 0; i < markov.size(); ++i) {
            markov[i] = ca.dot(ss.B);
            ca = ca * ss.A;
        }
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(o, o - 1);
    for (Eigen::Index i = 0; i < o; ++i)
        for (Eigen::Index j = 0; j < i; ++j) T(i, j) = markov[static_cast<std::size_t>(i - 1 - j)];

    const Eigen::MatrixXd O_pinv = O.completeOrthogonalDecomposition().pseudoInverse();
    if ((O_pinv * O - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-8)
        throw std::invalid_argument("multistep_parameters: (A, C) is not observable");

    Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < o - 1; ++i) Apow = Apow * ss.A;  // A^{o-1}
    // x(k) = Mz Z + Mu U
    const Eigen::MatrixXd Mz = Apow * O_pinv;
    Eigen::MatrixXd R(n, o - 1);
    {
        Eigen::MatrixXd Aj = Eigen::MatrixXd::Identity(n, n);
        for (Eigen::Index j = o - 2; j >= 0; --j) {  // column j multiplies u(k-o+1+j)
            R.col(j) = Aj * ss.B;
            Aj = Aj * ss.A;
        }
    }
    const Eigen::MatrixXd Mu = R - Mz * T;

    Eigen::RowVectorXd g = ss.C;
    for (Eigen::Index i = 0; i < p; ++i) g = g * ss.A;  // C A^p
    const Eigen::RowVectorXd gz = g * Mz;
    const Eigen::RowVectorXd gu = g * Mu;

    Vector theta(2 * o - 1 + p);
    for (Eigen::Index l = 0; l < o; ++l) theta(l) = gz(o - 1 - l);            // y(k-l)
    for (Eigen::Index l = 0; l < o - 1; ++l) theta(o + l) = gu(o - 2 - l);     // u(k-1-l)
    for (Eigen::Index i = 0; i < p; ++i)                                      // u(k+i)
        theta(2 * o - 1 + i) = markov[static_cast<std::size_t>(p - 1 - i)];
    return theta;
}

}  // namespace smid
