// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "smid/experiment.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace smid;
using namespace smid::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("smid_acceptance_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

ExperimentConfig paper_config(std::uint64_t seed = 1) {
    ExperimentConfig cfg;
    cfg.bench.seed = seed;
    return cfg;
}

Outcome c1_pipeline() {
    ExperimentConfig cfg = paper_config();
    cfg.out_dir = scratch_dir("c1");
    const auto t0 = std::chrono::steady_clock::now();
    const BenchmarkRun run = run_benchmark(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool files = true;
    for (const char* f : {"fig1_lambda_vs_order.csv", "fig2_lambda_vs_fraction.csv", "fig3_bounds.csv",
                          "fig4_trace_p10.csv", "bounds.csv"})
        files = files && fs::exists(cfg.out_dir / f) && read_csv(cfg.out_dir / f).rows.size() > 0;
    const std::size_t bound_rows = read_csv(cfg.out_dir / "bounds.csv").rows.size();
    fs::remove_all(cfg.out_dir);
    return {secs < 300.0 && files && bound_rows == 10 && run.models.steps.size() == 10,
            fmt("%.2f s", secs) + ", figure files " + (files ? "present" : "missing") + ", " +
                std::to_string(bound_rows) + " bound rows"};
}

Outcome c2_ordering() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        ExperimentConfig cfg = paper_config(seed);
        const TimeSeriesDataset ds = make_benchmark_dataset(cfg.bench);
        const MultiStepModelSet m = identify_all(ds, cfg.sm);
        const BaselineResult ls = least_squares_baseline(ds, m);
        const BaselineResult it = iterated_baseline(m);
        int bad_it = 0, bad_ls = 0;
        for (int p = 1; p <= cfg.sm.p_max; ++p) {
            const double t = m.step(p).tau_hat_star;
            if (p >= 2 && t > it.bounds[static_cast<std::size_t>(p - 1)] + 1e-12) ++bad_it;
            if (t > ls.bounds[static_cast<std::size_t>(p - 1)] + 1e-12) ++bad_ls;
        }
        ok = ok && bad_it == 0 && bad_ls == 0;
        detail += "seed " + std::to_string(seed) + ": " + std::to_string(bad_it) + " iterated, " +
                  std::to_string(bad_ls) + " LS inversions; ";
    }
    return {ok, detail};
}

Outcome c3_order_trend() {
    const ExperimentConfig cfg = paper_config();
    const TimeSeriesDataset ds = make_benchmark_dataset(cfg.bench);
    const LambdaTable t = sweep_order(ds, cfg.sm, {1, 2, 3, 4, 5, 6}, {3, 6, 9});
    double worst = -INFINITY;
    for (std::size_t j = 0; j < t.p_list.size(); ++j)
        for (std::size_t r = 1; r < t.rows.size(); ++r) worst = std::max(worst, t.lambda[r][j] - t.lambda[r - 1][j]);
    return {worst <= 1e-9, "largest increase with order " + fmt("%.3g", worst)};
}

Outcome c4_fraction_trend() {
    const ExperimentConfig cfg = paper_config();
    const TimeSeriesDataset ds = make_benchmark_dataset(cfg.bench);
    const LambdaTable t = sweep_data_fraction(ds, cfg.sm, cfg.fractions, {3, 6, 9});
    double worst_drop = -INFINITY;
    bool plateau = true;
    std::string detail;
    const std::size_t i80 = 7, i100 = 9;
    for (std::size_t j = 0; j < t.p_list.size(); ++j) {
        for (std::size_t r = 1; r < t.rows.size(); ++r)
            worst_drop = std::max(worst_drop, t.lambda[r - 1][j] - t.lambda[r][j]);
        const double a = t.lambda[i80][j], b = t.lambda[i100][j];
        // Values at solver precision count as zero.
        const double change = std::abs(b - a) <= 1e-9 ? 0.0 : std::abs(b - a) / std::max(std::abs(b), 1e-300);
        plateau = plateau && change < 0.05;
        detail += "p=" + std::to_string(t.p_list[j]) + " 80%->100% " + fmt("%.3g", a) + "->" + fmt("%.3g", b) +
                  " (" + fmt("%.1f", 100.0 * change) + "%); ";
    }
    detail = "largest decrease " + fmt("%.3g", worst_drop) + "; " + detail;
    return {worst_drop <= 1e-9 && plateau, detail};
}

Outcome c5_noiseless() {
    ExperimentConfig cfg = paper_config();
    cfg.bench.noise_bound = 0.0;
    cfg.sm.d_bound = 0.0;
    const auto [train, val] = make_experiment_data(cfg);
    const MultiStepModelSet m = identify_all(train, cfg.sm);
    const StateSpaceD ss = discretize_zoh(cfg.bench.plant, cfg.bench.Ts);
    double lam = 0.0, outside = -INFINITY;
    for (const StepResult& s : m.steps) {
        lam = std::max(lam, s.lambda_under);
        outside = std::max(outside, s.fps.max_violation(multistep_parameters(ss, 3, s.p)));
    }
    const ViolationReport rep = validate(m, nullptr, val);
    return {lam <= 1e-8 && outside <= 1e-8 && rep.total_violations() == 0,
            "max lambda " + fmt("%.3g", lam) + ", true parameter FPS violation " + fmt("%.3g", outside) +
                ", validation violations " + std::to_string(rep.total_violations())};
}

RegressorBatch random_batch(std::mt19937_64& rng, Eigen::Index q, Eigen::Index n) {
    RegressorBatch b;
    b.phi = random_matrix(rng, n, q);
    b.targets = b.phi * random_vector(rng, q) + random_vector(rng, n, -0.3, 0.3);
    b.anchors.assign(static_cast<std::size_t>(n), 0);
    return b;
}

Outcome c6_reformulation() {
    std::mt19937_64 rng(606);
    double worst = 0.0;
    int instances = 0;
    while (instances < 200) {
        const Eigen::Index q = std::uniform_int_distribution<Eigen::Index>(1, 3)(rng);
        const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(q + 1, 10)(rng);
        const RegressorBatch b = random_batch(rng, q, n);
        const double d = std::uniform_real_distribution<double>(0.0, 0.2)(rng);
        const double lam = estimate_lambda(b, d, Polytope::box(q, 1e6)).lambda;
        const double eps = 1.2 * lam + std::uniform_real_distribution<double>(0.0, 0.05)(rng);
        const Polytope fps = build_fps(b, eps, d);
        if (!is_bounded(fps)) continue;
        const NominalModel nm = nominal_model(b, fps, eps, 1.2);
        worst = std::max(worst, std::abs(nm.spread - minmaxmax_by_vertices(b, fps)));
        ++instances;
    }
    return {worst <= 1e-5, std::to_string(instances) + " instances, max |LP - brute force| " + fmt("%.3g", worst)};
}

Outcome c7_subset() {
    std::mt19937_64 rng(707);
    const TimeSeriesDataset ds = make_benchmark_dataset(BenchmarkConfig{});
    std::vector<RegressorBatch> batches;
    std::vector<double> full;
    for (int p = 1; p <= 10; ++p) {
        batches.push_back(build_regressors(ds, 3, p));
        full.push_back(estimate_lambda(batches.back(), 0.2, Polytope::box(batches.back().dim(), 1e6)).lambda);
    }
    double worst = -INFINITY;
    for (int trial = 0; trial < 500; ++trial) {
        double excess;
        if (trial % 2 == 0) {
            const auto k = static_cast<std::size_t>(trial / 2 % 10);
            const RegressorBatch& b = batches[k];
            std::vector<Eigen::Index> rows;
            const double keep = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
            std::bernoulli_distribution coin(keep);
            for (Eigen::Index i = 0; i < b.rows(); ++i)
                if (coin(rng)) rows.push_back(i);
            if (rows.empty()) rows.push_back(0);
            excess = estimate_lambda(b.select_rows(rows), 0.2, Polytope::box(b.dim(), 1e6)).lambda - full[k];
        } else {
            const Eigen::Index q = std::uniform_int_distribution<Eigen::Index>(1, 6)(rng);
            const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(2, 60)(rng);
            RegressorBatch b = random_batch(rng, q, n);
            b.targets += random_vector(rng, n, -1.0, 1.0);
            std::vector<Eigen::Index> rows;
            std::bernoulli_distribution coin(0.5);
            for (Eigen::Index i = 0; i < n; ++i)
                if (coin(rng)) rows.push_back(i);
            if (rows.empty()) rows.push_back(n - 1);
            const Polytope omega = Polytope::box(q, 1e6);
            excess = estimate_lambda(b.select_rows(rows), 0.1, omega).lambda - estimate_lambda(b, 0.1, omega).lambda;
        }
        worst = std::max(worst, excess);
    }
    return {worst <= 1e-9, "500 trials, max lambda(subset) - lambda(full) " + fmt("%.3g", worst)};
}

Outcome c8_validation() {
    const ExperimentConfig cfg = paper_config();
    const BenchmarkRun run = compute_benchmark(cfg);
    std::string detail = "validation seed " + std::to_string(cfg.effective_validation_seed()) + ": ";
    for (const auto& s : run.violations.steps)
        if (s.violations)
            detail += "p=" + std::to_string(s.p) + " " + std::to_string(s.violations) + "/" +
                      std::to_string(s.samples) + " (max ratio " + fmt("%.3f", s.max_ratio) + ") ";
    if (run.violations.total_violations() == 0) detail += "no violations";
    return {run.violations.total_violations() == 0, detail};
}

Outcome c9_lp_core() {
    std::mt19937_64 rng(909);
    double worst_obj = 0.0, worst_hom = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Index q = std::uniform_int_distribution<Eigen::Index>(1, 4)(rng);
        const Eigen::Index cuts = std::uniform_int_distribution<Eigen::Index>(0, 12 - 2 * q)(rng);
        const Polytope poly = random_bounded_polytope(rng, q, cuts);
        const Vector c = random_vector(rng, q);
        const double expect = vertex_max(enumerate_vertices(poly), c);
        const LpSolution sol = solve_lp(c, poly, Sense::maximize);
        if (!sol.optimal()) return {false, "trial " + std::to_string(trial) + " not optimal"};
        worst_obj = std::max(worst_obj, std::abs(sol.objective - expect));
        const double a = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        const double h = support(poly, c);
        worst_hom = std::max(worst_hom, std::abs(support(poly, Vector(a * c)) - a * h) / (1.0 + std::abs(a * h)));
    }
    return {worst_obj <= 1e-7 && worst_hom <= 1e-9,
            "max objective error " + fmt("%.3g", worst_obj) + ", max homogeneity error " + fmt("%.3g", worst_hom)};
}

Outcome c10_determinism() {
    ExperimentConfig a = paper_config();
    a.out_dir = scratch_dir("c10a");
    ExperimentConfig b = a;
    b.out_dir = scratch_dir("c10b");
    run_benchmark(a);
    run_benchmark(b);
    std::size_t files = 0, differing = 0;
    for (const auto& e : fs::recursive_directory_iterator(a.out_dir)) {
        if (!e.is_regular_file()) continue;
        ++files;
        const fs::path other = b.out_dir / fs::relative(e.path(), a.out_dir);
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differing;
    }
    std::size_t files_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(b.out_dir)) files_b += e.is_regular_file();
    fs::remove_all(a.out_dir);
    fs::remove_all(b.out_dir);
    return {files > 0 && differing == 0 && files == files_b,
            std::to_string(files) + " files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"benchmark pipeline end-to-end", c1_pipeline},
        {"bound ordering vs iterated and LS", c2_ordering},
        {"lambda nonincreasing in order", c3_order_trend},
        {"lambda vs data fraction", c4_fraction_trend},
        {"noiseless oracle", c5_noiseless},
        {"nominal-model LP vs brute force", c6_reformulation},
        {"lambda row-subset lower bound", c7_subset},
        {"zero violations on held-out data", c8_validation},
        {"LP core vs vertex enumeration", c9_lp_core},
        {"byte-identical reruns", c10_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %zu: %s | %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
