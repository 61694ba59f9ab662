#pragma once

// Benchmark study driver: order and data-fraction sweeps of lambda, the bound
// comparison against the baselines, and validation on held-out data.
//
// Files written by run_benchmark into the output directory:
//   config.txt                   effective configuration (key=value)
//   dataset.csv, validation.csv  k,u,y,z
//   model/                       multi-step model bundle
//   baseline_ls/, baseline_iterated/
//   bounds.csv                   p,tau_multistep,tau_ls,tau_iterated
//   violations.csv               p,samples,violations,max_ratio,ls_violations,ls_max_ratio
//   fig1_lambda_vs_order.csv     order,lambda_p<p>...
//   fig2_lambda_vs_fraction.csv  fraction,samples,lambda_p<p>...
//   fig3_bounds.csv              same columns as bounds.csv
//   fig4_trace_p<p_max>.csv      k,z,z_hat,upper,lower

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "smid/baselines.hpp"
#include "smid/io.hpp"
#include "smid/lti_bench.hpp"
#include "smid/smident.hpp"

namespace smid {

struct ExperimentConfig {
    BenchmarkConfig bench;
    SmConfig sm;
    std::vector<int> orders{1, 2, 3, 4, 5, 6};
    std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<int> p_list{3, 6, 9};
    /// Validation data: a fresh realization with this seed (default seed + 1),
    /// or the suffix of the identification data when train_fraction < 1.
    std::optional<std::uint64_t> validation_seed;
    std::size_t validation_samples = 500;
    double train_fraction = 1.0;
    unsigned threads = 1;
    std::filesystem::path out_dir = "out";

    std::uint64_t effective_validation_seed() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Unknown keys and unparsable values throw ConfigError.
void apply_key_values(ExperimentConfig& cfg, const KeyValues& kv);
KeyValues to_key_values(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct LambdaTable {
    std::vector<double> rows;  ///< orders or fractions
    std::vector<int> p_list;
    std::vector<std::vector<double>> lambda;  ///< lambda[row][p index]
    std::vector<std::size_t> samples;         ///< data length per row (fraction sweep)
};

LambdaTable sweep_order(const TimeSeriesDataset& ds, const SmConfig& sm, const std::vector<int>& orders,
                        const std::vector<int>& p_list);
LambdaTable sweep_data_fraction(const TimeSeriesDataset& ds, const SmConfig& sm,
                                const std::vector<double>& fractions, const std::vector<int>& p_list);

struct StepViolations {
    int p = 0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double max_ratio = 0.0;  ///< max |ref - z_hat| / tau_hat
    std::size_t ls_violations = 0;
    double ls_max_ratio = 0.0;
};

struct ViolationReport {
    bool clean_reference = true;  ///< compared against z, else against y with d_bound slack
    std::vector<StepViolations> steps;
    std::size_t total_violations() const;
};

struct TracePoint {
    std::size_t k = 0;  ///< index of the predicted sample
    double z = 0.0;
    double z_hat = 0.0;
    double upper = 0.0;
    double lower = 0.0;
};

/// Slack for floating-point noise in the bound comparison.
constexpr double kViolationSlack = 1e-8;

/// `ls` may be null. Trace points are produced for step `trace_p` (0 for none).
ViolationReport validate(const MultiStepModelSet& models, const BaselineResult* ls,
                         const TimeSeriesDataset& validation, int trace_p = 0,
                         std::vector<TracePoint>* trace = nullptr);

struct BenchmarkRun {
    TimeSeriesDataset train;
    TimeSeriesDataset validation;
    MultiStepModelSet models;
    BaselineResult ls;
    BaselineResult iterated;
    ViolationReport violations;
    LambdaTable by_order;
    LambdaTable by_fraction;
    std::vector<TracePoint> trace;
};

/// Computes everything without touching the filesystem.
BenchmarkRun compute_benchmark(const ExperimentConfig& cfg);

/// compute_benchmark followed by write_benchmark_outputs into cfg.out_dir.
BenchmarkRun run_benchmark(const ExperimentConfig& cfg);
void write_benchmark_outputs(const ExperimentConfig& cfg, const BenchmarkRun& run);

void write_lambda_table(const std::filesystem::path& path, const LambdaTable& table, const char* row_name);
void write_violations(const std::filesystem::path& path, const ViolationReport& report);
void write_trace(const std::filesystem::path& path, const std::vector<TracePoint>& trace);

/// Identification data, and validation data per the config.
std::pair<TimeSeriesDataset, TimeSeriesDataset> make_experiment_data(const ExperimentConfig& cfg);

}  // namespace smid
