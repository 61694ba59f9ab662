// smid-exp: benchmark, sweeps and validation from the command line.
//
// Exit codes: 0 success, 2 configuration or input error, 3 unbounded feasible
// parameter set (not enough data), 4 numerical failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "smid/experiment.hpp"

namespace fs = std::filesystem;
using namespace smid;

namespace {

enum Exit { ok = 0, config_error = 2, unbounded = 3, numerical = 4 };

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> order;
    std::optional<int> pmax;
    std::optional<double> alpha;
    std::optional<double> gamma;
    std::optional<double> dbar;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
    app->add_option("--seed", o.seed, "benchmark seed");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--order", o.order, "model order o");
    app->add_option("--pmax", o.pmax, "largest prediction step");
    app->add_option("--alpha", o.alpha, "lambda inflation (> 1)");
    app->add_option("--gamma", o.gamma, "bound inflation (> 1)");
    app->add_option("--dbar", o.dbar, "measurement noise bound used for identification");
    app->add_option("--threads", o.threads, "workers for the per-step identification");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_experiment_config(o.config);
    if (o.seed) cfg.bench.seed = *o.seed;
    if (o.out) cfg.out_dir = *o.out;
    if (o.order) cfg.sm.order = *o.order;
    if (o.pmax) cfg.sm.p_max = *o.pmax;
    if (o.alpha) cfg.sm.alpha = *o.alpha;
    if (o.gamma) cfg.sm.gamma = *o.gamma;
    if (o.dbar) cfg.sm.d_bound = *o.dbar;
    if (o.threads) cfg.threads = *o.threads;
    cfg.validate();
    return cfg;
}

void print_summary(const BenchmarkRun& run) {
    std::printf("%3s %12s %12s %12s %12s %12s %10s\n", "p", "lambda", "tau_hat", "tau_ls", "tau_iter",
                "max_ratio", "violations");
    for (const StepResult& s : run.models.steps) {
        const auto i = static_cast<std::size_t>(s.p - 1);
        const StepViolations& v = run.violations.steps[i];
        std::printf("%3d %12.6f %12.6f %12.6f %12.6f %12.4f %6zu/%zu\n", s.p, s.lambda_under, s.tau_hat_star,
                    run.ls.bounds[i], run.iterated.bounds[i], v.max_ratio, v.violations, v.samples);
    }
}

int cmd_bench(const Overrides& o) {
    const ExperimentConfig cfg = resolve(o);
    const BenchmarkRun run = run_benchmark(cfg);
    print_summary(run);
    std::printf("wrote %s\n", cfg.out_dir.string().c_str());
    return ok;
}

int cmd_sweep_order(const Overrides& o) {
    const ExperimentConfig cfg = resolve(o);
    const TimeSeriesDataset train = make_experiment_data(cfg).first;
    const LambdaTable t = sweep_order(train, cfg.sm, cfg.orders, cfg.p_list);
    fs::create_directories(cfg.out_dir);
    const fs::path path = cfg.out_dir / "fig1_lambda_vs_order.csv";
    write_lambda_table(path, t, "order");
    std::printf("wrote %s\n", path.string().c_str());
    return ok;
}

int cmd_sweep_data(const Overrides& o) {
    const ExperimentConfig cfg = resolve(o);
    const TimeSeriesDataset train = make_experiment_data(cfg).first;
    const LambdaTable t = sweep_data_fraction(train, cfg.sm, cfg.fractions, cfg.p_list);
    fs::create_directories(cfg.out_dir);
    const fs::path path = cfg.out_dir / "fig2_lambda_vs_fraction.csv";
    write_lambda_table(path, t, "fraction");
    std::printf("wrote %s\n", path.string().c_str());
    return ok;
}

int cmd_validate(const Overrides& o, const std::string& model_dir, const std::string& data,
                 std::optional<double> Ts, std::optional<double> data_dbar) {
    ExperimentConfig cfg = resolve(o);
    const MultiStepModelSet models = read_model_bundle(model_dir);
    TimeSeriesDataset ds;
    if (data.empty()) {
        ds = make_experiment_data(cfg).second;
    } else {
        ds = read_dataset_csv(data, Ts.value_or(cfg.bench.Ts), data_dbar.value_or(cfg.bench.noise_bound));
    }
    std::vector<TracePoint> trace;
    const ViolationReport report = validate(models, nullptr, ds, models.config.p_max, &trace);
    fs::create_directories(cfg.out_dir);
    write_violations(cfg.out_dir / "violations.csv", report);
    write_trace(cfg.out_dir / ("fig4_trace_p" + std::to_string(models.config.p_max) + ".csv"), trace);
    for (const auto& s : report.steps)
        std::printf("p=%-3d violations %zu/%zu  max |err|/tau %.4f\n", s.p, s.violations, s.samples, s.max_ratio);
    std::printf("reference: %s\n", report.clean_reference ? "clean output z" : "measured y with d_bound slack");
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set Membership multi-step predictor experiments"};
    app.require_subcommand(1);

    Overrides bench_o, order_o, data_o, val_o;
    add_common(app.add_subcommand("bench", "identify, compare bounds, validate, write all artifacts"), bench_o);
    add_common(app.add_subcommand("sweep-order", "lambda versus model order"), order_o);
    add_common(app.add_subcommand("sweep-data", "lambda versus fraction of the data"), data_o);
    CLI::App* val = app.add_subcommand("validate", "check a saved model bundle against data");
    add_common(val, val_o);
    std::string model_dir, data;
    std::optional<double> Ts, data_dbar;
    val->add_option("--model", model_dir, "model bundle directory")->required()->check(CLI::ExistingDirectory);
    val->add_option("--data", data, "dataset CSV (k,u,y[,z]); default: the configured validation data")
        ->check(CLI::ExistingFile);
    val->add_option("--Ts", Ts, "sampling time of --data");
    val->add_option("--data-dbar", data_dbar, "noise bound of --data");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (app.got_subcommand("bench")) return cmd_bench(bench_o);
        if (app.got_subcommand("sweep-order")) return cmd_sweep_order(order_o);
        if (app.got_subcommand("sweep-data")) return cmd_sweep_data(data_o);
        return cmd_validate(val_o, model_dir, data, Ts, data_dbar);
    } catch (const UnboundedFpsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unbounded;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return config_error;
    } catch (const IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical;
    }
}
