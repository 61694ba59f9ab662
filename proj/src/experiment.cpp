#include "smid/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <tuple>
#include <type_traits>

namespace fs = std::filesystem;

namespace smid {

std::uint64_t ExperimentConfig::effective_validation_seed() const {
    return validation_seed ? *validation_seed : bench.seed + 1;
}

void ExperimentConfig::validate() const {
    sm.validate();
    try {
        bench.plant.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(bench.Ts > 0.0)) throw ConfigError("Ts must be > 0");
    if (!(bench.noise_bound >= 0.0)) throw ConfigError("noise_bound must be >= 0");
    if (!(bench.filter_tc > 0.0)) throw ConfigError("filter_tc must be > 0");
    if (!(bench.hold_seconds > 0.0)) throw ConfigError("hold_seconds must be > 0");
    if (bench.levels.empty()) throw ConfigError("levels must not be empty");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw ConfigError("train_fraction must be in (0, 1]");

    const auto need = [](int o, int p) { return static_cast<std::size_t>(o + p); };
    const std::size_t n_train = prefix_length(bench.samples, train_fraction);
    if (n_train < need(sm.order, sm.p_max))
        throw ConfigError("identification data has " + std::to_string(n_train) + " samples, need at least " +
                          std::to_string(need(sm.order, sm.p_max)) + " for order " +
                          std::to_string(sm.order) + " and p_max " + std::to_string(sm.p_max));
    const std::size_t n_val = train_fraction < 1.0 ? bench.samples - n_train : validation_samples;
    if (n_val < need(sm.order, sm.p_max))
        throw ConfigError("validation data has " + std::to_string(n_val) + " samples, need at least " +
                          std::to_string(need(sm.order, sm.p_max)));

    if (p_list.empty()) throw ConfigError("p_list must not be empty");
    const int p_top = *std::max_element(p_list.begin(), p_list.end());
    for (int p : p_list)
        if (p < 1) throw ConfigError("p_list entries must be >= 1");
    for (int o : orders) {
        if (o < 1) throw ConfigError("orders entries must be >= 1");
        if (n_train < need(o, p_top))
            throw ConfigError("order " + std::to_string(o) + " with p=" + std::to_string(p_top) +
                              " needs at least " + std::to_string(need(o, p_top)) + " samples");
    }
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("fractions must lie in (0, 1]");
        if (prefix_length(n_train, f) < need(sm.order, p_top))
            throw ConfigError("fraction " + format_double(f) + " leaves " +
                              std::to_string(prefix_length(n_train, f)) + " samples, need at least " +
                              std::to_string(need(sm.order, p_top)));
    }
}

namespace {

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>)
            out += format_double(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a == std::string::npos) throw ConfigError("empty entry in list '" + text + "'");
        out.push_back(item.substr(a, b - a + 1));
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

double to_real(const std::string& key, const std::string& v) {
    try {
        return parse_double(v, key);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        return parse_integer(v, key);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

std::size_t to_count(const std::string& key, const std::string& v) {
    const long long n = to_int(key, v);
    if (n < 0) throw ConfigError(key + " must be >= 0");
    return static_cast<std::size_t>(n);
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("cannot parse '" + v + "' as a seed for " + key);
    return s;
}

std::vector<double> to_reals(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(to_real(key, s));
    return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(static_cast<int>(to_int(key, s)));
    return out;
}

}  // namespace

void apply_key_values(ExperimentConfig& cfg, const KeyValues& kv) {
    for (const auto& [key, v] : kv) {
        if (key == "Ts") cfg.bench.Ts = to_real(key, v);
        else if (key == "samples") cfg.bench.samples = to_count(key, v);
        else if (key == "levels") cfg.bench.levels = to_reals(key, v);
        else if (key == "hold_seconds") cfg.bench.hold_seconds = to_real(key, v);
        else if (key == "noise_bound") cfg.bench.noise_bound = to_real(key, v);
        else if (key == "filter_tc") cfg.bench.filter_tc = to_real(key, v);
        else if (key == "seed") cfg.bench.seed = to_seed(key, v);
        else if (key == "plant_num") cfg.bench.plant.num = to_reals(key, v);
        else if (key == "plant_den") cfg.bench.plant.den = to_reals(key, v);
        else if (key == "order") cfg.sm.order = static_cast<int>(to_int(key, v));
        else if (key == "p_max") cfg.sm.p_max = static_cast<int>(to_int(key, v));
        else if (key == "d_bound") cfg.sm.d_bound = to_real(key, v);
        else if (key == "alpha") cfg.sm.alpha = to_real(key, v);
        else if (key == "gamma") cfg.sm.gamma = to_real(key, v);
        else if (key == "omega_box") cfg.sm.omega_box = to_real(key, v);
        else if (key == "tau_inflation") cfg.sm.inflation = parse_tau_inflation(v);
        else if (key == "orders") cfg.orders = to_ints(key, v);
        else if (key == "fractions") cfg.fractions = to_reals(key, v);
        else if (key == "p_list") cfg.p_list = to_ints(key, v);
        else if (key == "validation_seed") cfg.validation_seed = to_seed(key, v);
        else if (key == "validation_samples") cfg.validation_samples = to_count(key, v);
        else if (key == "train_fraction") cfg.train_fraction = to_real(key, v);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(to_count(key, v));
        else if (key == "out") cfg.out_dir = v;
        else throw ConfigError("unknown configuration key '" + key + "'");
    }
}

KeyValues to_key_values(const ExperimentConfig& cfg) {
    return {
        {"Ts", format_double(cfg.bench.Ts)},
        {"samples", std::to_string(cfg.bench.samples)},
        {"levels", join(cfg.bench.levels)},
        {"hold_seconds", format_double(cfg.bench.hold_seconds)},
        {"noise_bound", format_double(cfg.bench.noise_bound)},
        {"filter_tc", format_double(cfg.bench.filter_tc)},
        {"seed", std::to_string(cfg.bench.seed)},
        {"plant_num", join(cfg.bench.plant.num)},
        {"plant_den", join(cfg.bench.plant.den)},
        {"order", std::to_string(cfg.sm.order)},
        {"p_max", std::to_string(cfg.sm.p_max)},
        {"d_bound", format_double(cfg.sm.d_bound)},
        {"alpha", format_double(cfg.sm.alpha)},
        {"gamma", format_double(cfg.sm.gamma)},
        {"omega_box", format_double(cfg.sm.omega_box)},
        {"tau_inflation", to_string(cfg.sm.inflation)},
        {"orders", join(cfg.orders)},
        {"fractions", join(cfg.fractions)},
        {"p_list", join(cfg.p_list)},
        {"validation_seed", std::to_string(cfg.effective_validation_seed())},
        {"validation_samples", std::to_string(cfg.validation_samples)},
        {"train_fraction", format_double(cfg.train_fraction)},
    };
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    ExperimentConfig cfg;
    try {
        apply_key_values(cfg, read_key_values(path));
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

LambdaTable sweep_order(const TimeSeriesDataset& ds, const SmConfig& sm, const std::vector<int>& orders,
                        const std::vector<int>& p_list) {
    LambdaTable t;
    t.p_list = p_list;
    for (int o : orders) {
        t.rows.push_back(o);
        t.samples.push_back(ds.size());
        std::vector<double> row;
        for (int p : p_list) {
            const RegressorBatch b = build_regressors(ds, o, p);
            row.push_back(estimate_lambda(b, sm.d_bound, Polytope::box(b.dim(), sm.omega_box), sm.lp).lambda);
        }
        t.lambda.push_back(std::move(row));
    }
    return t;
}

LambdaTable sweep_data_fraction(const TimeSeriesDataset& ds, const SmConfig& sm,
                                const std::vector<double>& fractions, const std::vector<int>& p_list) {
    LambdaTable t;
    t.p_list = p_list;
    for (double f : fractions) {
        const TimeSeriesDataset prefix = ds.slice(0, prefix_length(ds.size(), f));
        t.rows.push_back(f);
        t.samples.push_back(prefix.size());
        std::vector<double> row;
        for (int p : p_list) {
            const RegressorBatch b = build_regressors(prefix, sm.order, p);
            row.push_back(estimate_lambda(b, sm.d_bound, Polytope::box(b.dim(), sm.omega_box), sm.lp).lambda);
        }
        t.lambda.push_back(std::move(row));
    }
    return t;
}

std::size_t ViolationReport::total_violations() const {
    std::size_t n = 0;
    for (const auto& s : steps) n += s.violations;
    return n;
}

namespace {

double ratio(double err, double tol) {
    if (tol > 0.0) return err / tol;
    return err > kViolationSlack ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

ViolationReport validate(const MultiStepModelSet& models, const BaselineResult* ls,
                         const TimeSeriesDataset& validation, int trace_p, std::vector<TracePoint>* trace) {
    const int o = models.config.order;
    ViolationReport report;
    report.clean_reference = validation.z.has_value();
    const std::vector<double>& ref = report.clean_reference ? *validation.z : validation.y;
    const double slack = report.clean_reference ? 0.0 : validation.d_bound;
    if (trace) trace->clear();

    for (const StepResult& s : models.steps) {
        const RegressorBatch b = build_regressors(validation, o, s.p);
        const Vector z_hat = b.phi * s.theta_star;
        Vector z_ls;
        if (ls) z_ls = b.phi * ls->thetas.at(static_cast<std::size_t>(s.p - 1));
        const double tol = s.tau_hat_star + slack;
        const double tol_ls = ls ? ls->bounds.at(static_cast<std::size_t>(s.p - 1)) + slack : 0.0;

        StepViolations v;
        v.p = s.p;
        v.samples = static_cast<std::size_t>(b.rows());
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
            const std::size_t k = b.anchors[static_cast<std::size_t>(i)] + static_cast<std::size_t>(s.p);
            const double err = std::abs(ref[k] - z_hat(i));
            if (err > tol + kViolationSlack) ++v.violations;
            v.max_ratio = std::max(v.max_ratio, ratio(err, tol));
            if (ls) {
                const double e2 = std::abs(ref[k] - z_ls(i));
                if (e2 > tol_ls + kViolationSlack) ++v.ls_violations;
                v.ls_max_ratio = std::max(v.ls_max_ratio, ratio(e2, tol_ls));
            }
            if (trace && s.p == trace_p)
                trace->push_back({k, ref[k], z_hat(i), z_hat(i) + s.tau_hat_star, z_hat(i) - s.tau_hat_star});
        }
        report.steps.push_back(v);
    }
    return report;
}

std::pair<TimeSeriesDataset, TimeSeriesDataset> make_experiment_data(const ExperimentConfig& cfg) {
    const TimeSeriesDataset full = make_benchmark_dataset(cfg.bench);
    if (cfg.train_fraction < 1.0) return split(full, {cfg.train_fraction, true});
    BenchmarkConfig v = cfg.bench;
    v.seed = cfg.effective_validation_seed();
    v.samples = cfg.validation_samples;
    return {full, make_benchmark_dataset(v)};
}

BenchmarkRun compute_benchmark(const ExperimentConfig& cfg) {
    cfg.validate();
    BenchmarkRun run;
    std::tie(run.train, run.validation) = make_experiment_data(cfg);
    run.models = identify_all(run.train, cfg.sm, cfg.threads);
    run.models.provenance.seed = cfg.bench.seed;
    run.ls = least_squares_baseline(run.train, run.models);
    run.iterated = iterated_baseline(run.models);
    run.violations = validate(run.models, &run.ls, run.validation, cfg.sm.p_max, &run.trace);
    run.by_order = sweep_order(run.train, cfg.sm, cfg.orders, cfg.p_list);
    run.by_fraction = sweep_data_fraction(run.train, cfg.sm, cfg.fractions, cfg.p_list);
    return run;
}

void write_lambda_table(const fs::path& path, const LambdaTable& table, const char* row_name) {
    const bool fractions = std::string(row_name) == "fraction";
    std::vector<std::string> header{row_name};
    if (fractions) header.emplace_back("samples");
    for (int p : table.p_list) header.push_back("lambda_p" + std::to_string(p));
    CsvWriter w(path, header);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<std::string> cells{fractions ? format_double(table.rows[r])
                                                 : std::to_string(static_cast<int>(table.rows[r]))};
        if (fractions) cells.push_back(std::to_string(table.samples[r]));
        for (double l : table.lambda[r]) cells.push_back(format_double(l));
        w.row(cells);
    }
    w.close();
}

void write_violations(const fs::path& path, const ViolationReport& report) {
    CsvWriter w(path, {"p", "samples", "violations", "max_ratio", "ls_violations", "ls_max_ratio"});
    for (const auto& s : report.steps)
        w.row(std::vector<std::string>{std::to_string(s.p), std::to_string(s.samples),
                                       std::to_string(s.violations), format_double(s.max_ratio),
                                       std::to_string(s.ls_violations), format_double(s.ls_max_ratio)});
    w.close();
}

void write_trace(const fs::path& path, const std::vector<TracePoint>& trace) {
    CsvWriter w(path, {"k", "z", "z_hat", "upper", "lower"});
    for (const auto& t : trace)
        w.row(std::vector<std::string>{std::to_string(t.k), format_double(t.z), format_double(t.z_hat),
                                       format_double(t.upper), format_double(t.lower)});
    w.close();
}

void write_benchmark_outputs(const ExperimentConfig& cfg, const BenchmarkRun& run) {
    const fs::path& out = cfg.out_dir;
    fs::create_directories(out);
    write_key_values(out / "config.txt", to_key_values(cfg));
    write_dataset_csv(out / "dataset.csv", run.train);
    write_dataset_csv(out / "validation.csv", run.validation);
    write_model_bundle(out / "model", run.models);
    write_baseline_bundle(out / "baseline_ls", run.ls, cfg.sm.order);
    write_baseline_bundle(out / "baseline_iterated", run.iterated, cfg.sm.order);

    for (const char* name : {"bounds.csv", "fig3_bounds.csv"}) {
        CsvWriter w(out / name, {"p", "tau_multistep", "tau_ls", "tau_iterated"});
        for (const StepResult& s : run.models.steps) {
            const auto i = static_cast<std::size_t>(s.p - 1);
            w.row(std::vector<std::string>{std::to_string(s.p), format_double(s.tau_hat_star),
                                           format_double(run.ls.bounds[i]),
                                           format_double(run.iterated.bounds[i])});
        }
        w.close();
    }
    write_violations(out / "violations.csv", run.violations);
    write_lambda_table(out / "fig1_lambda_vs_order.csv", run.by_order, "order");
    write_lambda_table(out / "fig2_lambda_vs_fraction.csv", run.by_fraction, "fraction");
    write_trace(out / ("fig4_trace_p" + std::to_string(cfg.sm.p_max) + ".csv"), run.trace);
}

BenchmarkRun run_benchmark(const ExperimentConfig& cfg) {
    BenchmarkRun run = compute_benchmark(cfg);
    write_benchmark_outputs(cfg, run);
    return run;
}

}  // namespace smid
