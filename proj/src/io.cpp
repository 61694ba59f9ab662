#include "smid/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace smid {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc() || ptr != last)
        throw IoError("cannot parse '" + text + "' as a number for " + what);
    return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw IoError("cannot parse '" + text + "' as an integer for " + what);
    return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string strip(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw IoError("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.push_back(parse_double(rows[r][c], name + " (data row " + std::to_string(r + 1) + ")"));
    return out;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        auto cells = split_line(line);
        for (auto& c : cells) c = strip(c);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(t.header.size()) + " fields, found " +
                          std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw IoError(path.string() + ": missing header row");
    return t;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), width_(header.size()) {
    file_ = std::fopen(path.c_str(), "w");
    if (!file_) throw IoError("cannot write " + path.string());
    row(header);
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(file_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (!file_) throw IoError("write to closed file " + path_.string());
    if (cells.size() != width_) throw std::invalid_argument("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) std::fputc(',', file_);
        std::fputs(cells[i].c_str(), file_);
    }
    std::fputc('\n', file_);
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
}

void CsvWriter::close() {
    if (file_ && std::fclose(file_) != 0) {
        file_ = nullptr;
        throw IoError("error closing " + path_.string());
    }
    file_ = nullptr;
}

void write_dataset_csv(const fs::path& path, const TimeSeriesDataset& ds) {
    std::vector<std::string> header{"k", "u", "y"};
    if (ds.z) header.emplace_back("z");
    CsvWriter w(path, header);
    for (std::size_t k = 0; k < ds.size(); ++k) {
        std::vector<std::string> cells{std::to_string(k), format_double(ds.u[k]), format_double(ds.y[k])};
        if (ds.z) cells.push_back(format_double((*ds.z)[k]));
        w.row(cells);
    }
    w.close();
}

TimeSeriesDataset read_dataset_csv(const fs::path& path, double Ts, double d_bound) {
    const CsvTable t = read_csv(path);
    const std::size_t kc = t.column("k");
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        if (parse_integer(t.rows[r][kc], "k") != static_cast<long long>(r))
            throw IoError(path.string() + ": column k must count 0, 1, 2, ... (row " +
                          std::to_string(r + 1) + ")");
    TimeSeriesDataset ds;
    ds.u = t.numeric_column("u");
    ds.y = t.numeric_column("y");
    for (const auto& h : t.header)
        if (h == "z") ds.z = t.numeric_column("z");
    ds.Ts = Ts;
    ds.d_bound = d_bound;
    try {
        ds.validate();
    } catch (const std::invalid_argument& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return ds;
}

void write_batch_csv(const fs::path& path, const RegressorBatch& batch) {
    std::vector<std::string> header{"k"};
    for (auto& n : regressor_names(batch.o, batch.p)) header.push_back(n);
    header.emplace_back("target");
    if (static_cast<Eigen::Index>(header.size()) != batch.dim() + 2)
        throw std::invalid_argument("write_batch_csv: batch width does not match its order and step");
    CsvWriter w(path, header);
    for (Eigen::Index i = 0; i < batch.rows(); ++i) {
        std::vector<std::string> cells{std::to_string(batch.anchors[static_cast<std::size_t>(i)])};
        for (Eigen::Index j = 0; j < batch.dim(); ++j) cells.push_back(format_double(batch.phi(i, j)));
        cells.push_back(format_double(batch.targets(i)));
        w.row(cells);
    }
    w.close();
}

RegressorBatch read_batch_csv(const fs::path& path, int o, int p, double d_bound) {
    const CsvTable t = read_csv(path);
    const auto names = regressor_names(o, p);
    RegressorBatch b;
    b.o = o;
    b.p = p;
    b.d_bound = d_bound;
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    b.phi.resize(n, static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto col = t.numeric_column(names[j]);
        for (Eigen::Index i = 0; i < n; ++i) b.phi(i, static_cast<Eigen::Index>(j)) = col[static_cast<std::size_t>(i)];
    }
    const auto target = t.numeric_column("target");
    b.targets = Eigen::Map<const Vector>(target.data(), n);
    const std::size_t kc = t.column("k");
    for (const auto& row : t.rows) {
        const long long k = parse_integer(row[kc], "k");
        if (k < 0) throw IoError(path.string() + ": negative anchor");
        b.anchors.push_back(static_cast<std::size_t>(k));
    }
    return b;
}

KeyValues read_key_values(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = strip(line.substr(0, eq));
        if (key.empty()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = strip(line.substr(eq + 1));
    }
    return kv;
}

void write_key_values(const fs::path& path, const KeyValues& kv) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    if (!out) throw IoError("error writing " + path.string());
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

namespace {

const std::string& require(const KeyValues& kv, const std::string& key, const fs::path& where) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw IoError(where.string() + ": missing key '" + key + "'");
    return it->second;
}

std::uint64_t parse_hex64(const std::string& text) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 16);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
        throw IoError("cannot parse '" + text + "' as a hexadecimal hash");
    return v;
}

void check_version(const KeyValues& kv, const fs::path& where, const std::string& kind) {
    const long long version = parse_integer(require(kv, "version", where), "version");
    if (version != kBundleVersion)
        throw IoError(where.string() + ": unsupported bundle version " + std::to_string(version));
    const std::string& k = require(kv, "kind", where);
    if (k != kind) throw IoError(where.string() + ": bundle kind is '" + k + "', expected '" + kind + "'");
}

fs::path theta_file(const fs::path& dir, int p) { return dir / ("theta_p" + std::to_string(p) + ".csv"); }

void write_theta(const fs::path& path, const Vector& theta, int o, int p) {
    const auto names = regressor_names(o, p);
    if (static_cast<Eigen::Index>(names.size()) != theta.size())
        throw std::invalid_argument("parameter vector for p=" + std::to_string(p) + " has the wrong size");
    CsvWriter w(path, {"name", "value"});
    for (std::size_t j = 0; j < names.size(); ++j)
        w.row(std::vector<std::string>{names[j], format_double(theta(static_cast<Eigen::Index>(j)))});
    w.close();
}

Vector read_theta(const fs::path& path, int o, int p) {
    const CsvTable t = read_csv(path);
    const auto names = regressor_names(o, p);
    if (t.rows.size() != names.size())
        throw IoError(path.string() + ": expected " + std::to_string(names.size()) + " coefficients");
    const std::size_t nc = t.column("name");
    const auto values = t.numeric_column("value");
    Vector theta(static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (t.rows[j][nc] != names[j])
            throw IoError(path.string() + ": row " + std::to_string(j + 1) + " is '" + t.rows[j][nc] +
                          "', expected '" + names[j] + "'");
        theta(static_cast<Eigen::Index>(j)) = values[j];
    }
    return theta;
}

}  // namespace

void write_model_bundle(const fs::path& dir, const MultiStepModelSet& models) {
    fs::create_directories(dir);
    const SmConfig& c = models.config;
    KeyValues kv{
        {"version", std::to_string(kBundleVersion)},
        {"kind", "multistep"},
        {"order", std::to_string(c.order)},
        {"p_max", std::to_string(c.p_max)},
        {"d_bound", format_double(c.d_bound)},
        {"alpha", format_double(c.alpha)},
        {"gamma", format_double(c.gamma)},
        {"omega_box", format_double(c.omega_box)},
        {"tau_inflation", to_string(c.inflation)},
        {"dataset_hash", hex64(models.provenance.dataset_hash)},
        {"seed", std::to_string(models.provenance.seed)},
    };
    write_key_values(dir / "manifest.txt", kv);

    CsvWriter summary(dir / "summary.csv", {"p", "lambda", "eps_hat", "tau_under", "tau_hat"});
    for (const StepResult& s : models.steps) {
        summary.row(std::vector<std::string>{std::to_string(s.p), format_double(s.lambda_under),
                                             format_double(s.eps_hat), format_double(s.tau_under_star),
                                             format_double(s.tau_hat_star)});
        write_theta(theta_file(dir, s.p), s.theta_star, c.order, s.p);
    }
    summary.close();
}

MultiStepModelSet read_model_bundle(const fs::path& dir) {
    const fs::path manifest = dir / "manifest.txt";
    const KeyValues kv = read_key_values(manifest);
    check_version(kv, manifest, "multistep");
    MultiStepModelSet m;
    SmConfig& c = m.config;
    c.order = static_cast<int>(parse_integer(require(kv, "order", manifest), "order"));
    c.p_max = static_cast<int>(parse_integer(require(kv, "p_max", manifest), "p_max"));
    c.d_bound = parse_double(require(kv, "d_bound", manifest), "d_bound");
    c.alpha = parse_double(require(kv, "alpha", manifest), "alpha");
    c.gamma = parse_double(require(kv, "gamma", manifest), "gamma");
    c.omega_box = parse_double(require(kv, "omega_box", manifest), "omega_box");
    try {
        c.inflation = parse_tau_inflation(require(kv, "tau_inflation", manifest));
        c.validate();
    } catch (const ConfigError& e) {
        throw IoError(manifest.string() + ": " + e.what());
    }
    m.provenance.dataset_hash = parse_hex64(require(kv, "dataset_hash", manifest));
    m.provenance.seed = static_cast<std::uint64_t>(std::strtoull(require(kv, "seed", manifest).c_str(), nullptr, 10));

    const CsvTable t = read_csv(dir / "summary.csv");
    if (t.rows.size() != static_cast<std::size_t>(c.p_max))
        throw IoError((dir / "summary.csv").string() + ": expected " + std::to_string(c.p_max) + " rows");
    const auto lambda = t.numeric_column("lambda");
    const auto eps = t.numeric_column("eps_hat");
    const auto tu = t.numeric_column("tau_under");
    const auto th = t.numeric_column("tau_hat");
    const std::size_t pc = t.column("p");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        StepResult s;
        s.p = static_cast<int>(parse_integer(t.rows[r][pc], "p"));
        if (s.p != static_cast<int>(r) + 1) throw IoError((dir / "summary.csv").string() + ": rows must list p = 1, 2, ...");
        s.lambda_under = lambda[r];
        s.eps_hat = eps[r];
        s.tau_under_star = tu[r];
        s.tau_hat_star = th[r];
        s.theta_star = read_theta(theta_file(dir, s.p), c.order, s.p);
        m.steps.push_back(std::move(s));
    }
    return m;
}

void write_baseline_bundle(const fs::path& dir, const BaselineResult& result, int order) {
    fs::create_directories(dir);
    const int p_max = static_cast<int>(result.bounds.size());
    write_key_values(dir / "manifest.txt", {{"version", std::to_string(kBundleVersion)},
                                            {"kind", to_string(result.kind)},
                                            {"order", std::to_string(order)},
                                            {"p_max", std::to_string(p_max)}});
    const bool ls = result.kind == BaselineKind::least_squares;
    CsvWriter w(dir / "bounds.csv", ls ? std::vector<std::string>{"p", "tau_hat", "regularized"}
                                       : std::vector<std::string>{"p", "tau_hat"});
    for (int p = 1; p <= p_max; ++p) {
        const auto i = static_cast<std::size_t>(p - 1);
        std::vector<std::string> cells{std::to_string(p), format_double(result.bounds[i])};
        if (ls) {
            cells.push_back(result.regularized[i] ? "1" : "0");
            write_theta(theta_file(dir, p), result.thetas[i], order, p);
        }
        w.row(cells);
    }
    w.close();
}

BaselineResult read_baseline_bundle(const fs::path& dir) {
    const fs::path manifest = dir / "manifest.txt";
    const KeyValues kv = read_key_values(manifest);
    BaselineResult r;
    const std::string& kind = require(kv, "kind", manifest);
    if (kind == "least_squares")
        r.kind = BaselineKind::least_squares;
    else if (kind == "iterated_one_step")
        r.kind = BaselineKind::iterated_one_step;
    else
        throw IoError(manifest.string() + ": unknown baseline kind '" + kind + "'");
    check_version(kv, manifest, kind);
    const int order = static_cast<int>(parse_integer(require(kv, "order", manifest), "order"));
    const CsvTable t = read_csv(dir / "bounds.csv");
    r.bounds = t.numeric_column("tau_hat");
    if (r.kind == BaselineKind::least_squares) {
        const std::size_t rc = t.column("regularized");
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            r.regularized.push_back(t.rows[i][rc] == "1");
            r.thetas.push_back(read_theta(theta_file(dir, static_cast<int>(i) + 1), order, static_cast<int>(i) + 1));
        }
    }
    return r;
}

}  // namespace smid
