#pragma once

// Plain-text persistence: CSV tables with a mandatory header row, and the
// model bundle directory
//   manifest.txt      key=value (format version, kind, configuration, provenance)
//   summary.csv       p,lambda,eps_hat,tau_under,tau_hat
//   theta_p<p>.csv    name,value in regressor order
// Doubles are written with 17 significant digits so reading them back is exact.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "smid/baselines.hpp"
#include "smid/dataset.hpp"
#include "smid/smident.hpp"
#include "smid/timeseries.hpp"

namespace smid {

/// Unreadable, unwritable or malformed files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_double(double x);

/// Whole-string parse; `what` names the field in the error message.
double parse_double(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws IoError when missing.
    std::size_t column(const std::string& name) const;
    std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Streams rows to a file; numbers go through format_double.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::filesystem::path path_;
    std::FILE* file_ = nullptr;
    std::size_t width_;
};

/// k,u,y[,z]
void write_dataset_csv(const std::filesystem::path& path, const TimeSeriesDataset& ds);
/// Ts and d_bound are not stored in the file.
TimeSeriesDataset read_dataset_csv(const std::filesystem::path& path, double Ts, double d_bound);

/// k,<regressor names>,target
void write_batch_csv(const std::filesystem::path& path, const RegressorBatch& batch);
RegressorBatch read_batch_csv(const std::filesystem::path& path, int o, int p, double d_bound);

using KeyValues = std::map<std::string, std::string>;

/// key=value lines; '#' starts a comment, blank lines are ignored.
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);

constexpr int kBundleVersion = 1;

/// Creates `dir` if needed. Support values and FPS rows are not stored.
void write_model_bundle(const std::filesystem::path& dir, const MultiStepModelSet& models);
MultiStepModelSet read_model_bundle(const std::filesystem::path& dir);

/// manifest.txt (kind, order, p_max), bounds.csv p,tau_hat and, for least
/// squares, theta_p<p>.csv.
void write_baseline_bundle(const std::filesystem::path& dir, const BaselineResult& result, int order);
BaselineResult read_baseline_bundle(const std::filesystem::path& dir);

std::string hex64(std::uint64_t value);

}  // namespace smid
