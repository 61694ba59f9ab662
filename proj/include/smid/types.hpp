#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace smid {

/// Row-major so each row (one regressor, one constraint) is contiguous for the kernels.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Bad user input or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A solver or factorization failed in a way the inputs do not explain. Exit code 4.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The polytope has no points; queries that need a point cannot answer.
class EmptyPolytopeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The feasible parameter set of step `step` is unbounded: the data are not
/// informative enough to bound the worst-case model error. Exit code 3.
class UnboundedFpsError : public std::runtime_error {
public:
    UnboundedFpsError(int step, const std::string& detail)
        : std::runtime_error("feasible parameter set for p=" + std::to_string(step) +
                             " is unbounded (" + detail +
                             "); the data are not informative enough, collect more samples "
                             "or use a richer excitation"),
          step_(step) {}

    int step() const noexcept { return step_; }

private:
    int step_;
};

}  // namespace smid
