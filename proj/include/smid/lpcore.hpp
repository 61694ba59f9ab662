#pragma once

// Linear programs over polytopes in inequality form {x : A x <= b}.
//
// solve_lp runs a dense simplex on the standard-form dual
//     min b'y  s.t.  A'y = c, y >= 0
// whose tableau has one row per variable of the original problem, so the
// many-constraints/few-variables shape of parameter sets stays cheap. The
// optimal vertex is read back from the simplex multipliers and polished by
// solving the final basis system directly.

#include <cstddef>
#include <span>
#include <vector>

#include "smid/types.hpp"

namespace smid {

/// The set {x in R^q : A x <= b}. m may be zero (all of R^q).
class Polytope {
public:
    Polytope() = default;
    Polytope(Matrix A, Vector b);

    /// Axis-aligned box, each coordinate in [-half_width, half_width].
    static Polytope box(Eigen::Index dim, double half_width);
    static Polytope box(const Vector& lower, const Vector& upper);

    Eigen::Index dim() const noexcept { return A_.cols(); }
    Eigen::Index rows() const noexcept { return A_.rows(); }
    const Matrix& A() const noexcept { return A_; }
    const Vector& b() const noexcept { return b_; }

    /// max_i (A x - b)_i, or -inf for m = 0.
    double max_violation(const Vector& x) const;
    bool contains(const Vector& x, double tol) const { return max_violation(x) <= tol; }

    /// Stacks the constraints of both sets. Dimensions must agree.
    Polytope intersect(const Polytope& other) const;

private:
    Matrix A_{0, 0};
    Vector b_{0};
};

enum class LpStatus { optimal, infeasible, unbounded };
enum class Sense { minimize, maximize };

const char* to_string(LpStatus s);

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vector argmin;           ///< optimizer; empty unless status == optimal
    double objective = 0.0;  ///< c'x at argmin; meaningless unless optimal
    std::size_t iterations = 0;

    bool optimal() const noexcept { return status == LpStatus::optimal; }
};

struct LpOptions {
    double feasibility_tol = 1e-8;
    double optimality_tol = 1e-7;
    double pivot_tol = 1e-9;
    std::size_t max_iterations = 100000;
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    std::size_t degenerate_switch = 50;
};

/// Optimize c'x over poly. Infeasible and unbounded problems are reported
/// through the status, never thrown. Throws NumericalError only when the
/// iteration budget runs out.
LpSolution solve_lp(const Vector& c, const Polytope& poly, Sense sense,
                    const LpOptions& options = {});

/// max_{x in poly} direction'x; +infinity when unbounded along direction.
/// Throws EmptyPolytopeError for an empty polytope.
double support(const Polytope& poly, const Vector& direction, const LpOptions& options = {});

/// True iff the support is finite along every coordinate direction +-e_i.
/// Throws EmptyPolytopeError for an empty polytope.
bool is_bounded(const Polytope& poly, const LpOptions& options = {});

/// All vertices by brute force over q-subsets of the constraints, deduplicated
/// within 1e-9. Intended as an independent oracle for small problems: rejects
/// q > 4. The polytope is assumed bounded.
std::vector<Vector> enumerate_vertices(const Polytope& poly, double tol = 1e-9);

}  // namespace smid
