#include "smid/lpcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "smid/kernels.hpp"

namespace smid {

Polytope::Polytope(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() != b_.size())
        throw std::invalid_argument("Polytope: A has " + std::to_string(A_.rows()) +
                                    " rows but b has " + std::to_string(b_.size()) + " entries");
}

Polytope Polytope::box(Eigen::Index dim, double half_width) {
    if (!(half_width >= 0.0)) throw std::invalid_argument("Polytope::box: negative half width");
    return box(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width));
}

Polytope Polytope::box(const Vector& lower, const Vector& upper) {
    if (lower.size() != upper.size()) throw std::invalid_argument("Polytope::box: size mismatch");
    const Eigen::Index q = lower.size();
    Matrix A = Matrix::Zero(2 * q, q);
    Vector b(2 * q);
    for (Eigen::Index i = 0; i < q; ++i) {
        A(i, i) = 1.0;
        b(i) = upper(i);
        A(q + i, i) = -1.0;
        b(q + i) = -lower(i);
    }
    return {std::move(A), std::move(b)};
}

double Polytope::max_violation(const Vector& x) const {
    if (x.size() != dim()) throw std::invalid_argument("Polytope: point dimension mismatch");
    if (rows() == 0) return -std::numeric_limits<double>::infinity();
    Vector ax(rows());
    kernels::active().gemv(A_.data(), static_cast<std::size_t>(rows()),
                           static_cast<std::size_t>(dim()), static_cast<std::size_t>(dim()),
                           x.data(), ax.data());
    return (ax - b_).maxCoeff();
}

Polytope Polytope::intersect(const Polytope& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("Polytope::intersect: dimension mismatch");
    Matrix A(rows() + other.rows(), dim());
    A << A_, other.A_;
    Vector b(rows() + other.rows());
    b << b_, other.b_;
    return {std::move(A), std::move(b)};
}

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

// Simplex tableau for  min b'y  s.t.  A'y = c, y >= 0,  the dual of
// max c'x s.t. A x <= b. Columns 0..m-1 are the y variables (one per
// primal constraint), m..m+q-1 the phase-one artificials, m+q the rhs.
// Row q holds reduced costs, with minus the objective in the rhs slot.
class DualTableau {
public:
    enum class Outcome { optimal, dual_unbounded, dual_infeasible };

    DualTableau(const Matrix& A, const Vector& b, const Vector& c, const LpOptions& opt)
        : A_(A), b_(b), c_(c), opt_(opt), m_(static_cast<std::size_t>(A.rows())),
          q_(static_cast<std::size_t>(A.cols())), width_(m_ + q_ + 1),
          cells_((q_ + 1) * width_, 0.0), basic_(q_), in_basis_(m_ + q_, 0), sign_(q_, 1.0) {
        for (std::size_t i = 0; i < q_; ++i) {
            sign_[i] = c_(static_cast<Eigen::Index>(i)) < 0.0 ? -1.0 : 1.0;
            double* row = row_ptr(i);
            for (std::size_t j = 0; j < m_; ++j)
                row[j] = sign_[i] * A_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            row[m_ + i] = 1.0;
            row[rhs()] = sign_[i] * c_(static_cast<Eigen::Index>(i));
            basic_[i] = m_ + i;
            in_basis_[m_ + i] = 1;
        }
    }

    Outcome run() {
        // Phase one: minimize the sum of artificials.
        double* obj = row_ptr(q_);
        std::fill(obj, obj + width_, 0.0);
        for (std::size_t i = 0; i < q_; ++i) kernels::active().axpy(obj, -1.0, row_ptr(i), width_);
        for (std::size_t i = 0; i < q_; ++i) obj[m_ + i] = 0.0;
        iterate(m_ + q_, opt_.pivot_tol);

        const double infeasibility = -obj[rhs()];
        if (infeasibility > opt_.feasibility_tol * (1.0 + c_.lpNorm<Eigen::Infinity>()))
            return Outcome::dual_infeasible;

        drive_out_artificials();

        // Phase two: true costs b on the y columns, zero on artificials.
        std::fill(obj, obj + width_, 0.0);
        for (std::size_t j = 0; j < m_; ++j) obj[j] = b_(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < q_; ++i) {
            const double cb = basic_cost(i);
            if (cb != 0.0) kernels::active().axpy(obj, -cb, row_ptr(i), width_);
        }
        for (std::size_t i = 0; i < q_; ++i) obj[basic_[i]] = 0.0;

        if (!iterate(m_, opt_.feasibility_tol)) return Outcome::dual_unbounded;
        return Outcome::optimal;
    }

    /// Primal optimizer recovered from the final basis.
    Vector primal() const {
        const auto q = static_cast<Eigen::Index>(q_);
        Vector from_tableau(q);
        const double* obj = row_ptr(q_);
        for (std::size_t i = 0; i < q_; ++i)
            from_tableau(static_cast<Eigen::Index>(i)) = -sign_[i] * obj[m_ + i];
        if (q == 0) return from_tableau;

        // Basis columns in unflipped coordinates; theta solves B' theta = c_B.
        Eigen::MatrixXd basis_t(q, q);
        Vector cb(q);
        for (std::size_t i = 0; i < q_; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            if (basic_[i] < m_) {
                basis_t.row(r) = A_.row(static_cast<Eigen::Index>(basic_[i]));
                cb(r) = b_(static_cast<Eigen::Index>(basic_[i]));
            } else {
                const std::size_t k = basic_[i] - m_;
                basis_t.row(r).setZero();
                basis_t(r, static_cast<Eigen::Index>(k)) = sign_[k];
                cb(r) = 0.0;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_t);
        if (!lu.isInvertible()) return from_tableau;
        Vector refined = lu.solve(cb);
        if (!refined.allFinite()) return from_tableau;
        return violation(refined) <= violation(from_tableau) ? refined : from_tableau;
    }

    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t rhs() const noexcept { return m_ + q_; }
    double* row_ptr(std::size_t i) { return cells_.data() + i * width_; }
    const double* row_ptr(std::size_t i) const { return cells_.data() + i * width_; }

    double basic_cost(std::size_t i) const {
        return basic_[i] < m_ ? b_(static_cast<Eigen::Index>(basic_[i])) : 0.0;
    }

    double violation(const Vector& x) const {
        if (m_ == 0) return 0.0;
        return std::max(0.0, (A_ * x - b_).maxCoeff());
    }

    void pivot(std::size_t r, std::size_t s) {
        const auto& k = kernels::active();
        double* prow = row_ptr(r);
        k.scale(prow, 1.0 / prow[s], width_);
        prow[s] = 1.0;
        for (std::size_t i = 0; i <= q_; ++i) {
            if (i == r) continue;
            double* row = row_ptr(i);
            const double f = row[s];
            if (f == 0.0) continue;
            k.axpy(row, -f, prow, width_);
            row[s] = 0.0;
        }
        in_basis_[basic_[r]] = 0;
        basic_[r] = s;
        in_basis_[s] = 1;
    }

    // Runs simplex iterations over columns [0, ncols). Returns false on an
    // unbounded ray (no leaving row), true at optimality.
    bool iterate(std::size_t ncols, double price_tol) {
        const double* obj = row_ptr(q_);
        bool bland = false;
        std::size_t degenerate_run = 0;
        for (;;) {
            // Entering column: Dantzig pricing, or the lowest eligible index under Bland.
            std::size_t enter = ncols;
            double best = -price_tol;
            for (std::size_t j = 0; j < ncols; ++j) {
                if (in_basis_[j]) continue;
                if (obj[j] < best) {
                    enter = j;
                    if (bland) break;
                    best = obj[j];
                }
            }
            if (enter == ncols) return true;

            // Leaving row: minimum ratio; near ties go to the lowest basic index
            // under Bland, otherwise to the largest pivot element.
            std::size_t leave = q_;
            double best_ratio = std::numeric_limits<double>::infinity();
            double best_pivot = 0.0;
            for (std::size_t i = 0; i < q_; ++i) {
                const double* row = row_ptr(i);
                const double a = row[enter];
                if (a <= opt_.pivot_tol) continue;
                const double ratio = std::max(0.0, row[rhs()]) / a;
                const double tie = 1e-12 * (1.0 + std::abs(best_ratio));
                bool take = false;
                if (leave == q_ || ratio < best_ratio - tie) {
                    take = true;
                } else if (ratio <= best_ratio + tie) {
                    take = bland ? basic_[i] < basic_[leave] : a > best_pivot;
                }
                if (take) {
                    leave = i;
                    best_ratio = ratio;
                    best_pivot = a;
                }
            }
            if (leave == q_) return false;

            if (best_ratio <= 1e-12) {
                if (++degenerate_run > opt_.degenerate_switch) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }

            pivot(leave, enter);
            if (++iterations_ > opt_.max_iterations)
                throw NumericalError("simplex exceeded " + std::to_string(opt_.max_iterations) +
                                     " iterations");
        }
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < q_; ++i) {
            if (basic_[i] < m_) continue;
            const double* row = row_ptr(i);
            std::size_t best = m_;
            double best_abs = opt_.pivot_tol;
            for (std::size_t j = 0; j < m_; ++j) {
                if (in_basis_[j]) continue;
                if (std::abs(row[j]) > best_abs) {
                    best_abs = std::abs(row[j]);
                    best = j;
                }
            }
            // Rows with no usable entry are redundant equations; their
            // artificial stays basic at zero and never re-enters.
            if (best < m_) pivot(i, best);
        }
    }

    const Matrix& A_;
    const Vector& b_;
    const Vector& c_;
    const LpOptions& opt_;
    std::size_t m_;
    std::size_t q_;
    std::size_t width_;
    std::vector<double> cells_;
    std::vector<std::size_t> basic_;
    std::vector<char> in_basis_;
    std::vector<double> sign_;
    std::size_t iterations_ = 0;
};

// Whether {x : A x <= b} is nonempty, via  min s  s.t.  A x - s <= b, s >= -1.
bool primal_feasible(const Polytope& poly, const LpOptions& opt, std::size_t& iterations) {
    const Eigen::Index m = poly.rows();
    const Eigen::Index q = poly.dim();
    Matrix A = Matrix::Zero(m + 1, q + 1);
    A.topLeftCorner(m, q) = poly.A();
    A.col(q).setConstant(-1.0);
    Vector b(m + 1);
    b.head(m) = poly.b();
    b(m) = 1.0;
    Vector c = Vector::Zero(q + 1);
    c(q) = -1.0;
    DualTableau aux(A, b, c, opt);
    const auto outcome = aux.run();
    iterations += aux.iterations();
    if (outcome != DualTableau::Outcome::optimal)
        throw NumericalError("phase-one feasibility problem did not reach optimality");
    const double s = aux.primal()(q);
    return s <= opt.feasibility_tol;
}

}  // namespace

LpSolution solve_lp(const Vector& c, const Polytope& poly, Sense sense, const LpOptions& options) {
    if (c.size() != poly.dim())
        throw std::invalid_argument("solve_lp: objective has " + std::to_string(c.size()) +
                                    " entries, polytope dimension is " +
                                    std::to_string(poly.dim()));
    LpSolution out;
    if (poly.dim() == 0) {
        const bool feasible = poly.rows() == 0 || poly.b().minCoeff() >= -options.feasibility_tol;
        out.status = feasible ? LpStatus::optimal : LpStatus::infeasible;
        if (feasible) out.argmin = Vector(0);
        return out;
    }

    const Vector cmax = sense == Sense::maximize ? c : Vector(-c);
    DualTableau tableau(poly.A(), poly.b(), cmax, options);
    const auto outcome = tableau.run();
    out.iterations = tableau.iterations();
    switch (outcome) {
        case DualTableau::Outcome::optimal:
            out.status = LpStatus::optimal;
            out.argmin = tableau.primal();
            out.objective = c.dot(out.argmin);
            break;
        case DualTableau::Outcome::dual_unbounded:
            out.status = LpStatus::infeasible;
            break;
        case DualTableau::Outcome::dual_infeasible:
            out.status = primal_feasible(poly, options, out.iterations) ? LpStatus::unbounded
                                                                        : LpStatus::infeasible;
            break;
    }
    return out;
}

double support(const Polytope& poly, const Vector& direction, const LpOptions& options) {
    const LpSolution sol = solve_lp(direction, poly, Sense::maximize, options);
    switch (sol.status) {
        case LpStatus::optimal: return sol.objective;
        case LpStatus::unbounded: return std::numeric_limits<double>::infinity();
        case LpStatus::infeasible: break;
    }
    throw EmptyPolytopeError("support: polytope is empty");
}

bool is_bounded(const Polytope& poly, const LpOptions& options) {
    const Eigen::Index q = poly.dim();
    Vector e = Vector::Zero(q);
    bool bounded = true;
    for (Eigen::Index i = 0; i < q; ++i) {
        for (double s : {1.0, -1.0}) {
            e(i) = s;
            // Keep querying after the first infinite direction so an empty set
            // is still reported as such.
            if (!std::isfinite(support(poly, e, options))) bounded = false;
        }
        e(i) = 0.0;
        if (!bounded) break;
    }
    if (q == 0) (void)support(poly, e, options);
    return bounded;
}

std::vector<Vector> enumerate_vertices(const Polytope& poly, double tol) {
    const Eigen::Index q = poly.dim();
    const Eigen::Index m = poly.rows();
    if (q > 4)
        throw std::invalid_argument("enumerate_vertices: dimension " + std::to_string(q) +
                                    " exceeds the oracle limit of 4");
    std::vector<Vector> vertices;
    if (q == 0) {
        if (m == 0 || poly.b().minCoeff() >= -tol) vertices.emplace_back(0);
        return vertices;
    }
    if (m < q) return vertices;

    std::vector<Eigen::Index> pick(static_cast<std::size_t>(q));
    for (Eigen::Index i = 0; i < q; ++i) pick[static_cast<std::size_t>(i)] = i;
    Eigen::MatrixXd sub(q, q);
    Vector rhs(q);
    for (;;) {
        for (Eigen::Index r = 0; r < q; ++r) {
            sub.row(r) = poly.A().row(pick[static_cast<std::size_t>(r)]);
            rhs(r) = poly.b()(pick[static_cast<std::size_t>(r)]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (lu.isInvertible()) {
            Vector x = lu.solve(rhs);
            const double scale = 1.0 + poly.b().cwiseAbs().maxCoeff();
            if (x.allFinite() && (poly.A() * x - poly.b()).maxCoeff() <= tol * scale) {
                const bool seen = std::any_of(vertices.begin(), vertices.end(), [&](const Vector& v) {
                    return (v - x).lpNorm<Eigen::Infinity>() <= tol * (1.0 + x.lpNorm<Eigen::Infinity>());
                });
                if (!seen) vertices.push_back(std::move(x));
            }
        }
        // Next q-combination of {0..m-1} in lexicographic order.
        Eigen::Index k = q - 1;
        while (k >= 0 && pick[static_cast<std::size_t>(k)] == m - q + k) --k;
        if (k < 0) break;
        ++pick[static_cast<std::size_t>(k)];
        for (Eigen::Index j = k + 1; j < q; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return vertices;
}

}  // namespace smid
