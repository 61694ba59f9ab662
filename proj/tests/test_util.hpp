#pragma once

// Shared generators for randomized tests.

#include <random>

#include "smid/lpcore.hpp"

namespace smid::testing {

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                            double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = dist(rng);
    return M;
}

/// Nonempty bounded polytope: `cuts` random half-spaces through a neighbourhood
/// of a random interior point, intersected with the box [-box, box]^q.
inline Polytope random_bounded_polytope(std::mt19937_64& rng, Eigen::Index q, Eigen::Index cuts,
                                        double box = 2.0) {
    const Vector center = random_vector(rng, q, -0.5, 0.5);
    const Matrix A = random_matrix(rng, cuts, q);
    const Vector slack = random_vector(rng, cuts, 0.05, 1.0);
    Polytope cut(A, A * center + slack);
    return cut.intersect(Polytope::box(q, box));
}

}  // namespace smid::testing
