#pragma once

#include "goodpants/lorentz.hpp"

namespace pants::testutil {

// Group element at controlled distance from the identity: exponential of a
// random algebra element with norm <= scale.
inline GroupElement random_near_identity(Rng& rng, int n, Scalar scale) {
    Matrix m = (n >= 3) ? skew_from_coords(rng.gaussian((n - 1) * (n - 2) / 2), n - 1)
                        : Matrix::Zero(n - 1, n - 1);
    Matrix x = algebra_assemble(rng.normal(), m, rng.gaussian(n - 1),
                                rng.gaussian(n - 1));
    Scalar norm = algebra_norm(x, n);
    if (norm > 0) x *= scale * rng.uniform() / norm;
    return matrix_exp(x);
}

inline HPoint random_point(Rng& rng, int n, Scalar radius) {
    Vector dir = rng.unit_sphere(n);
    Scalar r = radius * rng.uniform();
    HPoint p(n + 1);
    p[0] = std::cosh(r);
    p.tail(n) = std::sinh(r) * dir;
    return p;
}

// Unit tangent vector at p.
inline Vector random_tangent(Rng& rng, const HPoint& p) {
    const int n = int(p.size()) - 1;
    Vector v = rng.gaussian(n + 1);
    v += mdot(v, p) * p;
    return v / std::sqrt(mdot(v, v));
}

}  // namespace pants::testutil
