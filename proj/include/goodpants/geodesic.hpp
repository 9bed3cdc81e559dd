#pragma once

// Geodesics in the hyperboloid model, orthogeodesics with their feet, the
// normal bundle of a model closed geodesic, Fermat points, and the
// inefficiency reductions for broken geodesics.

#include "goodpants/lorentz.hpp"

#include <array>

namespace pants {

struct Geodesic {
    HPoint base;  // <base,base>_J = -1
    Vector dir;   // unit spacelike, J-orthogonal to base

    HPoint point_at(Scalar s) const {
        return std::cosh(s) * base + std::sinh(s) * dir;
    }
    Vector tangent_at(Scalar s) const {
        return std::sinh(s) * base + std::cosh(s) * dir;
    }
};

// Geodesic through the base point and first vector of a positioned frame.
inline Geodesic geodesic_of_frame(const GroupElement& h) {
    return {h.col(0), h.col(1)};
}

Scalar hdistance(const HPoint& p, const HPoint& q);

// Parameter of the point of g closest to q.
Scalar project_to_geodesic(const Geodesic& g, const HPoint& q);

struct OrthoConnection {
    Scalar s_src = 0, s_dst = 0;  // footpoint parameters
    Scalar length = 0;
    Vector foot_src, foot_dst;  // unit normals pointing along the connection
};

// Common perpendicular of two geodesics at positive distance. Throws
// Identical / Intersecting / Asymptotic otherwise.
OrthoConnection orthogeodesic(const Geodesic& g1, const Geodesic& g2);

// --- the model normal bundle ------------------------------------------------

// N^1 of a closed geodesic of length L with holonomy in SO(n-1): the
// quotient of R x S^{n-2} by (s, w) ~ (s - L, holonomy * w).
struct ModelClosedGeodesic {
    Scalar length;
    Matrix holonomy;

    int fiber_dim() const { return int(holonomy.rows()); }  // = n - 1
};

struct NormalFiberPoint {
    Scalar s;  // arc position, canonical in [0, L)
    Vector w;  // unit vector in R^{n-1}
};

Matrix holonomy_power(const ModelClosedGeodesic& g, long k);

// Canonical representative of the class of (s, w) with s in [0, L).
NormalFiberPoint canonical_point(const ModelClosedGeodesic& g, Scalar s,
                                 const Vector& w);

// Parallel transport of x along the geodesic by a signed distance.
NormalFiberPoint transport_by(const ModelClosedGeodesic& g,
                              const NormalFiberPoint& x, Scalar dist);

// Raw transport: vector w carried from parameter `from` to `to` (both real),
// returned together with the canonical landing representative.
Vector parallel_transport(const ModelClosedGeodesic& g, Scalar from, Scalar to,
                          const Vector& w);

enum class Arc { One, Two };  // One = the forward arc from x to y

// Angle between the transported vectors at the midpoint of the chosen arc.
Scalar fiber_distance_along(const ModelClosedGeodesic& g,
                            const NormalFiberPoint& x,
                            const NormalFiberPoint& y, Arc arc);

// L^2 quotient metric on N^1.
Scalar bundle_distance(const ModelClosedGeodesic& g, const NormalFiberPoint& x,
                       const NormalFiberPoint& y);

// --- Fermat points ------------------------------------------------------------

struct FermatResult {
    HPoint point;
    bool interior = true;
    int vertex = -1;                    // index of the obtuse vertex otherwise
    std::array<Scalar, 3> angles{};     // angles at the Fermat point
    Scalar gradient_norm = 0;
    Scalar total = 0;                   // |PA| + |PB| + |PC|
};

FermatResult fermat_point(const HPoint& a, const HPoint& b, const HPoint& c);

// --- inefficiency reductions ---------------------------------------------------

struct BrokenReduction {
    Matrix y1, y2;  // SO(n) rewrites, close to the identity for long flows
    Scalar t;       // reduced flow length, t1 + t2 - defect
    Scalar defect;  // t1 + t2 - t > 0 for theta != 0
};

// G(t1) R(theta) G(t2) = Y1 G(t) Y2 exactly (Cartan-style splitting of the
// broken segment). Throws AngleTooSharp near theta = +-pi.
BrokenReduction broken_reduce(Scalar t1, Scalar theta, Scalar t2, int n);

struct ClosedBrokenReport {
    Scalar realized;  // closed-geodesic length from the word's axis
    Scalar defect;    // |realized - l_plus - l_minus + 2 ln 2|
};

// Length of the closed geodesic homotopic to a doubly-orthogonal closed-up
// broken geodesic with segment lengths l_plus and l_minus.
ClosedBrokenReport closed_broken_length(Scalar l_plus, Scalar l_minus, int n);

// Frozen thresholds for the reductions; measured once by the sweep tests in
// test_geodesic and kept fixed since.
inline constexpr Scalar kBrokenMinLength = 2.0;
inline constexpr Scalar kBrokenAngleMargin = 0.05;
// Observed defect constant: |l(gamma) - l+ - l- + 2 ln 2| < C e^{-min(l+,l-)}
// with C measured at 4.2 over the sweep l, m in [4, 14]; frozen with margin.
inline constexpr Scalar kClosedBrokenC = 6.0;

}  // namespace pants
