#pragma once

// Numerical model of G = SO+(n,1) acting on the hyperboloid model of H^n.
// Group elements are (n+1)x(n+1) matrices preserving J = diag(-1,1,...,1),
// identified with oriented frames: column 0 is the base point, columns 1..n
// the frame vectors. Right multiplication acts as an instruction on frames
// (frame flow, rotation, rewrite, perturbation).

#include "goodpants/numeric.hpp"

namespace pants {

using GroupElement = Matrix;  // g^T J g = J, det g = 1, g(0,0) >= 1
using HPoint = Vector;        // <x,x>_J = -1, x[0] > 0

struct FrameAtPoint {
    HPoint base;
    Matrix vectors;  // (n+1) x n, unit spacelike, J-orthogonal to base
};

Matrix lorentz_form(int n);  // J

inline Scalar mdot(const Vector& v, const Vector& w) {
    Scalar s = -v[0] * w[0];
    for (int i = 1; i < v.size(); ++i) s += v[i] * w[i];
    return s;
}

inline HPoint base_point(int n) {
    Vector p = Vector::Zero(n + 1);
    p[0] = 1.0;
    return p;
}

bool is_group_element(const GroupElement& g, Scalar tol);
void check_group_element(const GroupElement& g, Scalar tol);
bool is_on_hyperboloid(const HPoint& p, Scalar tol);

// Restores g^T J g = J exactly (J-orthonormalization of the columns).
GroupElement reorthonormalize(const GroupElement& g);

// Exact inverse via the form: g^{-1} = J g^T J.
GroupElement lorentz_inverse(const GroupElement& g);

// Frame positioned at p with first vector dir (unit tangent at p), the other
// vectors a J-orthonormal completion.
GroupElement position_frame(const HPoint& p, const Vector& dir);

inline FrameAtPoint frame_of(const GroupElement& g) {
    return {g.col(0), g.rightCols(g.cols() - 1)};
}

inline GroupElement group_of(const FrameAtPoint& f) {
    GroupElement g(f.base.size(), f.base.size());
    g.col(0) = f.base;
    g.rightCols(f.vectors.cols()) = f.vectors;
    return g;
}

// --- instruction generators -------------------------------------------------

// a_t: unit-speed frame flow along the first frame vector.
GroupElement flow(Scalar t, int n);

// R(theta): rotation of the first two frame vectors.
GroupElement rot2(Scalar theta, int n);

// Rewrite of the whole frame by k in SO(n) (columns of k express the new
// frame vectors in terms of the old). Rejects non-orthogonal input.
GroupElement rewrite(const Matrix& k);

// Embeds q in SO(n-1) as the subgroup M fixing the base point and the first
// frame vector.
GroupElement m_embed(const Matrix& q, int n);

// Extracts the SO(n-1) block of an M-element.
Matrix m_block(const GroupElement& g);

// exp of the horospherical generator with fiber coordinates x (size n-1);
// nilpotent of order 3, so the exponential is exact.
GroupElement exp_n(const Vector& x, int sign, int n);

enum class SubgroupTag { K, M, A, Nplus, Nminus, B };

bool has_subgroup_form(const GroupElement& g, SubgroupTag tag, Scalar tol);

// --- Lie algebra -------------------------------------------------------------

struct AlgebraElement {
    Matrix mat;      // X^T J + J X = 0
    Scalar a_part;   // coefficient of the standard boost generator
    Matrix m_part;   // (n-1)x(n-1) skew block
    Vector nplus;    // horospherical coordinates, size n-1
    Vector nminus;

    int dim() const { return int(mat.rows()) - 1; }
};

AlgebraElement algebra_split(const Matrix& x);
Matrix algebra_assemble(Scalar a_part, const Matrix& m_part, const Vector& nplus,
                        const Vector& nminus);

// Standard infinitesimal rotation of the first two frame vectors.
Matrix algebra_theta(int n);

// Killing form, normalized so that B(Theta, Theta) = -2(n-2) for n >= 3
// (the so(2,1) convention tr(XY) is used for n = 2).
Scalar killing_form(const Matrix& x, const Matrix& y, int n);

// <X,Y> = -B(X, theta(Y)) / (2n-4); positive definite. For n = 2 the
// normalizer vanishes, so the unnormalized -B(X, theta(Y)) is used and must
// be enabled explicitly via policy().allow_n2_inner.
Scalar inner_product(const AlgebraElement& x, const AlgebraElement& y);
Scalar inner_product(const Matrix& x, const Matrix& y, int n);
Scalar algebra_norm(const Matrix& x, int n);

// --- metric ------------------------------------------------------------------

// Left-invariant distance ||log(g^-1 h)|| in the inner-product norm.
Scalar group_distance(const GroupElement& g, const GroupElement& h);

Scalar sphere_distance(const Vector& v, const Vector& w);

// --- NAN decomposition --------------------------------------------------------

struct NanFactors {
    GroupElement nplus, b, nminus;
    Vector xplus, xminus;  // horospherical coordinates of the factors
    Scalar t;              // flow part of b
    Matrix m;              // SO(n-1) block of b
};

// Unique factorization u = n^+ (a_t m) n^- for u near the identity. Newton
// iteration on the chart (x^+, t, m-coordinates, x^-) seeded at `seed`
// (zero by default).
NanFactors nan_decompose(const GroupElement& u,
                         const Vector* seed = nullptr);

// Conjugation of a horospherical element through a_t m: returns x1 with
// exp(X1) = (a_t m) exp(X) (a_t m)^{-1} for sign +, and the mirrored
// identity exp(X) (a_t m) = (a_t m) exp(X1) for sign -. ||X1|| = e^{-t}||X||.
Vector conjugate_horospherical(Scalar t, const Matrix& m_so, const Vector& x,
                               int sign);

// Transport of an ambient tangent vector along the geodesic from p to q.
Vector transport_along(const HPoint& p, const HPoint& q, const Vector& v);

// Unit tangent at p toward q (p != q).
Vector unit_tangent_toward(const HPoint& p, const HPoint& q);

}  // namespace pants
