#include "goodpants/geodesic.hpp"

#include "goodpants/words.hpp"

#include <cmath>

namespace pants {

Scalar hdistance(const HPoint& p, const HPoint& q) {
    Scalar c = -mdot(p, q);
    return std::acosh(std::max(c, 1.0));
}

Scalar project_to_geodesic(const Geodesic& g, const HPoint& q) {
    // d/ds <gamma(s), q> = 0  =>  tanh s = -<dir,q>/<base,q>
    Scalar a = mdot(g.base, q);  // <= -1
    Scalar b = mdot(g.dir, q);
    return std::atanh(std::clamp(-b / a, -1.0 + 1e-16, 1.0 - 1e-16));
}

namespace {

// Point reflection through x as a linear map.
Matrix point_reflection(const HPoint& x) {
    const int d = int(x.size());
    Matrix j = lorentz_form(d - 1);
    return -Matrix::Identity(d, d) - 2.0 * x * (x.transpose() * j);
}

// One closed-form perpendicular solve; returns false when the quadratic
// offers no usable interior root (intersecting, asymptotic, or noise).
bool perpendicular_params(const Geodesic& g1, const Geodesic& g2, Scalar& s,
                          Scalar& t) {
    Scalar a = mdot(g1.base, g2.base), b = mdot(g1.base, g2.dir);
    Scalar c = mdot(g1.dir, g2.base), d = mdot(g1.dir, g2.dir);
    Scalar kq = b * d - a * c;
    Scalar mq = b * b + d * d - a * a - c * c;
    Scalar x;
    if (std::abs(kq) < 1e-14 * (std::abs(mq) + 1.0)) {
        x = 0.0;
    } else {
        Scalar disc = mq * mq - 4.0 * kq * kq;
        if (disc <= 0) return false;
        Scalar qroot = -0.5 * (mq + std::copysign(std::sqrt(disc), mq));
        Scalar x1 = qroot / kq, x2 = kq / qroot;
        x = (std::abs(x1) < 1.0) ? x1 : x2;
        if (std::abs(x) >= 1.0) return false;
    }
    Scalar den = b * x + d;
    Scalar y = (std::abs(den) > 1e-12) ? -(a * x + c) / den
                                       : -(d * x + b) / (c * x + a);
    if (!(std::abs(y) < 1.0)) return false;
    s = std::atanh(x);
    t = std::atanh(y);
    return std::isfinite(s) && std::isfinite(t);
}

OrthoConnection orthogeodesic_centered(const Geodesic& g1, const Geodesic& g2);

}  // namespace

OrthoConnection orthogeodesic(const Geodesic& g1, const Geodesic& g2) {
    // Iterated recenter-and-solve. Far from the base point the Minkowski
    // coordinates grow like e^d and every Gram entry drowns in rounding, so
    // each round re-bases both lines at the current witness estimate,
    // translates it to the base point by a pair of point reflections, and
    // re-solves; the estimate self-corrects until the configuration is
    // resolved at unit scale.
    const int dim = int(g1.base.size()) - 1;
    Scalar S = 0, T = 0;
    for (int round = 0; round < 8; ++round) {
        HPoint a1 = g1.point_at(S);
        a1 /= std::sqrt(-mdot(a1, a1));
        Vector mid = a1 + base_point(dim);
        HPoint midp = mid / std::sqrt(-mdot(mid, mid));
        Matrix tau = point_reflection(midp) * point_reflection(a1);
        auto recenter = [&](const Geodesic& g, Scalar at) {
            Geodesic out{tau * g.point_at(at), tau * g.tangent_at(at)};
            out.base /= std::sqrt(-mdot(out.base, out.base));
            out.dir += mdot(out.dir, out.base) * out.base;
            out.dir /= std::sqrt(mdot(out.dir, out.dir));
            return out;
        };
        Geodesic c1 = recenter(g1, S), c2 = recenter(g2, T);
        Scalar ds = 0, dt = 0;
        if (!perpendicular_params(c1, c2, ds, dt)) {
            // let the centered classifier produce the honest error
            OrthoConnection c = orthogeodesic_centered(c1, c2);
            Matrix tau_inv = point_reflection(a1) * point_reflection(midp);
            c.s_src += S;
            c.s_dst += T;
            c.foot_src = tau_inv * c.foot_src;
            c.foot_dst = tau_inv * c.foot_dst;
            return c;
        }
        S += ds;
        T += dt;
        if (std::abs(ds) + std::abs(dt) < 0.25 || round == 7) {
            OrthoConnection c = orthogeodesic_centered(recenter(g1, S),
                                                       recenter(g2, T));
            Matrix tau_inv = point_reflection(a1) * point_reflection(midp);
            c.s_src += S;
            c.s_dst += T;
            c.foot_src = tau_inv * c.foot_src;
            c.foot_dst = tau_inv * c.foot_dst;
            return c;
        }
    }
    throw Error("Numeric", "perpendicular search did not settle");
}

namespace {

OrthoConnection orthogeodesic_centered(const Geodesic& g1, const Geodesic& g2) {
    // Identical: both defining vectors of g2 lie in the plane of g1.
    auto in_plane = [&](const Vector& q) {
        Vector r = q + mdot(q, g1.base) * g1.base - mdot(q, g1.dir) * g1.dir;
        return r.cwiseAbs().maxCoeff() < 1e-9;
    };
    if (in_plane(g2.base) && in_plane(g2.dir))
        throw Error("Identical", "geodesics span one plane");

    // Shared ideal endpoint: null spans proportional.
    Vector e1p = g1.base + g1.dir, e1m = g1.base - g1.dir;
    Vector e2p = g2.base + g2.dir, e2m = g2.base - g2.dir;
    for (const Vector* a : {&e1p, &e1m})
        for (const Vector* b : {&e2p, &e2m})
            if (std::abs(mdot(*a, *b)) <
                1e-12 * a->cwiseAbs().maxCoeff() * b->cwiseAbs().maxCoeff())
                throw Error("Asymptotic", "geodesics share an ideal endpoint");

    auto classify_span = [&]() {
        // Plane intersection: nullspace of [p1 v1 -p2 -v2].
        Matrix m(g1.base.size(), 4);
        m.col(0) = g1.base;
        m.col(1) = g1.dir;
        m.col(2) = -g2.base;
        m.col(3) = -g2.dir;
        Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
        if (svd.singularValues()[3] > 1e-10) return;  // planes only meet at 0
        Vector c = svd.matrixV().col(3);
        Vector w = c[0] * g1.base + c[1] * g1.dir;
        Scalar ww = mdot(w, w);
        if (ww < -1e-12 * w.squaredNorm())
            throw Error("Intersecting", "geodesics meet in H^n");
        if (std::abs(ww) <= 1e-12 * w.squaredNorm())
            throw Error("Asymptotic", "geodesics are asymptotic");
    };
    classify_span();

    // The perpendicular equations reduce to one quadratic: with the cross
    // Gram entries a = <p1,p2>, b = <p1,v2>, c = <v1,p2>, d = <v1,v2> and
    // x = tanh s, y = tanh t, orthogonality at both ends reads
    //   b xy + a x + d y + c = 0  and  c xy + d x + a y + b = 0,
    // which eliminates to (bd - ac) x^2 + (b^2+d^2-a^2-c^2) x + (bd - ac) = 0
    // with reciprocal roots; the perpendicular is the root inside (-1, 1).
    Scalar a = mdot(g1.base, g2.base), b = mdot(g1.base, g2.dir);
    Scalar c2c = mdot(g1.dir, g2.base), d = mdot(g1.dir, g2.dir);
    Scalar kq = b * d - a * c2c;
    Scalar mq = b * b + d * d - a * a - c2c * c2c;
    Scalar x;
    if (std::abs(kq) < 1e-14 * (std::abs(mq) + 1.0)) {
        x = 0.0;
    } else {
        Scalar disc = mq * mq - 4.0 * kq * kq;
        if (disc <= 0)
            throw Error("Intersecting", "no common perpendicular exists");
        Scalar qroot = -0.5 * (mq + std::copysign(std::sqrt(disc), mq));
        Scalar x1 = qroot / kq, x2 = kq / qroot;
        x = (std::abs(x1) < 1.0) ? x1 : x2;
        if (std::abs(x) >= 1.0)
            throw Error("Asymptotic", "perpendicular escapes to the boundary");
    }
    Scalar den = b * x + d;
    Scalar y = (std::abs(den) > 1e-12)
                   ? -(a * x + c2c) / den
                   : -(d * x + b) / (c2c * x + a);
    if (std::abs(y) >= 1.0)
        throw Error("Asymptotic", "perpendicular escapes to the boundary");
    Scalar s = std::atanh(x), t = std::atanh(y);
    if (!std::isfinite(s) || !std::isfinite(t))
        throw Error("Numeric", "perpendicular parameters are not finite");

    OrthoConnection c;
    c.s_src = s;
    c.s_dst = t;
    HPoint p1 = g1.point_at(s), p2 = g2.point_at(t);
    c.length = hdistance(p1, p2);
    if (c.length < 1e-8)
        throw Error("Intersecting", "geodesics meet in H^n");
    c.foot_src = unit_tangent_toward(p1, p2);
    c.foot_dst = unit_tangent_toward(p2, p1);
    if (std::abs(mdot(c.foot_src, g1.tangent_at(s))) > 1e-8 ||
        std::abs(mdot(c.foot_dst, g2.tangent_at(t))) > 1e-8)
        throw Error("Numeric", "orthogonality defect after solve");
    return c;
}

}  // namespace

Matrix holonomy_power(const ModelClosedGeodesic& g, long k) {
    const int m = g.fiber_dim();
    Matrix r = Matrix::Identity(m, m);
    Matrix base = (k >= 0) ? g.holonomy : Matrix(g.holonomy.transpose());
    for (long i = 0; i < std::labs(k); ++i) r = r * base;
    return r;
}

NormalFiberPoint canonical_point(const ModelClosedGeodesic& g, Scalar s,
                                 const Vector& w) {
    long k = long(std::floor(s / g.length));
    return {s - Scalar(k) * g.length, holonomy_power(g, k) * w};
}

NormalFiberPoint transport_by(const ModelClosedGeodesic& g,
                              const NormalFiberPoint& x, Scalar dist) {
    return canonical_point(g, x.s + dist, x.w);
}

Vector parallel_transport(const ModelClosedGeodesic& g, Scalar from, Scalar to,
                          const Vector& w) {
    // w lives at the canonical representative of `from`; reduce the start
    // position without twisting, then carry w by the signed distance.
    Scalar from_c = from - g.length * std::floor(from / g.length);
    return canonical_point(g, from_c + (to - from), w).w;
}

Scalar fiber_distance_along(const ModelClosedGeodesic& g,
                            const NormalFiberPoint& x,
                            const NormalFiberPoint& y, Arc arc) {
    Scalar forward = y.s - x.s;
    forward -= g.length * std::floor(forward / g.length);  // in [0, L)
    NormalFiberPoint xm, ym;
    if (arc == Arc::One) {
        xm = transport_by(g, x, 0.5 * forward);
        ym = transport_by(g, y, -0.5 * forward);
    } else {
        Scalar back = g.length - forward;
        xm = transport_by(g, x, -0.5 * back);
        ym = transport_by(g, y, 0.5 * back);
    }
    return sphere_distance(xm.w, ym.w);
}

Scalar bundle_distance(const ModelClosedGeodesic& g, const NormalFiberPoint& x,
                       const NormalFiberPoint& y) {
    Scalar best = std::numeric_limits<Scalar>::max();
    for (long k = -1; k <= 1; ++k) {
        Scalar ds = x.s - (y.s - Scalar(k) * g.length);
        Scalar da = sphere_distance(x.w, holonomy_power(g, k) * y.w);
        best = std::min(best, std::sqrt(ds * ds + da * da));
    }
    return best;
}

namespace {

Scalar vertex_angle(const HPoint& at, const HPoint& b, const HPoint& c) {
    Vector u = unit_tangent_toward(at, b), v = unit_tangent_toward(at, c);
    return std::acos(std::clamp(mdot(u, v), -1.0, 1.0));
}

}  // namespace

FermatResult fermat_point(const HPoint& a, const HPoint& b, const HPoint& c) {
    const int n = int(a.size()) - 1;
    std::array<HPoint, 3> v{a, b, c};

    // Collinear configurations: the middle vertex sees the others at angle
    // pi (coincident points trip the tangent computation below).
    for (int i = 0; i < 3; ++i) {
        if (hdistance(v[i], v[(i + 1) % 3]) < 1e-12)
            throw Error("Degenerate", "coincident vertices");
        if (vertex_angle(v[i], v[(i + 1) % 3], v[(i + 2) % 3]) > kPi - 1e-6)
            throw Error("Degenerate", "collinear vertices");
    }

    for (int i = 0; i < 3; ++i) {
        if (vertex_angle(v[i], v[(i + 1) % 3], v[(i + 2) % 3]) >= 2.0 * kPi / 3.0) {
            FermatResult r;
            r.point = v[i];
            r.interior = false;
            r.vertex = i;
            r.total = hdistance(v[i], v[(i + 1) % 3]) +
                      hdistance(v[i], v[(i + 2) % 3]);
            return r;
        }
    }

    auto objective = [&](const HPoint& p) {
        return hdistance(p, a) + hdistance(p, b) + hdistance(p, c);
    };
    auto gradient = [&](const HPoint& p) -> Vector {
        Vector grad = Vector::Zero(n + 1);
        for (const HPoint& x : v) grad -= unit_tangent_toward(p, x);
        return grad;
    };
    auto retract = [&](const HPoint& p, const Vector& step) -> HPoint {
        HPoint q = p / std::sqrt(-mdot(p, p));
        Vector s = step + mdot(step, q) * q;
        Scalar norm = std::sqrt(std::max(mdot(s, s), 0.0));
        if (norm < 1e-18) return q;
        return std::cosh(norm) * q + std::sinh(norm) * (s / norm);
    };

    HPoint p = a + b + c;
    p /= std::sqrt(-mdot(p, p));
    Scalar f = objective(p);
    Scalar eta = 1.0;
    for (int it = 0; it < 2000; ++it) {
        Vector g = gradient(p);
        Scalar gn2 = std::max(mdot(g, g), 0.0);  // tangent-space norm
        if (gn2 < 1e-24) break;
        if (eta * gn2 < 8.0 * std::numeric_limits<Scalar>::epsilon() * f)
            break;  // decreases below float resolution; Newton finishes
        bool moved = false;
        while (eta > 1e-14) {
            HPoint cand = retract(p, -eta * g);
            Scalar fc = objective(cand);
            if (fc < f - 0.25 * eta * gn2) {
                p = cand;
                f = fc;
                eta = std::min(1.0, 2.0 * eta);
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        if (!moved) break;
    }

    // Newton polish in tangent coordinates.
    for (int it = 0; it < 12; ++it) {
        GroupElement fr = position_frame(p, unit_tangent_toward(p, a));
        Matrix basis = fr.rightCols(n);
        Vector g0 = basis.transpose() * lorentz_form(n) * gradient(p);
        if (g0.norm() < 1e-13) break;
        const Scalar h = 1e-6;
        Matrix hess(n, n);
        for (int k = 0; k < n; ++k) {
            HPoint pp = retract(p, h * basis.col(k));
            HPoint pm = retract(p, -h * basis.col(k));
            Vector gp = basis.transpose() * lorentz_form(n) * gradient(pp);
            Vector gm = basis.transpose() * lorentz_form(n) * gradient(pm);
            hess.col(k) = (gp - gm) / (2.0 * h);
        }
        hess = 0.5 * (hess + hess.transpose());
        Vector step = hess.ldlt().solve(-g0);
        if (!step.allFinite() || step.norm() > 0.5) step = -g0;
        HPoint cand = retract(p, basis * step);
        if (objective(cand) <= f + 1e-14) {
            p = cand;
            f = objective(p);
        } else {
            break;
        }
    }

    FermatResult r;
    r.point = p / std::sqrt(-mdot(p, p));
    r.interior = true;
    r.total = objective(r.point);
    r.gradient_norm = gradient(r.point).norm();

    // near the interior/vertex dichotomy boundary the minimizer collapses
    // onto a vertex and the distance gradients lose meaning there; resolve
    // such stalls as the vertex case they are approaching
    if (r.gradient_norm > 1e-8) {
        for (int i = 0; i < 3; ++i)
            if (hdistance(r.point, v[i]) < 1e-4) {
                FermatResult vr;
                vr.point = v[i];
                vr.interior = false;
                vr.vertex = i;
                vr.total = hdistance(v[i], v[(i + 1) % 3]) +
                           hdistance(v[i], v[(i + 2) % 3]);
                return vr;
            }
    }
    r.angles[0] = vertex_angle(r.point, a, b);
    r.angles[1] = vertex_angle(r.point, b, c);
    r.angles[2] = vertex_angle(r.point, c, a);
    return r;
}

namespace {

// Rotation in span(a, b) carrying unit vector a to unit vector b.
Matrix minimal_rotation(const Vector& a, const Vector& b) {
    const int n = int(a.size());
    Matrix r = Matrix::Identity(n, n);
    Vector f = b - b.dot(a) * a;
    Scalar fn = f.norm();
    if (fn < 1e-15) return r;  // parallel (antiparallel is rejected upstream)
    f /= fn;
    Scalar c = std::clamp(a.dot(b), -1.0, 1.0);
    Scalar s = std::sqrt(std::max(0.0, 1.0 - c * c));
    r += (c - 1.0) * (a * a.transpose() + f * f.transpose()) +
         s * (f * a.transpose() - a * f.transpose());
    return r;
}

}  // namespace

BrokenReduction broken_reduce(Scalar t1, Scalar theta, Scalar t2, int n) {
    if (t1 <= kBrokenMinLength || t2 <= kBrokenMinLength)
        throw Error("FlowTooShort", "broken reduction needs long segments");
    if (std::abs(theta) >= kPi - kBrokenAngleMargin)
        throw Error("AngleTooSharp", "turning angle too close to pi");

    GroupElement w = flow(t1, n) * rot2(theta, n) * flow(t2, n);
    HPoint q = w.col(0);  // w * p0
    Scalar t = hdistance(base_point(n), q);
    if (std::sinh(t) < 1e-12)
        throw Error("AngleTooSharp", "segment closes onto its start");

    // K A K splitting, both rotations built from O(1) direction data: the
    // naive peel flow(-t) k1^-1 w cancels catastrophically for long flows.
    Vector udir = q.tail(n) / q.tail(n).norm();  // outgoing direction at p0
    Matrix y1 = minimal_rotation(Vector::Unit(n, 0), udir);

    HPoint qi = lorentz_inverse(w).col(0);  // w^-1 * p0
    Vector v2 = -qi.tail(n) / qi.tail(n).norm();
    Matrix k2p = minimal_rotation(v2, Vector::Unit(n, 0));

    // what = k1^-1 w k2p^-1 equals a_t (1 x SO(n-1)); its lower block is
    // immune to the flow factor, so the residual rotation reads off stably.
    GroupElement what = lorentz_inverse(rewrite(y1)) * w *
                        lorentz_inverse(rewrite(k2p));
    Matrix qblock = project_so(what.block(2, 2, n - 1, n - 1));
    Scalar scale = std::max(1.0, what.cwiseAbs().maxCoeff());
    if ((what - flow(t, n) * m_embed(qblock, n)).cwiseAbs().maxCoeff() / scale >
        1e-8)
        throw Error("Numeric", "flow peeling left a residual");
    Matrix kappa = Matrix::Identity(n, n);
    kappa.block(1, 1, n - 1, n - 1) = qblock;

    BrokenReduction r;
    r.y1 = y1;
    r.y2 = kappa * k2p;
    r.t = t;
    r.defect = t1 + t2 - t;
    return r;
}

ClosedBrokenReport closed_broken_length(Scalar l_plus, Scalar l_minus, int n) {
    if (l_plus <= kBrokenMinLength || l_minus <= kBrokenMinLength)
        throw Error("FlowTooShort", "closed broken geodesic needs long segments");
    GroupElement w = flow(l_plus, n) * rot2(0.5 * kPi, n) * flow(l_minus, n) *
                     rot2(0.5 * kPi, n);
    LoxodromicInvariants inv = axis_invariants(w);
    ClosedBrokenReport rep;
    rep.realized = inv.t;
    rep.defect = std::abs(inv.t - l_plus - l_minus + 2.0 * std::log(2.0));
    return rep;
}

}  // namespace pants
