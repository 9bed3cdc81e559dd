#include "goodpants/steiner.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace pants {

namespace {

Scalar total_length(const PantsPresentation& p, const HPoint& x, const HPoint& y) {
    Scalar s = 0;
    for (int i = 0; i < 3; ++i) s += hdistance(x, p.connections[i] * y);
    return s;
}

HPoint hyper_midpoint(const HPoint& a, const HPoint& b) {
    Vector m = a + b;
    return m / std::sqrt(-mdot(m, m));
}

HPoint retract(const HPoint& p, const Vector& step) {
    // keep the base exactly on the sheet and the step exactly tangent; the
    // cosh-scaled tangency error otherwise feeds back and compounds
    HPoint q = p / std::sqrt(-mdot(p, p));
    Vector s = step + mdot(step, q) * q;
    Scalar norm = std::sqrt(std::max(mdot(s, s), 0.0));
    if (norm < 1e-18) return q;
    return std::cosh(norm) * q + std::sinh(norm) * (s / norm);
}

// Gradient of F in the (x, y) tangent pair.
std::pair<Vector, Vector> joint_gradient(const PantsPresentation& p,
                                         const HPoint& x, const HPoint& y) {
    const int dim = int(x.size());
    Vector gx = Vector::Zero(dim), gy = Vector::Zero(dim);
    for (int i = 0; i < 3; ++i) {
        gx -= unit_tangent_toward(x, p.connections[i] * y);
        gy -= unit_tangent_toward(y, lorentz_inverse(p.connections[i]) * x);
    }
    return {gx, gy};
}

struct SolveOut {
    HPoint x, y;
    bool degenerate = false;
};

SolveOut gradient_descent_from(const PantsPresentation& p, HPoint x) {
    SolveOut out;
    // Seed y by one Fermat solve; a jittered copy of x otherwise (y = x can
    // sit exactly on a vertex pair when a connection is the identity).
    HPoint y = x;
    try {
        y = fermat_point(lorentz_inverse(p.connections[0]) * x,
                         lorentz_inverse(p.connections[1]) * x,
                         lorentz_inverse(p.connections[2]) * x)
                .point;
    } catch (const Error&) {
        Rng rng(99);
        Vector step = rng.gaussian(int(x.size()));
        step += mdot(step, x) * x;
        y = retract(x, 0.05 * step / std::max(step.norm(), 1e-12));
    }
    Scalar f = total_length(p, x, y);
    Scalar eta = 0.5;
    for (int it = 0; it < 4000; ++it) {
        Scalar closest = std::numeric_limits<Scalar>::max();
        for (int i = 0; i < 3; ++i)
            closest = std::min(closest, hdistance(x, p.connections[i] * y));
        if (closest < 1e-9) break;  // collapsed onto a vertex pair
        auto [gx, gy] = joint_gradient(p, x, y);
        Scalar gn2 = std::max(mdot(gx, gx), 0.0) + std::max(mdot(gy, gy), 0.0);
        if (gn2 < 1e-18) break;
        // Below the float resolution of F the sufficient-decrease test is
        // meaningless; hand over to the Newton polish.
        if (eta * gn2 < 8.0 * std::numeric_limits<Scalar>::epsilon() * f) break;
        bool moved = false;
        while (eta > 1e-14) {
            HPoint xc = retract(x, -eta * gx);
            HPoint yc = retract(y, -eta * gy);
            Scalar fc = total_length(p, xc, yc);
            if (fc < f - 0.25 * eta * gn2) {
                x = xc;
                y = yc;
                f = fc;
                eta = std::min(1.0, 2.0 * eta);
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        if (!moved) break;
    }
    out.x = x;
    out.y = y;
    Scalar closest = std::numeric_limits<Scalar>::max();
    for (int i = 0; i < 3; ++i)
        closest = std::min(closest, hdistance(x, p.connections[i] * y));
    out.degenerate = closest < 1e-6;
    return out;
}

}  // namespace

SteinerGraph steiner_minimize(const PantsPresentation& p) {
    const int n = p.n;
    std::array<LoxodromicInvariants, 3> cuff_inv;
    for (int i = 0; i < 3; ++i) cuff_inv[i] = axis_invariants(p.cuff(i));

    // Seeds: centroid of the axis points closest to the base point, the
    // short-orthogeodesic footpoint, and a perturbation of the centroid.
    std::vector<HPoint> seeds;
    {
        Vector c = Vector::Zero(n + 1);
        for (int i = 0; i < 3; ++i) {
            Geodesic ax = geodesic_of_frame(cuff_inv[i].frame);
            c += ax.point_at(project_to_geodesic(ax, base_point(n)));
        }
        seeds.push_back(c / std::sqrt(-mdot(c, c)));
    }
    Geodesic ax1 = geodesic_of_frame(cuff_inv[1].frame);
    Geodesic ax2 = geodesic_of_frame(cuff_inv[2].frame);
    try {
        OrthoConnection oc = orthogeodesic(ax1, ax2);
        seeds.push_back(ax1.point_at(oc.s_src));
    } catch (const Error&) {
        // fall through to the centroid seed alone
    }
    {
        Rng rng(2718);
        HPoint b = seeds.front();
        Vector step = rng.gaussian(n + 1);
        step += mdot(step, b) * b;
        seeds.push_back(retract(b, 0.1 * step / std::max(step.norm(), 1e-12)));
    }

    std::vector<SolveOut> solutions;
    for (const HPoint& s : seeds) solutions.push_back(gradient_descent_from(p, s));

    size_t best = 0;
    for (size_t i = 1; i < solutions.size(); ++i)
        if (total_length(p, solutions[i].x, solutions[i].y) <
            total_length(p, solutions[best].x, solutions[best].y))
            best = i;
    Scalar spread = 0;
    for (const SolveOut& s : solutions)
        spread = std::max(spread, hdistance(s.x, solutions[best].x) +
                                      hdistance(s.y, solutions[best].y));

    HPoint x = solutions[best].x, y = solutions[best].y;
    bool degenerate = solutions[best].degenerate;

    // Joint Newton polish in 2n tangent coordinates.
    const Matrix jform = lorentz_form(n);
    Scalar min_eig = 0;
    if (!degenerate) {
        for (int round = 0; round < 12; ++round) {
            Matrix bx =
                position_frame(x, unit_tangent_toward(x, p.connections[0] * y))
                    .rightCols(n);
            Matrix by = position_frame(
                            y, unit_tangent_toward(
                                   y, lorentz_inverse(p.connections[0]) * x))
                            .rightCols(n);
            auto eval = [&](const Vector& c) -> Scalar {
                return total_length(p, retract(x, bx * c.head(n)),
                                    retract(y, by * c.tail(n)));
            };
            auto [gx, gy] = joint_gradient(p, x, y);
            Vector g(2 * n);
            g.head(n) = bx.transpose() * jform * gx;
            g.tail(n) = by.transpose() * jform * gy;
            if (g.norm() < 1e-12 && round > 0) break;
            const Scalar h = 1e-4;
            Matrix hess(2 * n, 2 * n);
            for (int i = 0; i < 2 * n; ++i)
                for (int j = i; j < 2 * n; ++j) {
                    Vector e = Vector::Zero(2 * n);
                    Vector f = Vector::Zero(2 * n);
                    e[i] = h;
                    f[j] = h;
                    Scalar v = (eval(e + f) - eval(e - f) - eval(f - e) +
                                eval(-e - f)) /
                               (4 * h * h);
                    hess(i, j) = v;
                    hess(j, i) = v;
                }
            Eigen::SelfAdjointEigenSolver<Matrix> es(hess);
            min_eig = es.eigenvalues()[0];
            if (min_eig <= 0) break;
            Vector step = hess.ldlt().solve(-g);
            if (!step.allFinite() || step.norm() > 0.5) break;
            Scalar before = total_length(p, x, y);
            HPoint xn = retract(x, bx * step.head(n));
            HPoint yn = retract(y, by * step.tail(n));
            if (total_length(p, xn, yn) <= before + 1e-13) {
                x = xn;
                y = yn;
            } else {
                break;
            }
        }
    }

    SteinerGraph sg;
    sg.x = x;
    sg.y = y;
    sg.seed_spread = spread;
    sg.hessian_min_eigen = min_eig;
    for (int i = 0; i < 3; ++i) {
        sg.lengths[i] = hdistance(x, p.connections[i] * y);
        sg.total += sg.lengths[i];
    }
    sg.degenerate =
        degenerate || *std::min_element(sg.lengths.begin(), sg.lengths.end()) < 1e-6;
    auto [gx, gy] = joint_gradient(p, x, y);
    sg.gradient_norm = std::sqrt(std::max(mdot(gx, gx), 0.0) +
                                 std::max(mdot(gy, gy), 0.0));
    if (!sg.degenerate) {
        std::array<Vector, 3> vx, vy;
        for (int i = 0; i < 3; ++i) {
            vx[i] = unit_tangent_toward(x, p.connections[i] * y);
            vy[i] = unit_tangent_toward(y, lorentz_inverse(p.connections[i]) * x);
        }
        for (int i = 0; i < 3; ++i) {
            sg.angles_x[i] =
                std::acos(std::clamp(mdot(vx[i], vx[(i + 1) % 3]), -1.0, 1.0));
            sg.angles_y[i] =
                std::acos(std::clamp(mdot(vy[i], vy[(i + 1) % 3]), -1.0, 1.0));
        }
    }
    return sg;
}

ConvexityReport convexity_probe(const PantsPresentation& p, int trials,
                                std::uint64_t seed) {
    const int n = p.n;
    Rng rng(seed);
    SteinerGraph sg = steiner_minimize(p);

    auto random_pair = [&](Scalar radius) {
        auto jitter = [&](const HPoint& c) {
            Vector step = rng.gaussian(n + 1);
            step += mdot(step, c) * c;
            return retract(c, radius * rng.uniform() * step /
                                  std::max(step.norm(), 1e-12));
        };
        return std::make_pair(jitter(sg.x), jitter(sg.y));
    };

    ConvexityReport rep;
    rep.trials = trials;
    rep.min_margin = std::numeric_limits<Scalar>::max();
    for (int t = 0; t < trials; ++t) {
        auto [x1, y1] = random_pair(1.0);
        auto [x2, y2] = random_pair(1.0);
        if (hdistance(x1, x2) + hdistance(y1, y2) < 1e-8) continue;
        Scalar chord = 0.5 * (total_length(p, x1, y1) + total_length(p, x2, y2));
        Scalar mid = total_length(p, hyper_midpoint(x1, x2), hyper_midpoint(y1, y2));
        Scalar margin = chord - mid;
        if (margin > 0) ++rep.strict;
        rep.min_margin = std::min(rep.min_margin, margin);
    }

    // Margin decay under shrinking: expect the quadratic Taylor rate.
    Vector dx = rng.gaussian(n + 1), dy = rng.gaussian(n + 1);
    dx += mdot(dx, sg.x) * sg.x;
    dy += mdot(dy, sg.y) * sg.y;
    dx /= dx.norm();
    dy /= dy.norm();
    std::vector<Scalar> ll, lm;
    for (Scalar lam : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
        HPoint x1 = retract(sg.x, lam * dx), x2 = retract(sg.x, -lam * dx);
        HPoint y1 = retract(sg.y, lam * dy), y2 = retract(sg.y, -lam * dy);
        Scalar chord = 0.5 * (total_length(p, x1, y1) + total_length(p, x2, y2));
        Scalar mid = total_length(p, hyper_midpoint(x1, x2), hyper_midpoint(y1, y2));
        if (chord - mid > 0) {
            ll.push_back(std::log(lam));
            lm.push_back(std::log(chord - mid));
        }
    }
    rep.fit_exponent = (ll.size() >= 3) ? fit_slope(ll, lm) : 0.0;
    return rep;
}

Tripods tripods_from_steiner(const PantsPresentation& p, const SteinerGraph& sg,
                             std::uint64_t frame_seed) {
    if (sg.degenerate)
        throw Error("DegenerateTheta", "tripods need a nondegenerate graph");
    const int n = p.n;
    Tripods t;
    t.legs_x.resize(n + 1, 3);
    t.legs_y.resize(n + 1, 3);
    t.perp_x.resize(n + 1, 3);
    t.perp_y.resize(n + 1, 3);
    for (int i = 0; i < 3; ++i) {
        t.legs_x.col(i) = unit_tangent_toward(sg.x, p.connections[i] * sg.y);
        t.legs_y.col(i) =
            unit_tangent_toward(sg.y, lorentz_inverse(p.connections[i]) * sg.x);
    }
    // v_i-perp: in-plane normal with (v_i, v_i-perp) positive for the cyclic
    // orientation, which puts it at pi/6 from v_{i+1}. The far tripod sees
    // the arcs in the mirrored cyclic order, so its perps come from the
    // preceding leg; the two frame families then wind oppositely, as the
    // half-turn comparison at the midpoints requires.
    for (int i = 0; i < 3; ++i) {
        Vector w = t.legs_x.col((i + 1) % 3);
        Vector v = t.legs_x.col(i);
        Vector perp = w - mdot(w, v) * v;
        t.perp_x.col(i) = perp / std::sqrt(mdot(perp, perp));
        Vector wy = t.legs_y.col((i + 2) % 3);
        Vector vy = t.legs_y.col(i);
        Vector perpy = wy - mdot(wy, vy) * vy;
        t.perp_y.col(i) = perpy / std::sqrt(mdot(perpy, perpy));
    }

    auto complement = [&](const HPoint& base, const Vector& v, const Vector& vp,
                          std::uint64_t rot_seed) -> Matrix {
        Matrix full = position_frame(base, v);
        Matrix e(n + 1, n - 2);
        int out = 0;
        for (int j = 1; j <= n && out < n - 2; ++j) {
            Vector c = full.col(j);
            c -= mdot(c, v) * v;
            c -= mdot(c, vp) * vp;
            for (int k = 0; k < out; ++k) c -= mdot(c, e.col(k)) * e.col(k);
            Scalar nn = mdot(c, c);
            if (nn > 1e-12) e.col(out++) = c / std::sqrt(nn);
        }
        if (out < n - 2) throw Error("Numeric", "frame completion failed");
        // positive total orientation of (v, vp, E)
        Matrix chk(n + 1, n + 1);
        chk.col(0) = base;
        chk.col(1) = v;
        chk.col(2) = vp;
        chk.rightCols(n - 2) = e;
        if (chk.determinant() < 0) e.col(n - 3) = -e.col(n - 3);
        if (rot_seed != 0 && n > 3) {
            Rng rng(rot_seed);
            e = e * haar_so(n - 2, rng);
        }
        return e;
    };
    t.frame_x = complement(sg.x, t.legs_x.col(0), t.perp_x.col(0), frame_seed);
    t.frame_y = complement(sg.y, t.legs_y.col(0), t.perp_y.col(0),
                           frame_seed == 0 ? 0 : frame_seed + 101);
    return t;
}

}  // namespace pants
