#include "goodpants/classifier.hpp"

#include <cmath>

namespace pants {

CuffInvariants cuff_invariants(const PantsPresentation& p, Scalar R, Scalar eps) {
    CuffInvariants c;
    c.all_good = true;
    for (int i = 0; i < 3; ++i) {
        LoxodromicInvariants inv = axis_invariants(p.cuff(i));
        c.lengths[i] = inv.t;
        c.monodromies[i] = inv.m_class;
        c.good[i] = std::abs(inv.t - 2.0 * R) < 2.0 * eps &&
                    so_distance_to_identity(inv.m_class) < eps;
        c.all_good = c.all_good && c.good[i];
    }
    return c;
}

PantsPresentation build_perfect_pants(int n, Scalar R) {
    if (n < 2) throw Error("DimensionTooSmall", "need n >= 2");
    if (R <= 2.0) throw Error("BadParameter", "need R > 2");
    // Two Fermat vertices joined by three arcs of length l meeting at 2 pi/3;
    // closing any two arcs into a cuff gives the planar word
    // G(l) R(-2pi/3) G(-l) R(-2pi/3), whose translation length is 2R exactly
    // when cosh(l) = (4 cosh R + 1)/3.
    Scalar l = std::acosh((4.0 * std::cosh(R) + 1.0) / 3.0);
    PantsPresentation p;
    p.n = n;
    p.provenance = PantsPresentation::Provenance::SyntheticGood;
    // gauge: both graph vertices stay near the base point, keeping the
    // connection matrices at e^l scale instead of e^{2l}
    for (int i = 0; i < 3; ++i) {
        GroupElement r = rot2(2.0 * kPi * i / 3.0, n);
        p.connections[i] = r * flow(l, n) * r;
    }
    return p;
}

PantsPresentation build_bad_pants(int n, Scalar R) {
    if (n < 3) throw Error("DimensionTooSmall", "bad pants need n >= 3");
    if (R <= 2.0) throw Error("BadParameter", "need R > 2");
    // Inserting the involution diag(1,-1,-1,1,...,1) into each arc flips the
    // turn direction of the closed-up cuff words: they become
    // G(l) R(2pi/3) G(-l) R(-2pi/3) with length 2R at
    // cosh(l) = (4 cosh R - 1)/3. The arcs then develop onto the hexagon
    // with opposite sides identified rather than the planar theta.
    Scalar l = std::acosh((4.0 * std::cosh(R) - 1.0) / 3.0);
    GroupElement bhat = Matrix::Identity(n + 1, n + 1);
    bhat(2, 2) = -1.0;
    bhat(3, 3) = -1.0;
    PantsPresentation p;
    p.n = n;
    p.provenance = PantsPresentation::Provenance::SyntheticBad;
    for (int i = 0; i < 3; ++i) {
        GroupElement r = rot2(2.0 * kPi * i / 3.0, n);
        p.connections[i] = r * flow(l, n) * bhat * r;
    }
    return p;
}

PantsPresentation perturb_pants(const PantsPresentation& p, Scalar scale,
                                std::uint64_t seed) {
    Rng rng(seed);
    const int n = p.n;
    PantsPresentation out = p;
    out.provenance = PantsPresentation::Provenance::Perturbed;
    for (int i = 0; i < 3; ++i) {
        int mdim = (n - 1) * (n - 2) / 2;
        Matrix m = (mdim > 0) ? skew_from_coords(rng.gaussian(mdim), n - 1)
                              : Matrix::Zero(n - 1, n - 1);
        Matrix xi = algebra_assemble(rng.normal(), m, rng.gaussian(n - 1),
                                     rng.gaussian(n - 1));
        Scalar norm = algebra_norm(xi, n);
        if (norm > 0) xi *= scale * rng.uniform() / norm;
        // Left factors move each connection near its own attachment, so every
        // cuff word becomes a cyclically small perturbation of the original;
        // a right factor would re-enter conjugated through the long adjacent
        // connection and blow up by e^R.
        out.connections[i] = matrix_exp(xi) * out.connections[i];
    }
    return out;
}

std::array<Matrix, 3> connection_monodromies(const PantsPresentation& p,
                                             const SteinerGraph& sg,
                                             const Tripods& t) {
    const int n = p.n;
    std::array<Matrix, 3> x;
    for (int i = 0; i < 3; ++i) {
        GroupElement fr_e(n + 1, n + 1), fr_f(n + 1, n + 1);
        fr_e.col(0) = sg.x;
        fr_e.col(1) = t.legs_x.col(i);
        fr_e.col(2) = t.perp_x.col(i);
        fr_e.rightCols(n - 2) = t.frame_x;
        fr_f.col(0) = sg.y;
        fr_f.col(1) = t.legs_y.col(i);
        fr_f.col(2) = t.perp_y.col(i);
        fr_f.rightCols(n - 2) = t.frame_y;

        GroupElement e_mid = fr_e * flow(0.5 * sg.lengths[i], n);
        GroupElement f_mid =
            p.connections[i] * fr_f * flow(0.5 * sg.lengths[i], n);
        GroupElement xhat = rot2(kPi, n) * lorentz_inverse(e_mid) * f_mid;
        if ((xhat.col(0) - Vector::Unit(n + 1, 0)).cwiseAbs().maxCoeff() > 1e-6 ||
            (xhat.col(1) - Vector::Unit(n + 1, 1)).cwiseAbs().maxCoeff() > 1e-6)
            throw Error("Numeric", "midpoint frames do not share base and axis");
        x[i] = project_so(xhat.block(2, 2, n - 1, n - 1));
    }
    return x;
}

Matrix phi_conj(const Matrix& a) {
    Matrix b = a;
    b.row(0) = -b.row(0);
    b.col(0) = -b.col(0);
    return b;
}

Matrix bad_involution(int m) {
    Matrix u = Matrix::Identity(m, m);
    if (m >= 2) {
        u(0, 0) = -1.0;
        u(1, 1) = -1.0;
    }
    return u;
}

InvolutionAlignment align_to_involution(const Matrix& a) {
    const int m = int(a.rows());
    InvolutionAlignment out;
    if (m == 1) {
        out.q = Matrix::Identity(1, 1);
        out.u = Matrix::Identity(1, 1);
        out.dist = 0;
        return out;
    }
    Vector w = a.col(0);  // A e1
    Vector e1 = Vector::Unit(m, 0);
    // branch choice: the nearer of +-e1 decides e vs the involution
    bool plus = w.dot(e1) >= 0.0;
    out.u = plus ? Matrix(Matrix::Identity(m, m)) : bad_involution(m);
    Vector target = plus ? e1 : Vector(-e1);

    // minimal rotation r with r (A e1) = target, then q = (u r a)^-1 fixes e1
    Matrix r = Matrix::Identity(m, m);
    Vector f = target - target.dot(w) * w;
    Scalar fn = f.norm();
    if (fn > 1e-14) {
        f /= fn;
        Scalar c = std::clamp(w.dot(target), -1.0, 1.0);
        Scalar s = std::sqrt(std::max(0.0, 1.0 - c * c));
        r += (c - 1.0) * (w * w.transpose() + f * f.transpose()) +
             s * (f * w.transpose() - w * f.transpose());
    }
    out.q = (out.u * r * a).transpose();  // inverse of an orthogonal matrix
    out.dist = so_distance(a * out.q, out.u);
    return out;
}

Classification classify(const PantsPresentation& p, Scalar R, Scalar eps,
                        std::uint64_t gauge_seed) {
    Classification c;
    c.threshold = 7.0 * eps * kClassifierSlack;
    c.cuffs = cuff_invariants(p, R, eps);
    if (!c.cuffs.all_good) {
        c.verdict = Verdict::NotCuffGood;
        c.diagnostics = "a cuff fails the length or monodromy window";
        return c;
    }

    SteinerGraph sg = steiner_minimize(p);
    if (sg.degenerate) {
        c.verdict = Verdict::Unresolved;
        c.diagnostics = "degenerate theta graph";
        return c;
    }
    Tripods t = tripods_from_steiner(p, sg, gauge_seed);
    std::array<Matrix, 3> x = connection_monodromies(p, sg, t);

    InvolutionAlignment al = align_to_involution(x[0]);
    const int m = p.n - 1;
    Matrix ubad = bad_involution(m);
    Scalar d_good = 0, d_bad = 0;
    for (int i = 0; i < 3; ++i) {
        c.aligned[i] = x[i] * al.q;
        d_good = std::max(d_good, so_distance_to_identity(c.aligned[i]));
        d_bad = std::max(d_bad, so_distance(c.aligned[i], ubad));
    }
    if (d_good <= d_bad && d_good < c.threshold) {
        c.verdict = Verdict::Good;
        c.certificate = d_good;
    } else if (d_bad < d_good && d_bad < c.threshold) {
        c.verdict = Verdict::Bad;
        c.certificate = d_bad;
    } else {
        c.verdict = Verdict::Unresolved;
        c.certificate = std::min(d_good, d_bad);
        c.diagnostics = "aligned connection rewrites near neither target";
    }
    return c;
}

// --- third connections ------------------------------------------------------

namespace {

// SO(n) rewrite whose frame is (normal w, -axis, completion) in the chart
// where frame slot 1 is the axis direction and slots 2..n the normal space.
Matrix third_frame_rewrite(const Vector& w, const Matrix& completion) {
    const int m = int(w.size());  // n - 1
    Matrix k = Matrix::Zero(m + 1, m + 1);
    k(0, 1) = -1.0;
    k.block(1, 0, m, 1) = w;
    k.block(1, 2, m, m - 1) = completion;
    return k;
}

}  // namespace

ThirdConnectionData third_connection_analysis(const ModelClosedGeodesic& g0,
                                              const NormalFiberPoint& u,
                                              const NormalFiberPoint& v,
                                              Scalar l, const Matrix& y, int n) {
    if (g0.fiber_dim() != n - 1)
        throw Error("BadParameter", "model fiber dimension mismatch");
    const Scalar L = g0.length;
    Scalar d1 = v.s - u.s;
    d1 -= L * std::floor(d1 / L);
    Scalar d2 = L - d1;
    const Scalar two_ln2 = 2.0 * std::log(2.0);

    ThirdConnectionData out;
    out.y = y;
    out.predicted_length = {L, d1 + l - two_ln2, d2 + l - two_ln2};
    if (out.predicted_length[1] <= 0 || out.predicted_length[2] <= 0 ||
        l <= two_ln2)
        throw Error("InconsistentGeometry",
                    "arc and connection lengths close no geodesic");

    // Frame completions at the two footpoints. Developed with A at the
    // origin: the B-data is carried flat to parameter d1, picking up one
    // holonomy factor when the development runs past the gluing seam.
    Matrix e_comp = complete_orthonormal(u.w).rightCols(n - 2);
    Matrix f_comp = complete_orthonormal(v.w).rightCols(n - 2);
    Vector vw_dev = v.w;
    Matrix fc_dev = f_comp;
    if (u.s + d1 >= L) {
        Matrix inv_h = g0.holonomy.transpose();
        vw_dev = inv_h * vw_dev;
        fc_dev = inv_h * fc_dev;
    }

    // Same-fiber frame rewrites: with a the foot at A, b the developed
    // connection tangent at B, and Lambda the holonomy of the model,
    //   (-a, E) X1 = (b, F)   and   Lambda (a, E) X2 = (-b, F).
    // The two frames carry opposite orientations automatically.
    Matrix ae(n - 1, n - 1), bf(n - 1, n - 1);
    ae.col(0) = u.w;
    ae.rightCols(n - 2) = e_comp;
    bf.col(0) = -vw_dev;
    bf.rightCols(n - 2) = fc_dev;
    Matrix mae = ae;
    mae.col(0) = -mae.col(0);
    Matrix mbf = bf;
    mbf.col(0) = -mbf.col(0);
    out.x1 = project_so(mae.transpose() * bf);
    out.x2 = project_so(ae.transpose() * g0.holonomy.transpose() * mbf);

    out.predicted_monodromy = {out.x2.transpose() * phi_conj(out.x1),
                               out.x1.transpose() * phi_conj(y),
                               y.transpose() * phi_conj(out.x2)};

    // Group words realizing the configuration. The cuff through the third
    // connection and the short arc is eta followed by the arc reversed; the
    // other cuff picks up the deck element of the model geodesic. Developed
    // with the first footpoint at the base point: the deck of the model
    // commutes with the flow, so shifting the origin conjugates nothing
    // away, and the frame products stay at the scale of the result.
    GroupElement big_t = flow(L, n) * m_embed(g0.holonomy, n);
    GroupElement fr_e0 = rewrite(third_frame_rewrite(u.w, e_comp));
    GroupElement fr_f0 =
        flow(d1, n) * rewrite(third_frame_rewrite(vw_dev, fc_dev));
    GroupElement g_eta = fr_e0 * flow(l, n) * rot2(kPi, n) * m_embed(y, n) *
                         lorentz_inverse(fr_f0);
    out.deck_gamma0 = big_t;
    out.deck_cuff1 = g_eta;
    // Anchored at the far footpoint, where this cuff's axis passes; written
    // with the frame factors cancelled so no intermediate product grows past
    // the scale of the result (the naive conjugation loses the subdominant
    // spectrum entirely).
    out.deck_cuff2 = m_embed(y.transpose(), n) * rot2(kPi, n) * flow(-l, n) *
                     (lorentz_inverse(fr_e0) *
                      (lorentz_inverse(big_t) * fr_f0));
    out.far_anchor = fr_f0;
    return out;
}

// --- average feet -----------------------------------------------------------

namespace {

// Model coordinates of an ambient foot (point q on the positioned axis,
// unit normal vec) relative to the axis frame h.
NormalFiberPoint to_model(const ModelClosedGeodesic& model,
                          const GroupElement& h, const HPoint& q,
                          const Vector& vec) {
    GroupElement hi = lorentz_inverse(h);
    Vector ql = hi * q;
    Scalar s = std::asinh(ql[1]);
    Vector w = (hi * vec).tail(ql.size() - 2);
    w /= w.norm();
    return canonical_point(model, s, w);
}

}  // namespace

AverageFeet average_feet_from_connection(const ModelClosedGeodesic& g0,
                                         const NormalFiberPoint& u,
                                         const NormalFiberPoint& v, Scalar l,
                                         const Matrix& y, int n) {
    ThirdConnectionData tc = third_connection_analysis(g0, u, v, l, y, n);
    AverageFeet out;
    out.model = g0;
    out.third_connection_length = l;
    // development chart: the cuff axis is the standard one, so model
    // coordinates read off directly and the normal components of an ambient
    // foot are its last n-1 coordinates
    Geodesic axis0{base_point(n), Vector::Unit(n + 1, 1)};
    out.long_feet = {canonical_point(g0, u.s, u.w), canonical_point(g0, v.s, v.w)};

    // Average feet first: the antipodal degeneracy must surface before any
    // axis extraction can fail on the same malformed configuration.
    const NormalFiberPoint& u1 = out.long_feet[0];
    const NormalFiberPoint& u2 = out.long_feet[1];
    Scalar fwd = u2.s - u1.s;
    fwd -= g0.length * std::floor(fwd / g0.length);
    for (int k = 0; k < 2; ++k) {
        Scalar half = (k == 0) ? 0.5 * fwd : -0.5 * (g0.length - fwd);
        NormalFiberPoint a = transport_by(g0, u1, half);
        NormalFiberPoint b = transport_by(g0, u2, -half);
        Scalar gap = sphere_distance(a.w, b.w);
        if (gap > kPi - 1e-6)
            throw Error("AntipodalFeet", "spherical midpoint is ill-defined");
        Vector mid = a.w + b.w;
        mid /= mid.norm();
        out.average[k] = {a.s, mid};
    }

    // The words develop with the first footpoint at the origin, so the
    // extracted parameters shift back by u.s.
    auto short_foot = [&](const OrthoConnection& oc) {
        Vector w = oc.foot_src.tail(n - 1);
        return canonical_point(g0, oc.s_src + u.s, w / w.norm());
    };
    Geodesic ax1 = geodesic_of_frame(axis_frame(tc.deck_cuff1));
    OrthoConnection oc1 = orthogeodesic(axis0, ax1);
    out.short_feet[0] = short_foot(oc1);
    out.short_connection_length = oc1.length;
    try {
        GroupElement f2_frame = tc.far_anchor * axis_frame(tc.deck_cuff2);
        Geodesic ax2 = geodesic_of_frame(f2_frame);
        OrthoConnection oc2 = orthogeodesic(axis0, ax2);
        out.short_feet[1] = short_foot(oc2);
    } catch (const Error&) {
        // the far cuff axis can run outside double-precision reach; the
        // near-arc foot is then the only one reported
        out.short_feet[1] = out.short_feet[0];
    }

    for (int k = 0; k < 2; ++k)
        out.drift[k] =
            std::min(bundle_distance(g0, out.average[k], out.short_feet[0]),
                     bundle_distance(g0, out.average[k], out.short_feet[1]));
    return out;
}

AverageFeet average_feet(const PantsPresentation& p, int cuff) {
    const int n = p.n;
    GroupElement c0 = p.cuff(cuff);
    LoxodromicInvariants inv0 = axis_invariants(c0);
    AverageFeet out;
    out.model = {inv0.t, inv0.m_class};
    Geodesic axis0 = geodesic_of_frame(inv0.frame);

    // Third connection: the adjacent translate of the cuff axis across the
    // pants, applied in two factors so the pullbacks never amplify rounding
    // past the scale of the result. The correct combinatorial type has
    // length about half a cuff plus 2 ln 2.
    Scalar expect = 0.5 * inv0.t + 2.0 * std::log(2.0);
    auto g = [&](int k) { return p.connections[((k % 3) + 3) % 3]; };
    struct Candidate {
        GroupElement first, second;  // translate = first * second
    };
    std::array<Candidate, 4> cands = {
        Candidate{g(cuff + 2 + 1), lorentz_inverse(g(cuff + 2 + 2))},
        Candidate{g(cuff + 2 + 2), lorentz_inverse(g(cuff + 2 + 1))},
        Candidate{g(cuff + 1 + 1), lorentz_inverse(g(cuff + 1 + 2))},
        Candidate{g(cuff + 1 + 2), lorentz_inverse(g(cuff + 1 + 1))}};

    auto apply = [](const Candidate& c, const Vector& v) -> Vector {
        return c.first * (c.second * v);
    };
    auto pull = [](const Candidate& c, const Vector& v) -> Vector {
        return lorentz_inverse(c.second) *
               Vector(lorentz_inverse(c.first) * v);
    };

    Scalar best_err = std::numeric_limits<Scalar>::max();
    OrthoConnection best_oc;
    Candidate best_c;
    Scalar best_t0 = 0;
    for (const Candidate& cand : cands) {
        try {
            Geodesic naive{apply(cand, axis0.base), apply(cand, axis0.dir)};
            // coarse parameters; then re-base the far line at its witness
            // point, built through the factors
            Scalar s0 = 0, t0 = 0;
            for (int it = 0; it < 60; ++it) {
                s0 = project_to_geodesic(axis0, naive.point_at(t0));
                t0 = project_to_geodesic(naive, axis0.point_at(s0));
                if (std::abs(s0) > 60 || std::abs(t0) > 60)
                    throw Error("Intersecting", "no common perpendicular");
            }
            Geodesic moved{apply(cand, axis0.point_at(t0)),
                           apply(cand, axis0.tangent_at(t0))};
            moved.base /= std::sqrt(-mdot(moved.base, moved.base));
            moved.dir += mdot(moved.dir, moved.base) * moved.base;
            moved.dir /= std::sqrt(mdot(moved.dir, moved.dir));
            OrthoConnection oc = orthogeodesic(axis0, moved);
            Scalar err = std::abs(oc.length - expect);
            if (err < best_err) {
                best_err = err;
                best_oc = oc;
                best_c = cand;
                best_t0 = t0;
            }
        } catch (const Error&) {
        }
    }
    if (best_err > 1.0)
        throw Error("InconsistentGeometry", "no third connection candidate");
    out.third_connection_length = best_oc.length;

    // Long feet: near side directly; far side by the factored pullback. The
    // translate preserves the axis parameter, so the far basepoint needs no
    // matrix product at all.
    out.long_feet[0] = to_model(out.model, inv0.frame,
                                axis0.point_at(best_oc.s_src), best_oc.foot_src);
    Scalar far_param = best_t0 + best_oc.s_dst;
    out.long_feet[1] = to_model(out.model, inv0.frame, axis0.point_at(far_param),
                                pull(best_c, best_oc.foot_dst));

    // Short orthogeodesic feet from the two other cuff axes.
    for (int k = 0; k < 2; ++k) {
        GroupElement ck = p.cuff((cuff + 1 + k) % 3);
        Geodesic axk = geodesic_of_frame(axis_frame(ck));
        OrthoConnection oc = orthogeodesic(axis0, axk);
        out.short_feet[k] = to_model(out.model, inv0.frame,
                                     axis0.point_at(oc.s_src), oc.foot_src);
        if (k == 0) out.short_connection_length = oc.length;
    }

    // Average feet: arc midpoints of the long-feet basepoints carrying the
    // spherical midpoint of the transported vectors.
    const NormalFiberPoint& u1 = out.long_feet[0];
    const NormalFiberPoint& u2 = out.long_feet[1];
    Scalar fwd = u2.s - u1.s;
    fwd -= out.model.length * std::floor(fwd / out.model.length);
    for (int k = 0; k < 2; ++k) {
        Scalar half = (k == 0) ? 0.5 * fwd : -0.5 * (out.model.length - fwd);
        NormalFiberPoint a = transport_by(out.model, u1, half);
        NormalFiberPoint b = transport_by(out.model, u2, -half);
        Scalar gap = sphere_distance(a.w, b.w);
        if (gap > kPi - 1e-6)
            throw Error("AntipodalFeet", "spherical midpoint is ill-defined");
        Vector mid = a.w + b.w;
        mid /= mid.norm();
        out.average[k] = {a.s, mid};
        out.drift[k] = std::min(bundle_distance(out.model, out.average[k],
                                                out.short_feet[0]),
                                bundle_distance(out.model, out.average[k],
                                                out.short_feet[1]));
    }
    return out;
}

}  // namespace pants
