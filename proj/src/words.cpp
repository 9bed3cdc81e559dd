#include "goodpants/words.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace pants {

GroupElement evaluate(const Word& word, int n) {
    GroupElement g = Matrix::Identity(n + 1, n + 1);
    for (const Instruction& ins : word) {
        switch (ins.kind) {
            case Instruction::Kind::FrameFlow: g = g * flow(ins.value, n); break;
            case Instruction::Kind::Rotation2: g = g * rot2(ins.value, n); break;
            case Instruction::Kind::Rewrite: g = g * rewrite(ins.payload); break;
            case Instruction::Kind::Perturb: g = g * ins.payload; break;
        }
    }
    return g;
}

namespace {

// Dominant eigenvector of a loxodromic element: the attracting ideal point.
// The subdominant pair of g is numerically unresolvable once ||g|| is large,
// so the repelling point is extracted from g^{-1} by the caller.
std::pair<Scalar, Vector> dominant_fixed_point(const GroupElement& g) {
    Eigen::EigenSolver<Matrix> es(g);
    if (es.info() != Eigen::Success)
        throw Error("NotLoxodromic", "eigensolver failed");
    int i_max = 0;
    for (int i = 1; i < g.rows(); ++i)
        if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[i_max]))
            i_max = i;
    Scalar radius = std::abs(es.eigenvalues()[i_max]);
    if (radius < 1.0 + 1e-6 ||
        std::abs(es.eigenvalues()[i_max].imag()) > 1e-9 * radius)
        throw Error("NotLoxodromic", "spectral radius does not exceed 1");
    Vector v = es.eigenvectors().col(i_max).real();
    Scalar im = es.eigenvectors().col(i_max).imag().cwiseAbs().maxCoeff();
    if (im > 1e-8 * v.cwiseAbs().maxCoeff())
        throw Error("NotLoxodromic", "dominant eigenvector is not real");
    if (v[0] < 0) v = -v;
    return {std::log(radius), v};
}

}  // namespace

namespace {

GroupElement axis_frame_of_fixed_points(const Vector& u_in, const Vector& w_in) {
    Vector u = u_in, w = w_in;
    Scalar c = mdot(u, w);
    if (c >= -1e-12)
        throw Error("NotLoxodromic", "fixed points do not span a timelike plane");
    w *= -2.0 / c;  // now <u,w>_J = -2 and the axis frame is explicit
    HPoint p = 0.5 * (u + w);
    p /= std::sqrt(-mdot(p, p));
    Vector dir = 0.5 * (u - w);
    dir += mdot(dir, p) * p;  // timelike component removal
    dir /= std::sqrt(mdot(dir, dir));
    return position_frame(p, dir);
}

}  // namespace

GroupElement axis_frame(const GroupElement& g) {
    auto [t_fwd, u] = dominant_fixed_point(g);
    auto [t_bwd, w] = dominant_fixed_point(lorentz_inverse(g));
    (void)t_fwd;
    (void)t_bwd;
    return axis_frame_of_fixed_points(u, w);
}

LoxodromicInvariants axis_invariants(const GroupElement& g) {
    const int n = int(g.rows()) - 1;
    auto [t_fwd, u] = dominant_fixed_point(g);                  // attracting
    auto [t_bwd, w] = dominant_fixed_point(lorentz_inverse(g)); // repelling

    LoxodromicInvariants inv;
    inv.frame = axis_frame_of_fixed_points(u, w);
    inv.t = 0.5 * (t_fwd + t_bwd);
    Matrix conj = lorentz_inverse(inv.frame) * g * inv.frame;
    inv.m_class = project_so(conj.block(2, 2, n - 1, n - 1));
    Matrix recon = flow(inv.t, n) * m_embed(inv.m_class, n);
    if ((recon - conj).cwiseAbs().maxCoeff() >
        1e-6 * std::max(1.0, conj.cwiseAbs().maxCoeff()))
        throw Error("NotLoxodromic", "element is not conjugate to a_t m");
    return inv;
}

Scalar monodromy_angle_distance(const Matrix& a, const Matrix& b) {
    auto ta = rotation_angles(a);
    auto tb = rotation_angles(b);
    size_t k = std::max(ta.size(), tb.size());
    ta.resize(k, 0.0);
    tb.resize(k, 0.0);
    Scalar s = 0.0;
    for (size_t i = 0; i < k; ++i) s += (ta[i] - tb[i]) * (ta[i] - tb[i]);
    return std::sqrt(s);
}

Scalar monodromy_aligned_distance(const Matrix& a, const Matrix& b) {
    // Procrustes alignment b ~ q a q^T; equals the geodesic distance for
    // exactly conjugate inputs and degrades gracefully otherwise.
    Eigen::JacobiSVD<Matrix> svd(b * a.transpose(),
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix q = svd.matrixU() * svd.matrixV().transpose();
    if (q.determinant() < 0) {
        Matrix d = Matrix::Identity(a.rows(), a.cols());
        d(a.rows() - 1, a.rows() - 1) = -1;
        q = svd.matrixU() * d * svd.matrixV().transpose();
    }
    return so_distance(q * a * q.transpose(), b);
}

LoxodromicInvariants absorb_segments(std::vector<FlowSegment> segments, int n) {
    const Matrix id = Matrix::Identity(n + 1, n + 1);
    const Matrix idm = Matrix::Identity(n - 1, n - 1);
    for (auto& s : segments)
        if (s.t <= policy().absorb_flow_min)
            throw Error("NoConvergence", "flow length below absorption threshold");

    // Merge down to one segment: peel the perturbation of segment 0 apart,
    // send the horospherical halves through the adjacent flows (contracting
    // by e^{-t}) and join the B parts.
    while (segments.size() > 1) {
        const FlowSegment s0 = segments[0];
        const FlowSegment s1 = segments[1];
        NanFactors f = nan_decompose(s0.u);
        Vector xp = conjugate_horospherical(s0.t, s0.m, f.xplus, +1);
        Vector xm = s1.m.transpose() *
                    conjugate_horospherical(s1.t, idm, f.xminus, -1);
        FlowSegment merged;
        merged.t = s0.t + f.t + s1.t;
        merged.m = s0.m * f.m * s1.m;
        merged.u = exp_n(xm, -1, n) * s1.u * exp_n(xp, +1, n);
        segments.erase(segments.begin());
        segments[0] = merged;
    }

    FlowSegment s = segments[0];
    Scalar res = (s.u - id).cwiseAbs().maxCoeff();
    for (int it = 0; it < 60 && res > 1e-13; ++it) {
        NanFactors f = nan_decompose(s.u);
        Vector xp = conjugate_horospherical(0.5 * s.t, s.m, f.xplus, +1);
        Vector xm = conjugate_horospherical(0.5 * s.t, idm, f.xminus, -1);
        s.t += f.t;
        s.m = s.m * f.m;
        s.u = exp_n(xm, -1, n) * exp_n(xp, +1, n);
        Scalar next = (s.u - id).cwiseAbs().maxCoeff();
        if (next > 0.9 * res && next > 1e-13)
            throw Error("NoConvergence", "residual perturbation is not contracting");
        res = next;
    }
    if (res > 1e-13)
        throw Error("NoConvergence", "absorption did not reach the residual target");

    LoxodromicInvariants inv;
    inv.t = s.t;
    inv.m_class = project_so(s.m);
    inv.frame = id;
    return inv;
}

LoxodromicInvariants absorb_perturbation(Scalar t, const Matrix& m_so,
                                         const GroupElement& u) {
    const int n = int(u.rows()) - 1;
    return absorb_segments({{t, m_so, u}}, n);
}

LoxodromicInvariants close_eight_word(Scalar t1, const GroupElement& u1,
                                      const Matrix& m1, const GroupElement& v1,
                                      Scalar t2, const GroupElement& u2,
                                      const Matrix& m2, const GroupElement& v2) {
    const int n = int(u1.rows()) - 1;
    // a_t u m v = a_t m (m^-1 u m) v: each segment carries one perturbation.
    GroupElement m1e = m_embed(m1, n), m2e = m_embed(m2, n);
    FlowSegment s1{t1, m1, lorentz_inverse(m1e) * u1 * m1e * v1};
    FlowSegment s2{t2, m2, lorentz_inverse(m2e) * u2 * m2e * v2};
    return absorb_segments({s1, s2}, n);
}

}  // namespace pants
