#include "goodpants/lorentz.hpp"

#include <cmath>

namespace pants {

Matrix lorentz_form(int n) {
    Matrix j = Matrix::Identity(n + 1, n + 1);
    j(0, 0) = -1.0;
    return j;
}

bool is_group_element(const GroupElement& g, Scalar tol) {
    const int n = int(g.rows()) - 1;
    if (g.cols() != n + 1) return false;
    Matrix j = lorentz_form(n);
    if ((g.transpose() * j * g - j).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(g.determinant() - 1.0) > tol * 10) return false;
    return g(0, 0) >= 1.0 - tol;
}

void check_group_element(const GroupElement& g, Scalar tol) {
    if (!is_group_element(g, tol))
        throw Error("NotLorentz", "matrix is not in SO+(n,1) within tolerance");
}

bool is_on_hyperboloid(const HPoint& p, Scalar tol) {
    return std::abs(mdot(p, p) + 1.0) < tol && p[0] > 0.0;
}

GroupElement lorentz_inverse(const GroupElement& g) {
    const int n = int(g.rows()) - 1;
    Matrix j = lorentz_form(n);
    return j * g.transpose() * j;
}

GroupElement reorthonormalize(const GroupElement& g) {
    const int n = int(g.rows()) - 1;
    GroupElement q(n + 1, n + 1);
    Vector c0 = g.col(0);
    c0 /= std::sqrt(-mdot(c0, c0));
    q.col(0) = c0;
    for (int i = 1; i <= n; ++i) {
        Vector c = g.col(i);
        c += mdot(c, q.col(0)) * q.col(0);  // timelike projection flips sign
        for (int k = 1; k < i; ++k) c -= mdot(c, q.col(k)) * q.col(k);
        q.col(i) = c / std::sqrt(mdot(c, c));
    }
    if (q.determinant() < 0) q.col(n) = -q.col(n);
    return q;
}

GroupElement position_frame(const HPoint& p, const Vector& dir) {
    const int n = int(p.size()) - 1;
    Matrix j = lorentz_form(n);
    // Euclidean complement of span(Jp, Jdir) is automatically J-orthogonal
    // to p and dir; it is a spacelike subspace, so its J-Gram matrix is
    // positive definite and a Cholesky factor orthonormalizes it. This stays
    // stable for axes far from the base point, where Gram-Schmidt against
    // the large columns cancels catastrophically.
    Matrix a(n + 1, 2);
    a.col(0) = j * p;
    a.col(1) = j * dir;
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix full = qr.householderQ();
    Matrix k = full.rightCols(n - 1);
    Matrix gram = k.transpose() * j * k;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw Error("Numeric", "frame completion failed");
    Matrix ortho = llt.matrixL().solve(k.transpose()).transpose();

    GroupElement q(n + 1, n + 1);
    q.col(0) = p;
    q.col(1) = dir;
    q.rightCols(n - 1) = ortho;
    if (q.determinant() < 0) q.col(n) = -q.col(n);
    return q;
}

GroupElement flow(Scalar t, int n) {
    GroupElement g = Matrix::Identity(n + 1, n + 1);
    g(0, 0) = std::cosh(t);
    g(0, 1) = std::sinh(t);
    g(1, 0) = std::sinh(t);
    g(1, 1) = std::cosh(t);
    return g;
}

GroupElement rot2(Scalar theta, int n) {
    GroupElement g = Matrix::Identity(n + 1, n + 1);
    g(1, 1) = std::cos(theta);
    g(1, 2) = std::sin(theta);
    g(2, 1) = -std::sin(theta);
    g(2, 2) = std::cos(theta);
    return g;
}

GroupElement rewrite(const Matrix& k) {
    const int n = int(k.rows());
    if ((k.transpose() * k - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8 ||
        k.determinant() < 0)
        throw Error("NotOrthogonal", "rewrite requires a special orthogonal matrix");
    GroupElement g = Matrix::Identity(n + 1, n + 1);
    g.block(1, 1, n, n) = k;
    return g;
}

GroupElement m_embed(const Matrix& q, int n) {
    GroupElement g = Matrix::Identity(n + 1, n + 1);
    g.block(2, 2, n - 1, n - 1) = q;
    return g;
}

Matrix m_block(const GroupElement& g) {
    const int n = int(g.rows()) - 1;
    return g.block(2, 2, n - 1, n - 1);
}

GroupElement exp_n(const Vector& x, int sign, int n) {
    // X = sum_j x_j (P_j -+ L_j); X^3 = 0 so the exponential closes.
    Matrix xm = Matrix::Zero(n + 1, n + 1);
    for (int j = 0; j < n - 1; ++j) {
        int r = j + 2;
        xm(0, r) = x[j];
        xm(r, 0) = x[j];
        Scalar l = (sign > 0) ? -x[j] : x[j];
        xm(1, r) = l;
        xm(r, 1) = -l;
    }
    return Matrix::Identity(n + 1, n + 1) + xm + 0.5 * xm * xm;
}

bool has_subgroup_form(const GroupElement& g, SubgroupTag tag, Scalar tol) {
    const int n = int(g.rows()) - 1;
    if (!is_group_element(g, std::max(tol, 1e-8))) return false;
    auto near = [&](const GroupElement& h) {
        return (g - h).cwiseAbs().maxCoeff() < tol;
    };
    switch (tag) {
        case SubgroupTag::K:
            return (g.col(0) - Vector::Unit(n + 1, 0)).cwiseAbs().maxCoeff() < tol;
        case SubgroupTag::M:
            return has_subgroup_form(g, SubgroupTag::K, tol) &&
                   (g.col(1) - Vector::Unit(n + 1, 1)).cwiseAbs().maxCoeff() < tol;
        case SubgroupTag::A:
            return near(flow(std::asinh(g(1, 0)), n));
        case SubgroupTag::Nplus:
        case SubgroupTag::Nminus: {
            Vector x(n - 1);
            for (int j = 0; j < n - 1; ++j) x[j] = g(j + 2, 0);
            return near(exp_n(x, tag == SubgroupTag::Nplus ? +1 : -1, n));
        }
        case SubgroupTag::B: {
            Scalar t = std::asinh(g(1, 0));
            Matrix q = m_block(g);
            return near(flow(t, n) * m_embed(q, n));
        }
    }
    return false;
}

AlgebraElement algebra_split(const Matrix& x) {
    const int n = int(x.rows()) - 1;
    AlgebraElement e;
    e.mat = x;
    e.a_part = x(0, 1);
    e.m_part = x.block(2, 2, n - 1, n - 1);
    e.nplus.resize(n - 1);
    e.nminus.resize(n - 1);
    for (int j = 0; j < n - 1; ++j) {
        e.nplus[j] = 0.5 * (x(0, j + 2) - x(1, j + 2));
        e.nminus[j] = 0.5 * (x(0, j + 2) + x(1, j + 2));
    }
    return e;
}

Matrix algebra_assemble(Scalar a_part, const Matrix& m_part, const Vector& nplus,
                        const Vector& nminus) {
    const int n = int(m_part.rows()) + 1;
    Matrix x = Matrix::Zero(n + 1, n + 1);
    x(0, 1) = a_part;
    x(1, 0) = a_part;
    x.block(2, 2, n - 1, n - 1) = m_part;
    for (int j = 0; j < n - 1; ++j) {
        int r = j + 2;
        Scalar v = nplus[j] + nminus[j];
        Scalar l = nminus[j] - nplus[j];
        x(0, r) = v;
        x(r, 0) = v;
        x(1, r) = l;
        x(r, 1) = -l;
    }
    return x;
}

Matrix algebra_theta(int n) {
    Matrix t = Matrix::Zero(n + 1, n + 1);
    t(1, 2) = -1.0;
    t(2, 1) = 1.0;
    return t;
}

Scalar killing_form(const Matrix& x, const Matrix& y, int n) {
    Scalar c = (n >= 3) ? Scalar(n - 2) : 1.0;
    return c * (x * y).trace();
}

Scalar inner_product(const Matrix& x, const Matrix& y, int n) {
    // theta(Y) = -Y^T, so -B(X, theta(Y)) = B(X, Y^T) and the normalized form
    // collapses to tr(X Y^T)/2 independent of the dimension constant.
    if (n == 2) {
        if (!policy().allow_n2_inner)
            throw Error("DimensionTooSmall",
                        "inner product needs n >= 3 (set allow_n2_inner for the "
                        "unnormalized fallback)");
        return killing_form(x, y.transpose(), n);
    }
    return 0.5 * (x * y.transpose()).trace();
}

Scalar inner_product(const AlgebraElement& x, const AlgebraElement& y) {
    return inner_product(x.mat, y.mat, x.dim());
}

Scalar algebra_norm(const Matrix& x, int n) {
    return std::sqrt(inner_product(x, x, n));
}

Scalar group_distance(const GroupElement& g, const GroupElement& h) {
    const int n = int(g.rows()) - 1;
    auto lg = principal_log(lorentz_inverse(g) * h);
    if (!lg) throw Error("LogDivergence", "g^-1 h has no principal logarithm");
    return algebra_norm(*lg, n);
}

Scalar sphere_distance(const Vector& v, const Vector& w) {
    Scalar c = v.dot(w) / (v.norm() * w.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

NanFactors nan_decompose(const GroupElement& u, const Vector* seed) {
    const int n = int(u.rows()) - 1;
    Scalar d;
    try {
        d = group_distance(u, Matrix::Identity(n + 1, n + 1));
    } catch (const Error&) {
        throw Error("NotNearIdentity", "input has no principal logarithm");
    }
    if (d >= policy().near_identity)
        throw Error("NotNearIdentity",
                    "d(u,e) = " + std::to_string(d) + " exceeds the chart radius");

    const int mdim = (n - 1) * (n - 2) / 2;
    const int np = 2 * (n - 1) + 1 + mdim;
    Vector p = Vector::Zero(np);
    if (seed) p = *seed;

    auto assemble = [&](const Vector& par) -> Matrix {
        Vector xp = par.segment(0, n - 1);
        Scalar t = par[n - 1];
        Vector q = par.segment(n, mdim);
        Vector xm = par.segment(n + mdim, n - 1);
        Matrix m = (mdim > 0) ? matrix_exp(skew_from_coords(q, n - 1))
                              : Matrix::Identity(n - 1, n - 1);
        return exp_n(xp, +1, n) * flow(t, n) * m_embed(m, n) * exp_n(xm, -1, n);
    };
    auto residual = [&](const Vector& par) {
        Matrix r = assemble(par) - u;
        return Vector(Eigen::Map<Vector>(r.data(), r.size()));
    };

    Vector r = residual(p);
    const Scalar h = 1e-7;
    for (int it = 0; it < 50 && r.cwiseAbs().maxCoeff() > 1e-14; ++it) {
        Matrix jac(r.size(), np);
        for (int k = 0; k < np; ++k) {
            Vector pk = p;
            pk[k] += h;
            jac.col(k) = (residual(pk) - r) / h;
        }
        Vector step = jac.colPivHouseholderQr().solve(-r);
        p += step;
        r = residual(p);
        if (step.cwiseAbs().maxCoeff() > 10.0)
            throw Error("NoConvergence", "NAN chart iteration diverged");
    }
    if (r.cwiseAbs().maxCoeff() > 1e-9)
        throw Error("NoConvergence", "NAN chart iteration stalled");

    NanFactors f;
    f.xplus = p.segment(0, n - 1);
    f.t = p[n - 1];
    f.m = (mdim > 0) ? matrix_exp(skew_from_coords(p.segment(n, mdim), n - 1))
                     : Matrix::Identity(n - 1, n - 1);
    f.xminus = p.segment(n + mdim, n - 1);
    f.nplus = exp_n(f.xplus, +1, n);
    f.nminus = exp_n(f.xminus, -1, n);
    f.b = flow(f.t, n) * m_embed(f.m, n);
    return f;
}

Vector conjugate_horospherical(Scalar t, const Matrix& m_so, const Vector& x,
                               int sign) {
    // (a_t m) exp(X+) (a_t m)^{-1} = exp(e^{-t} Ad_m X+), and the mirrored
    // relation exp(X-) (a_t m) = (a_t m) exp(e^{-t} Ad_{m^{-1}} X-).
    if (sign > 0) return std::exp(-t) * (m_so * x);
    return std::exp(-t) * (m_so.transpose() * x);
}

Vector unit_tangent_toward(const HPoint& p, const HPoint& q) {
    Vector u = q + mdot(q, p) * p;
    Scalar n2 = mdot(u, u);
    if (n2 < 1e-28) throw Error("Degenerate", "coincident points");
    return u / std::sqrt(n2);
}

Vector transport_along(const HPoint& p, const HPoint& q, const Vector& v) {
    Scalar c = -mdot(p, q);
    if (c < 1.0 + 1e-14) return v;
    Scalar dist = std::acosh(c);
    Vector u = q - c * p;  // component of q tangent at p
    u /= std::sqrt(mdot(u, u));
    GroupElement h = position_frame(p, u);
    return h * flow(dist, int(p.size()) - 1) * lorentz_inverse(h) * v;
}

}  // namespace pants
