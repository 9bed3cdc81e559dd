#include "goodpants/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace pants {

Matrix matrix_exp(const Matrix& a) {
    const int n = int(a.rows());
    Scalar norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    Matrix b = a;
    while (norm > 0.25) {
        b *= 0.5;
        norm *= 0.5;
        ++squarings;
    }
    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= 20; ++k) {
        term = term * b / Scalar(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

namespace {

// Denman-Beavers iteration for the principal square root.
Matrix sqrtm_db(const Matrix& a) {
    const int n = int(a.rows());
    Matrix y = a;
    Matrix z = Matrix::Identity(n, n);
    for (int it = 0; it < 60; ++it) {
        Matrix yn = 0.5 * (y + z.inverse());
        Matrix zn = 0.5 * (z + y.inverse());
        Scalar delta = (yn - y).cwiseAbs().maxCoeff();
        y = yn;
        z = zn;
        if (delta < 1e-15) break;
    }
    return y;
}

}  // namespace

std::optional<Matrix> principal_log(const Matrix& a) {
    const int n = int(a.rows());
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) return std::nullopt;
    for (int i = 0; i < n; ++i) {
        auto lam = es.eigenvalues()[i];
        if (lam.real() <= 0.0 && std::abs(lam.imag()) < 1e-12) return std::nullopt;
        // A conjugate pair hugging the negative real axis has no usable
        // principal branch either; reject within a narrow wedge.
        if (lam.real() < 0.0 && std::abs(lam.imag()) < 1e-9 * std::abs(lam.real()))
            return std::nullopt;
    }
    Matrix b = a;
    int roots = 0;
    while ((b - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 0.25 && roots < 40) {
        b = sqrtm_db(b);
        ++roots;
    }
    Matrix e = b - Matrix::Identity(n, n);
    Matrix term = e;
    Matrix result = e;
    for (int k = 2; k <= 40; ++k) {
        term = term * e;
        result += term * (k % 2 == 0 ? -1.0 : 1.0) / Scalar(k);
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    return result * std::pow(2.0, roots);
}

std::vector<Scalar> rotation_angles(const Matrix& q) {
    Eigen::EigenSolver<Matrix> es(q, /*computeEigenvectors=*/false);
    std::vector<Scalar> angles;
    for (int i = 0; i < q.rows(); ++i) {
        auto lam = es.eigenvalues()[i];
        Scalar theta = std::atan2(lam.imag(), lam.real());
        if (theta > 1e-14) angles.push_back(theta);  // one angle per pair
        if (std::abs(lam.imag()) < 1e-14 && lam.real() < 0.0)
            angles.push_back(kPi);  // eigenvalue -1; pairs give pi twice
    }
    // -1 eigenvalues come in pairs for SO(m); the loop above pushed each one.
    std::vector<Scalar> out;
    int minus_ones = 0;
    for (Scalar t : angles) {
        if (t == kPi)
            ++minus_ones;
        else
            out.push_back(t);
    }
    for (int i = 0; i < minus_ones / 2; ++i) out.push_back(kPi);
    std::sort(out.begin(), out.end(), std::greater<Scalar>());
    return out;
}

Scalar so_distance_to_identity(const Matrix& q) {
    const int m = int(q.rows());
    if (m == 2) {
        return std::abs(std::atan2(q(1, 0), q(0, 0)));
    }
    if (m == 3) {
        Scalar c = std::clamp((q.trace() - 1.0) / 2.0, -1.0, 1.0);
        // acos resolves poorly near +-1; the skew part carries sin(theta).
        Scalar s = std::clamp((q - q.transpose()).norm() / (2.0 * std::sqrt(2.0)),
                              0.0, 1.0);
        if (c > 0.9) return std::asin(s);
        if (c < -0.9) return kPi - std::asin(s);
        return std::acos(c);
    }
    Scalar s = 0.0;
    for (Scalar t : rotation_angles(q)) s += t * t;
    return std::sqrt(s);
}

Matrix haar_so(int m, Rng& rng) {
    while (true) {
        Matrix g(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) g(i, j) = rng.normal();
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ();
        Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < m; ++i)
            if (r(i, i) < 0) q.col(i) = -q.col(i);
        if (q.determinant() > 0) return q;
    }
}

Matrix complete_orthonormal(const Vector& first, bool make_positive) {
    const int m = int(first.size());
    Matrix q(m, m);
    q.col(0) = first / first.norm();
    int out = 1;
    for (int j = 0; j < m && out < m; ++j) {
        Vector c = Vector::Unit(m, j);
        c -= q.leftCols(out) * (q.leftCols(out).transpose() * c);
        Scalar n = c.norm();
        if (n > 1e-6) q.col(out++) = c / n;
    }
    if (out < m) throw Error("Numeric", "orthonormal completion failed");
    if (make_positive && q.determinant() < 0) q.col(m - 1) = -q.col(m - 1);
    return q;
}

Matrix so3_ball_uniform(Scalar r, Rng& rng) {
    // Radial density proportional to the geodesic sphere area sin^2(t/2).
    Scalar total = r - std::sin(r);
    Scalar u = rng.uniform() * total;
    Scalar lo = 0.0, hi = r;
    for (int it = 0; it < 60; ++it) {
        Scalar mid = 0.5 * (lo + hi);
        if (mid - std::sin(mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    Scalar theta = 0.5 * (lo + hi);
    Vector axis = rng.unit_sphere(3);
    Matrix k(3, 3);
    k << 0, -axis[2], axis[1], axis[2], 0, -axis[0], -axis[1], axis[0], 0;
    return Matrix::Identity(3, 3) + std::sin(theta) * k +
           (1.0 - std::cos(theta)) * k * k;
}

Scalar sphere_volume(int m) {  // |S^m|, unit radius
    // 2 pi^{(m+1)/2} / Gamma((m+1)/2)
    return 2.0 * std::pow(kPi, (m + 1) / 2.0) / std::tgamma((m + 1) / 2.0);
}

Scalar so_volume(int m) {
    Scalar v = 1.0;
    for (int j = 2; j <= m; ++j) v *= sphere_volume(j - 1);
    return v;
}

Scalar euclidean_ball_volume(int m) {
    return std::pow(kPi, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
}

std::vector<Matrix> skew_basis(int m) {
    std::vector<Matrix> basis;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            Matrix s = Matrix::Zero(m, m);
            s(i, j) = 1;
            s(j, i) = -1;
            basis.push_back(s);
        }
    return basis;
}

Matrix project_so(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix u = svd.matrixU(), v = svd.matrixV();
    Matrix q = u * v.transpose();
    if (q.determinant() < 0) {
        Matrix d = Matrix::Identity(a.rows(), a.cols());
        d(a.rows() - 1, a.cols() - 1) = -1;
        q = u * d * v.transpose();
    }
    return q;
}

Scalar fit_slope(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
    const int n = int(x.size());
    Scalar mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    Scalar num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

}  // namespace pants
