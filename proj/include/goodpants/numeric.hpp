#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pants {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr Scalar kPi = 3.14159265358979323846;

// Thrown by every operation whose contract names a failure mode. `code` is a
// stable machine-readable tag ("NotNearIdentity", "LogDivergence", ...).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// One knob object for all tolerances; defaults match the test suites.
struct NumericPolicy {
    Scalar structural = 1e-9;      // invariant drift (J-orthogonality, det)
    Scalar round_trip = 1e-10;     // reconstruction residuals
    Scalar near_identity = 0.1;    // epsilon_0 for the NAN chart
    Scalar absorb_flow_min = 8.0;  // minimum flow length for absorption
    Scalar absorb_eps = 0.05;      // perturbation bound for absorption
    bool allow_n2_inner = false;   // unnormalized inner product in dimension 2
};

inline NumericPolicy& policy() {
    static NumericPolicy p;
    return p;
}

// ---------------------------------------------------------------------------
// Deterministic RNG. splitmix64 core; streams derived from (seed, stream id)
// so worker decomposition never changes the values drawn.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
        next();
    }

    Rng derive(std::uint64_t stream) const {
        Rng r(state_ ^ (0xbf58476d1ce4e5b9ull * (stream + 1)));
        return r;
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    Scalar uniform() { return Scalar(next() >> 11) * 0x1.0p-53; }

    Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

    // Marsaglia polar method; no library distribution so results are stable.
    Scalar normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        Scalar u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        Scalar f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    Vector gaussian(int dim) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = normal();
        return v;
    }

    Vector unit_sphere(int dim) {
        Vector v = gaussian(dim);
        Scalar n = v.norm();
        while (n < 1e-12) {
            v = gaussian(dim);
            n = v.norm();
        }
        return v / n;
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    Scalar spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Dense matrix transcendentals. Sizes here are tiny ((n+1) <= 9), so plain
// scaling-and-squaring with a Taylor tail is both fast and accurate.

Matrix matrix_exp(const Matrix& a);

// Principal logarithm. Rejects inputs with an eigenvalue on the closed
// negative real axis (no principal branch) by returning nullopt. Square
// roots via Denman-Beavers; series once within radius.
std::optional<Matrix> principal_log(const Matrix& a);

// Sorted rotation angles of a (special) orthogonal matrix: each complex
// conjugate eigenvalue pair e^{+-i theta} contributes one theta in [0, pi],
// descending order. Real eigenvalues contribute 0 (for +1) or pi (for -1).
std::vector<Scalar> rotation_angles(const Matrix& q);

// Geodesic distance to the identity in SO(m) for the bi-invariant metric
// <X,Y> = tr(X Y^T)/2, i.e. sqrt(sum of squared rotation angles).
Scalar so_distance_to_identity(const Matrix& q);

inline Scalar so_distance(const Matrix& a, const Matrix& b) {
    return so_distance_to_identity(a.transpose() * b);
}

// Haar-uniform element of SO(m): QR of a Gaussian matrix with the sign
// correction, rejecting the det = -1 sheet.
Matrix haar_so(int m, Rng& rng);

// Orthonormal completion: columns = [first | completion], det +1 when
// make_positive is set. `first` must be a unit vector.
Matrix complete_orthonormal(const Vector& first, bool make_positive = true);

// Uniform point in the radius-r geodesic ball of SO(3) about the identity
// (exact chart sampling; used as a variance-reduced sampler for SO(3)).
Matrix so3_ball_uniform(Scalar r, Rng& rng);

// Riemannian volume of SO(m) under <X,Y> = tr(X Y^T)/2:
// product of unit-sphere volumes |S^1| |S^2| ... |S^{m-1}|.
Scalar so_volume(int m);

// Volume of the geodesic r-ball in SO(3) under the same metric.
inline Scalar so3_ball_volume(Scalar r) { return 8.0 * kPi * (r - std::sin(r)); }

// Euclidean unit-ball volume in R^m.
Scalar euclidean_ball_volume(int m);

// Basis of so(m) (skew-symmetric m x m), lexicographic in (i, j), i < j.
std::vector<Matrix> skew_basis(int m);

inline Matrix skew_from_coords(const Vector& c, int m) {
    Matrix s = Matrix::Zero(m, m);
    int idx = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            s(i, j) = c[idx];
            s(j, i) = -c[idx];
            ++idx;
        }
    return s;
}

inline Vector skew_to_coords(const Matrix& s) {
    int m = int(s.rows());
    Vector c(m * (m - 1) / 2);
    int idx = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) c[idx++] = s(i, j);
    return c;
}

// Least-squares polar projection onto SO(m) (nearest special orthogonal).
Matrix project_so(const Matrix& a);

// Linear regression slope of y against x.
Scalar fit_slope(const std::vector<Scalar>& x, const std::vector<Scalar>& y);

}  // namespace pants
