#pragma once

// The space of invariants for third connections, good regions, ball
// intersection volumes in SO(n-1), the estimated average foot measure and
// its quasi-uniformity data.

#include "goodpants/classifier.hpp"

namespace pants {

// Gauge class of a framed third connection: feet, length, and the framed
// monodromy modulo the SO(n-2) x SO(n-2) frame rewrites at the two feet.
struct InvariantPoint {
    NormalFiberPoint u, v;
    Scalar l = 0;
    Matrix lambda_eta;  // SO(n-1) representative
};

// Orbit distance under the two-sided stabilizer gauge, by alternating
// Procrustes alignment over the two SO(n-2) factors.
Scalar gauge_orbit_distance(const Matrix& a, const Matrix& b);

struct GoodRegionSpec {
    Scalar R = 8, eps = 0.05, delta = 0.05;
    ModelClosedGeodesic g0;
};

// Closed forms for the e^{2y} dx dy areas of the two length windows.
Scalar diamond_area(Scalar R, Scalar eps, Scalar l0);
Scalar hat_diamond_area(Scalar R, Scalar delta, Scalar l0);

struct MCEstimate {
    Scalar value = 0;
    Scalar stderr_ = 0;
};

// Haar Monte Carlo estimate of Vol(B_r(e) cap B_r(X)) in SO(m) with the
// bi-invariant metric <A,B> = tr(A B^T)/2; deterministic per seed.
MCEstimate ball_intersection_volume(const Matrix& x, Scalar r, int samples,
                                    std::uint64_t seed);

// Exact-chart variant for SO(3): samples uniformly in the r-ball about the
// identity, so every sample is effective. Cross-checked against the Haar
// estimator in the tests.
MCEstimate ball_intersection_volume_so3(const Matrix& x, Scalar r, int samples,
                                        std::uint64_t seed);

// m_x(y): reflects y through x in both the arc and the fiber sense.
NormalFiberPoint midpoint_extend(const ModelClosedGeodesic& g0,
                                 const NormalFiberPoint& x,
                                 const NormalFiberPoint& y);

struct MonodromyPairData {
    Matrix x1, x2;  // frame rewrites
    Matrix w;       // X1^-1 X2, class defined up to conjugacy
    Scalar f = 0;   // d(X1, X2), frame independent
};

// Same-fiber frame rewrites: (-a,E) X1 = (b,F), Lambda (a,E) X2 = (-b,F).
// Default completions are deterministic; explicit ones exercise the frame
// gauge (E and F must complete a and b with opposite total orientations).
MonodromyPairData monodromy_pair(const ModelClosedGeodesic& g0, const Vector& a,
                                 const Vector& b,
                                 const Matrix* frame_a = nullptr,
                                 const Matrix* frame_b = nullptr);

// Quadrature mesh on the unit sphere S^{m-1} with weights summing to the
// sphere area: subdivided icosahedron for S^2, uniform angles for S^1,
// seeded uniform points otherwise.
struct SphereMesh {
    Matrix points;   // m x N columns
    Vector weights;  // sums to |S^{m-1}|
};
SphereMesh sphere_mesh(int m, int resolution, std::uint64_t seed = 12345);

// Fiberwise volume of good framed monodromies
//   Vol(S-hat^v_delta) = integral over the fiber sphere of
//   V(W_v(y, m_v(y)), delta),
// evaluated by mesh quadrature with one shared in-ball sample pool, plus the
// length-window factor giving the density of the estimated measure at v.
struct FiberDensity {
    Scalar shat_volume = 0;       // Vol(S-hat^v_delta)
    Scalar shat_stderr = 0;
    Scalar density = 0;           // shat_volume x hat window area
    Scalar density_lower = 0;     // containment slack e^{-R} inward
    Scalar density_upper = 0;     // and outward
};
FiberDensity fiber_density(const GoodRegionSpec& spec, const NormalFiberPoint& v,
                           int mesh_resolution, int samples, std::uint64_t seed);

struct DensityGrid {
    std::vector<Scalar> s_centers;
    SphereMesh fiber;
    Matrix values;         // s-bins x fiber points
    Scalar max_density = 0, min_density = 0;
    Scalar ratio = 0;              // quasi-uniformity constant estimate
    Scalar invariance_residual = 0;  // translation + antipodal residual
};
DensityGrid estimated_measure(const GoodRegionSpec& spec, int s_bins,
                              int mesh_resolution, int samples,
                              std::uint64_t seed);

// Membership predicates for the good regions. The estimate form uses the
// closed-up broken-geodesic length predictions and the delta-ball conditions
// on the framed monodromy; the actual form realizes the group words and
// checks the cuff invariants themselves.
bool region_membership_estimate(const GoodRegionSpec& spec,
                                const InvariantPoint& pt, Scalar delta);
bool region_membership_actual(const GoodRegionSpec& spec,
                              const InvariantPoint& pt);

// Rejection sampler from the product reference measure restricted to the
// good region (estimate form). Throws AcceptanceTooLow below 1e-6.
std::vector<InvariantPoint> sample_good_region(const GoodRegionSpec& spec,
                                               int count, std::uint64_t seed,
                                               Scalar* acceptance_rate = nullptr);

// Two-sided counting comparison between a density grid and a point measure
// over a family of test sets (index sets of grid cells): reports the
// feasible constant interval for
//   (1 - L z/eps) mu(N_{-z}(B)) <= C nu(B) <= (1 + L z/eps) mu(N_z(B)).
struct CountingReport {
    Scalar c_min = 0, c_max = 0;
    bool feasible = false;
    int sets_checked = 0;
};
CountingReport counting_inequality_check(
    const DensityGrid& grid, const ModelClosedGeodesic& g0,
    const std::vector<NormalFiberPoint>& points,
    const std::vector<std::vector<int>>& cell_sets, Scalar zeta, Scalar eps,
    Scalar big_l);

}  // namespace pants
