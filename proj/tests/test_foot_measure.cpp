#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "goodpants/foot_measure.hpp"
#include "test_util.hpp"

using namespace pants;

TEST_CASE("diamond areas") {
    const Scalar R = 10.0, l0 = 20.0;

    SUBCASE("degenerate and small-width limits") {
        CHECK(diamond_area(R, 0.0, l0) == 0.0);
        Scalar eps = 1e-4;
        Scalar ratio = diamond_area(R, eps, l0) / (eps * eps);
        CHECK(ratio == doctest::Approx(128.0 * std::exp(4.0 * R - l0)).epsilon(1e-3));
        CHECK(hat_diamond_area(R, eps, l0) / (eps * eps) ==
              doctest::Approx(64.0 * std::exp(4.0 * R - l0)).epsilon(1e-3));
    }

    SUBCASE("Monte Carlo cross-check of the closed form") {
        Rng rng(4);
        Scalar eps = 0.3;
        // sample the window box in the rotated coordinates, weight e^{2y}
        long samples = 1000000;
        Scalar lc_x = l0 / 2.0;
        Scalar lc_y = 2.0 * R + 2.0 * std::log(2.0) - l0 / 2.0;
        Scalar acc = 0, acc2 = 0;
        for (long i = 0; i < samples; ++i) {
            Scalar u = rng.uniform(-2.0 * eps, 2.0 * eps);
            Scalar v = rng.uniform(-2.0 * eps, 2.0 * eps);
            Scalar y = 0.5 * (u + v) + lc_y;
            (void)lc_x;
            Scalar w = std::exp(2.0 * y);
            acc += w;
            acc2 += w * w;
        }
        // jacobian of (x,y) <-> (u,v) is 1/2; box area (4 eps)^2
        Scalar box = 16.0 * eps * eps * 0.5;
        Scalar mean = acc / samples;
        Scalar est = mean * box;
        Scalar sd = std::sqrt((acc2 / samples - mean * mean) / samples) * box;
        CHECK(std::abs(est - diamond_area(R, eps, l0)) < 3.0 * sd);
    }
}

TEST_CASE("ball intersection volumes") {
    SUBCASE("circle group against the exact arc formula") {
        // SO(2): arcs of length 2r about angles 0 and theta overlap in
        // 2r - theta
        for (Scalar theta : {0.1, 0.25, 0.4}) {
            Scalar r = 0.3;
            Matrix x(2, 2);
            x << std::cos(theta), -std::sin(theta), std::sin(theta),
                std::cos(theta);
            MCEstimate est = ball_intersection_volume(x, r, 200000, 11);
            Scalar exact = std::max(2.0 * r - theta, 0.0);
            CHECK(std::abs(est.value - exact) < 3.0 * est.stderr_ + 1e-12);
        }
    }

    SUBCASE("disjoint balls give zero") {
        Rng rng(5);
        Matrix x = matrix_exp(Matrix(0.8 * skew_from_coords(rng.unit_sphere(3), 3)));
        MCEstimate est = ball_intersection_volume(x, 0.2, 20000, 3);
        CHECK(est.value == 0.0);
    }

    SUBCASE("symmetry under inversion") {
        Rng rng(9);
        Matrix x = matrix_exp(Matrix(0.45 * skew_from_coords(rng.unit_sphere(3), 3)));
        MCEstimate a = ball_intersection_volume(x, 0.5, 400000, 7);
        MCEstimate b = ball_intersection_volume(Matrix(x.transpose()), 0.5, 400000, 8);
        CHECK(std::abs(a.value - b.value) <
              3.0 * std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_));
    }

    SUBCASE("exact-chart sampler agrees with plain Haar") {
        Rng rng(13);
        Matrix x = matrix_exp(Matrix(0.35 * skew_from_coords(rng.unit_sphere(3), 3)));
        Scalar r = 0.4;
        MCEstimate haar = ball_intersection_volume(x, r, 2000000, 21);
        MCEstimate fast = ball_intersection_volume_so3(x, r, 100000, 22);
        CHECK(std::abs(haar.value - fast.value) <
              3.0 * std::sqrt(haar.stderr_ * haar.stderr_ +
                              fast.stderr_ * fast.stderr_));
    }

    SUBCASE("overlap window scaling") {
        // ||X|| < 5r/3: estimate comparable to r^k, k = dim SO(3) = 3
        Rng rng(17);
        for (Scalar r : {0.3, 0.5}) {
            Matrix x = matrix_exp(
                Matrix(1.3 * r * skew_from_coords(rng.unit_sphere(3), 3)));
            MCEstimate est = ball_intersection_volume_so3(x, r, 100000, 31);
            Scalar rk = r * r * r;
            CHECK(est.value > rk / 40.0);
            CHECK(est.value < 40.0 * rk);
        }
    }

    SUBCASE("near-tangent upper bound") {
        Rng rng(23);
        const int k = 3;  // dim SO(3)
        for (Scalar r : {0.3, 0.4}) {
            Scalar kappa = 0.3 * r;
            Matrix x = matrix_exp(Matrix((2.0 * r - kappa) *
                                         skew_from_coords(rng.unit_sphere(3), 3)));
            MCEstimate est = ball_intersection_volume_so3(x, r, 200000, 37);
            Scalar bound = std::pow(2.0, k) * euclidean_ball_volume(k - 1) *
                           std::pow(kappa, 0.5 * (k + 1)) *
                           std::pow(r, 0.5 * (k - 1));
            CHECK(est.value - 3.0 * est.stderr_ <= bound);
        }
    }
}

TEST_CASE("midpoint extension") {
    const int n = 4;
    Rng rng(3);
    ModelClosedGeodesic g0{16.0, haar_so(n - 1, rng)};

    SUBCASE("transported coincidence reflects the basepoint only") {
        NormalFiberPoint x{5.0, rng.unit_sphere(n - 1)};
        NormalFiberPoint y{3.0, parallel_transport(g0, 5.0, 3.0, x.w)};
        NormalFiberPoint m = midpoint_extend(g0, x, y);
        CHECK(m.s == doctest::Approx(7.0));
        CHECK((m.w - parallel_transport(g0, 5.0, 7.0, x.w)).cwiseAbs().maxCoeff() <
              1e-12);
    }

    SUBCASE("midpoint property and involution") {
        for (int i = 0; i < 50; ++i) {
            NormalFiberPoint x{rng.uniform(0.0, 16.0), rng.unit_sphere(n - 1)};
            Scalar gap = rng.uniform(-3.5, 3.5);
            Vector w = parallel_transport(g0, x.s, x.s + gap, x.w);
            Vector tilt = rng.gaussian(n - 1);
            tilt -= tilt.dot(w) * w;
            w = std::cos(0.3) * w + std::sin(0.3) * tilt / tilt.norm();
            // the transported vector already lives at the canonical
            // representative; only the position needs wrapping
            Scalar ys = x.s + gap;
            ys -= 16.0 * std::floor(ys / 16.0);
            NormalFiberPoint y{ys, w};
            NormalFiberPoint m = midpoint_extend(g0, x, y);
            // basepoint reflected through x
            Scalar ds = m.s - x.s;
            ds -= 16.0 * std::round(ds / 16.0);
            CHECK(ds == doctest::Approx(-gap).epsilon(1e-9));
            // x is the spherical midpoint of y and m after transport along
            // the extension path
            Vector yx = transport_by(g0, y, -gap).w;
            Vector mx = transport_by(g0, m, -ds).w;
            Scalar left = sphere_distance(yx, x.w);
            Scalar right = sphere_distance(x.w, mx);
            CHECK(left == doctest::Approx(right).epsilon(1e-9));
            CHECK(sphere_distance(yx, mx) ==
                  doctest::Approx(left + right).epsilon(1e-8));
            NormalFiberPoint back = midpoint_extend(g0, x, m);
            CHECK(bundle_distance(g0, back, y) < 1e-6);
        }
    }

    SUBCASE("far basepoints are rejected") {
        NormalFiberPoint x{0.0, rng.unit_sphere(n - 1)};
        NormalFiberPoint y{8.0, rng.unit_sphere(n - 1)};
        CHECK_THROWS_WITH_AS(midpoint_extend(g0, x, y),
                             doctest::Contains("AntipodalOrFar"), Error);
    }
}

TEST_CASE("monodromy pair") {
    const int n = 4;
    Rng rng(7);

    SUBCASE("flat symmetric configuration") {
        ModelClosedGeodesic g0{16.0, Matrix::Identity(n - 1, n - 1)};
        Vector a = rng.unit_sphere(n - 1);
        MonodromyPairData mp = monodromy_pair(g0, a, Vector(-a));
        CHECK(mp.f < 1e-12);
        CHECK(so_distance_to_identity(mp.w) < 1e-12);
    }

    SUBCASE("frame independence of the distance") {
        ModelClosedGeodesic g0{16.0, haar_so(n - 1, rng)};
        Vector a = rng.unit_sphere(n - 1);
        Vector b = rng.unit_sphere(n - 1);
        MonodromyPairData base = monodromy_pair(g0, a, b);
        for (int trial = 0; trial < 20; ++trial) {
            // random completions with the required orientations
            Matrix ea = complete_orthonormal(a);
            Matrix fb = complete_orthonormal(b);
            fb.col(n - 2) = -fb.col(n - 2);
            Matrix qa = Matrix::Identity(n - 1, n - 1);
            qa.block(1, 1, n - 2, n - 2) = haar_so(n - 2, rng);
            Matrix qb = Matrix::Identity(n - 1, n - 1);
            qb.block(1, 1, n - 2, n - 2) = haar_so(n - 2, rng);
            Matrix ea2 = ea * qa, fb2 = fb * qb;
            MonodromyPairData g = monodromy_pair(g0, a, b, &ea2, &fb2);
            CHECK(g.f == doctest::Approx(base.f).epsilon(1e-9));
        }
    }

    SUBCASE("holonomy is recovered from the pair") {
        for (int trial = 0; trial < 30; ++trial) {
            ModelClosedGeodesic g0{16.0, haar_so(n - 1, rng)};
            Vector a = rng.unit_sphere(n - 1);
            Vector b = rng.unit_sphere(n - 1);
            MonodromyPairData mp = monodromy_pair(g0, a, b);
            Matrix pred = mp.x2.transpose() * phi_conj(mp.x1);
            CHECK(monodromy_angle_distance(pred, g0.holonomy) < 1e-8);
        }
    }
}

TEST_CASE("gauge orbit distance") {
    const int m = 3;
    Rng rng(19);
    for (int i = 0; i < 20; ++i) {
        Matrix a = haar_so(m, rng);
        CHECK(gauge_orbit_distance(a, a) < 1e-10);
        // same orbit: two-sided stabilizer factors
        Matrix qa = Matrix::Identity(m, m), qb = Matrix::Identity(m, m);
        qa.block(1, 1, m - 1, m - 1) = haar_so(m - 1, rng);
        qb.block(1, 1, m - 1, m - 1) = haar_so(m - 1, rng);
        CHECK(gauge_orbit_distance(Matrix(qa * a * qb), a) < 1e-8);
        // symmetry
        Matrix b = haar_so(m, rng);
        CHECK(gauge_orbit_distance(a, b) ==
              doctest::Approx(gauge_orbit_distance(b, a)).epsilon(1e-6));
    }
}

TEST_CASE("fiber density and the estimated measure") {
    const int n = 4;
    GoodRegionSpec spec;
    spec.R = 8.0;
    spec.eps = 0.1;
    spec.delta = 0.1;
    spec.g0 = {2.0 * spec.R, Matrix::Identity(n - 1, n - 1)};

    SUBCASE("bound-regime window is enforced") {
        GoodRegionSpec badspec = spec;
        badspec.delta = 0.5;
        NormalFiberPoint v{1.0, Vector::Unit(n - 1, 0)};
        CHECK_THROWS_AS(fiber_density(badspec, v, 1, 1000, 5), Error);
    }

    SUBCASE("flat holonomy density is homogeneous") {
        Rng rng(3);
        std::vector<Scalar> densities;
        for (int i = 0; i < 4; ++i) {
            NormalFiberPoint v{rng.uniform(0.0, spec.g0.length),
                               rng.unit_sphere(n - 1)};
            FiberDensity fd = fiber_density(spec, v, 1, 4000, 99);
            densities.push_back(fd.density);
            CHECK(fd.density > 0);
            CHECK(fd.density_lower < fd.density);
            CHECK(fd.density_upper > fd.density);
        }
        Scalar mx = *std::max_element(densities.begin(), densities.end());
        Scalar mn = *std::min_element(densities.begin(), densities.end());
        CHECK((mx - mn) / mx < 0.1);
    }

    SUBCASE("estimated measure: invariance and ratio stability") {
        Rng rng(5);
        GoodRegionSpec tw = spec;
        tw.g0.holonomy = matrix_exp(Matrix(0.05 * skew_from_coords(rng.gaussian(3), 3)));
        DensityGrid g1 = estimated_measure(tw, 2, 1, 3000, 17);
        CHECK(g1.ratio >= 1.0);
        CHECK(g1.ratio < 3.0);
        CHECK(g1.invariance_residual < 0.1);
        DensityGrid g2 = estimated_measure(tw, 2, 2, 3000, 17);
        CHECK(std::abs(g2.ratio - g1.ratio) / g1.ratio < 0.25);
    }
}

TEST_CASE("good region sampling and membership") {
    const int n = 4;
    GoodRegionSpec spec;
    spec.R = 8.0;
    spec.eps = 0.1;
    spec.delta = 0.1;
    spec.g0 = {2.0 * spec.R, Matrix::Identity(n - 1, n - 1)};

    Scalar rate = 0;
    std::vector<InvariantPoint> pts = sample_good_region(spec, 60, 77, &rate);
    CHECK(rate > 1e-6);

    SUBCASE("membership re-check and feet concentration") {
        for (const auto& pt : pts) {
            CHECK(region_membership_estimate(spec, pt, spec.delta));
            Scalar gap = fiber_distance_along(spec.g0, pt.u, pt.v, Arc::One);
            CHECK(gap < 1.5 * spec.eps + 2.0 * spec.delta);
        }
    }

    SUBCASE("length marginal follows the weighted window") {
        // CDF of the e^{2l}-weighted diamond marginal via quadrature
        Scalar lc = 2.0 * spec.R + 2.0 * std::log(2.0) - spec.g0.length / 2.0 +
                    spec.g0.length / 2.0;
        lc = 2.0 * spec.R + 2.0 * std::log(2.0) - 0.5 * spec.g0.length;
        std::vector<Scalar> ls;
        for (const auto& pt : pts) ls.push_back(pt.l);
        std::sort(ls.begin(), ls.end());
        auto density = [&](Scalar l) {
            Scalar width = 4.0 * spec.eps - 2.0 * std::abs(l - lc);
            return (width > 0) ? std::exp(2.0 * l) * width : 0.0;
        };
        Scalar norm = 0;
        const int grid = 4000;
        for (int i = 0; i < grid; ++i)
            norm += density(lc - 2 * spec.eps + 4.0 * spec.eps * (i + 0.5) / grid);
        Scalar ks = 0;
        for (size_t i = 0; i < ls.size(); ++i) {
            Scalar cum = 0;
            for (int k = 0; k < grid; ++k) {
                Scalar l = lc - 2 * spec.eps + 4.0 * spec.eps * (k + 0.5) / grid;
                if (l > ls[i]) break;
                cum += density(l);
            }
            ks = std::max(ks, std::abs(cum / norm - Scalar(i + 1) / ls.size()));
        }
        CHECK(ks < 0.2);
    }

    SUBCASE("region containments on the sampled corpus") {
        Scalar slack = std::exp(-spec.R);
        int checked = 0;
        for (size_t i = 0; i < std::min<size_t>(pts.size(), 20); ++i) {
            GoodRegionSpec inner = spec;
            inner.eps = spec.eps - slack;
            GoodRegionSpec outer = spec;
            outer.eps = spec.eps + slack;
            if (region_membership_estimate(inner, pts[i], spec.delta)) {
                CHECK(region_membership_actual(spec, pts[i]));
                ++checked;
            }
            if (region_membership_actual(spec, pts[i]))
                CHECK(region_membership_estimate(outer, pts[i],
                                                 spec.delta + 2.0 * slack));
        }
        CHECK(checked > 0);
    }

    SUBCASE("perturbed membership stays inside the enlarged region") {
        Rng rng(41);
        Scalar zeta = 0.01, c1 = 4.0;
        int moved = 0;
        for (size_t i = 0; i < std::min<size_t>(pts.size(), 30); ++i) {
            InvariantPoint q = pts[i];
            q.u.s += rng.uniform(-zeta, zeta);
            Vector tilt = rng.gaussian(n - 1);
            tilt -= tilt.dot(q.v.w) * q.v.w;
            tilt *= zeta / std::max(tilt.norm(), 1e-12);
            q.v.w = (q.v.w + tilt).normalized();
            q.l += rng.uniform(-zeta, zeta);
            if (region_membership_estimate(spec, q, spec.delta)) ++moved;
            GoodRegionSpec wide = spec;
            wide.eps = spec.eps + c1 * zeta;
            CHECK(region_membership_estimate(wide, q, spec.delta + c1 * zeta));
        }
        CHECK(moved >= 0);  // the un-enlarged region may or may not keep them
    }

    SUBCASE("counting inequality on self-consistent data") {
        DensityGrid grid = estimated_measure(spec, 2, 1, 2500, 23);
        // synthetic points drawn proportional to the grid measure
        Rng rng(31);
        std::vector<NormalFiberPoint> nu;
        const int cells_s = int(grid.s_centers.size());
        const int cells_f = int(grid.fiber.points.cols());
        Scalar total = 0;
        for (int i = 0; i < cells_s; ++i)
            for (int j = 0; j < cells_f; ++j) total += grid.values(i, j);
        for (int k = 0; k < 300; ++k) {
            Scalar pick = rng.uniform() * total;
            for (int i = 0; i < cells_s && pick >= 0; ++i)
                for (int j = 0; j < cells_f; ++j) {
                    pick -= grid.values(i, j);
                    if (pick < 0) {
                        nu.push_back({grid.s_centers[i], grid.fiber.points.col(j)});
                        break;
                    }
                }
        }
        std::vector<std::vector<int>> families;
        families.push_back({0, 1, 2, 3});  // a small cap-like union
        std::vector<int> band;
        for (int j = 0; j < cells_f; ++j) band.push_back(j);  // full fiber at s0
        families.push_back(band);
        CountingReport rep = counting_inequality_check(
            grid, spec.g0, nu, families, 0.05, spec.eps, 1.0);
        CHECK(rep.sets_checked == 2);
        CHECK(rep.feasible);
    }
}
