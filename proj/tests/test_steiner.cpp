#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "goodpants/classifier.hpp"
#include "test_util.hpp"

using namespace pants;

TEST_CASE("steiner graph of synthetic pants") {
    const int n = 4;
    const Scalar R = 6.0;
    PantsPresentation p = build_perfect_pants(n, R);

    SUBCASE("symmetric minimizer with 2pi/3 angles") {
        SteinerGraph sg = steiner_minimize(p);
        CHECK_FALSE(sg.degenerate);
        CHECK(sg.gradient_norm < 1e-8);
        CHECK(sg.hessian_min_eigen > 0);
        CHECK(sg.seed_spread < 1e-6);
        // the builder's symmetry axis passes through the base point
        CHECK(hdistance(sg.x, base_point(n)) < 1e-6);
        for (int i = 0; i < 3; ++i) {
            CHECK(sg.angles_x[i] == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-6));
            CHECK(sg.angles_y[i] == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-6));
        }
        // connection length of the synthetic pants: cosh(l) = (4 cosh R + 1)/3
        Scalar l = std::acosh((4.0 * std::cosh(R) + 1.0) / 3.0);
        for (int i = 0; i < 3; ++i)
            CHECK(sg.lengths[i] == doctest::Approx(l).epsilon(1e-8));
    }

    SUBCASE("equivariance under conjugation") {
        Rng rng(3);
        GroupElement h = testutil::random_near_identity(rng, n, 0.8) *
                         flow(0.7, n) * rot2(0.4, n);
        PantsPresentation q = p;
        for (int i = 0; i < 3; ++i)
            q.connections[i] = h * p.connections[i] * lorentz_inverse(h);
        SteinerGraph sp = steiner_minimize(p);
        SteinerGraph sq = steiner_minimize(q);
        CHECK(hdistance(sq.x, h * sp.x) < 1e-8);
        CHECK(hdistance(sq.y, h * sp.y) < 1e-8);
        CHECK(sq.total == doctest::Approx(sp.total).epsilon(1e-10));
    }

    SUBCASE("forced zero-length connection is reported degenerate") {
        // with one connection the identity and the others opposite
        // translations, the minimum pins x = y and one edge collapses
        PantsPresentation d;
        d.n = n;
        d.connections = {Matrix::Identity(n + 1, n + 1), flow(12.0, n),
                         flow(-12.0, n)};
        SteinerGraph sg = steiner_minimize(d);
        CHECK(sg.degenerate);
        CHECK_THROWS_AS(tripods_from_steiner(d, sg), Error);
    }

    SUBCASE("non-loxodromic cuffs are rejected") {
        PantsPresentation bad;
        bad.n = n;
        bad.connections = {rot2(0.3, n), rot2(0.9, n), rot2(1.7, n)};
        CHECK_THROWS_AS(steiner_minimize(bad), Error);
    }
}

TEST_CASE("convexity probe") {
    const int n = 4;
    PantsPresentation p = build_perfect_pants(n, 6.0);

    ConvexityReport rep = convexity_probe(p, 200, 99);
    CHECK(rep.strict == rep.trials);
    CHECK(rep.min_margin > 0);
    CHECK(rep.fit_exponent > 1.8);
    CHECK(rep.fit_exponent < 2.2);
}

TEST_CASE("tripods and frames") {
    const int n = 5;
    PantsPresentation p = build_perfect_pants(n, 6.0);
    SteinerGraph sg = steiner_minimize(p);
    Tripods t = tripods_from_steiner(p, sg);

    SUBCASE("legs, perps and angle conventions") {
        for (int i = 0; i < 3; ++i) {
            // unit legs, pairwise 2pi/3
            CHECK(mdot(t.legs_x.col(i), t.legs_x.col(i)) ==
                  doctest::Approx(1.0).epsilon(1e-10));
            Scalar ang = std::acos(std::clamp(
                mdot(t.legs_x.col(i), t.legs_x.col((i + 1) % 3)), -1.0, 1.0));
            CHECK(ang == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-6));
            // perp at pi/6 from the next leg
            Scalar perp_ang = std::acos(std::clamp(
                mdot(t.perp_x.col(i), t.legs_x.col((i + 1) % 3)), -1.0, 1.0));
            CHECK(perp_ang == doctest::Approx(kPi / 6.0).epsilon(1e-6));
        }
    }

    SUBCASE("tripod plane of the planar pants") {
        // legs lie in the coordinate plane spanned by e1, e2
        for (int i = 0; i < 3; ++i)
            for (int k = 3; k <= n; ++k)
                CHECK(std::abs(t.legs_x.col(i)[k]) < 1e-6);
    }

    SUBCASE("complement frames are orthonormal and orthogonal to the tripod") {
        for (int c = 0; c < n - 2; ++c) {
            CHECK(mdot(t.frame_x.col(c), t.frame_x.col(c)) ==
                  doctest::Approx(1.0).epsilon(1e-10));
            CHECK(std::abs(mdot(t.frame_x.col(c), t.legs_x.col(0))) < 1e-10);
            CHECK(std::abs(mdot(t.frame_x.col(c), t.perp_x.col(0))) < 1e-10);
            CHECK(std::abs(mdot(t.frame_x.col(c), sg.x)) < 1e-10);
            for (int d = c + 1; d < n - 2; ++d)
                CHECK(std::abs(mdot(t.frame_x.col(c), t.frame_x.col(d))) < 1e-10);
        }
    }

    SUBCASE("degenerate graphs are refused") {
        SteinerGraph broken = sg;
        broken.degenerate = true;
        CHECK_THROWS_AS(tripods_from_steiner(p, broken), Error);
    }
}
