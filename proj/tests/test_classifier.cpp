#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "goodpants/classifier.hpp"
#include "test_util.hpp"

using namespace pants;

TEST_CASE("synthetic pants constructions") {
    const int n = 4;
    const Scalar R = 6.0;

    SUBCASE("perfect pants: exact cuffs and goodness") {
        PantsPresentation p = build_perfect_pants(n, R);
        CuffInvariants ci = cuff_invariants(p, R, 0.05);
        for (int i = 0; i < 3; ++i) {
            CHECK(ci.lengths[i] == doctest::Approx(2.0 * R).epsilon(1e-9));
            CHECK(so_distance_to_identity(ci.monodromies[i]) < 1e-9);
        }
        CHECK(ci.all_good);
        Classification c = classify(p, R, 0.05);
        CHECK(c.verdict == Verdict::Good);
        CHECK(c.certificate < 1e-8);
    }

    SUBCASE("bad pants: cuff-good but badly connected") {
        PantsPresentation p = build_bad_pants(n, R);
        CuffInvariants ci = cuff_invariants(p, R, 0.05);
        CHECK(ci.all_good);  // bad pants still have good cuffs
        Classification c = classify(p, R, 0.05);
        CHECK(c.verdict == Verdict::Bad);
        CHECK(c.certificate < 1e-8);
        CHECK_THROWS_AS(build_bad_pants(2, R), Error);
    }

    SUBCASE("short orthogeodesics match the hexagon seam") {
        PantsPresentation p = build_perfect_pants(n, R);
        auto i0 = axis_invariants(p.cuff(0));
        auto i1 = axis_invariants(p.cuff(1));
        OrthoConnection oc = orthogeodesic(geodesic_of_frame(i0.frame),
                                           geodesic_of_frame(i1.frame));
        Scalar seam = std::acosh(std::cosh(R) / (std::cosh(R) - 1.0));
        CHECK(oc.length == doctest::Approx(seam).epsilon(1e-8));
    }

    SUBCASE("perturbation sweep") {
        PantsPresentation base = build_perfect_pants(n, R);
        CHECK((perturb_pants(base, 0.0, 5).connections[1] - base.connections[1])
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
        // cuff data moves linearly with the scale
        for (Scalar scale : {1e-4, 1e-3, 1e-2}) {
            PantsPresentation p = perturb_pants(base, scale, 5);
            CuffInvariants ci = cuff_invariants(p, R, 0.05);
            for (int i = 0; i < 3; ++i)
                CHECK(std::abs(ci.lengths[i] - 2.0 * R) < 8.0 * scale);
        }
    }
}

TEST_CASE("involution alignment") {
    const int m = 3;  // SO(n-1) for n = 4
    Rng rng(7);

    SUBCASE("fixed cases") {
        auto al_e = align_to_involution(Matrix::Identity(m, m));
        CHECK(al_e.dist == doctest::Approx(0.0));
        CHECK((al_e.u - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() == 0.0);

        // an element of the stabilizer aligns exactly to e
        Matrix q = Matrix::Identity(m, m);
        Scalar th = 0.8;
        q(1, 1) = std::cos(th);
        q(1, 2) = -std::sin(th);
        q(2, 1) = std::sin(th);
        q(2, 2) = std::cos(th);
        auto al_q = align_to_involution(q);
        CHECK(al_q.dist < 1e-12);
        CHECK((q * al_q.q - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("alignment inequality on random input") {
        for (int i = 0; i < 1000; ++i) {
            Matrix a = haar_so(m, rng);
            auto al = align_to_involution(a);
            // q lies in the stabilizer of e1
            CHECK((al.q.col(0) - Vector::Unit(m, 0)).cwiseAbs().maxCoeff() < 1e-10);
            Scalar bound = 0.5 * so_distance(a, phi_conj(a));
            CHECK(al.dist <= bound + 1e-9);
            CHECK(so_distance(a * al.q, al.u) == doctest::Approx(al.dist).epsilon(1e-8));
        }
    }

    SUBCASE("phi is an involution and fixes the stabilizer") {
        for (int i = 0; i < 50; ++i) {
            Matrix a = haar_so(m, rng);
            CHECK((phi_conj(phi_conj(a)) - a).cwiseAbs().maxCoeff() < 1e-14);
        }
        // stabilizer elements commute with the frame flow and the 2-plane
        // rotations once embedded
        const int n = 4;
        Matrix qs = Matrix::Identity(m, m);
        qs(1, 1) = 0.0;
        qs(1, 2) = -1.0;
        qs(2, 1) = 1.0;
        qs(2, 2) = 0.0;
        GroupElement qe = m_embed(qs, n);
        // the stabilizer embeds with its first fiber slot on the in-plane normal,
        // so it commutes with flow and the 2-plane rotation
        CHECK((qe * flow(1.3, n) - flow(1.3, n) * qe).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((qe * rot2(0.7, n) - rot2(0.7, n) * qe).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("good bad dichotomy") {
    const int n = 4;
    const Scalar R = 8.0, eps = 0.05;

    SUBCASE("perturbed corpus classifies cleanly") {
        for (int i = 0; i < 25; ++i) {
            PantsPresentation pg =
                perturb_pants(build_perfect_pants(n, R), eps / 4, 1000 + i);
            Classification cg = classify(pg, R, eps);
            CHECK(cg.verdict == Verdict::Good);
            CHECK(cg.certificate < cg.threshold);
            PantsPresentation pb =
                perturb_pants(build_bad_pants(n, R), eps / 4, 2000 + i);
            Classification cb = classify(pb, R, eps);
            CHECK(cb.verdict == Verdict::Bad);
        }
    }

    SUBCASE("good verdicts have close transported long feet") {
        for (int i = 0; i < 10; ++i) {
            PantsPresentation p =
                perturb_pants(build_perfect_pants(n, R), eps / 4, 3000 + i);
            REQUIRE(classify(p, R, eps).verdict == Verdict::Good);
            AverageFeet af = average_feet(p, 0);
            Scalar gap = std::min(
                fiber_distance_along(af.model, af.long_feet[0], af.long_feet[1],
                                     Arc::One),
                fiber_distance_along(af.model, af.long_feet[0], af.long_feet[1],
                                     Arc::Two));
            CHECK(gap < 1.5 * eps);
        }
    }

    SUBCASE("cuff-goodness violations are flagged") {
        // stretching one connection's flow length moves one cuff far from 2R
        PantsPresentation p = build_perfect_pants(n, R);
        p.connections[1] = p.connections[1] * flow(5.0 * eps, n);
        Classification c = classify(p, R, eps);
        CHECK(c.verdict == Verdict::NotCuffGood);
    }

    SUBCASE("gauge invariance of the verdict") {
        PantsPresentation p =
            perturb_pants(build_perfect_pants(n, R), eps / 4, 77);
        Classification base = classify(p, R, eps);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            Classification c = classify(p, R, eps, seed);
            CHECK(c.verdict == base.verdict);
        }
    }

    SUBCASE("cuff monodromy reproduced from connection rewrites") {
        PantsPresentation p =
            perturb_pants(build_perfect_pants(n, R), eps / 4, 7);
        SteinerGraph sg = steiner_minimize(p);
        Tripods t = tripods_from_steiner(p, sg);
        auto x = connection_monodromies(p, sg, t);
        for (int i = 0; i < 3; ++i) {
            auto inv = axis_invariants(p.cuff(i));
            Matrix pred = x[(i + 2) % 3].transpose() * phi_conj(x[(i + 1) % 3]);
            CHECK(monodromy_angle_distance(pred, inv.m_class) <
                  4.0 * std::exp(-R / 2));
        }
    }
}

TEST_CASE("third connection analysis") {
    const int n = 4;
    const Scalar R = 8.0;

    SUBCASE("symmetric configuration gives trivial predictions") {
        ModelClosedGeodesic g0{2.0 * R, Matrix::Identity(n - 1, n - 1)};
        Vector w1 = Vector::Unit(n - 1, 0);
        NormalFiberPoint fu{1.0, w1};
        NormalFiberPoint fv{1.0 + R, w1};
        Scalar l = R + 2.0 * std::log(2.0);
        auto tc = third_connection_analysis(g0, fu, fv, l,
                                            Matrix::Identity(n - 1, n - 1), n);
        CHECK(tc.predicted_length[1] == doctest::Approx(2.0 * R));
        CHECK(tc.predicted_length[2] == doctest::Approx(2.0 * R));
        for (int i = 0; i < 3; ++i)
            CHECK(so_distance_to_identity(tc.predicted_monodromy[i]) < 1e-12);
    }

    SUBCASE("random instances: identities and word cross-checks") {
        Rng rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            Scalar L = 2.0 * R + rng.uniform(-0.05, 0.05);
            Matrix lam = matrix_exp(0.04 * skew_from_coords(rng.gaussian(3), 3));
            ModelClosedGeodesic g0{L, lam};
            Vector wu = rng.unit_sphere(n - 1);
            NormalFiberPoint fu{rng.uniform(0.0, L), wu};
            Scalar d1 = 0.5 * L + rng.uniform(-0.02, 0.02);
            Vector wv = parallel_transport(g0, fu.s, fu.s + d1, wu);
            wv += 0.03 * rng.gaussian(n - 1);
            wv /= wv.norm();
            Scalar vs = fu.s + d1;
            vs -= L * std::floor(vs / L);
            NormalFiberPoint fv{vs, wv};
            Scalar l = R + 2.0 * std::log(2.0) + rng.uniform(-0.02, 0.02);
            Matrix y = matrix_exp(0.03 * skew_from_coords(rng.gaussian(3), 3));
            auto tc = third_connection_analysis(g0, fu, fv, l, y, n);

            // the model holonomy is recovered from the two frame rewrites
            CHECK(monodromy_angle_distance(tc.predicted_monodromy[0], lam) < 1e-10);

            // realized words agree with the predictions
            Scalar tol = 4.0 * std::exp(-R / 2);
            auto i1 = axis_invariants(tc.deck_cuff1);
            CHECK(std::abs(i1.t - tc.predicted_length[1]) < tol);
            CHECK(monodromy_angle_distance(i1.m_class, tc.predicted_monodromy[1]) <
                  tol);
            auto i2 = axis_invariants(tc.deck_cuff2);
            CHECK(std::abs(i2.t - tc.predicted_length[2]) < tol);
            CHECK(monodromy_angle_distance(i2.m_class, tc.predicted_monodromy[2]) <
                  tol);
        }
    }

    SUBCASE("inconsistent geometry is rejected") {
        ModelClosedGeodesic g0{16.0, Matrix::Identity(n - 1, n - 1)};
        NormalFiberPoint fu{1.0, Vector::Unit(n - 1, 0)};
        NormalFiberPoint fv{2.0, Vector::Unit(n - 1, 0)};
        CHECK_THROWS_WITH_AS(
            third_connection_analysis(g0, fu, fv, 0.5,
                                      Matrix::Identity(n - 1, n - 1), n),
            doctest::Contains("InconsistentGeometry"), Error);
    }
}

TEST_CASE("average feet") {
    const int n = 4;

    SUBCASE("perfect pants: averages equal the short feet") {
        AverageFeet af = average_feet(build_perfect_pants(n, 8.0), 0);
        CHECK(af.drift[0] < 1e-8);
        CHECK(af.drift[1] < 1e-8);
        CHECK(af.third_connection_length ==
              doctest::Approx(8.0 + 2.0 * std::log(2.0)).epsilon(1e-3));
    }

    SUBCASE("drift decays like e^{-R} on connection-synthesized pants") {
        std::vector<Scalar> lr, ld;
        for (Scalar R : {6.0, 8.0, 10.0}) {
            Rng rng(17);
            Scalar L = 2.0 * R, spread = 0.05;
            Scalar worst = 0;
            for (int i = 0; i < 10; ++i) {
                Matrix lam = matrix_exp(spread * skew_from_coords(rng.gaussian(3), 3));
                ModelClosedGeodesic g0{L, lam};
                Vector wu = rng.unit_sphere(n - 1);
                NormalFiberPoint fu{rng.uniform(0.0, L), wu};
                Scalar d1 = 0.5 * L + rng.uniform(-0.01, 0.01);
                Vector wv = parallel_transport(g0, fu.s, fu.s + d1, wu);
                wv += spread * rng.gaussian(n - 1);
                wv /= wv.norm();
                Scalar vs = fu.s + d1;
                vs -= L * std::floor(vs / L);
                NormalFiberPoint fv{vs, wv};
                Scalar l = R + 2.0 * std::log(2.0) + rng.uniform(-0.01, 0.01);
                Matrix y = matrix_exp(spread * skew_from_coords(rng.gaussian(3), 3));
                AverageFeet af = average_feet_from_connection(g0, fu, fv, l, y, n);
                worst = std::max(worst, af.drift[0]);
            }
            CHECK(worst < 40.0 * std::exp(-R));
            lr.push_back(R);
            ld.push_back(std::log(worst));
        }
        Scalar slope = fit_slope(lr, ld);
        CHECK(slope > -1.15);
        CHECK(slope < -0.85);
    }

    SUBCASE("projection feet contract exponentially in the distance") {
        // two points on a far line project to nearby feet
        const Scalar delta = 2.0;
        std::vector<Scalar> ldist, lgap;
        for (Scalar d : {4.0, 6.0, 8.0}) {
            Geodesic g1{base_point(n), Vector::Unit(n + 1, 1)};
            GroupElement shift =
                position_frame(base_point(n), Vector::Unit(n + 1, 2));
            GroupElement mover = shift * flow(d, n) * lorentz_inverse(shift);
            Geodesic g2{mover * g1.base, mover * g1.dir};
            HPoint x1 = g2.point_at(0.0), x2 = g2.point_at(delta);
            Scalar s1 = project_to_geodesic(g1, x1);
            Scalar s2 = project_to_geodesic(g1, x2);
            Vector f1 = unit_tangent_toward(g1.point_at(s1), x1);
            Vector f2 = unit_tangent_toward(g1.point_at(s2), x2);
            Scalar gap = std::abs(s2 - s1) + sphere_distance(f1, f2);
            CHECK(gap < 8.0 * std::exp(-d));
            ldist.push_back(d);
            lgap.push_back(std::log(gap));
        }
        Scalar slope = fit_slope(ldist, lgap);
        CHECK(slope < -0.85);
    }

    SUBCASE("antipodal transported feet are rejected") {
        ModelClosedGeodesic g0{16.0, Matrix::Identity(n - 1, n - 1)};
        Vector w1 = Vector::Unit(n - 1, 0);
        NormalFiberPoint fu{1.0, w1};
        NormalFiberPoint fv{9.0, -w1};
        CHECK_THROWS_WITH_AS(
            average_feet_from_connection(g0, fu, fv, 8.0 + 2.0 * std::log(2.0),
                                         Matrix::Identity(n - 1, n - 1), n),
            doctest::Contains("AntipodalFeet"), Error);
    }
}
