#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "goodpants/words.hpp"
#include "test_util.hpp"

using namespace pants;

namespace {

Word random_word(Rng& rng, int n, int length, Scalar flow_scale) {
    Word w;
    for (int i = 0; i < length; ++i) {
        switch (rng.next() % 4) {
            case 0: w.push_back(Instruction::frame_flow(rng.uniform(0.5, flow_scale))); break;
            case 1: w.push_back(Instruction::rotation2(rng.uniform(0, 2 * kPi))); break;
            case 2: w.push_back(Instruction::rewrite_frame(haar_so(n, rng))); break;
            default:
                w.push_back(Instruction::perturb(
                    testutil::random_near_identity(rng, n, 0.02)));
        }
    }
    return w;
}

Word inverse_word(const Word& w, int n) {
    Word r;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        switch (it->kind) {
            case Instruction::Kind::FrameFlow:
                r.push_back(Instruction::frame_flow(-it->value));
                break;
            case Instruction::Kind::Rotation2:
                r.push_back(Instruction::rotation2(-it->value));
                break;
            case Instruction::Kind::Rewrite:
                r.push_back(Instruction::rewrite_frame(it->payload.transpose()));
                break;
            case Instruction::Kind::Perturb:
                r.push_back(Instruction::perturb(lorentz_inverse(it->payload)));
                break;
        }
    }
    (void)n;
    return r;
}

}  // namespace

TEST_CASE("word evaluation") {
    const int n = 4;
    CHECK((evaluate({}, n) - Matrix::Identity(n + 1, n + 1)).norm() == 0.0);

    Word two_flows{Instruction::frame_flow(0.7), Instruction::frame_flow(1.1)};
    CHECK((evaluate(two_flows, n) - flow(1.8, n)).cwiseAbs().maxCoeff() < 1e-12);

    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        Word w = random_word(rng, n, 8, 1.5);
        GroupElement g = evaluate(w, n);
        GroupElement gi = evaluate(inverse_word(w, n), n);
        Scalar scale = std::max(1.0, g.cwiseAbs().maxCoeff());
        CHECK((g * gi - Matrix::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() / scale <
              1e-11);
    }
}

TEST_CASE("axis invariants") {
    const int n = 4;
    Rng rng(5);

    SUBCASE("normal form inputs") {
        for (int i = 0; i < 20; ++i) {
            Scalar t = rng.uniform(0.5, 10.0);
            Matrix m = haar_so(n - 1, rng);
            LoxodromicInvariants inv = axis_invariants(flow(t, n) * m_embed(m, n));
            CHECK(inv.t == doctest::Approx(t).epsilon(1e-11));
            CHECK(monodromy_angle_distance(inv.m_class, m) < 1e-9);
        }
    }

    SUBCASE("conjugation invariance") {
        for (int i = 0; i < 20; ++i) {
            Scalar t = rng.uniform(1.0, 8.0);
            Matrix m = haar_so(n - 1, rng);
            GroupElement g = flow(t, n) * m_embed(m, n);
            GroupElement h = evaluate(random_word(rng, n, 5, 1.0), n);
            LoxodromicInvariants inv = axis_invariants(h * g * lorentz_inverse(h));
            CHECK(std::abs(inv.t - t) < 1e-10 * std::max(1.0, t));
            CHECK(monodromy_angle_distance(inv.m_class, m) < 1e-8);
        }
    }

    SUBCASE("elliptic and parabolic rejection") {
        CHECK_THROWS_AS(axis_invariants(rot2(1.0, n)), Error);
        CHECK_THROWS_AS(axis_invariants(exp_n(Vector::Ones(n - 1), +1, n)), Error);
    }
}

TEST_CASE("perturbation absorption") {
    const int n = 4;
    Rng rng(7);
    const Matrix idm = Matrix::Identity(n - 1, n - 1);

    SUBCASE("trivial perturbation") {
        Matrix m = haar_so(n - 1, rng);
        auto inv = absorb_perturbation(9.0, m, Matrix::Identity(n + 1, n + 1));
        CHECK(inv.t == doctest::Approx(9.0));
        CHECK(monodromy_angle_distance(inv.m_class, m) < 1e-12);
    }

    SUBCASE("pure flow perturbation shifts the length") {
        auto inv = absorb_perturbation(9.0, idm, flow(0.01, n));
        CHECK(inv.t == doctest::Approx(9.01).epsilon(1e-12));
        CHECK(monodromy_angle_distance(inv.m_class, idm) < 1e-12);
    }

    SUBCASE("absorption matches the spectral oracle") {
        for (int i = 0; i < 100; ++i) {
            Scalar t = rng.uniform(8.0, 15.0);
            Matrix m = haar_so(n - 1, rng);
            GroupElement u = testutil::random_near_identity(rng, n, 0.01);
            auto a = absorb_perturbation(t, m, u);
            auto s = axis_invariants(flow(t, n) * m_embed(m, n) * u);
            CHECK(std::abs(a.t - s.t) < 1e-9);
            CHECK(monodromy_angle_distance(a.m_class, s.m_class) < 1e-7);
            CHECK(std::abs(a.t - t) < 4.0 * 0.01);  // |t - t'| < K eps
            CHECK(so_distance(a.m_class, m) < 4.0 * 0.01);
        }
    }

    SUBCASE("measured constant does not grow with the flow length") {
        auto max_ratio = [&](Scalar t, std::uint64_t seed) {
            Rng r(seed);
            Scalar worst = 0;
            for (int i = 0; i < 60; ++i) {
                Scalar eps = std::pow(10.0, r.uniform(-4.0, -2.0));
                Matrix m = haar_so(n - 1, r);
                GroupElement u = testutil::random_near_identity(r, n, eps);
                auto a = absorb_perturbation(t, m, u);
                worst = std::max(worst, std::abs(a.t - t) / eps);
            }
            return worst;
        };
        Scalar k9 = max_ratio(9.0, 123);
        Scalar k14 = max_ratio(14.0, 123);
        CHECK(k9 < 4.0);
        CHECK(k14 <= k9 * 1.2);
    }

    SUBCASE("threshold violations are reported") {
        CHECK_THROWS_AS(
            absorb_perturbation(1.0, idm, Matrix::Identity(n + 1, n + 1)), Error);
    }
}

TEST_CASE("eight-letter closing") {
    const int n = 4;
    Rng rng(11);
    const Matrix id = Matrix::Identity(n + 1, n + 1);

    SUBCASE("identity perturbations") {
        for (int i = 0; i < 10; ++i) {
            Scalar t1 = rng.uniform(8.5, 12.0), t2 = rng.uniform(8.5, 12.0);
            Matrix m1 = haar_so(n - 1, rng), m2 = haar_so(n - 1, rng);
            auto inv = close_eight_word(t1, id, m1, id, t2, id, m2, id);
            CHECK(inv.t == doctest::Approx(t1 + t2).epsilon(1e-12));
            CHECK(so_distance(inv.m_class, m1 * m2) < 1e-12);
        }
    }

    SUBCASE("random instances match the spectral oracle") {
        for (int i = 0; i < 50; ++i) {
            Scalar t1 = rng.uniform(8.5, 13.0), t2 = rng.uniform(8.5, 13.0);
            Matrix m1 = haar_so(n - 1, rng), m2 = haar_so(n - 1, rng);
            GroupElement u1 = testutil::random_near_identity(rng, n, 0.01);
            GroupElement v1 = testutil::random_near_identity(rng, n, 0.01);
            GroupElement u2 = testutil::random_near_identity(rng, n, 0.01);
            GroupElement v2 = testutil::random_near_identity(rng, n, 0.01);
            auto a = close_eight_word(t1, u1, m1, v1, t2, u2, m2, v2);
            GroupElement g = flow(t1, n) * u1 * m_embed(m1, n) * v1 * flow(t2, n) *
                             u2 * m_embed(m2, n) * v2;
            auto s = axis_invariants(g);
            CHECK(std::abs(a.t - s.t) < 1e-9);
            CHECK(monodromy_angle_distance(a.m_class, s.m_class) < 1e-7);
        }
    }

    SUBCASE("deviation scales linearly with the perturbation") {
        std::vector<Scalar> logs_eps, logs_dev;
        Rng r(31);
        Matrix m1 = haar_so(n - 1, r), m2 = haar_so(n - 1, r);
        GroupElement base_u = testutil::random_near_identity(r, n, 1.0);
        Matrix xi = *principal_log(base_u);
        xi /= algebra_norm(xi, n);
        for (Scalar eps : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
            GroupElement u = matrix_exp(Matrix(eps * xi));
            auto inv = close_eight_word(9.0, u, m1, u, 10.0, u, m2, u);
            Scalar dev = std::abs(inv.t - 19.0) + so_distance(inv.m_class, m1 * m2);
            logs_eps.push_back(std::log(eps));
            logs_dev.push_back(std::log(std::max(dev, 1e-300)));
        }
        CHECK(fit_slope(logs_eps, logs_dev) >= 0.9);
    }
}
