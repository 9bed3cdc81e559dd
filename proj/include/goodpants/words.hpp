#pragma once

// Instruction words over SO+(n,1) and extraction of conjugacy invariants
// (translation length and monodromy class) of loxodromic elements, both by
// a spectral route and by iterated absorption of perturbations into long
// frame flows.

#include "goodpants/lorentz.hpp"

namespace pants {

struct Instruction {
    enum class Kind { FrameFlow, Rotation2, Rewrite, Perturb };
    Kind kind;
    Scalar value = 0.0;  // flow length or rotation angle
    Matrix payload;      // SO(n) matrix for Rewrite, group element for Perturb

    static Instruction frame_flow(Scalar t) {
        return {Kind::FrameFlow, t, Matrix()};
    }
    static Instruction rotation2(Scalar theta) {
        return {Kind::Rotation2, theta, Matrix()};
    }
    static Instruction rewrite_frame(const Matrix& k) {
        return {Kind::Rewrite, 0.0, k};
    }
    static Instruction perturb(const GroupElement& g) {
        return {Kind::Perturb, 0.0, g};
    }
};

using Word = std::vector<Instruction>;

GroupElement evaluate(const Word& word, int n);

struct LoxodromicInvariants {
    Scalar t = 0.0;     // translation length
    Matrix m_class;     // SO(n-1) representative, compared up to conjugacy
    GroupElement frame; // h with h^-1 g h = a_t m (axis positioning)
};

// Spectral extraction: attracting/repelling fixed points from the extreme
// eigenvectors, axis frame from the fixed points, monodromy from the
// conjugated element. Throws NotLoxodromic for elliptic/parabolic input.
LoxodromicInvariants axis_invariants(const GroupElement& g);

// Axis frame only (base point and direction columns), without the normal
// form residual check. Survives lifts whose axes run far from the base
// point, where the monodromy block is numerically out of reach.
GroupElement axis_frame(const GroupElement& g);

// Distance between conjugacy classes via sorted rotation-angle multisets.
Scalar monodromy_angle_distance(const Matrix& a, const Matrix& b);

// Bi-invariant distance after the best alignment over the centralizer-style
// gauge: min over q in SO(m) Procrustes-fit of a to b (used when the angle
// multiset alone is too coarse).
Scalar monodromy_aligned_distance(const Matrix& a, const Matrix& b);

// One canonicalized word segment a_t m u with u a small perturbation.
struct FlowSegment {
    Scalar t;
    Matrix m;        // SO(n-1)
    GroupElement u;  // near identity
};

// Invariants of the product of segments, computed by repeated NAN
// decomposition: horospherical parts commute through the long flows with
// exponential contraction and the B-parts merge into flow and monodromy.
LoxodromicInvariants absorb_segments(std::vector<FlowSegment> segments, int n);

// Invariants of a_t m u for u near the identity.
LoxodromicInvariants absorb_perturbation(Scalar t, const Matrix& m_so,
                                         const GroupElement& u);

// Invariants of a_{t1} u1 m1 v1 a_{t2} u2 m2 v2.
LoxodromicInvariants close_eight_word(Scalar t1, const GroupElement& u1,
                                      const Matrix& m1, const GroupElement& v1,
                                      Scalar t2, const GroupElement& u2,
                                      const Matrix& m2, const GroupElement& v2);

}  // namespace pants
