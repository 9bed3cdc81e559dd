#pragma once

// Synthesis of model pants presentations, connection monodromies from
// Steiner data, the good/bad dichotomy, third-connection monodromy
// predictions, and average feet.

#include "goodpants/steiner.hpp"

namespace pants {

struct CuffInvariants {
    std::array<Scalar, 3> lengths{};
    std::array<Matrix, 3> monodromies;   // SO(n-1) class representatives
    std::array<bool, 3> good{};
    bool all_good = false;
};

CuffInvariants cuff_invariants(const PantsPresentation& p, Scalar R, Scalar eps);

// Fuchsian pants in a coordinate 2-plane with all three cuff lengths exactly
// 2R and trivial monodromies: two Fermat vertices joined by three arcs of
// length l with cosh(l) = (4 cosh R + 1)/3.
PantsPresentation build_perfect_pants(int n, Scalar R);

// Presentation whose Steiner tripods are badly connected: each connection
// carries the involution diag(1,-1,-1,1,...,1), the configuration that folds
// the three arcs into a one-holed torus with a Z/6 symmetry. Cuff words stay
// exactly cuff-good. Needs n >= 3.
PantsPresentation build_bad_pants(int n, Scalar R);

// Right-multiplies each connection by a random element within `scale` of the
// identity; deterministic per seed.
PantsPresentation perturb_pants(const PantsPresentation& p, Scalar scale,
                                std::uint64_t seed);

// X_i in SO(n-1): the rewrite between the two tripod frames pushed to the
// midpoint of connection i, with the half-turn factored out.
std::array<Matrix, 3> connection_monodromies(const PantsPresentation& p,
                                             const SteinerGraph& sg,
                                             const Tripods& t);

// phi: conjugation by Z = diag(-1,1,...,1) on SO(m).
Matrix phi_conj(const Matrix& a);

// diag(-1,-1,1,...,1), the badly-connected target in SO(m).
Matrix bad_involution(int m);

struct InvolutionAlignment {
    Matrix q;     // element of the SO(m-1) stabilizer of e1
    Matrix u;     // identity or the bad involution
    Scalar dist;  // d(AQ, U) <= d(A, phi(A)) / 2
};

// Aligns A to the nearer of {e, diag(-1,-1,1,...,1)} by a stabilizer element.
InvolutionAlignment align_to_involution(const Matrix& a);

enum class Verdict { Good, Bad, NotCuffGood, Unresolved };

struct Classification {
    Verdict verdict = Verdict::Unresolved;
    Scalar certificate = 0;  // max_i d(X_i Q, U) for the chosen branch
    Scalar threshold = 0;    // 7 eps * slack
    std::array<Matrix, 3> aligned;  // X_i Q
    CuffInvariants cuffs;
    std::string diagnostics;
};

inline constexpr Scalar kClassifierSlack = 1.2;

Classification classify(const PantsPresentation& p, Scalar R, Scalar eps,
                        std::uint64_t gauge_seed = 0);

// --- third connections in the model bundle -----------------------------------

struct ThirdConnectionData {
    Matrix x1, x2, y;  // SO(n-1) relative to the constructed frames
    std::array<Matrix, 3> predicted_monodromy;  // cuffs 0, 1, 2
    std::array<Scalar, 3> predicted_length;
    GroupElement deck_gamma0, deck_cuff1, deck_cuff2;  // group words
    GroupElement far_anchor;  // frame conjugating deck_cuff2 to its raw form
};

// Given a model closed geodesic, the two feet of a putative third connection,
// its length and its framed monodromy, computes the frame rewrites X1, X2 and
// the predicted invariants of the two new cuffs, together with the group
// words realizing the configuration.
ThirdConnectionData third_connection_analysis(const ModelClosedGeodesic& g0,
                                              const NormalFiberPoint& u,
                                              const NormalFiberPoint& v,
                                              Scalar l, const Matrix& y, int n);

// --- average feet ----------------------------------------------------------------

struct AverageFeet {
    ModelClosedGeodesic model;           // cuff model (length, holonomy)
    std::array<NormalFiberPoint, 2> long_feet;
    std::array<NormalFiberPoint, 2> short_feet;
    std::array<NormalFiberPoint, 2> average;  // arc + sphere midpoints
    std::array<Scalar, 2> drift;              // d(a_i, nearest short foot)
    Scalar third_connection_length = 0;
    Scalar short_connection_length = 0;
};

// Long feet of the third connection on the chosen cuff, their midpoints, and
// the short orthogeodesic feet for comparison. The presentation must be
// classified Good first.
AverageFeet average_feet(const PantsPresentation& p, int cuff);

// Same quantities for a pants synthesized from third-connection data on the
// model geodesic: the long feet are the given ones, the short feet come from
// the realized cuff words, so every term carries only the exponential error
// of the geometry itself.
AverageFeet average_feet_from_connection(const ModelClosedGeodesic& g0,
                                         const NormalFiberPoint& u,
                                         const NormalFiberPoint& v, Scalar l,
                                         const Matrix& y, int n);

}  // namespace pants
