#pragma once

// Steiner ("theta") graphs of pants presentations: minimization of the
// total-length functional F(x, y) = sum_i d(x, g_i y) over H^n x H^n, with
// tripod and frame extraction at the two vertices.

#include "goodpants/geodesic.hpp"
#include "goodpants/words.hpp"

#include <array>

namespace pants {

struct PantsPresentation {
    enum class Provenance { SyntheticGood, SyntheticBad, Perturbed, External };

    int n = 4;
    std::array<GroupElement, 3> connections;  // g_0, g_1, g_2
    Provenance provenance = Provenance::External;

    // Cuff words c_i = g_{i+1} g_{i+2}^{-1} (indices mod 3).
    GroupElement cuff(int i) const {
        return connections[(i + 1) % 3] * lorentz_inverse(connections[(i + 2) % 3]);
    }
};

struct SteinerGraph {
    HPoint x, y;
    std::array<Scalar, 3> lengths{};
    Scalar total = 0;
    Scalar gradient_norm = 0;
    Scalar hessian_min_eigen = 0;  // finite-difference certificate
    Scalar seed_spread = 0;        // max disagreement between restarts
    std::array<Scalar, 3> angles_x{}, angles_y{};  // pairs (01, 12, 20)
    bool degenerate = false;
};

// Minimizes F by alternating exact Fermat-point solves in x and y from three
// seeds, then a joint Newton polish. Throws NotLoxodromic if a cuff word is
// not loxodromic; degeneracy is reported on the result, not thrown.
SteinerGraph steiner_minimize(const PantsPresentation& p);

struct ConvexityReport {
    int trials = 0;
    int strict = 0;        // midpoint strictly below the chord average
    Scalar min_margin = 0;
    Scalar fit_exponent = 0;  // decay of the margin under segment shrinking
};

ConvexityReport convexity_probe(const PantsPresentation& p, int trials,
                                std::uint64_t seed);

struct Tripods {
    Matrix legs_x, legs_y;      // (n+1) x 3 unit tangent columns
    Matrix perp_x, perp_y;      // v_i-perp columns, in-plane
    Matrix frame_x, frame_y;    // E, F: (n+1) x (n-2) completions
};

// Ordered tripods at the two vertices plus positive orthonormal frames of
// the orthogonal complements of the tripod planes.
Tripods tripods_from_steiner(const PantsPresentation& p, const SteinerGraph& sg,
                             std::uint64_t frame_seed = 0);

}  // namespace pants
