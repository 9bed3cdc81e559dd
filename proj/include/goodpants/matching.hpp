#pragma once

// Foot atlases on the normal bundle of a model closed geodesic, the
// shear-and-flip matching map, Hall-condition checks with exact min-cut
// certificates, Cheeger estimates for sphere bundles over circles, the
// orientation-doubling trick, and closed-surface assembly.

#include "goodpants/foot_measure.hpp"

#include <functional>
#include <map>

namespace pants {

// Parallel transport by +1 followed by the fiberwise antipodal map; the two
// compositions agree.
NormalFiberPoint tau_map(const ModelClosedGeodesic& g0,
                         const NormalFiberPoint& x);

// The same map for the reversed orientation of the curve: antipodal followed
// by transport by -1. Entries carry the orientation their pants induces, and
// their matching targets use the correspondingly oriented shear.
NormalFiberPoint tau_map_reversed(const ModelClosedGeodesic& g0,
                                  const NormalFiberPoint& x);

struct FootEntry {
    int pants_id = 0;
    int orientation = +1;  // induced orientation of the cuff
    NormalFiberPoint foot;
};

struct FootAtlas {
    ModelClosedGeodesic g0;
    std::vector<FootEntry> entries;
};

// Synthetic atlases: quasi-uniform draws (optionally weighted by a density
// grid), imbalanced polar caps, and latitude bands. Quasi-uniform entries
// come in partner pairs displaced from each other's tau images by at most
// `pair_jitter`: the desk-scale stand-in for the exponentially large pants
// counts that make the actual foot measure tau-dense.
FootAtlas synthesize_quasi_uniform(const ModelClosedGeodesic& g0, int count,
                                   Scalar pair_jitter, std::uint64_t seed,
                                   const DensityGrid* density = nullptr);
FootAtlas synthesize_ice_cap(const ModelClosedGeodesic& g0, int north,
                             int south, Scalar cap_radius, std::uint64_t seed);
FootAtlas synthesize_bands(const ModelClosedGeodesic& g0,
                           const std::vector<Scalar>& latitudes,
                           const std::vector<Scalar>& widths,
                           const std::vector<int>& counts, std::uint64_t seed);

struct MatchingResult {
    bool perfect = false;
    std::vector<int> sigma;       // matched partner per entry when perfect
    Scalar max_displacement = 0;  // max d(p(sigma(pi)), tau(p(pi)))
    std::vector<int> violator;    // Hall certificate when not perfect
    long violator_size = 0;
    long violator_neighbors = 0;  // entries within xi of tau(violator)
};

// Bipartite matching joining every entry to the entries within xi of its
// tau image, by Hopcroft-Karp; imperfect matchings return the alternating
// reachability cut as a Hall violator.
MatchingResult find_matching(const FootAtlas& atlas, Scalar xi);

using Region = std::function<bool(const NormalFiberPoint&)>;

struct HallReport {
    bool family_violation = false;
    int violating_set = -1;
    Scalar worst_margin = 0;  // min over sets of nu(N_xi(A)) - nu(tau(A))
    bool exact_violation = false;
    bool methods_agree = false;
};

// Evaluates nu(N_xi(A)) >= nu(tau(A)) over a family of test regions and
// against the exact min-cut certificate.
HallReport hall_check(const FootAtlas& atlas, Scalar xi,
                      const std::vector<Region>& family);

struct CheegerReport {
    Scalar estimate = 0;      // best sweep-cut ratio
    Scalar bound = 0;         // 1/(4R)
    bool bound_ok = false;
    Scalar refine_change = 0;  // relative change under fiber refinement
    int growth_checked = 0;
    int growth_ok = 0;
};

// Discretizes the bundle as a weighted graph and estimates the Cheeger
// constant by coordinate and spectral sweep cuts; also samples the
// neighborhood-growth inequality |N_eta(A)| >= (1 + eta h) |A|.
CheegerReport cheeger_bundle_bound(const ModelClosedGeodesic& g0, Scalar R,
                                   int s_bins, int fiber_resolution,
                                   std::uint64_t seed);

// --- assembly ----------------------------------------------------------------

struct CuffRef {
    int pants_id = 0;
    int cuff = 0;  // 0, 1, 2
    bool operator<(const CuffRef& o) const {
        return pants_id != o.pants_id ? pants_id < o.pants_id : cuff < o.cuff;
    }
    bool operator==(const CuffRef& o) const {
        return pants_id == o.pants_id && cuff == o.cuff;
    }
};

struct CurveMatching {
    std::vector<CuffRef> boundaries;  // cuffs mapped to this curve
    std::vector<int> sigma;           // permutation of the boundary indices
};

struct SurfaceAssembly {
    int oriented_pants = 0;
    int components = 0;
    std::vector<int> component_chi;
    std::vector<int> component_genus;
    int total_chi = 0;
    bool involution_fixed_point_free = false;
    bool degrees_ok = false;  // every oriented copy glued on all three cuffs
};

// Doubles every pants into two oriented copies, converts each per-curve
// bijection sigma into the gluing involution tau*(alpha^+) = (sigma alpha)^-,
// tau*(alpha^-) = (sigma^{-1} alpha)^+, and assembles the closed surface.
SurfaceAssembly double_and_assemble(
    const std::map<int, CurveMatching>& per_curve, int num_pants);

struct WellMatchedReport {
    bool well_matched = false;
    Scalar tau_gap = 0;          // best d(tau(a_1), a_2)
    bool well_attached = false;
    Scalar oriented_distance = 0;  // short-feet shear, target 1
    Scalar angle = 0;              // short-feet angle after transport
    Scalar sigma_attached = 0;     // threshold used: sigma + 2 K e^{-R}
};

// Average-feet matching condition for two pants sharing the model cuff, and
// the derived attachment condition on the short feet.
WellMatchedReport well_matched_check(const AverageFeet& p1,
                                     const AverageFeet& p2, Scalar sigma_bound,
                                     Scalar R, Scalar drift_k = 8.0);

}  // namespace pants
