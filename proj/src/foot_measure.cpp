#include "goodpants/foot_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pants {

Scalar gauge_orbit_distance(const Matrix& a, const Matrix& b) {
    const int m = int(a.rows());
    if (m <= 2) return so_distance(a, b);
    if (m == 3) {
        // the two-sided stabilizer orbits are the Euler classes: the middle
        // angle arccos(a00) is a complete invariant and realizes the
        // distance on the shared one-parameter section
        Scalar ba = std::acos(std::clamp(a(0, 0), -1.0, 1.0));
        Scalar bb = std::acos(std::clamp(b(0, 0), -1.0, 1.0));
        return std::abs(ba - bb);
    }
    auto embed = [&](const Matrix& blk) {
        Matrix q = Matrix::Identity(m, m);
        q.block(1, 1, m - 1, m - 1) = blk;
        return q;
    };
    // alternating two-sided Procrustes is prone to local minima; restart
    // from seeded right factors and keep the best alignment
    Rng rng(2026);
    Scalar best = std::numeric_limits<Scalar>::max();
    for (int restart = 0; restart < 12; ++restart) {
        Matrix qa = Matrix::Identity(m, m);
        Matrix qb = embed(restart == 0 ? Matrix(Matrix::Identity(m - 1, m - 1))
                                       : haar_so(m - 1, rng));
        for (int it = 0; it < 40; ++it) {
            Matrix mleft = a * qb * b.transpose();
            qa = embed(project_so(mleft.block(1, 1, m - 1, m - 1).transpose()));
            Matrix mright = a.transpose() * qa.transpose() * b;
            qb = embed(project_so(mright.block(1, 1, m - 1, m - 1)));
        }
        best = std::min(best, so_distance(qa * a * qb, b));
    }
    return best;
}

Scalar diamond_area(Scalar R, Scalar eps, Scalar l0) {
    Scalar span = std::exp(2.0 * eps) - std::exp(-2.0 * eps);
    return 8.0 * std::exp(4.0 * R - l0) * span * span;
}

Scalar hat_diamond_area(Scalar R, Scalar delta, Scalar l0) {
    Scalar span = std::exp(2.0 * delta) - std::exp(-2.0 * delta);
    return 4.0 * std::exp(4.0 * R - l0) * span * span;
}

MCEstimate ball_intersection_volume(const Matrix& x, Scalar r, int samples,
                                    std::uint64_t seed) {
    const int m = int(x.rows());
    Rng rng(seed);
    long hits = 0;
    for (int i = 0; i < samples; ++i) {
        Matrix g = haar_so(m, rng);
        if (so_distance_to_identity(g) < r &&
            so_distance_to_identity(x.transpose() * g) < r)
            ++hits;
    }
    Scalar vol = so_volume(m);
    Scalar p = Scalar(hits) / samples;
    return {vol * p, vol * std::sqrt(std::max(p * (1.0 - p), 1.0 / samples) /
                                     samples)};
}

MCEstimate ball_intersection_volume_so3(const Matrix& x, Scalar r, int samples,
                                        std::uint64_t seed) {
    Rng rng(seed);
    long hits = 0;
    for (int i = 0; i < samples; ++i) {
        Matrix g = so3_ball_uniform(r, rng);
        if (so_distance_to_identity(x.transpose() * g) < r) ++hits;
    }
    Scalar vol = so3_ball_volume(r);
    Scalar p = Scalar(hits) / samples;
    return {vol * p, vol * std::sqrt(std::max(p * (1.0 - p), 1.0 / samples) /
                                     samples)};
}

NormalFiberPoint midpoint_extend(const ModelClosedGeodesic& g0,
                                 const NormalFiberPoint& x,
                                 const NormalFiberPoint& y) {
    Scalar L = g0.length;
    Scalar delta = x.s - y.s;
    delta -= L * std::round(delta / L);  // shortest signed arc y -> x
    if (std::abs(delta) >= 0.5 * L - 1e-9)
        throw Error("AntipodalOrFar", "basepoints are half a loop apart");
    NormalFiberPoint xp = transport_by(g0, x, delta);
    NormalFiberPoint yp = transport_by(g0, y, 2.0 * delta);
    Scalar alpha = sphere_distance(yp.w, xp.w);
    if (alpha >= 0.5 * kPi - 1e-9)
        throw Error("AntipodalOrFar", "transported vectors exceed a quarter turn");
    Vector w = 2.0 * std::cos(alpha) * xp.w - yp.w;
    w /= w.norm();
    return {xp.s, w};
}

MonodromyPairData monodromy_pair(const ModelClosedGeodesic& g0, const Vector& a,
                                 const Vector& b, const Matrix* frame_a,
                                 const Matrix* frame_b) {
    const int m = g0.fiber_dim();
    Matrix ae = frame_a ? *frame_a : complete_orthonormal(a);  // det +1
    Matrix bf;
    if (frame_b) {
        bf = *frame_b;
    } else {
        bf = complete_orthonormal(b);
        bf.col(m - 1) = -bf.col(m - 1);  // opposite orientation
    }
    Matrix mae = ae, mbf = bf;
    mae.col(0) = -mae.col(0);
    mbf.col(0) = -mbf.col(0);
    MonodromyPairData out;
    out.x1 = project_so(mae.transpose() * bf);
    out.x2 = project_so(ae.transpose() * g0.holonomy.transpose() * mbf);
    out.w = out.x1.transpose() * out.x2;
    out.f = so_distance(out.x1, out.x2);
    return out;
}

namespace {

std::vector<Vector> icosphere(int level) {
    const Scalar phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Vector> verts;
    auto add = [&](Scalar a, Scalar b, Scalar c) {
        Vector v(3);
        v << a, b, c;
        verts.push_back(v / v.norm());
    };
    add(-1, phi, 0); add(1, phi, 0); add(-1, -phi, 0); add(1, -phi, 0);
    add(0, -1, phi); add(0, 1, phi); add(0, -1, -phi); add(0, 1, -phi);
    add(phi, 0, -1); add(phi, 0, 1); add(-phi, 0, -1); add(-phi, 0, 1);
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int i, int j) {
            auto key = std::minmax(i, j);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            Vector v = verts[i] + verts[j];
            verts.push_back(v / v.norm());
            int idx = int(verts.size()) - 1;
            mid[key] = idx;
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        for (auto& f : faces) {
            int a = midpoint(f[0], f[1]);
            int b = midpoint(f[1], f[2]);
            int c = midpoint(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = next;
    }
    return verts;
}

}  // namespace

SphereMesh sphere_mesh(int m, int resolution, std::uint64_t seed) {
    SphereMesh mesh;
    if (m == 2) {
        int count = std::max(8, 8 * resolution);
        mesh.points.resize(2, count);
        mesh.weights = Vector::Constant(count, 2.0 * kPi / count);
        for (int k = 0; k < count; ++k) {
            Scalar th = 2.0 * kPi * k / count;
            mesh.points.col(k) << std::cos(th), std::sin(th);
        }
        return mesh;
    }
    if (m == 3) {
        auto verts = icosphere(std::max(1, resolution));
        mesh.points.resize(3, int(verts.size()));
        for (size_t k = 0; k < verts.size(); ++k) mesh.points.col(int(k)) = verts[k];
        mesh.weights = Vector::Constant(int(verts.size()),
                                        4.0 * kPi / Scalar(verts.size()));
        return mesh;
    }
    // higher fibers: seeded uniform points, equal weights
    Rng rng(seed);
    int count = std::max(64, 50 * resolution * resolution);
    mesh.points.resize(m, count);
    for (int k = 0; k < count; ++k) mesh.points.col(k) = rng.unit_sphere(m);
    Scalar area = 2.0 * std::pow(kPi, m / 2.0) / std::tgamma(m / 2.0);
    mesh.weights = Vector::Constant(count, area / count);
    return mesh;
}

FiberDensity fiber_density(const GoodRegionSpec& spec, const NormalFiberPoint& v,
                           int mesh_resolution, int samples,
                           std::uint64_t seed) {
    const int m = spec.g0.fiber_dim();
    if (spec.delta <= 8.0 * spec.eps / 9.0 - 1e-12 ||
        spec.delta >= 7.0 * spec.eps / 6.0 + 1e-12)
        throw Error("BadParameter", "delta outside the bound regime window");

    // The integrand is supported in a cap of radius below (eps + 2 delta)
    // around v, so the quadrature concentrates there: concentric rings with
    // the exact sin-theta weights (a graded angular grid for circle fibers,
    // seeded points in the cap above dimension three).
    Scalar theta_max =
        std::min(0.5 * kPi, 1.3 * (spec.eps + 2.0 * spec.delta));
    SphereMesh mesh;
    Matrix basis = complete_orthonormal(v.w);
    if (m == 3) {
        int rings = std::max(12, 10 * mesh_resolution);
        int az = std::max(16, 12 * mesh_resolution);
        mesh.points.resize(3, rings * az);
        mesh.weights.resize(rings * az);
        Scalar dth = theta_max / rings;
        int k = 0;
        for (int i = 0; i < rings; ++i) {
            Scalar th = (i + 0.5) * dth;
            for (int j = 0; j < az; ++j) {
                Scalar ph = 2.0 * kPi * (j + 0.5) / az;
                Vector p = std::cos(th) * v.w +
                           std::sin(th) * (std::cos(ph) * basis.col(1) +
                                           std::sin(ph) * basis.col(2));
                mesh.points.col(k) = p;
                mesh.weights[k] = std::sin(th) * dth * (2.0 * kPi / az);
                ++k;
            }
        }
    } else if (m == 2) {
        int count = std::max(32, 24 * mesh_resolution);
        mesh.points.resize(2, count);
        mesh.weights = Vector::Constant(count, 2.0 * theta_max / count);
        for (int k = 0; k < count; ++k) {
            Scalar th = -theta_max + 2.0 * theta_max * (k + 0.5) / count;
            mesh.points.col(k) =
                std::cos(th) * v.w + std::sin(th) * basis.col(1);
        }
    } else {
        // seeded cap sampling with equal weights
        Rng capr(seed ^ 0xcab);
        int count = std::max(256, 128 * mesh_resolution);
        mesh.points.resize(m, count);
        Scalar cos_cap = std::cos(theta_max);
        Scalar cap_area = 0;  // integrate the zone area numerically
        {
            const int grid = 512;
            for (int i = 0; i < grid; ++i) {
                Scalar th = theta_max * (i + 0.5) / grid;
                cap_area += std::pow(std::sin(th), m - 2) * (theta_max / grid);
            }
            Scalar shell = 2.0 * std::pow(kPi, (m - 1) / 2.0) /
                           std::tgamma((m - 1) / 2.0);
            cap_area *= shell;
        }
        mesh.weights = Vector::Constant(count, cap_area / count);
        for (int k = 0; k < count; ++k) {
            Scalar z = 1.0 - capr.uniform() * (1.0 - cos_cap);
            Vector t = capr.gaussian(m);
            t -= t.dot(v.w) * v.w;
            t /= std::max(t.norm(), 1e-300);
            mesh.points.col(k) =
                z * v.w + std::sqrt(std::max(0.0, 1.0 - z * z)) * t;
        }
    }

    // one shared sample pool inside the delta-ball: every draw is effective
    // and cell-to-cell errors correlate, which keeps ratio estimates stable
    Rng rng(seed);
    std::vector<Matrix> pool;
    pool.reserve(samples);
    if (m == 3) {
        for (int i = 0; i < samples; ++i)
            pool.push_back(so3_ball_uniform(spec.delta, rng));
    } else {
        // Haar rejection into the ball
        long budget = 400L * samples;
        while (int(pool.size()) < samples && budget-- > 0) {
            Matrix g = haar_so(m, rng);
            if (so_distance_to_identity(g) < spec.delta) pool.push_back(g);
        }
        if (pool.empty()) throw Error("Numeric", "ball pool came up empty");
    }
    Scalar ball_vol = (m == 3) ? so3_ball_volume(spec.delta)
                               : so_volume(m) * euclidean_ball_volume((m * (m - 1)) / 2) *
                                     std::pow(spec.delta, (m * (m - 1)) / 2);

    FiberDensity out;
    Scalar total_p = 0;
    for (int k = 0; k < mesh.points.cols(); ++k) {
        Vector y = mesh.points.col(k);
        Scalar alpha = sphere_distance(y, v.w);
        Vector b = 2.0 * std::cos(alpha) * v.w - y;
        b /= b.norm();
        MonodromyPairData mp = monodromy_pair(spec.g0, y, b);
        if (mp.f >= 2.0 * spec.delta) continue;  // disjoint balls
        long hits = 0;
        for (const Matrix& g : pool)
            if (so_distance(mp.w, g) < spec.delta) ++hits;
        Scalar p = Scalar(hits) / Scalar(pool.size());
        out.shat_volume += mesh.weights[k] * ball_vol * p;
        total_p += p;
    }
    out.shat_stderr = ball_vol * std::sqrt(std::max(total_p, 1.0 / samples) /
                                           Scalar(pool.size())) *
                      mesh.weights.maxCoeff();

    Scalar l0 = spec.g0.length;
    out.density = out.shat_volume * hat_diamond_area(spec.R, spec.eps, l0);
    Scalar slack = std::exp(-spec.R);
    out.density_lower =
        out.shat_volume * hat_diamond_area(spec.R, spec.eps - slack, l0);
    out.density_upper =
        out.shat_volume * hat_diamond_area(spec.R, spec.eps + slack, l0);
    return out;
}

DensityGrid estimated_measure(const GoodRegionSpec& spec, int s_bins,
                              int mesh_resolution, int samples,
                              std::uint64_t seed) {
    const int m = spec.g0.fiber_dim();
    DensityGrid grid;
    grid.fiber = sphere_mesh(m, mesh_resolution, seed ^ 0xfee1);
    for (int i = 0; i < s_bins; ++i)
        grid.s_centers.push_back(spec.g0.length * (i + 0.5) / s_bins);
    grid.values.resize(s_bins, grid.fiber.points.cols());

    grid.max_density = 0;
    grid.min_density = std::numeric_limits<Scalar>::max();
    for (int i = 0; i < s_bins; ++i)
        for (int j = 0; j < grid.fiber.points.cols(); ++j) {
            NormalFiberPoint v{grid.s_centers[i], grid.fiber.points.col(j)};
            FiberDensity fd = fiber_density(spec, v, mesh_resolution, samples,
                                            seed + 977 * j);
            grid.values(i, j) = fd.density;
            grid.max_density = std::max(grid.max_density, fd.density);
            grid.min_density = std::min(grid.min_density, fd.density);
        }
    grid.ratio = grid.max_density / std::max(grid.min_density, 1e-300);

    // centralizer residual: translation along the geodesic plus the
    // fiberwise antipodal map
    Scalar res = 0;
    for (int j = 0; j < std::min<int>(grid.fiber.points.cols(), 16); ++j) {
        NormalFiberPoint v{grid.s_centers[0], grid.fiber.points.col(j)};
        NormalFiberPoint tv = transport_by(spec.g0, v, 1.0);
        tv.w = -tv.w;
        Scalar d0 = fiber_density(spec, v, mesh_resolution, samples, seed + 31 * j)
                        .density;
        Scalar d1 = fiber_density(spec, tv, mesh_resolution, samples, seed + 31 * j)
                        .density;
        res = std::max(res, std::abs(d0 - d1) /
                                std::max(grid.max_density, 1e-300));
    }
    grid.invariance_residual = res;
    return grid;
}

namespace {

// Frame rewrites of a putative third connection developed at the first
// footpoint (the analysis recomputes the words; here only the rewrites and
// length estimates are needed, so this stays allocation-light).
void connection_rewrites(const GoodRegionSpec& spec, const InvariantPoint& pt,
                         Matrix& x1, Matrix& x2, Scalar& len1, Scalar& len2) {
    const Scalar L = spec.g0.length;
    Scalar d1 = pt.v.s - pt.u.s;
    d1 -= L * std::floor(d1 / L);
    Scalar d2 = L - d1;
    const Scalar two_ln2 = 2.0 * std::log(2.0);
    len1 = d1 + pt.l - two_ln2;
    len2 = d2 + pt.l - two_ln2;
    Vector vw = pt.v.w;
    if (pt.u.s + d1 >= L) vw = spec.g0.holonomy.transpose() * vw;
    MonodromyPairData mp = monodromy_pair(spec.g0, pt.u.w, Vector(-vw));
    x1 = mp.x1;
    x2 = mp.x2;
}

}  // namespace

bool region_membership_estimate(const GoodRegionSpec& spec,
                                const InvariantPoint& pt, Scalar delta) {
    Matrix x1, x2;
    Scalar len1, len2;
    connection_rewrites(spec, pt, x1, x2, len1, len2);
    if (std::abs(len1 - 2.0 * spec.R) >= 2.0 * spec.eps) return false;
    if (std::abs(len2 - 2.0 * spec.R) >= 2.0 * spec.eps) return false;
    Matrix phi_y = phi_conj(pt.lambda_eta);
    return so_distance(phi_y, x1) < delta && so_distance(phi_y, x2) < delta;
}

bool region_membership_actual(const GoodRegionSpec& spec,
                              const InvariantPoint& pt) {
    const int n = spec.g0.fiber_dim() + 1;
    ThirdConnectionData tc;
    try {
        tc = third_connection_analysis(spec.g0, pt.u, pt.v, pt.l,
                                       pt.lambda_eta, n);
    } catch (const Error&) {
        return false;
    }
    try {
        auto i1 = axis_invariants(tc.deck_cuff1);
        auto i2 = axis_invariants(tc.deck_cuff2);
        if (std::abs(i1.t - 2.0 * spec.R) >= 2.0 * spec.eps) return false;
        if (std::abs(i2.t - 2.0 * spec.R) >= 2.0 * spec.eps) return false;
        if (so_distance_to_identity(i1.m_class) >= spec.eps) return false;
        if (so_distance_to_identity(i2.m_class) >= spec.eps) return false;
    } catch (const Error&) {
        return false;
    }
    return true;
}

std::vector<InvariantPoint> sample_good_region(const GoodRegionSpec& spec,
                                               int count, std::uint64_t seed,
                                               Scalar* acceptance_rate) {
    const int m = spec.g0.fiber_dim();
    const Scalar L = spec.g0.length;
    const Scalar two_ln2 = 2.0 * std::log(2.0);
    Rng rng(seed);

    // stratified proposals: positions and window coordinates from the exact
    // product law; the far foot within the dominating cap, the framed
    // monodromy within the dominating ball. Points outside those sets have
    // zero acceptance, so the restricted law is unchanged.
    const Scalar cap = std::min(2.5 * spec.eps + 2.0 * spec.delta, kPi / 2);
    // connection lengths center on 2R + 2 ln 2 - L/2; the e^{2l} thinning
    // normalizes against the top of that window
    const Scalar lmax =
        2.0 * spec.R + two_ln2 - 0.5 * L + 2.0 * spec.eps;

    std::vector<InvariantPoint> out;
    long trials = 0;
    const long max_trials = std::max<long>(1000000, 4000L * count);
    while (int(out.size()) < count && trials < max_trials) {
        ++trials;
        InvariantPoint pt;
        pt.u.s = rng.uniform(0.0, L);
        pt.u.w = rng.unit_sphere(m);
        Scalar t1 = rng.uniform(-2.0 * spec.eps, 2.0 * spec.eps);
        Scalar t2 = rng.uniform(-2.0 * spec.eps, 2.0 * spec.eps);
        Scalar d1 = 0.5 * (L + t1 - t2);
        pt.l = 2.0 * spec.R + two_ln2 + 0.5 * (t1 + t2) - 0.5 * L;
        if (pt.l <= two_ln2) continue;
        if (rng.uniform() > std::exp(2.0 * (pt.l - lmax))) continue;

        // far foot uniform in the dominating cap around the transported foot
        Vector center = parallel_transport(spec.g0, pt.u.s, pt.u.s + d1, pt.u.w);
        Scalar cos_cap = std::cos(cap);
        Scalar z = 1.0 - rng.uniform() * (1.0 - cos_cap);
        Vector tangent = rng.gaussian(m);
        tangent -= tangent.dot(center) * center;
        tangent /= std::max(tangent.norm(), 1e-300);
        Vector w = z * center + std::sqrt(std::max(0.0, 1.0 - z * z)) * tangent;
        pt.v = canonical_point(spec.g0, pt.u.s + d1, w);

        // framed monodromy in the dominating ball about phi^{-1}(X1)
        Matrix x1, x2;
        Scalar len1, len2;
        connection_rewrites(spec, pt, x1, x2, len1, len2);
        Matrix g = (m == 3) ? so3_ball_uniform(spec.delta, rng)
                            : haar_so(m, rng);
        pt.lambda_eta = phi_conj(Matrix(x1 * g));
        if (!region_membership_estimate(spec, pt, spec.delta)) continue;
        out.push_back(pt);
    }
    if (acceptance_rate)
        *acceptance_rate = Scalar(out.size()) / Scalar(std::max<long>(trials, 1));
    if (int(out.size()) < count)
        throw Error("AcceptanceTooLow", "good-region sampler starved");
    return out;
}

CountingReport counting_inequality_check(
    const DensityGrid& grid, const ModelClosedGeodesic& g0,
    const std::vector<NormalFiberPoint>& points,
    const std::vector<std::vector<int>>& cell_sets, Scalar zeta, Scalar eps,
    Scalar big_l) {
    const int sb = int(grid.s_centers.size());
    const int fb = int(grid.fiber.points.cols());
    const int cells = sb * fb;
    Scalar ds = g0.length / sb;

    auto center_of = [&](int c) -> NormalFiberPoint {
        return {grid.s_centers[c / fb], grid.fiber.points.col(c % fb)};
    };
    auto cell_measure = [&](int c) {
        return grid.values(c / fb, c % fb) * ds * grid.fiber.weights[c % fb];
    };
    // pairwise cell distances for dilations
    Matrix dist(cells, cells);
    for (int a = 0; a < cells; ++a)
        for (int b = a; b < cells; ++b) {
            Scalar d = bundle_distance(g0, center_of(a), center_of(b));
            dist(a, b) = d;
            dist(b, a) = d;
        }
    auto measure_dilated = [&](const std::vector<int>& set, Scalar radius) {
        Scalar total = 0;
        for (int c = 0; c < cells; ++c) {
            Scalar best = std::numeric_limits<Scalar>::max();
            for (int s : set) best = std::min(best, dist(c, s));
            if (best <= radius) total += cell_measure(c);
        }
        return total;
    };
    auto count_points = [&](const std::vector<int>& set) {
        long cnt = 0;
        for (const auto& p : points) {
            int nearest = 0;
            Scalar best = std::numeric_limits<Scalar>::max();
            for (int c = 0; c < cells; ++c) {
                Scalar d = bundle_distance(g0, p, center_of(c));
                if (d < best) {
                    best = d;
                    nearest = c;
                }
            }
            if (std::find(set.begin(), set.end(), nearest) != set.end()) ++cnt;
        }
        return cnt;
    };

    CountingReport rep;
    rep.c_min = 0;
    rep.c_max = std::numeric_limits<Scalar>::max();
    for (const auto& set : cell_sets) {
        long nu = count_points(set);
        if (nu == 0) continue;
        // inner dilation: complement of the zeta-neighborhood of the complement
        std::vector<int> complement;
        for (int c = 0; c < cells; ++c)
            if (std::find(set.begin(), set.end(), c) == set.end())
                complement.push_back(c);
        Scalar outer = measure_dilated(set, zeta);
        Scalar inner = 0;
        for (int c = 0; c < cells; ++c) {
            Scalar best = std::numeric_limits<Scalar>::max();
            for (int s : complement) best = std::min(best, dist(c, s));
            if (best > zeta) inner += cell_measure(c);
        }
        Scalar lower = (1.0 - big_l * zeta / eps) * inner / nu;
        Scalar upper = (1.0 + big_l * zeta / eps) * outer / nu;
        rep.c_min = std::max(rep.c_min, lower);
        rep.c_max = std::min(rep.c_max, upper);
        ++rep.sets_checked;
    }
    rep.feasible = rep.sets_checked > 0 && rep.c_min <= rep.c_max;
    return rep;
}

}  // namespace pants
