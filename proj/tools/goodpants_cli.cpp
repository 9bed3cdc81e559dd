// Command line front end: synthesize and classify pants, run the identity
// suites, estimate foot measures, match atlases, and assemble surfaces.

#include "goodpants/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace pants;

#ifndef GOODPANTS_VERSION
#define GOODPANTS_VERSION "unknown"
#endif

namespace {

std::string out_path(const std::string& path) {
    const char* base = std::getenv("GOODPANTS_OUT");
    if (!base || path.empty() || path.front() == '/') return path;
    return std::string(base) + "/" + path;
}

void emit(const Json& j, const std::string& path) {
    if (path.empty())
        std::cout << j.dump(2) << std::endl;
    else
        write_file(out_path(path), j.dump(2) + "\n");
}

Json config_echo(const Json& extra) {
    Json j = extra;
    j["schema"] = kSchemaVersion;
    j["version"] = GOODPANTS_VERSION;
    return j;
}

void validate_run(int n, Scalar R, Scalar eps) {
    if (n < 2 || n > 8)
        throw Error("BadConfig", "n must lie in [2, 8], got " + std::to_string(n));
    if (R < 4.0 || R > 20.0)
        throw Error("BadConfig", "R must lie in [4, 20], got " + std::to_string(R));
    if (eps <= 0.0 || eps > kPi / 30.0)
        throw Error("BadConfig",
                    "eps must lie in (0, pi/30], got " + std::to_string(eps));
}

// --- verify-lemma ------------------------------------------------------------

Json run_verify(const std::string& lemma, int cases, int n, std::uint64_t seed) {
    Rng rng(seed);
    Json rep = config_echo({{"lemma", lemma}, {"cases", cases}, {"n", n}});
    Scalar worst = 0;
    int failures = 0;

    auto random_near = [&](Scalar scale) {
        int mdim = (n - 1) * (n - 2) / 2;
        Matrix m = mdim ? skew_from_coords(rng.gaussian(mdim), n - 1)
                        : Matrix::Zero(n - 1, n - 1);
        Matrix xi = algebra_assemble(rng.normal(), m, rng.gaussian(n - 1),
                                     rng.gaussian(n - 1));
        Scalar norm = algebra_norm(xi, n);
        if (norm > 0) xi *= scale * rng.uniform() / norm;
        return matrix_exp(xi);
    };

    for (int i = 0; i < cases; ++i) {
        try {
            if (lemma == "nan") {
                GroupElement u = random_near(0.05);
                NanFactors f = nan_decompose(u);
                worst = std::max(worst, (f.nplus * f.b * f.nminus - u)
                                            .cwiseAbs()
                                            .maxCoeff());
            } else if (lemma == "horospherical") {
                Scalar t = rng.uniform(0.1, 3.0);
                Matrix m = haar_so(n - 1, rng);
                Vector x = rng.gaussian(n - 1);
                Vector x1 = conjugate_horospherical(t, m, x, +1);
                GroupElement b = flow(t, n) * m_embed(m, n);
                Scalar res = (b * exp_n(x, +1, n) - exp_n(x1, +1, n) * b)
                                 .cwiseAbs()
                                 .maxCoeff();
                worst = std::max(worst, res);
                worst = std::max(worst, std::abs(x1.norm() / x.norm() -
                                                 std::exp(-t)));
            } else if (lemma == "absorb") {
                Scalar t = rng.uniform(8.0, 15.0);
                Matrix m = haar_so(n - 1, rng);
                GroupElement u = random_near(0.01);
                auto a = absorb_perturbation(t, m, u);
                auto s = axis_invariants(flow(t, n) * m_embed(m, n) * u);
                worst = std::max(worst, std::abs(a.t - s.t));
                worst = std::max(
                    worst, monodromy_angle_distance(a.m_class, s.m_class) * 0.01);
            } else if (lemma == "eight-word") {
                Scalar t1 = rng.uniform(8.5, 13.0), t2 = rng.uniform(8.5, 13.0);
                Matrix m1 = haar_so(n - 1, rng), m2 = haar_so(n - 1, rng);
                GroupElement u1 = random_near(0.01), v1 = random_near(0.01);
                GroupElement u2 = random_near(0.01), v2 = random_near(0.01);
                auto a = close_eight_word(t1, u1, m1, v1, t2, u2, m2, v2);
                auto s = axis_invariants(flow(t1, n) * u1 * m_embed(m1, n) * v1 *
                                         flow(t2, n) * u2 * m_embed(m2, n) * v2);
                worst = std::max(worst, std::abs(a.t - s.t));
            } else if (lemma == "broken") {
                Scalar l1 = rng.uniform(6.0, 12.0), l2 = rng.uniform(6.0, 12.0);
                ClosedBrokenReport cb =
                    closed_broken_length(l1, l2, n);
                Scalar cap = kClosedBrokenC * std::exp(-std::min(l1, l2));
                if (cb.defect >= cap) ++failures;
                worst = std::max(worst, cb.defect / cap);
            } else {
                throw Error("BadConfig", "unknown lemma suite: " + lemma);
            }
        } catch (const Error& e) {
            ++failures;
            rep["last_error"] = e.what();
        }
    }
    Scalar tol = (lemma == "nan") ? 1e-10 : (lemma == "broken") ? 1.0 : 1e-9;
    rep["max_residual"] = worst;
    rep["tolerance"] = tol;
    rep["failures"] = failures;
    rep["pass"] = failures == 0 && worst < tol;
    return rep;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "desk-scale workbench for hyperbolic pants: frame calculus, Steiner "
        "graphs, good/bad classification, foot measures, and Hall matching"};
    app.require_subcommand(1);

    // verify-lemma
    auto* verify = app.add_subcommand("verify-lemma", "randomized identity suites");
    std::string lemma = "nan";
    int cases = 1000, vn = 4;
    std::uint64_t vseed = 1;
    std::string vout;
    verify->add_option("--lemma", lemma,
                       "nan | horospherical | absorb | eight-word | broken");
    verify->add_option("--cases", cases);
    verify->add_option("--n", vn);
    verify->add_option("--seed", vseed);
    verify->add_option("--out", vout);

    // steiner
    auto* steiner = app.add_subcommand("steiner", "minimize a theta graph");
    std::string s_input, s_synth = "perfect", s_out, s_svg;
    int s_n = 4;
    Scalar s_R = 8.0, s_perturb = 0.0;
    std::uint64_t s_seed = 1;
    steiner->add_option("--input", s_input, "presentation JSON file");
    steiner->add_option("--synthetic", s_synth, "perfect | bad");
    steiner->add_option("--n", s_n);
    steiner->add_option("--R", s_R);
    steiner->add_option("--perturb", s_perturb);
    steiner->add_option("--seed", s_seed);
    steiner->add_option("--out", s_out);
    steiner->add_option("--svg", s_svg);

    // classify-pants
    auto* classify_cmd = app.add_subcommand("classify-pants", "good/bad verdicts");
    std::string c_input, c_corpus, c_out;
    int c_n = 4;
    Scalar c_R = 8.0, c_eps = 0.05;
    classify_cmd->add_option("--input", c_input, "presentation JSON file");
    classify_cmd->add_option("--corpus", c_corpus, "JSONL of presentations");
    classify_cmd->add_option("--n", c_n);
    classify_cmd->add_option("--R", c_R);
    classify_cmd->add_option("--eps", c_eps);
    classify_cmd->add_option("--out", c_out);

    // foot-measure
    auto* fm = app.add_subcommand("foot-measure", "estimated average foot measure");
    int f_n = 4, f_grid = 2, f_mesh = 1, f_samples = 4000;
    Scalar f_R = 8.0, f_eps = 0.1, f_delta = 0.1, f_twist = 0.0;
    std::uint64_t f_seed = 1;
    std::string f_csv, f_json, f_svg;
    fm->add_option("--n", f_n);
    fm->add_option("--R", f_R);
    fm->add_option("--eps", f_eps);
    fm->add_option("--delta", f_delta);
    fm->add_option("--grid", f_grid, "bins along the geodesic");
    fm->add_option("--mesh", f_mesh, "fiber grid resolution");
    fm->add_option("--samples", f_samples);
    fm->add_option("--seed", f_seed);
    fm->add_option("--twist", f_twist, "holonomy scale of the model");
    fm->add_option("--out-csv", f_csv);
    fm->add_option("--out-json", f_json);
    fm->add_option("--svg", f_svg);

    // match
    auto* match = app.add_subcommand("match", "Hall matching on a foot atlas");
    std::string m_input, m_mode = "quasi", m_out, m_svg, m_imbalance = "3:1";
    int m_count = 200, m_n = 4;
    Scalar m_R = 10.0, m_xi = -1.0, m_cap = 0.1, m_jitter = -1.0;
    std::uint64_t m_seed = 1;
    bool m_expect_violation = false;
    match->add_option("--input", m_input, "atlas JSONL file");
    match->add_option("--mode", m_mode, "quasi | icecap | bands");
    match->add_option("--count", m_count);
    match->add_option("--n", m_n);
    match->add_option("--R", m_R);
    match->add_option("--xi", m_xi, "matching radius (default R^-2)");
    match->add_option("--imbalance", m_imbalance, "icecap north:south");
    match->add_option("--cap-radius", m_cap);
    match->add_option("--jitter", m_jitter, "pairing jitter (default 0.8 xi)");
    match->add_option("--seed", m_seed);
    match->add_flag("--expect-violation", m_expect_violation);
    match->add_option("--out", m_out);
    match->add_option("--svg", m_svg);

    // assemble
    auto* assemble = app.add_subcommand("assemble", "doubling and surface gluing");
    std::string a_input, a_demo, a_out;
    assemble->add_option("--input", a_input,
                         "JSON {num_pants, curves:[{boundaries, sigma}]}");
    assemble->add_option("--demo", a_demo, "single | corpus");
    assemble->add_option("--out", a_out);

    // report
    auto* report = app.add_subcommand("report", "version and frozen constants");
    std::string r_out;
    report->add_option("--out", r_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            Json rep = run_verify(lemma, cases, vn, vseed);
            emit(rep, vout);
            return rep["pass"].get<bool>() ? 0 : 1;
        }

        if (*steiner) {
            PantsPresentation p;
            if (!s_input.empty()) {
                p = presentation_from_json(Json::parse(read_file(s_input)));
            } else {
                validate_run(s_n, s_R, 0.05);
                p = (s_synth == "bad") ? build_bad_pants(s_n, s_R)
                                       : build_perfect_pants(s_n, s_R);
                if (s_perturb > 0) p = perturb_pants(p, s_perturb, s_seed);
            }
            SteinerGraph sg = steiner_minimize(p);
            Json rep = config_echo({{"command", "steiner"}});
            rep["graph"] = steiner_to_json(sg);
            emit(rep, s_out);
            if (!s_svg.empty()) write_file(out_path(s_svg), svg_steiner_schematic(sg));
            return 0;
        }

        if (*classify_cmd) {
            validate_run(c_n, c_R, c_eps);
            std::vector<PantsPresentation> inputs;
            if (!c_input.empty())
                inputs.push_back(
                    presentation_from_json(Json::parse(read_file(c_input))));
            if (!c_corpus.empty()) {
                std::istringstream in(read_file(c_corpus));
                std::string line;
                while (std::getline(in, line))
                    if (!line.empty())
                        inputs.push_back(presentation_from_json(Json::parse(line)));
            }
            if (inputs.empty()) throw Error("NoInput", "no presentations given");
            Json rep = config_echo(
                {{"command", "classify-pants"}, {"R", c_R}, {"eps", c_eps}});
            rep["verdicts"] = Json::array();
            for (const PantsPresentation& p : inputs)
                rep["verdicts"].push_back(
                    classification_to_json(classify(p, c_R, c_eps)));
            emit(rep, c_out);
            return 0;
        }

        if (*fm) {
            validate_run(f_n, f_R, f_eps);
            GoodRegionSpec spec;
            spec.R = f_R;
            spec.eps = f_eps;
            spec.delta = f_delta;
            Rng trng(f_seed + 99);
            int mdim = (f_n - 1) * (f_n - 2) / 2;
            Matrix hol = Matrix::Identity(f_n - 1, f_n - 1);
            if (f_twist > 0 && mdim > 0)
                hol = matrix_exp(
                    Matrix(f_twist * skew_from_coords(trng.gaussian(mdim), f_n - 1)));
            spec.g0 = {2.0 * f_R, hol};
            DensityGrid grid =
                estimated_measure(spec, f_grid, f_mesh, f_samples, f_seed);
            Json rep = config_echo({{"command", "foot-measure"},
                                    {"n", f_n},
                                    {"R", f_R},
                                    {"eps", f_eps},
                                    {"delta", f_delta},
                                    {"grid", f_grid},
                                    {"mesh", f_mesh},
                                    {"samples", f_samples},
                                    {"seed", f_seed}});
            rep["max_density"] = grid.max_density;
            rep["min_density"] = grid.min_density;
            rep["quasi_uniformity_ratio"] = grid.ratio;
            rep["invariance_residual"] = grid.invariance_residual;
            if (!f_csv.empty())
                write_file(out_path(f_csv), density_grid_to_csv(grid));
            if (!f_svg.empty())
                write_file(out_path(f_svg), svg_density_heatmap(grid));
            emit(rep, f_json);
            return 0;
        }

        if (*match) {
            if (m_xi <= 0) m_xi = 1.0 / (m_R * m_R);
            if (m_jitter <= 0) m_jitter = 0.8 * m_xi;
            FootAtlas atlas;
            if (!m_input.empty()) {
                atlas = atlas_from_jsonl(read_file(m_input));
            } else {
                ModelClosedGeodesic g0{2.0 * m_R,
                                       Matrix::Identity(m_n - 1, m_n - 1)};
                if (m_mode == "quasi") {
                    atlas = synthesize_quasi_uniform(g0, m_count, m_jitter, m_seed);
                } else if (m_mode == "icecap") {
                    auto colon = m_imbalance.find(':');
                    int north = std::stoi(m_imbalance.substr(0, colon));
                    int south = std::stoi(m_imbalance.substr(colon + 1));
                    atlas = synthesize_ice_cap(g0, north, south, m_cap, m_seed);
                } else if (m_mode == "bands") {
                    atlas = synthesize_bands(g0, {0.5, kPi - 0.5}, {0.25, 0.25},
                                             {(2 * m_count) / 3, m_count / 3},
                                             m_seed);
                } else {
                    throw Error("BadConfig", "unknown mode " + m_mode);
                }
            }
            MatchingResult res = find_matching(atlas, m_xi);
            Json rep = config_echo({{"command", "match"},
                                    {"xi", m_xi},
                                    {"entries", atlas.entries.size()},
                                    {"mode", m_mode},
                                    {"seed", m_seed}});
            rep["perfect"] = res.perfect;
            if (res.perfect) {
                rep["max_displacement"] = res.max_displacement;
                rep["sigma"] = res.sigma;
            } else {
                rep["violator_size"] = res.violator_size;
                rep["violator_neighbors"] = res.violator_neighbors;
                rep["violator"] = res.violator;
            }
            if (!m_svg.empty())
                write_file(out_path(m_svg), svg_atlas_scatter(atlas));
            emit(rep, m_out);
            if (!res.perfect) return m_expect_violation ? 0 : 1;
            return 0;
        }

        if (*assemble) {
            std::map<int, CurveMatching> curves;
            int num_pants = 0;
            if (!a_input.empty()) {
                Json j = Json::parse(read_file(a_input));
                num_pants = j.at("num_pants").get<int>();
                int curve_id = 0;
                for (const Json& c : j.at("curves")) {
                    CurveMatching cm;
                    for (const Json& b : c.at("boundaries"))
                        cm.boundaries.push_back(
                            {b[0].get<int>(), b[1].get<int>()});
                    for (const Json& sv : c.at("sigma"))
                        cm.sigma.push_back(sv.get<int>());
                    curves[c.value("curve", curve_id)] = cm;
                    ++curve_id;
                }
            } else if (a_demo == "single") {
                num_pants = 1;
                for (int cuff = 0; cuff < 3; ++cuff)
                    curves[cuff] = {{{0, cuff}}, {0}};
            } else if (a_demo == "corpus") {
                num_pants = 10;
                for (int cuff = 0; cuff < 3; ++cuff) {
                    CurveMatching cm;
                    for (int p = 0; p < num_pants; ++p)
                        cm.boundaries.push_back({p, cuff});
                    for (int p = 0; p < num_pants; ++p)
                        cm.sigma.push_back((p + 1 + cuff) % num_pants);
                    curves[cuff] = cm;
                }
            } else {
                throw Error("NoInput", "assemble needs --input or --demo");
            }
            SurfaceAssembly s = double_and_assemble(curves, num_pants);
            Json rep = config_echo({{"command", "assemble"}});
            rep["oriented_pants"] = s.oriented_pants;
            rep["components"] = s.components;
            rep["component_chi"] = s.component_chi;
            rep["component_genus"] = s.component_genus;
            rep["total_chi"] = s.total_chi;
            rep["involution_fixed_point_free"] = s.involution_fixed_point_free;
            rep["degrees_ok"] = s.degrees_ok;
            emit(rep, a_out);
            return 0;
        }

        if (*report) {
            Json rep = config_echo({{"command", "report"}});
            rep["constants"] = {{"closed_broken_defect_C", kClosedBrokenC},
                                {"broken_min_length", kBrokenMinLength},
                                {"classifier_slack", kClassifierSlack},
                                {"near_identity_radius", policy().near_identity},
                                {"absorb_flow_min", policy().absorb_flow_min}};
            emit(rep, r_out);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
