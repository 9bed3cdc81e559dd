#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "goodpants/io.hpp"
#include "test_util.hpp"

using namespace pants;

TEST_CASE("matrix and word round trips") {
    Rng rng(3);
    const int n = 4;
    GroupElement g = testutil::random_near_identity(rng, n, 0.6) * flow(0.9, n);
    Matrix back = matrix_from_json(matrix_to_json(g));
    CHECK((back - g).cwiseAbs().maxCoeff() == 0.0);

    Word w{Instruction::frame_flow(1.25), Instruction::rotation2(0.5),
           Instruction::rewrite_frame(haar_so(n, rng)),
           Instruction::perturb(testutil::random_near_identity(rng, n, 0.01))};
    Word back_w = word_from_json(word_to_json(w));
    CHECK((evaluate(back_w, n) - evaluate(w, n)).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(word_from_json(Json::parse("[{\"type\":\"warp\"}]")), Error);
}

TEST_CASE("presentation round trip") {
    PantsPresentation p = build_perfect_pants(4, 6.0);
    Json j = presentation_to_json(p);
    PantsPresentation q = presentation_from_json(j);
    CHECK(q.n == p.n);
    CHECK(q.provenance == p.provenance);
    for (int i = 0; i < 3; ++i)
        CHECK((q.connections[i] - p.connections[i]).cwiseAbs().maxCoeff() == 0.0);

    Json broken = j;
    broken["connections"] = Json::array();
    CHECK_THROWS_AS(presentation_from_json(broken), Error);
}

TEST_CASE("atlas jsonl round trip") {
    Rng rng(7);
    ModelClosedGeodesic g0{16.0, haar_so(3, rng)};
    FootAtlas atlas = synthesize_quasi_uniform(g0, 24, 0.01, 5);
    std::string text = atlas_to_jsonl(atlas);
    FootAtlas back = atlas_from_jsonl(text);
    REQUIRE(back.entries.size() == atlas.entries.size());
    CHECK(back.g0.length == atlas.g0.length);
    for (size_t i = 0; i < atlas.entries.size(); ++i) {
        CHECK(back.entries[i].pants_id == atlas.entries[i].pants_id);
        CHECK(back.entries[i].orientation == atlas.entries[i].orientation);
        CHECK(bundle_distance(g0, back.entries[i].foot, atlas.entries[i].foot) <
              1e-12);
    }
    CHECK_THROWS_AS(atlas_from_jsonl(""), Error);
}

TEST_CASE("plots and grids produce well-formed output") {
    Rng rng(9);
    ModelClosedGeodesic g0{16.0, Matrix::Identity(3, 3)};
    FootAtlas atlas = synthesize_ice_cap(g0, 6, 2, 0.2, 3);
    std::string svg = svg_atlas_scatter(atlas);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 8);

    GoodRegionSpec spec;
    spec.R = 8.0;
    spec.eps = 0.1;
    spec.delta = 0.1;
    spec.g0 = g0;
    DensityGrid grid = estimated_measure(spec, 2, 1, 400, 3);
    std::string csv = density_grid_to_csv(grid);
    CHECK(csv.rfind("s,w0,w1,w2,density", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          1 + grid.fiber.points.cols() * 2);
    CHECK(svg_density_heatmap(grid).find("</svg>") != std::string::npos);

    SteinerGraph sg = steiner_minimize(build_perfect_pants(4, 6.0));
    CHECK(svg_steiner_schematic(sg).find("theta graph") != std::string::npos);
}
