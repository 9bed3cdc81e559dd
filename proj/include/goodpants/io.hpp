#pragma once

// Serialization: group elements as row-major float64 arrays in JSON, words
// as tagged instruction arrays, presentations and atlases, CSV density
// grids, and small SVG plots.

#include "goodpants/matching.hpp"
#include "goodpants/words.hpp"

#include <json.hpp>

#include <string>

namespace pants {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json word_to_json(const Word& w);
Word word_from_json(const Json& j);

Json presentation_to_json(const PantsPresentation& p);
PantsPresentation presentation_from_json(const Json& j);

Json classification_to_json(const Classification& c);
Json steiner_to_json(const SteinerGraph& sg);

// Atlas files are JSON lines: a header object carrying the model data, then
// one object per entry {pants_id, orientation, s, fiber}.
std::string atlas_to_jsonl(const FootAtlas& atlas);
FootAtlas atlas_from_jsonl(const std::string& text);

std::string density_grid_to_csv(const DensityGrid& grid);

// Minimal plots: fiber scatter in latitude/longitude coordinates and a
// density heat map over one fiber sphere.
std::string svg_atlas_scatter(const FootAtlas& atlas);
std::string svg_density_heatmap(const DensityGrid& grid);
std::string svg_steiner_schematic(const SteinerGraph& sg);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace pants
