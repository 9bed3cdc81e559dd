#include "goodpants/io.hpp"

#include <fstream>
#include <sstream>

namespace pants {

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    const int rows = int(j.size());
    const int cols = rows ? int(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<Scalar>();
    return m;
}

Json word_to_json(const Word& w) {
    Json arr = Json::array();
    for (const Instruction& ins : w) {
        Json item;
        switch (ins.kind) {
            case Instruction::Kind::FrameFlow:
                item = {{"type", "flow"}, {"t", ins.value}};
                break;
            case Instruction::Kind::Rotation2:
                item = {{"type", "rot2"}, {"theta", ins.value}};
                break;
            case Instruction::Kind::Rewrite:
                item = {{"type", "rewrite"}, {"matrix", matrix_to_json(ins.payload)}};
                break;
            case Instruction::Kind::Perturb:
                item = {{"type", "perturb"}, {"matrix", matrix_to_json(ins.payload)}};
                break;
        }
        arr.push_back(item);
    }
    return arr;
}

Word word_from_json(const Json& j) {
    Word w;
    for (const Json& item : j) {
        std::string type = item.at("type").get<std::string>();
        if (type == "flow")
            w.push_back(Instruction::frame_flow(item.at("t").get<Scalar>()));
        else if (type == "rot2")
            w.push_back(Instruction::rotation2(item.at("theta").get<Scalar>()));
        else if (type == "rewrite")
            w.push_back(
                Instruction::rewrite_frame(matrix_from_json(item.at("matrix"))));
        else if (type == "perturb")
            w.push_back(Instruction::perturb(matrix_from_json(item.at("matrix"))));
        else
            throw Error("BadInput", "unknown instruction type: " + type);
    }
    return w;
}

namespace {

const char* provenance_name(PantsPresentation::Provenance p) {
    switch (p) {
        case PantsPresentation::Provenance::SyntheticGood: return "synthetic-good";
        case PantsPresentation::Provenance::SyntheticBad: return "synthetic-bad";
        case PantsPresentation::Provenance::Perturbed: return "perturbed";
        default: return "external";
    }
}

PantsPresentation::Provenance provenance_from(const std::string& s) {
    if (s == "synthetic-good") return PantsPresentation::Provenance::SyntheticGood;
    if (s == "synthetic-bad") return PantsPresentation::Provenance::SyntheticBad;
    if (s == "perturbed") return PantsPresentation::Provenance::Perturbed;
    return PantsPresentation::Provenance::External;
}

}  // namespace

Json presentation_to_json(const PantsPresentation& p) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["n"] = p.n;
    j["provenance"] = provenance_name(p.provenance);
    j["connections"] = Json::array();
    for (const GroupElement& g : p.connections)
        j["connections"].push_back(matrix_to_json(g));
    return j;
}

PantsPresentation presentation_from_json(const Json& j) {
    PantsPresentation p;
    p.n = j.at("n").get<int>();
    p.provenance = provenance_from(j.value("provenance", "external"));
    const Json& conns = j.at("connections");
    if (conns.size() != 3)
        throw Error("BadInput", "a presentation needs three connections");
    for (int i = 0; i < 3; ++i) {
        p.connections[i] = matrix_from_json(conns[i]);
        check_group_element(p.connections[i], 1e-6);
    }
    return p;
}

Json classification_to_json(const Classification& c) {
    Json j;
    j["schema"] = kSchemaVersion;
    switch (c.verdict) {
        case Verdict::Good: j["verdict"] = "good"; break;
        case Verdict::Bad: j["verdict"] = "bad"; break;
        case Verdict::NotCuffGood: j["verdict"] = "not-cuff-good"; break;
        default: j["verdict"] = "unresolved";
    }
    j["certificate"] = c.certificate;
    j["threshold"] = c.threshold;
    j["cuff_lengths"] = c.cuffs.lengths;
    Json monos = Json::array();
    for (const Matrix& m : c.cuffs.monodromies)
        monos.push_back(so_distance_to_identity(m));
    j["cuff_monodromy_distances"] = monos;
    if (!c.diagnostics.empty()) j["diagnostics"] = c.diagnostics;
    return j;
}

Json steiner_to_json(const SteinerGraph& sg) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["total_length"] = sg.total;
    j["lengths"] = sg.lengths;
    j["angles_x"] = sg.angles_x;
    j["angles_y"] = sg.angles_y;
    j["gradient_norm"] = sg.gradient_norm;
    j["hessian_min_eigenvalue"] = sg.hessian_min_eigen;
    j["seed_spread"] = sg.seed_spread;
    j["degenerate"] = sg.degenerate;
    Json x = Json::array(), y = Json::array();
    for (int i = 0; i < sg.x.size(); ++i) x.push_back(sg.x[i]);
    for (int i = 0; i < sg.y.size(); ++i) y.push_back(sg.y[i]);
    j["vertex_x"] = x;
    j["vertex_y"] = y;
    return j;
}

std::string atlas_to_jsonl(const FootAtlas& atlas) {
    std::ostringstream out;
    Json header;
    header["schema"] = kSchemaVersion;
    header["length"] = atlas.g0.length;
    header["holonomy"] = matrix_to_json(atlas.g0.holonomy);
    out << header.dump() << "\n";
    for (const FootEntry& e : atlas.entries) {
        Json line;
        line["pants_id"] = e.pants_id;
        line["orientation"] = e.orientation;
        line["s"] = e.foot.s;
        Json fiber = Json::array();
        for (int i = 0; i < e.foot.w.size(); ++i) fiber.push_back(e.foot.w[i]);
        line["fiber"] = fiber;
        out << line.dump() << "\n";
    }
    return out.str();
}

FootAtlas atlas_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    FootAtlas atlas;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line);
        if (!have_header) {
            atlas.g0.length = j.at("length").get<Scalar>();
            atlas.g0.holonomy = matrix_from_json(j.at("holonomy"));
            have_header = true;
            continue;
        }
        FootEntry e;
        e.pants_id = j.at("pants_id").get<int>();
        e.orientation = j.at("orientation").get<int>();
        const Json& fiber = j.at("fiber");
        Vector w(fiber.size());
        for (size_t i = 0; i < fiber.size(); ++i) w[int(i)] = fiber[i].get<Scalar>();
        e.foot = canonical_point(atlas.g0, j.at("s").get<Scalar>(), w);
        atlas.entries.push_back(e);
    }
    if (!have_header) throw Error("NoInput", "atlas stream had no header line");
    return atlas;
}

std::string density_grid_to_csv(const DensityGrid& grid) {
    std::ostringstream out;
    out << "s";
    for (int c = 0; c < grid.fiber.points.rows(); ++c) out << ",w" << c;
    out << ",density\n";
    out.precision(17);
    for (size_t i = 0; i < grid.s_centers.size(); ++i)
        for (int j = 0; j < grid.fiber.points.cols(); ++j) {
            out << grid.s_centers[i];
            for (int c = 0; c < grid.fiber.points.rows(); ++c)
                out << "," << grid.fiber.points(c, j);
            out << "," << grid.values(int(i), j) << "\n";
        }
    return out.str();
}

namespace {

// latitude/longitude chart of a fiber vector relative to the first axis
std::pair<Scalar, Scalar> chart(const Vector& w) {
    Scalar lat = std::acos(std::clamp(w[0], -1.0, 1.0));
    Scalar lon = (w.size() >= 3) ? std::atan2(w[2], w[1]) : 0.0;
    return {lat, lon};
}

}  // namespace

std::string svg_atlas_scatter(const FootAtlas& atlas) {
    const int width = 640, height = 320;
    std::ostringstream out;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
        << "' height='" << height << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    for (const FootEntry& e : atlas.entries) {
        auto [lat, lon] = chart(e.foot.w);
        Scalar x = (lon + kPi) / (2.0 * kPi) * width;
        Scalar y = lat / kPi * height;
        const char* color = e.orientation >= 0 ? "#1f77b4" : "#d62728";
        out << "<circle cx='" << x << "' cy='" << y << "' r='3' fill='" << color
            << "' fill-opacity='0.7'/>\n";
    }
    out << "<text x='8' y='16' font-size='12'>latitude vs longitude of fiber "
           "feet (blue +, red -)</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string svg_density_heatmap(const DensityGrid& grid) {
    const int width = 640, height = 320;
    std::ostringstream out;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
        << "' height='" << height << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    Scalar lo = grid.min_density, hi = std::max(grid.max_density, lo + 1e-300);
    for (int j = 0; j < grid.fiber.points.cols(); ++j) {
        auto [lat, lon] = chart(grid.fiber.points.col(j));
        Scalar x = (lon + kPi) / (2.0 * kPi) * width;
        Scalar y = lat / kPi * height;
        Scalar t = (grid.values(0, j) - lo) / (hi - lo);
        int red = int(255 * t), blue = int(255 * (1 - t));
        out << "<circle cx='" << x << "' cy='" << y << "' r='6' fill='rgb(" << red
            << ",60," << blue << ")'/>\n";
    }
    out << "<text x='8' y='16' font-size='12'>fiber density (red high, blue "
           "low); ratio "
        << grid.ratio << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string svg_steiner_schematic(const SteinerGraph& sg) {
    const int width = 420, height = 300;
    std::ostringstream out;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
        << "' height='" << height << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    // theta schematic with the measured edge lengths as labels
    Scalar xl = 90, xr = 330, ym = 150;
    out << "<circle cx='" << xl << "' cy='" << ym << "' r='5' fill='black'/>\n";
    out << "<circle cx='" << xr << "' cy='" << ym << "' r='5' fill='black'/>\n";
    const char* paths[3] = {
        "M 90 150 C 170 40, 250 40, 330 150",
        "M 90 150 L 330 150",
        "M 90 150 C 170 260, 250 260, 330 150"};
    Scalar label_y[3] = {60, 140, 245};
    for (int i = 0; i < 3; ++i) {
        out << "<path d='" << paths[i]
            << "' stroke='#1f77b4' fill='none' stroke-width='2'/>\n";
        out << "<text x='195' y='" << label_y[i] << "' font-size='12'>"
            << sg.lengths[i] << "</text>\n";
    }
    out << "<text x='8' y='16' font-size='12'>theta graph, total "
        << sg.total << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("Io", "cannot open for writing: " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("Io", "cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pants
