#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <semgsl/belief.hpp>
#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/estimation.hpp>
#include <semgsl/grid.hpp>
#include <semgsl/ontology.hpp>
#include <semgsl/simulator.hpp>

namespace semgsl {

namespace detail {

/// Probabilities and metrics are serialized with 17 significant digits so a
/// dump/parse round trip reproduces every double bit-for-bit.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // binary: identical bytes on every platform
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    return in;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError(where + ": cannot parse number '" + s + "'");
    return v;
}

inline std::size_t parse_size(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError(where + ": cannot parse index '" + s + "'");
    return static_cast<std::size_t>(v);
}

inline void expect_header(std::istream& in, const std::string& header, const std::string& where) {
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw ConfigError(where + ": expected header '" + header + "'");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Ontology JSON
// ---------------------------------------------------------------------------

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse JSON in " + path.string() + ": " + e.what());
    }
}

/// Reads the raw tables of an ontology JSON document:
///
///   {"classes": [...], "gases": [...],
///    "class_priors": {class: prob, ...},
///    "emission": {gas: {class: prob, ...}, ...},
///    "room_priors": {room: {class: prob, ...}, ...}}   // optional
///
/// Classes absent from a map default to probability zero; unknown names are
/// rejected. Numbers are passed through unvalidated so that validate() can
/// report violations.
inline OntologyConfig parse_ontology_config(const nlohmann::json& j) {
    try {
        OntologyConfig cfg;
        cfg.classes = j.at("classes").get<std::vector<std::string>>();
        cfg.gases = j.at("gases").get<std::vector<std::string>>();

        auto class_index = [&](const std::string& name,
                               const std::string& where) -> std::size_t {
            for (std::size_t i = 0; i < cfg.classes.size(); ++i)
                if (cfg.classes[i] == name) return i;
            throw ConfigError(where + " names unknown class '" + name + "'");
        };
        auto dist_over_classes = [&](const nlohmann::json& m,
                                     const std::string& where) -> std::vector<double> {
            std::vector<double> v(cfg.classes.size(), 0.0);
            for (const auto& [key, val] : m.items())
                v[class_index(key, where)] = val.get<double>();
            return v;
        };

        cfg.class_priors = dist_over_classes(j.at("class_priors"), "class_priors");

        const auto& emission = j.at("emission");
        for (const auto& gas : cfg.gases) {
            if (!emission.contains(gas))
                throw ConfigError("emission is missing a row for gas '" + gas + "'");
            cfg.emission.push_back(dist_over_classes(emission.at(gas), "emission[" + gas + "]"));
        }

        if (j.contains("room_priors")) {
            // nlohmann objects iterate in key order, so room ids are stable.
            for (const auto& [room, dist] : j.at("room_priors").items()) {
                cfg.rooms.push_back(room);
                cfg.room_priors.push_back(dist_over_classes(dist, "room_priors[" + room + "]"));
            }
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("ontology JSON is malformed: ") + e.what());
    }
}

inline OntologyConfig load_ontology_config(const std::filesystem::path& path) {
    return parse_ontology_config(load_json_file(path));
}

inline Ontology load_ontology(const std::filesystem::path& path) {
    return Ontology::from_config(load_ontology_config(path));
}

// ---------------------------------------------------------------------------
// Scenario JSON
// ---------------------------------------------------------------------------

/// Reads a scenario document. The world is drawn as ASCII rows (row y=0
/// first) whose glyphs the legend maps to ontology classes; extra layer
/// maps stack on top of the base map. See data/ for complete examples.
inline Scenario parse_scenario(const nlohmann::json& j, const Ontology& ontology) {
    try {
        const std::string name = j.value("name", std::string("scenario"));
        auto fail = [&](const std::string& what) -> void {
            throw ConfigError("scenario '" + name + "': " + what);
        };

        const double cell_size = j.at("cell_size_m").get<double>();

        std::map<char, ClassId> legend;
        for (const auto& [glyph, cls] : j.at("legend").items()) {
            if (glyph.size() != 1) fail("legend glyphs must be single characters");
            const auto id = ontology.find_class(cls.get<std::string>());
            if (!id) fail("legend names unknown class '" + cls.get<std::string>() + "'");
            legend[glyph[0]] = *id;
        }

        std::vector<std::vector<std::string>> layer_rows;
        layer_rows.push_back(j.at("map").get<std::vector<std::string>>());
        if (j.contains("map_layers"))
            for (const auto& extra : j.at("map_layers"))
                layer_rows.push_back(extra.get<std::vector<std::string>>());

        const std::size_t height = layer_rows[0].size();
        if (height == 0) fail("map has no rows");
        const std::size_t width = layer_rows[0][0].size();
        if (width == 0) fail("map has no columns");
        for (const auto& rows : layer_rows) {
            if (rows.size() != height) fail("every layer must have the same number of rows");
            for (const auto& row : rows)
                if (row.size() != width) fail("map rows must all have the same length");
        }

        const std::size_t layers = layer_rows.size();
        const std::size_t cells = width * height;
        std::vector<ClassId> truth(layers * cells);
        for (std::size_t layer = 0; layer < layers; ++layer)
            for (std::size_t y = 0; y < height; ++y)
                for (std::size_t x = 0; x < width; ++x) {
                    const char glyph = layer_rows[layer][y][x];
                    const auto it = legend.find(glyph);
                    if (it == legend.end())
                        fail(std::string("map uses glyph '") + glyph + "' missing from the legend");
                    truth[layer * cells + y * width + x] = it->second;
                }

        std::vector<std::uint8_t> free(cells, 1);
        if (j.contains("occupied_classes")) {
            std::vector<std::uint8_t> occupied_class(ontology.class_count(), 0);
            for (const auto& cls : j.at("occupied_classes")) {
                const auto id = ontology.find_class(cls.get<std::string>());
                if (!id) fail("occupied_classes names unknown class '" + cls.get<std::string>() + "'");
                occupied_class[id->value] = 1;
            }
            for (std::size_t c = 0; c < cells; ++c)
                for (std::size_t layer = 0; layer < layers; ++layer)
                    if (occupied_class[truth[layer * cells + c].value]) free[c] = 0;
        }
        Grid2D grid(width, height, cell_size, std::move(free));

        std::vector<RoomId> room_map;
        if (j.contains("rooms")) {
            if (ontology.room_count() == 0)
                fail("names rooms but the ontology has no room priors");
            const auto& rooms = j.at("rooms");
            std::map<char, RoomId> room_legend;
            for (const auto& [glyph, room] : rooms.at("legend").items()) {
                if (glyph.size() != 1) fail("room legend glyphs must be single characters");
                const auto id = ontology.find_room(room.get<std::string>());
                if (!id) fail("room legend names unknown room '" + room.get<std::string>() + "'");
                room_legend[glyph[0]] = *id;
            }
            const auto rows = rooms.at("map").get<std::vector<std::string>>();
            if (rows.size() != height) fail("room map must match the map dimensions");
            room_map.resize(cells);
            for (std::size_t y = 0; y < height; ++y) {
                if (rows[y].size() != width) fail("room map must match the map dimensions");
                for (std::size_t x = 0; x < width; ++x) {
                    const auto it = room_legend.find(rows[y][x]);
                    if (it == room_legend.end())
                        fail("room map uses a glyph missing from the room legend");
                    room_map[y * width + x] = it->second;
                }
            }
        }

        const auto source_xy = j.at("source").get<std::array<std::size_t, 2>>();
        if (source_xy[0] >= width || source_xy[1] >= height) fail("source cell outside the grid");
        const CellId source = grid.cell_id(source_xy[0], source_xy[1]);

        const std::string gas_name = j.at("gas").get<std::string>();
        const auto gas = ontology.find_gas(gas_name);
        if (!gas) fail("gas '" + gas_name + "' is not in the ontology");

        std::vector<double> gas_w(ontology.gas_count(), 0.0);
        if (j.contains("gas_belief")) {
            for (const auto& [g, p] : j.at("gas_belief").items()) {
                const auto id = ontology.find_gas(g);
                if (!id) fail("gas_belief names unknown gas '" + g + "'");
                gas_w[id->value] = p.get<double>();
            }
        } else {
            gas_w[gas->value] = 1.0;
        }
        GasClassBelief gas_belief = [&] {
            try {
                return Categorical(std::move(gas_w));
            } catch (const Error& e) {
                throw ConfigError("scenario '" + name + "': gas_belief: " + e.what());
            }
        }();

        WindField wind;
        if (j.contains("wind")) {
            wind.direction = j.at("wind").value("direction_rad", 0.0);
            wind.speed = j.at("wind").value("speed_mps", 0.0);
        }

        ConfusionMatrix detector = [&] {
            try {
                if (!j.contains("detector")) return ConfusionMatrix::identity(ontology.class_count());
                const auto& d = j.at("detector");
                if (d.contains("matrix"))
                    return ConfusionMatrix(d.at("matrix").get<std::vector<std::vector<double>>>());
                return ConfusionMatrix::uniform_error(ontology.class_count(),
                                                      d.at("accuracy").get<double>());
            } catch (const Error& e) {
                throw ConfigError("scenario '" + name + "': detector: " + e.what());
            }
        }();

        CameraModel camera;
        if (j.contains("camera")) {
            camera.fov_angle = j.at("camera").value("fov_deg", 90.0) * std::numbers::pi / 180.0;
            camera.range = j.at("camera").value("range_m", 2.5);
        }

        HitModelParams hit_model;
        if (j.contains("hit_model")) {
            const auto& h = j.at("hit_model");
            hit_model.p_detect = h.value("p_detect", hit_model.p_detect);
            hit_model.p_false_alarm = h.value("p_false_alarm", hit_model.p_false_alarm);
            hit_model.sigma_r = h.value("sigma_r_m", hit_model.sigma_r);
            hit_model.sigma_theta = h.value("sigma_theta_rad", hit_model.sigma_theta);
        }

        std::vector<std::array<double, 2>> waypoints;
        for (const auto& wp : j.at("path")) waypoints.push_back(wp.get<std::array<double, 2>>());

        return Scenario{name,
                        std::move(grid),
                        layers,
                        std::move(truth),
                        std::move(room_map),
                        source,
                        *gas,
                        std::move(gas_belief),
                        wind,
                        std::move(detector),
                        camera,
                        hit_model,
                        j.at("steps").get<std::size_t>(),
                        j.value("declare_threshold", 0.5),
                        j.value("seed", std::uint64_t{1}),
                        std::move(waypoints)};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario JSON is malformed: ") + e.what());
    }
}

inline Scenario load_scenario(const std::filesystem::path& path, const Ontology& ontology) {
    Scenario scn = parse_scenario(load_json_file(path), ontology);
    check_scenario(scn, ontology);
    return scn;
}

// ---------------------------------------------------------------------------
// CSV dumps
// ---------------------------------------------------------------------------

inline void write_source_csv(const std::filesystem::path& path, const SourceDist& dist) {
    auto out = detail::open_output(path);
    out << "cell,prob\n";
    for (std::size_t c = 0; c < dist.size(); ++c)
        out << c << ',' << detail::format_double(dist[c]) << '\n';
}

inline SourceDist read_source_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    detail::expect_header(in, "cell,prob", path.string());
    std::vector<double> probs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != 2) throw ConfigError(path.string() + ": malformed row '" + line + "'");
        if (detail::parse_size(fields[0], path.string()) != probs.size())
            throw ConfigError(path.string() + ": cell ids must be 0,1,2,... in order");
        probs.push_back(detail::parse_double(fields[1], path.string()));
    }
    try {
        return normalize(std::move(probs));
    } catch (const Error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

inline void write_belief_csv(const std::filesystem::path& path, const SemanticBelief& belief) {
    auto out = detail::open_output(path);
    out << "cell,class,prob\n";
    for (std::size_t site = 0; site < belief.site_count(); ++site) {
        const Categorical dist = belief.site_dist(site);
        for (std::size_t cls = 0; cls < dist.size(); ++cls)
            out << site << ',' << cls << ',' << detail::format_double(dist[cls]) << '\n';
    }
}

/// Parsed belief dump: probs is site-major, [site * classes + class].
struct BeliefDump {
    std::size_t sites = 0;
    std::size_t classes = 0;
    std::vector<double> probs;
};

inline BeliefDump read_belief_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    detail::expect_header(in, "cell,class,prob", path.string());
    std::vector<std::size_t> sites, classes;
    std::vector<double> probs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 3) throw ConfigError(path.string() + ": malformed row '" + line + "'");
        sites.push_back(detail::parse_size(f[0], path.string()));
        classes.push_back(detail::parse_size(f[1], path.string()));
        probs.push_back(detail::parse_double(f[2], path.string()));
    }
    if (probs.empty()) throw ConfigError(path.string() + ": no belief rows");
    std::size_t k = 0;
    while (k < sites.size() && sites[k] == 0) ++k;
    if (k == 0 || probs.size() % k != 0)
        throw ConfigError(path.string() + ": rows do not form a site-by-class table");
    for (std::size_t r = 0; r < probs.size(); ++r)
        if (sites[r] != r / k || classes[r] != r % k)
            throw ConfigError(path.string() + ": rows out of order");
    return {probs.size() / k, k, std::move(probs)};
}

inline void write_metrics_csv(const std::filesystem::path& path,
                              std::span<const StepMetrics> rows) {
    auto out = detail::open_output(path);
    out << "step,x,y,error_m,std_m,entropy_bits\n";
    for (const StepMetrics& r : rows)
        out << r.step << ',' << detail::format_double(r.x) << ',' << detail::format_double(r.y)
            << ',' << detail::format_double(r.error_m) << ',' << detail::format_double(r.std_m)
            << ',' << detail::format_double(r.entropy_bits) << '\n';
}

inline std::vector<StepMetrics> read_metrics_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    detail::expect_header(in, "step,x,y,error_m,std_m,entropy_bits", path.string());
    std::vector<StepMetrics> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 6) throw ConfigError(path.string() + ": malformed row '" + line + "'");
        rows.push_back({detail::parse_size(f[0], path.string()),
                        detail::parse_double(f[1], path.string()),
                        detail::parse_double(f[2], path.string()),
                        detail::parse_double(f[3], path.string()),
                        detail::parse_double(f[4], path.string()),
                        detail::parse_double(f[5], path.string())});
    }
    return rows;
}

inline void write_trace_csv(const std::filesystem::path& path,
                            std::span<const PlannerTraceRow> rows) {
    auto out = detail::open_output(path);
    out << "step,candidate_index,phi_semantic,phi_olfactory,total,chosen\n";
    for (const PlannerTraceRow& r : rows)
        out << r.step << ',' << r.candidate_index << ',' << detail::format_double(r.phi_semantic)
            << ',' << detail::format_double(r.phi_olfactory) << ','
            << detail::format_double(r.total) << ',' << (r.chosen ? 1 : 0) << '\n';
}

inline std::vector<PlannerTraceRow> read_trace_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    detail::expect_header(in, "step,candidate_index,phi_semantic,phi_olfactory,total,chosen",
                          path.string());
    std::vector<PlannerTraceRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 6) throw ConfigError(path.string() + ": malformed row '" + line + "'");
        rows.push_back({detail::parse_size(f[0], path.string()),
                        detail::parse_size(f[1], path.string()),
                        detail::parse_double(f[2], path.string()),
                        detail::parse_double(f[3], path.string()),
                        detail::parse_double(f[4], path.string()),
                        detail::parse_size(f[5], path.string()) != 0});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// PGM heat maps
// ---------------------------------------------------------------------------

/// 8-bit binary PGM of a cell distribution, brightest at the most probable
/// cell: pixel = round(255 * p / p_max).
inline void write_pgm(const std::filesystem::path& path, const SourceDist& dist,
                      const Grid2D& grid) {
    if (dist.size() != grid.cell_count())
        throw DomainMismatchError("write_pgm: distribution size != cell count");
    const double pmax = dist.max();
    auto out = detail::open_output(path);
    out << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
    for (std::size_t c = 0; c < dist.size(); ++c) {
        const double v = pmax > 0.0 ? 255.0 * dist[c] / pmax : 0.0;
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v))));
    }
}

struct PgmImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels; // row-major, row y=0 first
};

inline PgmImage read_pgm(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    auto next_token = [&]() -> std::string {
        std::string tok;
        while (in >> tok) {
            if (tok[0] != '#') return tok;
            std::string rest;
            std::getline(in, rest); // drop the comment line
        }
        throw ConfigError(path.string() + ": truncated PGM header");
    };
    if (next_token() != "P5") throw ConfigError(path.string() + ": not a binary PGM file");
    PgmImage img;
    img.width = detail::parse_size(next_token(), path.string());
    img.height = detail::parse_size(next_token(), path.string());
    if (next_token() != "255") throw ConfigError(path.string() + ": expected 8-bit PGM");
    in.get(); // the single whitespace after the header
    img.pixels.resize(img.width * img.height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.pixels.size())
        throw ConfigError(path.string() + ": truncated PGM pixel data");
    return img;
}

} // namespace semgsl
