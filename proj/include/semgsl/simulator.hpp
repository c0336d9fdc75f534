#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <semgsl/belief.hpp>
#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/estimation.hpp>
#include <semgsl/grid.hpp>
#include <semgsl/infogain.hpp>
#include <semgsl/olfaction.hpp>
#include <semgsl/ontology.hpp>
#include <semgsl/rng.hpp>

namespace semgsl {

/// Steady uniform wind; direction is where the wind blows towards.
struct WindField {
    double direction = 0.0; // radians
    double speed = 0.0;     // m/s
};

struct CameraModel {
    double fov_angle = std::numbers::pi / 2.0; // full sector width, radians
    double range = 2.5;                        // metres
};

/// A complete simulated world: the map with its ground-truth classes, the
/// gas release, the sensor models and the experiment script.
struct Scenario {
    std::string name;
    Grid2D grid;                  // 2D base grid (occupancy included)
    std::size_t layers = 1;       // vertical layers; sites = layers * cells
    std::vector<ClassId> truth;   // true class per site, layer-major
    std::vector<RoomId> room_map; // room per 2D cell; empty = no room labels
    CellId source_cell{0};
    GasId gas{0};
    GasClassBelief gas_belief;    // what the gas classifier reports
    WindField wind;
    ConfusionMatrix detector;
    CameraModel camera;
    HitModelParams hit_model;
    std::size_t step_budget = 0;
    double declare_threshold = 0.5;
    std::uint64_t default_seed = 1;
    std::vector<std::array<double, 2>> waypoints; // scripted route, metres

    std::size_t site_count() const { return layers * grid.cell_count(); }
    bool has_rooms() const { return !room_map.empty(); }
    VoxelGrid voxel_grid() const { return VoxelGrid(grid, layers); }
};

/// What the robot runs and how evidence is combined into the posterior the
/// search acts on. The mode changes only that combination step, never the
/// simulated world or the measurement stream, so arms are comparable
/// seed-for-seed.
enum class Mode {
    Olfaction,     // act on the olfactory term alone
    Semantic,      // fuse olfaction with semantics under global priors
    SemanticRooms, // fuse olfaction with semantics under room priors
};

enum class Strategy {
    Scripted, // follow the scenario waypoints
    InfoGain, // greedy one-step information-gain planning
};

inline const char* to_string(Mode m) {
    switch (m) {
    case Mode::Olfaction: return "olfaction";
    case Mode::Semantic: return "semantic";
    case Mode::SemanticRooms: return "semantic+rooms";
    }
    return "?";
}

inline const char* to_string(Strategy s) {
    switch (s) {
    case Strategy::Scripted: return "scripted";
    case Strategy::InfoGain: return "infogain";
    }
    return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
    if (s == "olfaction") return Mode::Olfaction;
    if (s == "semantic") return Mode::Semantic;
    if (s == "semantic+rooms" || s == "semantic_rooms") return Mode::SemanticRooms;
    return std::nullopt;
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
    if (s == "scripted") return Strategy::Scripted;
    if (s == "infogain") return Strategy::InfoGain;
    return std::nullopt;
}

/// Throws ConfigError when a scenario is not internally consistent with the
/// ontology it is to be simulated against.
inline void check_scenario(const Scenario& scn, const Ontology& ontology) {
    auto fail = [&](const std::string& what) {
        throw ConfigError("scenario '" + scn.name + "': " + what);
    };
    if (scn.layers == 0) fail("needs at least one layer");
    if (scn.truth.size() != scn.site_count()) fail("ground truth must cover every site");
    for (ClassId c : scn.truth)
        if (c.value >= ontology.class_count()) fail("ground truth names an unknown class");
    if (!scn.room_map.empty()) {
        if (scn.room_map.size() != scn.grid.cell_count()) fail("room map must cover every cell");
        for (RoomId r : scn.room_map)
            if (r.value >= ontology.room_count()) fail("room map names an unknown room");
    }
    if (!scn.grid.in_bounds(scn.source_cell) || !scn.grid.is_free(scn.source_cell))
        fail("source cell must be a free cell");
    if (scn.gas.value >= ontology.gas_count()) fail("gas type is not in the ontology");
    if (scn.gas_belief.size() != ontology.gas_count())
        fail("gas belief must cover every gas type");
    bool emitting = false;
    for (std::size_t layer = 0; layer < scn.layers; ++layer) {
        const ClassId cls = scn.truth[layer * scn.grid.cell_count() + scn.source_cell.value];
        if (ontology.emission_prob(cls, scn.gas) > 0.0) emitting = true;
    }
    if (!emitting) fail("the source cell holds nothing that emits the scenario gas");
    if (std::isnan(scn.wind.speed) || scn.wind.speed < 0.0) fail("wind speed must be >= 0");
    if (scn.detector.size() != ontology.class_count())
        fail("detector matrix size must match the class count");
    if (!(scn.camera.fov_angle > 0.0) || scn.camera.fov_angle > 2.0 * std::numbers::pi + 1e-12)
        fail("camera field of view must lie in (0, 2*pi]");
    if (!(scn.camera.range > 0.0)) fail("camera range must be positive");
    scn.hit_model.check();
    if (!(scn.declare_threshold > 0.0 && scn.declare_threshold <= 1.0))
        fail("declaration threshold must lie in (0, 1]");
    if (scn.waypoints.empty()) fail("needs at least one waypoint");
    for (const auto& [x, y] : scn.waypoints) {
        if (!scn.grid.contains(x, y)) fail("waypoint outside the grid");
        if (!scn.grid.is_free(scn.grid.cell_at(x, y))) fail("waypoint on an occupied cell");
    }
}

/// Draws one hit/no-hit reading at (x, y) from the plume model around the
/// true source, wind attached.
inline HitReading sample_hit(const Scenario& scn, double x, double y, Rng& rng) {
    const double lambda = hit_likelihood(scn.grid, scn.source_cell, x, y, scn.wind.direction,
                                         scn.wind.speed, scn.hit_model);
    return {rng.bernoulli(lambda), scn.wind.direction, scn.wind.speed};
}

/// Simulates the camera at `pose`: every visible cell yields one noisy
/// class detection per layer (cells ascending, layers ascending, so the
/// random stream is reproducible). Each detection is returned as the
/// likelihood vector it contributes to the belief.
inline std::vector<SemanticObservation> observe(const Scenario& scn, const Pose& pose, Rng& rng) {
    std::vector<SemanticObservation> out;
    const std::size_t cells = scn.grid.cell_count();
    for (CellId c : visible_cells(pose, scn.grid)) {
        for (std::size_t layer = 0; layer < scn.layers; ++layer) {
            const std::size_t site = layer * cells + c.value;
            const ClassId true_cls = scn.truth[site];
            const std::size_t detected = rng.pick(scn.detector.row(true_cls));
            out.push_back({site, scn.detector.column(ClassId{detected})});
        }
    }
    return out;
}

/// Expands the waypoint route into one pose per step: cell-centre positions
/// stepping one cell at a time (the longer axis first), heading along the
/// active leg, camera parameters attached.
inline std::vector<Pose> scripted_path(const Scenario& scn) {
    const Grid2D& g = scn.grid;
    if (scn.waypoints.empty())
        throw ConfigError("scripted_path: scenario has no waypoints");

    std::vector<Pose> path;
    CellId cur = g.cell_at(scn.waypoints[0][0], scn.waypoints[0][1]);
    double heading = 0.0;
    if (scn.waypoints.size() > 1)
        heading = std::atan2(scn.waypoints[1][1] - scn.waypoints[0][1],
                             scn.waypoints[1][0] - scn.waypoints[0][0]);
    auto push = [&](CellId c) {
        auto [x, y] = g.center(c);
        path.push_back({x, y, heading, scn.camera.fov_angle, scn.camera.range});
    };
    push(cur);

    for (std::size_t leg = 0; leg + 1 < scn.waypoints.size(); ++leg) {
        const auto& a = scn.waypoints[leg];
        const auto& b = scn.waypoints[leg + 1];
        const CellId target = g.cell_at(b[0], b[1]);
        if (b[0] != a[0] || b[1] != a[1]) heading = std::atan2(b[1] - a[1], b[0] - a[0]);
        while (cur != target) {
            auto [cx, cy] = g.coords(cur);
            auto [tx, ty] = g.coords(target);
            const auto dx = static_cast<std::ptrdiff_t>(tx) - static_cast<std::ptrdiff_t>(cx);
            const auto dy = static_cast<std::ptrdiff_t>(ty) - static_cast<std::ptrdiff_t>(cy);
            std::size_t nx = cx, ny = cy;
            if (std::abs(dx) >= std::abs(dy) && dx != 0) nx = cx + (dx > 0 ? 1 : -1);
            else ny = cy + (dy > 0 ? 1 : -1);
            cur = g.cell_id(nx, ny);
            if (!g.is_free(cur))
                throw ConfigError("scripted_path: route crosses an occupied cell");
            push(cur);
        }
    }
    return path;
}

struct StepMetrics {
    std::size_t step = 0;
    double x = 0.0, y = 0.0;    // robot position, metres
    double error_m = 0.0;       // |expected location - true source|
    double std_m = 0.0;         // spread of the posterior
    double entropy_bits = 0.0;  // entropy of the posterior
};

struct PlannerTraceRow {
    std::size_t step = 0;
    std::size_t candidate_index = 0;
    double phi_semantic = 0.0;
    double phi_olfactory = 0.0;
    double total = 0.0;
    bool chosen = false;
};

struct RunOptions {
    Mode mode = Mode::Semantic;
    Strategy strategy = Strategy::Scripted;
    std::uint64_t seed = 1;
    EntropyBaseline baseline = EntropyBaseline::Fused;
    /// Called after every recorded step with the current posterior.
    std::function<void(std::size_t step, const SourceDist&)> on_step;
};

struct RunResult {
    std::vector<StepMetrics> metrics;      // one row per step, step 0 = prior state
    std::vector<PlannerTraceRow> trace;    // empty unless planning was used
    SourceDist fused;                      // final cell-level posterior
    SourceDist olfaction;                  // final olfactory term
    SemanticBelief belief;                 // final semantic belief
    bool declared = false;
    CellId declared_cell{0};
    std::size_t steps_taken = 0;
    std::vector<std::string> diagnostics;  // e.g. fusion fallbacks
};

/// Runs one complete simulated search. Step 0 records the prior state; each
/// later step moves the robot, feeds both estimators, and re-fuses. The run
/// ends when the posterior's largest cell probability crosses the
/// declaration threshold or the step budget is spent. The mode only selects
/// how the posterior is assembled, so different modes replay the exact same
/// measurement stream for a given seed.
inline RunResult run(const Scenario& scn, const Ontology& ontology, const RunOptions& opt) {
    check_scenario(scn, ontology);
    if (opt.strategy == Strategy::InfoGain && scn.layers > 1)
        throw ConfigError("run: information-gain planning needs a single-layer scenario");

    Rng rng(opt.seed);
    HitMapEstimator olf(scn.grid, scn.hit_model);
    const std::vector<RoomId>* rooms =
        (opt.mode == Mode::SemanticRooms && scn.has_rooms()) ? &scn.room_map : nullptr;
    SemanticBelief belief = scn.layers > 1 ? SemanticBelief::init(scn.voxel_grid(), ontology, rooms)
                                           : SemanticBelief::init(scn.grid, ontology, rooms);

    const std::vector<Pose> path = scripted_path(scn);
    Pose pose = path.front();
    const auto [src_x, src_y] = scn.grid.center(scn.source_cell);

    std::vector<StepMetrics> metrics;
    std::vector<PlannerTraceRow> trace;
    std::vector<std::string> diagnostics;

    auto assemble = [&](std::size_t step) -> SourceDist {
        SourceDist o = olf.current();
        if (opt.mode == Mode::Olfaction) return o;
        try {
            SourceDist s = normalize(semantic_scores(belief, ontology, scn.gas_belief));
            if (scn.layers > 1) s = aggregate_columns(s, scn.voxel_grid());
            return fuse(o, s);
        } catch (const AllZeroError&) {
            diagnostics.push_back("step " + std::to_string(step) +
                                  ": semantic and olfactory supports are disjoint; "
                                  "keeping the olfactory term");
            return o;
        }
    };

    auto plan = [&](std::size_t step) -> Pose {
        const Grid2D& g = scn.grid;
        const CellId cur = g.cell_at(pose.x, pose.y);
        auto [cx, cy] = g.coords(cur);
        std::vector<CellId> cells{cur};
        const std::array<std::array<std::ptrdiff_t, 2>, 4> moves{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        for (const auto& [mx, my] : moves) {
            const auto nx = static_cast<std::ptrdiff_t>(cx) + mx;
            const auto ny = static_cast<std::ptrdiff_t>(cy) + my;
            if (nx < 0 || ny < 0 || static_cast<std::size_t>(nx) >= g.width() ||
                static_cast<std::size_t>(ny) >= g.height())
                continue;
            const CellId n = g.cell_id(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
            if (g.is_free(n)) cells.push_back(n);
        }
        const std::array<double, 4> headings{0.0, std::numbers::pi / 2.0, std::numbers::pi,
                                             -std::numbers::pi / 2.0};
        std::vector<Pose> cands;
        for (CellId c : cells) {
            auto [x, y] = g.center(c);
            for (double h : headings)
                cands.push_back({x, y, h, scn.camera.fov_angle, scn.camera.range});
        }

        const SourceDist o = olf.current();
        std::vector<GainReport> reports(cands.size());
        if (opt.mode == Mode::Olfaction) {
            // This arm carries no semantic knowledge: plan on gas gain alone.
            for (std::size_t i = 0; i < cands.size(); ++i) {
                reports[i].phi_olfactory = std::max(0.0, olf.expected_gain(cands[i]));
                reports[i].total = reports[i].phi_olfactory;
            }
        } else {
            const GainContext ctx =
                make_gain_context(belief, ontology, scn.gas_belief, &o, opt.baseline);
            for (std::size_t i = 0; i < cands.size(); ++i)
                reports[i] = score_pose(ctx, cands[i],
                                        [&](const Pose& p) { return olf.expected_gain(p); });
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < cands.size(); ++i)
            if (reports[i].total > reports[best].total) best = i;
        for (std::size_t i = 0; i < cands.size(); ++i)
            trace.push_back({step, i, reports[i].phi_semantic, reports[i].phi_olfactory,
                             reports[i].total, i == best});
        return cands[best];
    };

    bool declared = false;
    CellId declared_cell{0};
    std::size_t t = 0;
    std::optional<SourceDist> fused;
    while (true) {
        if (t > 0) {
            pose = opt.strategy == Strategy::Scripted
                       ? path[std::min<std::size_t>(t, path.size() - 1)]
                       : plan(t);
            const HitReading reading = sample_hit(scn, pose.x, pose.y, rng);
            olf.update(pose.x, pose.y, reading);
            for (const SemanticObservation& obs : observe(scn, pose, rng)) belief.update(obs);
        }
        fused = assemble(t);
        const LocationEstimate loc = expected_location(*fused, scn.grid);
        metrics.push_back({t, pose.x, pose.y, std::hypot(loc.x - src_x, loc.y - src_y), loc.std_m,
                           entropy(*fused)});
        if (opt.on_step) opt.on_step(t, *fused);
        if (fused->max() > scn.declare_threshold) {
            declared = true;
            declared_cell = CellId{fused->argmax()};
            break;
        }
        if (t == scn.step_budget) break;
        ++t;
    }

    return RunResult{std::move(metrics),  std::move(trace),    std::move(*fused),
                     olf.current(),       std::move(belief),   declared,
                     declared_cell,       t,                   std::move(diagnostics)};
}

} // namespace semgsl
