#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <semgsl/belief.hpp>
#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/estimation.hpp>
#include <semgsl/grid.hpp>
#include <semgsl/ontology.hpp>

namespace semgsl {

/// Sensor placement: position and heading in metres/radians plus the field
/// of view of the camera (full sector width, max range).
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double fov_angle = 2.0 * std::numbers::pi;
    double fov_range = 1.0;
};

/// True when every cell strictly between the two points is free. Uses exact
/// grid traversal of the segment; the endpoint cells themselves are never
/// required to be free.
inline bool line_of_sight(const Grid2D& grid, double x0, double y0, double x1, double y1) {
    const CellId a = grid.cell_at(x0, y0);
    const CellId b = grid.cell_at(x1, y1);
    if (a == b) return true;
    auto [bx, by] = grid.coords(b);
    auto [axu, ayu] = grid.coords(a);
    auto ix = static_cast<std::ptrdiff_t>(axu);
    auto iy = static_cast<std::ptrdiff_t>(ayu);
    const auto tx = static_cast<std::ptrdiff_t>(bx);
    const auto ty = static_cast<std::ptrdiff_t>(by);

    const double s = grid.cell_size();
    const double dx = x1 - x0, dy = y1 - y0;
    const std::ptrdiff_t step_x = dx > 0 ? 1 : -1;
    const std::ptrdiff_t step_y = dy > 0 ? 1 : -1;
    constexpr double inf = std::numeric_limits<double>::infinity();
    double t_max_x = inf, t_delta_x = inf;
    double t_max_y = inf, t_delta_y = inf;
    if (dx != 0.0) {
        const double edge = (dx > 0 ? (static_cast<double>(ix) + 1.0) * s : static_cast<double>(ix) * s);
        t_max_x = (edge - x0) / dx;
        t_delta_x = s / std::abs(dx);
    }
    if (dy != 0.0) {
        const double edge = (dy > 0 ? (static_cast<double>(iy) + 1.0) * s : static_cast<double>(iy) * s);
        t_max_y = (edge - y0) / dy;
        t_delta_y = s / std::abs(dy);
    }

    const std::size_t max_steps = grid.width() + grid.height() + 4;
    for (std::size_t n = 0; n < max_steps; ++n) {
        if (t_max_x < t_max_y) {
            ix += step_x;
            t_max_x += t_delta_x;
        } else {
            iy += step_y;
            t_max_y += t_delta_y;
        }
        if (ix == tx && iy == ty) return true;
        if (ix < 0 || iy < 0 || static_cast<std::size_t>(ix) >= grid.width() ||
            static_cast<std::size_t>(iy) >= grid.height())
            return false;
        if (!grid.is_free(grid.cell_id(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy))))
            return false;
    }
    return false;
}

/// Cells a camera at `pose` can observe: cell centres within range and
/// inside the angular sector, with no occupied cell strictly between the
/// sensor and the centre. Result is sorted ascending by cell id.
inline std::vector<CellId> visible_cells(const Pose& pose, const Grid2D& grid) {
    if (!grid.contains(pose.x, pose.y))
        throw OutOfBoundsError("visible_cells: pose outside grid");
    if (std::isnan(pose.fov_angle) || pose.fov_angle <= 0.0 ||
        pose.fov_angle > 2.0 * std::numbers::pi + 1e-12)
        throw Error("visible_cells: field-of-view angle outside (0, 2*pi]");
    if (std::isnan(pose.fov_range) || pose.fov_range <= 0.0 || !std::isfinite(pose.fov_range))
        throw Error("visible_cells: field-of-view range must be positive");

    std::vector<CellId> out;
    const double half_angle = pose.fov_angle / 2.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        auto [cx, cy] = grid.center(CellId{c});
        const double dx = cx - pose.x, dy = cy - pose.y;
        const double d = std::hypot(dx, dy);
        if (d > pose.fov_range) continue;
        if (d > 0.0) {
            const double off = wrap_pi(std::atan2(dy, dx) - pose.heading);
            if (std::abs(off) > half_angle + 1e-12) continue;
        }
        if (!line_of_sight(grid, pose.x, pose.y, cx, cy)) continue;
        out.push_back(CellId{c});
    }
    return out;
}

/// Which posterior the planner scores information against.
enum class EntropyBaseline {
    Fused,        // semantic and olfactory evidence combined (default)
    SemanticOnly, // the semantic term alone
};

/// Immutable snapshot of everything candidate scoring needs. Scoring is
/// pure over the snapshot: evaluating candidates in any order (or
/// concurrently) produces identical numbers. The referenced belief and
/// ontology must outlive the context.
struct GainContext {
    const SemanticBelief* belief = nullptr;
    const Ontology* ontology = nullptr;
    GasClassBelief gas_belief = Categorical::point_mass(1, 0);
    std::vector<double> olfaction; // per-cell weights; all ones when absent
    std::vector<double> scores;    // unnormalized semantic score per cell
    // Posterior whose entropy the planner reduces; placeholder until built.
    Categorical fused = Categorical::point_mass(1, 0);
    double current_entropy = 0.0;
};

/// Builds a scoring snapshot. `olfaction` may be null (or the baseline may
/// be SemanticOnly); either way the olfactory factor is uninformative and
/// the scored posterior is the semantic term alone. When the two factors
/// have disjoint supports the snapshot falls back to the olfactory factor,
/// mirroring the fusion fallback of the simulation loop.
inline GainContext make_gain_context(const SemanticBelief& belief, const Ontology& ontology,
                                     GasClassBelief gas_belief, const SourceDist* olfaction,
                                     EntropyBaseline baseline = EntropyBaseline::Fused) {
    if (belief.voxel_backed())
        throw DomainMismatchError("make_gain_context: candidate scoring needs a 2D belief");
    GainContext ctx;
    ctx.belief = &belief;
    ctx.ontology = &ontology;
    ctx.gas_belief = std::move(gas_belief);
    ctx.scores = semantic_scores(belief, ontology, ctx.gas_belief);
    if (olfaction != nullptr && baseline == EntropyBaseline::Fused) {
        if (olfaction->size() != belief.site_count())
            throw DomainMismatchError("make_gain_context: olfaction size != cell count");
        ctx.olfaction = olfaction->probs();
    } else {
        ctx.olfaction.assign(belief.site_count(), 1.0);
    }
    std::vector<double> w(ctx.scores.size());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = ctx.olfaction[c] * ctx.scores[c];
    try {
        ctx.fused = normalize(std::move(w));
    } catch (const AllZeroError&) {
        ctx.fused = normalize(ctx.olfaction);
    }
    ctx.current_entropy = entropy(ctx.fused);
    return ctx;
}

/// Mutual information I(source ; class of `cell`) in bits: how much the
/// source posterior is expected to sharpen if the cell's class were read
/// off perfectly. Computed by replaying the posterior with the cell's
/// score recomputed under each hypothetical class; only that one score
/// changes, so a query costs O(cells * classes).
inline double mutual_info_cell(const GainContext& ctx, CellId cell) {
    const SemanticBelief& belief = *ctx.belief;
    if (cell.value >= belief.site_count())
        throw OutOfBoundsError("mutual_info_cell: cell outside grid");
    const std::size_t n = cell.value;
    const Categorical dist = belief.site_dist(n);

    std::vector<double> onehot(belief.class_count(), 0.0);
    double expected = 0.0;
    for (std::size_t i = 0; i < belief.class_count(); ++i) {
        const double w = dist[i];
        if (w == 0.0) continue;
        onehot[i] = 1.0;
        const double hscore =
            belief.site_is_free(n)
                ? detail::site_score_from_probs(onehot, belief.init_prior(n), *ctx.ontology,
                                                ctx.gas_belief)
                : 0.0;
        onehot[i] = 0.0;
        std::vector<double> weights(ctx.scores.size());
        for (std::size_t c = 0; c < weights.size(); ++c)
            weights[c] = ctx.olfaction[c] * (c == n ? hscore : ctx.scores[c]);
        double h;
        try {
            h = entropy(normalize(std::move(weights)));
        } catch (const AllZeroError&) {
            h = ctx.current_entropy; // contradictory hypothetical: no change
        }
        expected += w * h;
    }
    return std::max(0.0, ctx.current_entropy - expected);
}

/// Semantic gain of a pose: summed mutual information of every cell the
/// camera would observe from it.
inline double semantic_gain(const GainContext& ctx, const Pose& pose) {
    double phi = 0.0;
    for (CellId c : visible_cells(pose, ctx.belief->base_grid())) phi += mutual_info_cell(ctx, c);
    return phi;
}

/// Per-candidate utility breakdown; total is always the sum of the parts.
struct GainReport {
    double phi_semantic = 0.0;
    double phi_olfactory = 0.0;
    double total = 0.0;
};

using OlfactoryGainFn = std::function<double(const Pose&)>;

/// Scores one candidate pose: semantic gain plus whatever the olfactory
/// gain provider reports (absent provider contributes zero; negative
/// reports clamp to zero so utilities stay non-negative).
inline GainReport score_pose(const GainContext& ctx, const Pose& pose,
                             const OlfactoryGainFn& olfactory_gain = {}) {
    GainReport r;
    r.phi_semantic = semantic_gain(ctx, pose);
    r.phi_olfactory = olfactory_gain ? std::max(0.0, olfactory_gain(pose)) : 0.0;
    r.total = r.phi_semantic + r.phi_olfactory;
    return r;
}

/// Index of the highest-total candidate; ties resolve to the lowest index,
/// so the choice is invariant under positive rescaling of all scores.
inline std::size_t best_pose_index(std::span<const Pose> candidates, const GainContext& ctx,
                                   const OlfactoryGainFn& olfactory_gain = {}) {
    if (candidates.empty())
        throw EmptyCandidatesError("best_pose_index: no candidate poses");
    std::size_t best = 0;
    double best_total = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double total = score_pose(ctx, candidates[i], olfactory_gain).total;
        if (total > best_total) {
            best_total = total;
            best = i;
        }
    }
    return best;
}

/// Greedy one-step planner: the candidate with the highest combined gain.
inline Pose plan_next_pose(std::span<const Pose> candidates, const GainContext& ctx,
                           const OlfactoryGainFn& olfactory_gain = {}) {
    return candidates[best_pose_index(candidates, ctx, olfactory_gain)];
}

} // namespace semgsl
