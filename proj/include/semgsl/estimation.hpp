#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <semgsl/belief.hpp>
#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/grid.hpp>
#include <semgsl/ontology.hpp>

namespace semgsl {

/// Probability of holding the gas source, over the sites of a grid (cells
/// or voxels). Occupied sites always carry zero mass.
using SourceDist = Categorical;

/// Belief over gas types, e.g. from a gas classifier reading.
using GasClassBelief = Categorical;

namespace detail {

/// Source score of one site given its class probabilities:
///
///   sum_gas w_gas * sum_class probs[class] / prior[class] * emission[gas][class]
///
/// Summation order is fixed (gases outer, classes inner, both ascending) so
/// repeated evaluation is bit-identical; gases with zero weight are skipped,
/// which keeps a point-mass gas belief bitwise equal to the single-gas path.
inline double site_score_from_probs(std::span<const double> probs, const Categorical& prior,
                                    const Ontology& ontology, const GasClassBelief& gas_belief) {
    double acc = 0.0;
    for (std::size_t g = 0; g < gas_belief.size(); ++g) {
        const double wg = gas_belief[g];
        if (wg == 0.0) continue;
        const Categorical& emission = ontology.emission_row(GasId{g});
        double inner = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i)
            inner += probs[i] / std::max(prior[i], kPriorFloor) * emission[i];
        acc += wg * inner;
    }
    return acc;
}

} // namespace detail

/// Unnormalized source scores, one per site. Marginalizing the joint over
/// all class maps factorizes into this per-site sum, so the whole vector
/// costs O(sites * classes * gases) instead of an exponential enumeration.
/// Each site's score depends only on that site's belief; occupied sites
/// score zero.
inline std::vector<double> semantic_scores(const SemanticBelief& belief, const Ontology& ontology,
                                           const GasClassBelief& gas_belief) {
    if (belief.class_count() != ontology.class_count())
        throw DomainMismatchError("semantic_scores: belief and ontology disagree on classes");
    if (gas_belief.size() != ontology.gas_count())
        throw DomainMismatchError("semantic_scores: gas belief size != gas count");
    std::vector<double> out(belief.site_count(), 0.0);
    std::vector<double> probs(belief.class_count());
    for (std::size_t site = 0; site < belief.site_count(); ++site) {
        if (!belief.site_is_free(site)) continue;
        detail::softmax_into(belief.log_weights(site), probs);
        out[site] =
            detail::site_score_from_probs(probs, belief.init_prior(site), ontology, gas_belief);
    }
    return out;
}

inline std::vector<double> semantic_scores(const SemanticBelief& belief, const Ontology& ontology,
                                           GasId gas) {
    if (gas.value >= ontology.gas_count())
        throw OutOfBoundsError("semantic_scores: gas id outside ontology");
    return semantic_scores(belief, ontology,
                           Categorical::point_mass(ontology.gas_count(), gas.value));
}

/// Source distribution for a known gas type.
inline SourceDist semantic_source(const SemanticBelief& belief, const Ontology& ontology,
                                  GasId gas) {
    return normalize(semantic_scores(belief, ontology, gas));
}

/// Source distribution under an uncertain gas type: per-gas scores weighted
/// by the gas belief. With a point-mass gas belief this reduces bitwise to
/// semantic_source.
inline SourceDist semantic_source_mixture(const SemanticBelief& belief, const Ontology& ontology,
                                          const GasClassBelief& gas_belief) {
    return normalize(semantic_scores(belief, ontology, gas_belief));
}

/// Collapses a voxel source distribution onto the 2D base grid by summing
/// each vertical column (ascending layer order, no renormalization), so the
/// mass of a column is preserved exactly.
inline SourceDist aggregate_columns(const SourceDist& voxel_dist, const VoxelGrid& grid) {
    if (voxel_dist.size() != grid.voxel_count())
        throw DomainMismatchError("aggregate_columns: distribution size != voxel count");
    const std::size_t cells = grid.base().cell_count();
    std::vector<double> out(cells, 0.0);
    for (std::size_t layer = 0; layer < grid.layers(); ++layer)
        for (std::size_t c = 0; c < cells; ++c)
            out[c] += voxel_dist[layer * cells + c];
    return normalize(std::move(out));
}

/// Fuses two source distributions over the same sites by elementwise
/// product and renormalization. Throws AllZeroError when the supports are
/// disjoint.
inline SourceDist fuse(const SourceDist& a, const SourceDist& b) {
    if (a.size() != b.size())
        throw DomainMismatchError("fuse: distributions cover different site counts");
    std::vector<double> w(a.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a[i] * b[i];
    return normalize(std::move(w));
}

/// Probability-weighted mean position and spread of a cell distribution.
struct LocationEstimate {
    double x = 0.0;
    double y = 0.0;
    double std_m = 0.0;
};

inline LocationEstimate expected_location(const SourceDist& dist, const Grid2D& grid) {
    if (dist.size() != grid.cell_count())
        throw DomainMismatchError("expected_location: distribution size != cell count");
    double mx = 0.0, my = 0.0;
    for (std::size_t c = 0; c < dist.size(); ++c) {
        auto [cx, cy] = grid.center(CellId{c});
        mx += dist[c] * cx;
        my += dist[c] * cy;
    }
    double var = 0.0;
    for (std::size_t c = 0; c < dist.size(); ++c) {
        auto [cx, cy] = grid.center(CellId{c});
        var += dist[c] * ((cx - mx) * (cx - mx) + (cy - my) * (cy - my));
    }
    return {mx, my, std::sqrt(std::max(0.0, var))};
}

} // namespace semgsl
