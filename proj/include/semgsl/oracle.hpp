#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/estimation.hpp>

namespace semgsl {

/// Largest number of class maps the brute-force routines will enumerate.
inline constexpr std::size_t kMaxEnumeratedMaps = 10'000'000;

/// A complete small inference problem, spelled out as raw tables so the
/// exhaustive routines below depend on nothing but arithmetic. Cells are
/// all considered traversable.
struct JointInstance {
    std::size_t cells = 0;
    std::size_t classes = 0;
    std::vector<std::vector<double>> class_priors;           // [cell][class]
    std::vector<std::vector<double>> emission;               // [gas][class]
    std::vector<double> gas_weights;                         // over gases; {1} when omitted
    std::vector<std::vector<double>> observation_likelihood; // [cell][class]
    std::vector<double> olfaction_likelihood;                // per cell; empty = absent
};

namespace detail {

inline void check_instance(const JointInstance& inst) {
    if (inst.cells == 0 || inst.classes == 0)
        throw Error("JointInstance: needs at least one cell and one class");
    if (inst.class_priors.size() != inst.cells ||
        inst.observation_likelihood.size() != inst.cells)
        throw DomainMismatchError("JointInstance: per-cell tables must have one row per cell");
    for (const auto& row : inst.class_priors)
        if (row.size() != inst.classes)
            throw DomainMismatchError("JointInstance: prior row size != class count");
    for (const auto& row : inst.observation_likelihood)
        if (row.size() != inst.classes)
            throw DomainMismatchError("JointInstance: likelihood row size != class count");
    if (inst.emission.empty()) throw Error("JointInstance: needs at least one emission row");
    for (const auto& row : inst.emission)
        if (row.size() != inst.classes)
            throw DomainMismatchError("JointInstance: emission row size != class count");
    if (!inst.gas_weights.empty() && inst.gas_weights.size() != inst.emission.size())
        throw DomainMismatchError("JointInstance: gas weights size != emission rows");
    if (!inst.olfaction_likelihood.empty() && inst.olfaction_likelihood.size() != inst.cells)
        throw DomainMismatchError("JointInstance: olfaction likelihood size != cell count");

    std::size_t maps = 1;
    for (std::size_t i = 0; i < inst.cells; ++i) {
        if (maps > kMaxEnumeratedMaps / inst.classes)
            throw TooLargeError("JointInstance: class-map enumeration exceeds the budget");
        maps *= inst.classes;
    }
}

/// Walks every class map o in lexicographic order and accumulates, per cell
/// c, the total weight
///
///   p(o) * p(measurements | o) * emission(o_c) / prior_c(o_c) * olfaction_c
///
/// which after normalization is the exact source posterior of the fully
/// enumerated joint model.
inline SourceDist enumerate_posterior(const JointInstance& inst, bool with_olfaction) {
    check_instance(inst);
    const std::size_t n = inst.cells, k = inst.classes;

    std::vector<double> gas_weights = inst.gas_weights;
    if (gas_weights.empty()) {
        if (inst.emission.size() != 1)
            throw DomainMismatchError("JointInstance: gas weights required for several gases");
        gas_weights.assign(1, 1.0);
    }
    std::vector<double> mixed_emission(k, 0.0);
    for (std::size_t g = 0; g < inst.emission.size(); ++g)
        for (std::size_t i = 0; i < k; ++i)
            mixed_emission[i] += gas_weights[g] * inst.emission[g][i];

    std::vector<std::size_t> cls(n, 0);
    std::vector<double> accum(n, 0.0);
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            w *= inst.class_priors[i][cls[i]] * inst.observation_likelihood[i][cls[i]];
        if (w != 0.0) {
            for (std::size_t c = 0; c < n; ++c) {
                double ratio =
                    mixed_emission[cls[c]] / std::max(inst.class_priors[c][cls[c]], kPriorFloor);
                double olf = with_olfaction && !inst.olfaction_likelihood.empty()
                                 ? inst.olfaction_likelihood[c]
                                 : 1.0;
                accum[c] += w * ratio * olf;
            }
        }
        std::size_t digit = 0;
        while (digit < n && ++cls[digit] == k) {
            cls[digit] = 0;
            ++digit;
        }
        if (digit == n) break;
    }
    return normalize(std::move(accum));
}

} // namespace detail

/// Exact source posterior from semantic evidence alone, by exhaustive
/// enumeration of every class map. Reference implementation used to check
/// the factorized estimator; any olfaction likelihoods in the instance are
/// ignored.
inline SourceDist semantic_source_bruteforce(const JointInstance& inst) {
    return detail::enumerate_posterior(inst, /*with_olfaction=*/false);
}

/// Exact source posterior of the full joint model, olfaction evidence
/// included (an absent olfaction table is treated as uninformative).
inline SourceDist joint_posterior(const JointInstance& inst) {
    return detail::enumerate_posterior(inst, /*with_olfaction=*/true);
}

} // namespace semgsl
