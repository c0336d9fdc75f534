#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <semgsl/error.hpp>

namespace semgsl {

/// Tolerance on the sum of a probability vector.
inline constexpr double kSumTolerance = 1e-9;

/// Floor applied to a prior probability before dividing by it, so that a
/// zero prior degrades gracefully instead of producing infinities.
inline constexpr double kPriorFloor = 1e-12;

/// Discrete probability distribution: non-negative entries that sum to one
/// (within kSumTolerance). This is the single belief currency of the
/// library; the same type carries beliefs over object classes, grid cells,
/// voxels and gas types.
class Categorical {
public:
    /// Validates entries in [0, 1] and the sum; prefer normalize() when the
    /// input is a raw weight vector.
    explicit Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.empty()) throw Error("Categorical: needs at least one entry");
        double sum = 0.0;
        for (double p : probs_) {
            if (std::isnan(p) || p < 0.0 || p > 1.0)
                throw Error("Categorical: entry outside [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            throw Error("Categorical: entries do not sum to one");
    }

    static Categorical uniform(std::size_t size) {
        if (size == 0) throw Error("Categorical::uniform: empty support");
        return Categorical(Normalized{}, std::vector<double>(size, 1.0 / static_cast<double>(size)));
    }

    static Categorical point_mass(std::size_t size, std::size_t at) {
        if (size == 0) throw Error("Categorical::point_mass: empty support");
        if (at >= size) throw OutOfBoundsError("Categorical::point_mass: index outside support");
        std::vector<double> p(size, 0.0);
        p[at] = 1.0;
        return Categorical(Normalized{}, std::move(p));
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

    double at(std::size_t i) const {
        if (i >= probs_.size()) throw OutOfBoundsError("Categorical::at: index outside support");
        return probs_[i];
    }

    const std::vector<double>& probs() const { return probs_; }
    std::vector<double>::const_iterator begin() const { return probs_.begin(); }
    std::vector<double>::const_iterator end() const { return probs_.end(); }

    /// Index of the largest entry; ties resolve to the lowest index.
    std::size_t argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < probs_.size(); ++i)
            if (probs_[i] > probs_[best]) best = i;
        return best;
    }

    double max() const { return probs_[argmax()]; }

    friend bool operator==(const Categorical& a, const Categorical& b) {
        return a.probs_ == b.probs_;
    }

private:
    struct Normalized {}; // tag: entries already checked by the producer

    Categorical(Normalized, std::vector<double> probs) : probs_(std::move(probs)) {}

    friend Categorical normalize(std::vector<double> weights);
    friend Categorical from_log_weights(std::span<const double> log_weights);

    std::vector<double> probs_;
};

/// Scales non-negative weights so they sum to one. A vector that is already
/// normalized is returned unchanged, which makes normalize(normalize(w))
/// bitwise equal to normalize(w).
inline Categorical normalize(std::vector<double> weights) {
    if (weights.empty()) throw InvalidWeightError("normalize: empty weight vector");
    double sum = 0.0;
    double max = 0.0;
    for (double w : weights) {
        if (std::isnan(w) || w < 0.0)
            throw InvalidWeightError("normalize: negative or NaN weight");
        if (!std::isfinite(w)) throw InvalidWeightError("normalize: non-finite weight");
        sum += w;
        if (w > max) max = w;
    }
    if (sum == 0.0) throw AllZeroError("normalize: all weights are zero");
    if (!std::isfinite(sum)) throw InvalidWeightError("normalize: weight sum overflows");
    if (std::abs(sum - 1.0) > kSumTolerance || max > 1.0)
        for (double& w : weights) w /= sum;
    return Categorical(Categorical::Normalized{}, std::move(weights));
}

/// Converts log-space weights to a normalized distribution. Entries of
/// -infinity map to probability zero; at least one entry must be finite.
inline Categorical from_log_weights(std::span<const double> log_weights) {
    if (log_weights.empty()) throw InvalidWeightError("from_log_weights: empty weight vector");
    double max = -std::numeric_limits<double>::infinity();
    for (double lw : log_weights) {
        if (std::isnan(lw)) throw InvalidWeightError("from_log_weights: NaN weight");
        if (lw > max) max = lw;
    }
    if (max == -std::numeric_limits<double>::infinity())
        throw AllZeroError("from_log_weights: all weights are zero");
    if (max == std::numeric_limits<double>::infinity())
        throw InvalidWeightError("from_log_weights: infinite weight");
    std::vector<double> w(log_weights.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(log_weights[i] - max);
        sum += w[i];
    }
    for (double& x : w) x /= sum;
    return Categorical(Categorical::Normalized{}, std::move(w));
}

/// Shannon entropy in bits, with 0 * log2(0) taken as zero.
inline double entropy(const Categorical& dist) {
    double h = 0.0;
    for (double p : dist)
        if (p > 0.0) h -= p * std::log2(p);
    return h + 0.0; // turn the -0.0 of a point mass into +0.0
}

} // namespace semgsl
