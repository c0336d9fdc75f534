#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/grid.hpp>
#include <semgsl/ontology.hpp>

namespace semgsl {

/// Row-stochastic detector model: prob(true_class, detected) is the chance
/// that an object of `true_class` is reported as `detected`. Stands in for
/// a real object-detection stack.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::vector<double>> rows) {
        k_ = rows.size();
        if (k_ == 0) throw Error("ConfusionMatrix: needs at least one class");
        m_.reserve(k_ * k_);
        for (const auto& row : rows) {
            if (row.size() != k_) throw Error("ConfusionMatrix: matrix is not square");
            double sum = 0.0;
            for (double p : row) {
                if (std::isnan(p) || p < 0.0 || p > 1.0)
                    throw Error("ConfusionMatrix: entry outside [0, 1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kSumTolerance)
                throw Error("ConfusionMatrix: row does not sum to one");
            m_.insert(m_.end(), row.begin(), row.end());
        }
    }

    static ConfusionMatrix identity(std::size_t k) {
        std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
        for (std::size_t i = 0; i < k; ++i) rows[i][i] = 1.0;
        return ConfusionMatrix(std::move(rows));
    }

    /// Diagonal `accuracy`, remaining mass split evenly over the other
    /// classes (a single-class matrix is the identity).
    static ConfusionMatrix uniform_error(std::size_t k, double accuracy) {
        if (k == 0) throw Error("ConfusionMatrix: needs at least one class");
        if (std::isnan(accuracy) || accuracy < 0.0 || accuracy > 1.0)
            throw Error("ConfusionMatrix: accuracy outside [0, 1]");
        if (k == 1) return identity(1);
        double off = (1.0 - accuracy) / static_cast<double>(k - 1);
        std::vector<std::vector<double>> rows(k, std::vector<double>(k, off));
        for (std::size_t i = 0; i < k; ++i) rows[i][i] = accuracy;
        return ConfusionMatrix(std::move(rows));
    }

    std::size_t size() const { return k_; }

    double prob(ClassId true_class, ClassId detected) const {
        if (true_class.value >= k_ || detected.value >= k_)
            throw OutOfBoundsError("ConfusionMatrix::prob: class id outside matrix");
        return m_[true_class.value * k_ + detected.value];
    }

    /// p(detected | true_class = i) for every i: the likelihood vector one
    /// detection contributes to a cell's class belief.
    std::vector<double> column(ClassId detected) const {
        if (detected.value >= k_)
            throw OutOfBoundsError("ConfusionMatrix::column: class id outside matrix");
        std::vector<double> col(k_);
        for (std::size_t i = 0; i < k_; ++i) col[i] = m_[i * k_ + detected.value];
        return col;
    }

    std::span<const double> row(ClassId true_class) const {
        if (true_class.value >= k_)
            throw OutOfBoundsError("ConfusionMatrix::row: class id outside matrix");
        return {m_.data() + true_class.value * k_, k_};
    }

private:
    std::size_t k_;
    std::vector<double> m_; // row-major k x k
};

inline std::vector<double> likelihood_from_detection(const ConfusionMatrix& cm, ClassId detected) {
    return cm.column(detected);
}

/// One noisy class measurement of a site (a 2D cell or a voxel): the
/// likelihood p(measurement | class = i) for every class i.
struct SemanticObservation {
    std::size_t site = 0;
    std::vector<double> likelihood;
};

namespace detail {

/// Shared softmax so every reader of a log-weight row rounds identically.
inline void softmax_into(std::span<const double> logw, std::span<double> out) {
    double max = -std::numeric_limits<double>::infinity();
    for (double lw : logw)
        if (lw > max) max = lw;
    double sum = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
        out[i] = std::exp(logw[i] - max);
        sum += out[i];
    }
    for (std::size_t i = 0; i < logw.size(); ++i) out[i] /= sum;
}

} // namespace detail

/// Per-site class belief p(class | measurements so far) maintained as a
/// product of likelihoods over an initial prior. The product is accumulated
/// in log space and normalized on read, so long observation sequences do
/// not underflow.
class SemanticBelief {
public:
    /// Belief over the cells of a 2D grid; priors come from the ontology
    /// (room-conditioned when a room map is supplied).
    static SemanticBelief init(Grid2D grid, const Ontology& ontology,
                               const std::vector<RoomId>* room_map = nullptr) {
        std::vector<Categorical> priors = cell_priors(grid.cell_count(), ontology, room_map);
        return SemanticBelief(std::move(grid), std::move(priors));
    }

    /// Belief over the voxels of a layered grid; every voxel of a column
    /// shares the column's room.
    static SemanticBelief init(VoxelGrid grid, const Ontology& ontology,
                               const std::vector<RoomId>* room_map = nullptr) {
        std::vector<Categorical> cell = cell_priors(grid.base().cell_count(), ontology, room_map);
        std::vector<Categorical> priors;
        priors.reserve(grid.voxel_count());
        for (std::size_t v = 0; v < grid.voxel_count(); ++v)
            priors.push_back(cell[grid.column_of(VoxelId{v}).value]);
        return SemanticBelief(std::move(grid), std::move(priors));
    }

    static SemanticBelief with_priors(Grid2D grid, std::vector<Categorical> prior_per_cell) {
        if (prior_per_cell.size() != grid.cell_count())
            throw DomainMismatchError("SemanticBelief: one prior per cell required");
        return SemanticBelief(std::move(grid), std::move(prior_per_cell));
    }

    static SemanticBelief with_priors(VoxelGrid grid, std::vector<Categorical> prior_per_voxel) {
        if (prior_per_voxel.size() != grid.voxel_count())
            throw DomainMismatchError("SemanticBelief: one prior per voxel required");
        return SemanticBelief(std::move(grid), std::move(prior_per_voxel));
    }

    std::size_t site_count() const { return priors_.size(); }
    std::size_t class_count() const { return classes_; }

    bool voxel_backed() const { return std::holds_alternative<VoxelGrid>(grid_); }

    const Grid2D* grid2d() const { return std::get_if<Grid2D>(&grid_); }
    const VoxelGrid* voxel_grid() const { return std::get_if<VoxelGrid>(&grid_); }

    /// The underlying 2D grid: the grid itself or the base of the stack.
    const Grid2D& base_grid() const {
        if (const auto* g = std::get_if<Grid2D>(&grid_)) return *g;
        return std::get<VoxelGrid>(grid_).base();
    }

    bool site_is_free(std::size_t site) const {
        if (site >= site_count())
            throw OutOfBoundsError("SemanticBelief::site_is_free: site outside grid");
        if (const auto* g = std::get_if<Grid2D>(&grid_)) return g->is_free(CellId{site});
        return std::get<VoxelGrid>(grid_).is_free(VoxelId{site});
    }

    /// Normalized class distribution of one site.
    Categorical site_dist(std::size_t site) const {
        return from_log_weights(log_weights(site));
    }

    std::span<const double> log_weights(std::size_t site) const {
        if (site >= site_count())
            throw OutOfBoundsError("SemanticBelief::log_weights: site outside grid");
        return {logw_.data() + site * classes_, classes_};
    }

    /// The prior this site was initialized with; estimation divides by it.
    const Categorical& init_prior(std::size_t site) const {
        if (site >= site_count())
            throw OutOfBoundsError("SemanticBelief::init_prior: site outside grid");
        return priors_[site];
    }

    /// Multiplies one site's belief by an observation likelihood. Throws
    /// AllZeroError (and leaves the belief unchanged) when the evidence
    /// contradicts everything the site still considers possible.
    void update(const SemanticObservation& obs) {
        if (obs.site >= site_count())
            throw OutOfBoundsError("SemanticBelief::update: site outside grid");
        if (obs.likelihood.size() != classes_)
            throw DomainMismatchError("SemanticBelief::update: likelihood size != class count");
        bool any_positive = false;
        for (double l : obs.likelihood) {
            if (std::isnan(l) || l < 0.0 || !std::isfinite(l))
                throw InvalidWeightError("SemanticBelief::update: likelihood entry invalid");
            if (l > 0.0) any_positive = true;
        }
        if (!any_positive)
            throw InvalidWeightError("SemanticBelief::update: likelihood has no positive entry");

        double* row = logw_.data() + obs.site * classes_;
        std::vector<double> next(classes_);
        bool alive = false;
        for (std::size_t i = 0; i < classes_; ++i) {
            next[i] = row[i] + std::log(obs.likelihood[i]);
            if (next[i] > -std::numeric_limits<double>::infinity()) alive = true;
        }
        if (!alive)
            throw AllZeroError("SemanticBelief::update: evidence contradicts the whole belief");
        for (std::size_t i = 0; i < classes_; ++i) row[i] = next[i];
    }

private:
    template <typename GridT>
    SemanticBelief(GridT grid, std::vector<Categorical> priors)
        : grid_(std::move(grid)), priors_(std::move(priors)) {
        if (priors_.empty()) throw Error("SemanticBelief: needs at least one site");
        classes_ = priors_[0].size();
        if (classes_ == 0) throw Error("SemanticBelief: needs at least one class");
        for (const auto& p : priors_)
            if (p.size() != classes_)
                throw DomainMismatchError("SemanticBelief: priors disagree on class count");
        logw_.resize(priors_.size() * classes_);
        for (std::size_t s = 0; s < priors_.size(); ++s)
            for (std::size_t i = 0; i < classes_; ++i)
                logw_[s * classes_ + i] = std::log(priors_[s][i]); // log(0) == -inf
    }

    static std::vector<Categorical> cell_priors(std::size_t cells, const Ontology& ontology,
                                                const std::vector<RoomId>* room_map) {
        if (room_map && room_map->size() != cells)
            throw DomainMismatchError("SemanticBelief: room map size != cell count");
        std::vector<Categorical> priors;
        priors.reserve(cells);
        for (std::size_t c = 0; c < cells; ++c) {
            std::optional<RoomId> room;
            if (room_map) room = (*room_map)[c];
            priors.push_back(ontology.prior_for_cell(room));
        }
        return priors;
    }

    std::variant<Grid2D, VoxelGrid> grid_;
    std::size_t classes_ = 0;
    std::vector<double> logw_;        // site-major, [site * classes_ + class]
    std::vector<Categorical> priors_; // per site, as initialized
};

} // namespace semgsl
