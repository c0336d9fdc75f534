#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/estimation.hpp>
#include <semgsl/grid.hpp>
#include <semgsl/infogain.hpp>

namespace semgsl {

/// One binary gas-detection event with the wind measured alongside it.
/// wind_direction is the direction the wind blows towards (radians).
struct HitReading {
    bool hit = false;
    double wind_direction = 0.0;
    double wind_speed = 0.0; // m/s, >= 0
};

/// Parameters of the detection-probability model below.
struct HitModelParams {
    double p_detect = 0.9;       // detection probability right at the source
    double p_false_alarm = 0.05; // residual hit probability far from it
    double sigma_r = 3.0;        // radial reach of the plume, metres
    double sigma_theta = 0.6;    // angular width of the plume, radians

    void check() const {
        if (!(p_false_alarm > 0.0 && p_detect < 1.0 && p_false_alarm < p_detect))
            throw Error("HitModelParams: need 0 < p_false_alarm < p_detect < 1");
        if (!(sigma_r > 0.0) || !(sigma_theta > 0.0))
            throw Error("HitModelParams: sigmas must be positive");
    }
};

/// Probability that a detector at (x, y) reports a hit if the source sits
/// in `source`:
///
///   p = p_fa + (p_d - p_fa) * exp(-d^2 / 2 sigma_r^2) * exp(-dtheta^2 / 2 sigma_theta^2)
///
/// where d is the distance to the cell centre and dtheta the angle between
/// the source->detector bearing and the wind. Standing on the centre, or
/// calm wind, drops the angular term. The result is clamped to
/// [p_false_alarm, p_detect], so it is never 0 or 1 and a hit map update
/// can never annihilate the belief.
inline double hit_likelihood(const Grid2D& grid, CellId source, double x, double y,
                             double wind_direction, double wind_speed,
                             const HitModelParams& params = {}) {
    params.check();
    auto [cx, cy] = grid.center(source);
    const double dx = x - cx, dy = y - cy;
    const double d = std::hypot(dx, dy);
    const double radial = std::exp(-(d * d) / (2.0 * params.sigma_r * params.sigma_r));
    double angular = 1.0;
    if (d > 0.0 && wind_speed > 0.0) {
        const double off = wrap_pi(std::atan2(dy, dx) - wind_direction);
        angular = std::exp(-(off * off) / (2.0 * params.sigma_theta * params.sigma_theta));
    }
    const double p = params.p_false_alarm +
                     (params.p_detect - params.p_false_alarm) * radial * angular;
    return std::clamp(p, params.p_false_alarm, params.p_detect);
}

/// Olfaction backend: consumes position-stamped hit/no-hit readings and
/// maintains a source distribution over the free cells of a 2D grid.
class OlfactionEstimator {
public:
    virtual ~OlfactionEstimator() = default;
    virtual void update(double x, double y, const HitReading& reading) = 0;
    virtual SourceDist current() const = 0;
    /// Expected entropy reduction of one further reading taken at `pose`.
    virtual double expected_gain(const Pose& pose) const = 0;
};

/// Reference backend: an exhaustive Bayes filter over the grid. Every free
/// cell keeps the log-probability that it hosts the source; a reading
/// multiplies each cell by the hit (or miss) likelihood of the plume model.
class HitMapEstimator final : public OlfactionEstimator {
public:
    explicit HitMapEstimator(Grid2D grid, HitModelParams params = {})
        : grid_(std::move(grid)), params_(params),
          logw_(grid_.cell_count(), -std::numeric_limits<double>::infinity()) {
        params_.check();
        bool any_free = false;
        for (std::size_t c = 0; c < grid_.cell_count(); ++c)
            if (grid_.is_free(CellId{c})) {
                logw_[c] = 0.0;
                any_free = true;
            }
        if (!any_free) throw Error("HitMapEstimator: grid has no free cell");
    }

    void update(double x, double y, const HitReading& reading) override {
        if (!grid_.contains(x, y))
            throw OutOfBoundsError("HitMapEstimator::update: position outside grid");
        if (std::isnan(reading.wind_speed) || reading.wind_speed < 0.0)
            throw Error("HitMapEstimator::update: wind speed must be >= 0");
        for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
            if (!grid_.is_free(CellId{c})) continue;
            const double lambda = hit_likelihood(grid_, CellId{c}, x, y, reading.wind_direction,
                                                 reading.wind_speed, params_);
            logw_[c] += std::log(reading.hit ? lambda : 1.0 - lambda);
        }
        last_ = reading;
    }

    SourceDist current() const override { return from_log_weights(logw_); }

    /// One-step lookahead: entropy of the current map minus the expected
    /// entropy after a hypothetical reading at `pose`, under the plume
    /// model and the most recent wind.
    double expected_gain(const Pose& pose) const override {
        if (!grid_.contains(pose.x, pose.y))
            throw OutOfBoundsError("HitMapEstimator::expected_gain: pose outside grid");
        const SourceDist p = current();
        std::vector<double> lambda(p.size(), 0.0);
        double p_hit = 0.0;
        for (std::size_t c = 0; c < p.size(); ++c) {
            if (p[c] == 0.0) continue;
            lambda[c] = hit_likelihood(grid_, CellId{c}, pose.x, pose.y, last_.wind_direction,
                                       last_.wind_speed, params_);
            p_hit += p[c] * lambda[c];
        }
        std::vector<double> w_hit(p.size()), w_miss(p.size());
        for (std::size_t c = 0; c < p.size(); ++c) {
            w_hit[c] = p[c] * lambda[c];
            w_miss[c] = p[c] * (1.0 - lambda[c]);
        }
        const double h = entropy(p);
        const double h_hit = entropy(normalize(std::move(w_hit)));
        const double h_miss = entropy(normalize(std::move(w_miss)));
        return std::max(0.0, h - (p_hit * h_hit + (1.0 - p_hit) * h_miss));
    }

    const Grid2D& grid() const { return grid_; }
    const HitModelParams& params() const { return params_; }

private:
    Grid2D grid_;
    HitModelParams params_;
    std::vector<double> logw_;
    HitReading last_{}; // calm (isotropic) until the first reading arrives
};

} // namespace semgsl
