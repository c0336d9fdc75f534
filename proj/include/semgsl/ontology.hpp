#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/grid.hpp>

namespace semgsl {

/// Raw, unvalidated ontology tables as parsed from configuration. Kept as
/// plain vectors so that validate() can inspect broken input before any
/// distribution invariant is enforced.
struct OntologyConfig {
    std::vector<std::string> classes;
    std::vector<std::string> gases;
    std::vector<std::string> rooms;
    std::vector<double> class_priors;              // over classes
    std::vector<std::vector<double>> emission;     // [gas][class]
    std::vector<std::vector<double>> room_priors;  // [room][class]
};

namespace detail {

inline bool is_distribution(const std::vector<double>& v, std::size_t size, std::string& why) {
    if (v.size() != size) {
        why = "has " + std::to_string(v.size()) + " entries, expected " + std::to_string(size);
        return false;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isnan(v[i]) || v[i] < 0.0 || v[i] > 1.0) {
            why = "entry " + std::to_string(i) + " is outside [0, 1]";
            return false;
        }
        sum += v[i];
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        why = "sums to " + std::to_string(sum) + " instead of 1";
        return false;
    }
    return true;
}

inline void check_unique(const std::vector<std::string>& names, const char* what,
                         std::vector<std::string>& violations) {
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j])
                violations.push_back(std::string(what) + " name '" + names[i] + "' is duplicated");
}

} // namespace detail

/// Checks every table of a raw ontology. Returns one message per violation;
/// an empty list means the configuration is valid.
inline std::vector<std::string> validate(const OntologyConfig& cfg) {
    std::vector<std::string> violations;
    if (cfg.classes.empty()) violations.push_back("classes: table is empty");
    if (cfg.gases.empty()) violations.push_back("gases: table is empty");
    detail::check_unique(cfg.classes, "class", violations);
    detail::check_unique(cfg.gases, "gas", violations);
    detail::check_unique(cfg.rooms, "room", violations);

    const std::size_t k = cfg.classes.size();
    std::string why;
    if (!detail::is_distribution(cfg.class_priors, k, why))
        violations.push_back("class_priors: " + why);

    if (cfg.emission.size() != cfg.gases.size()) {
        violations.push_back("emission: has " + std::to_string(cfg.emission.size()) +
                             " rows, expected one per gas");
    } else {
        for (std::size_t g = 0; g < cfg.emission.size(); ++g)
            if (!detail::is_distribution(cfg.emission[g], k, why))
                violations.push_back("emission[" + cfg.gases[g] + "]: " + why);
    }

    if (cfg.room_priors.size() != cfg.rooms.size()) {
        violations.push_back("room_priors: has " + std::to_string(cfg.room_priors.size()) +
                             " rows, expected one per room");
    } else {
        for (std::size_t r = 0; r < cfg.room_priors.size(); ++r)
            if (!detail::is_distribution(cfg.room_priors[r], k, why))
                violations.push_back("room_priors[" + cfg.rooms[r] + "]: " + why);
    }
    return violations;
}

/// Semantic model tying object classes to gas emission: global (and
/// optionally per-room) class priors plus one emission distribution over
/// classes for every gas type.
class Ontology {
public:
    static Ontology from_config(const OntologyConfig& cfg) {
        auto violations = validate(cfg);
        if (!violations.empty()) {
            std::string msg = "ontology configuration is invalid:";
            for (const auto& v : violations) msg += "\n  - " + v;
            throw ConfigError(msg);
        }
        return Ontology(cfg);
    }

    std::size_t class_count() const { return classes_.size(); }
    std::size_t gas_count() const { return gases_.size(); }
    std::size_t room_count() const { return rooms_.size(); }

    const std::vector<std::string>& classes() const { return classes_; }
    const std::vector<std::string>& gases() const { return gases_; }
    const std::vector<std::string>& rooms() const { return rooms_; }

    const std::string& class_name(ClassId c) const {
        if (c.value >= classes_.size()) throw OutOfBoundsError("Ontology: class id outside table");
        return classes_[c.value];
    }
    const std::string& gas_name(GasId g) const {
        if (g.value >= gases_.size()) throw OutOfBoundsError("Ontology: gas id outside table");
        return gases_[g.value];
    }
    const std::string& room_name(RoomId r) const {
        if (r.value >= rooms_.size()) throw UnknownRoomError("Ontology: room id outside table");
        return rooms_[r.value];
    }

    const Categorical& class_priors() const { return class_priors_; }

    const Categorical& emission_row(GasId gas) const {
        if (gas.value >= emission_.size())
            throw OutOfBoundsError("Ontology::emission_row: gas id outside table");
        return emission_[gas.value];
    }

    /// p(gas | class): probability that an emission of `gas` originates
    /// from an object of `cls`.
    double emission_prob(ClassId cls, GasId gas) const {
        const Categorical& row = emission_row(gas);
        if (cls.value >= row.size())
            throw OutOfBoundsError("Ontology::emission_prob: class id outside table");
        return row[cls.value];
    }

    /// Class prior used to initialize a cell: the room-conditioned row when
    /// a room is given and a room table exists, the global priors otherwise.
    const Categorical& prior_for_cell(std::optional<RoomId> room) const {
        if (!room.has_value() || room_priors_.empty()) return class_priors_;
        if (room->value >= room_priors_.size())
            throw UnknownRoomError("Ontology::prior_for_cell: room id outside table");
        return room_priors_[room->value];
    }

    std::optional<ClassId> find_class(std::string_view name) const {
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (classes_[i] == name) return ClassId{i};
        return std::nullopt;
    }
    std::optional<GasId> find_gas(std::string_view name) const {
        for (std::size_t i = 0; i < gases_.size(); ++i)
            if (gases_[i] == name) return GasId{i};
        return std::nullopt;
    }
    std::optional<RoomId> find_room(std::string_view name) const {
        for (std::size_t i = 0; i < rooms_.size(); ++i)
            if (rooms_[i] == name) return RoomId{i};
        return std::nullopt;
    }

private:
    explicit Ontology(const OntologyConfig& cfg)
        : classes_(cfg.classes), gases_(cfg.gases), rooms_(cfg.rooms),
          class_priors_(cfg.class_priors) {
        emission_.reserve(cfg.emission.size());
        for (const auto& row : cfg.emission) emission_.emplace_back(row);
        room_priors_.reserve(cfg.room_priors.size());
        for (const auto& row : cfg.room_priors) room_priors_.emplace_back(row);
    }

    std::vector<std::string> classes_;
    std::vector<std::string> gases_;
    std::vector<std::string> rooms_;
    Categorical class_priors_;
    std::vector<Categorical> emission_;
    std::vector<Categorical> room_priors_;
};

} // namespace semgsl
