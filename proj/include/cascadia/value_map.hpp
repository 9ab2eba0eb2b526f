#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cascadia/errors.hpp"

namespace cascadia {

/// Small ordered name -> value map used for port signals.
///
/// Keeps insertion order (which drives deterministic serialization) and is
/// backed by a flat vector; the maps in this library hold a handful of
/// entries, so linear lookup wins over a tree or hash map.
class ValueMap {
public:
    ValueMap() = default;

    void set(const std::string& name, double value) {
        for (auto& e : entries_) {
            if (e.first == name) {
                e.second = value;
                return;
            }
        }
        entries_.emplace_back(name, value);
    }

    bool contains(const std::string& name) const {
        for (const auto& e : entries_)
            if (e.first == name) return true;
        return false;
    }

    /// Lookup that treats a miss as a model-definition problem: the caller
    /// asked for a signal that was never declared/supplied.
    double get(const std::string& name) const {
        for (const auto& e : entries_)
            if (e.first == name) return e.second;
        throw DefinitionError("reference to unknown signal '" + name + "'");
    }

    double get_or(const std::string& name, double fallback) const {
        for (const auto& e : entries_)
            if (e.first == name) return e.second;
        return fallback;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    bool operator==(const ValueMap& other) const { return entries_ == other.entries_; }

private:
    std::vector<std::pair<std::string, double>> entries_;
};

} // namespace cascadia
