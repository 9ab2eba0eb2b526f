#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cascadia/errors.hpp"

namespace cascadia {

/// Fixed-capacity ring buffer modelling a pure transmission delay.
///
/// A value pushed at step k is emitted exactly `capacity` pushes later; the
/// line starts filled with its idle value, so the first `capacity` pops yield
/// idle. flush() overwrites every slot (used to model a link that drops and
/// must refill after recovery).
class DelayLine {
public:
    DelayLine() = default;

    DelayLine(std::size_t capacity, double idle_value) : slots_(capacity, idle_value), head_(0) {
        if (capacity == 0) throw ConfigError("delay line capacity must be >= 1");
    }

    /// Capacity in steps for a delay of `duration` time units at step `dt`.
    /// Rounds up, with a small slack so exact multiples of dt do not round an
    /// extra step due to binary representation (0.2/0.1 evaluates above 2.0).
    static std::size_t capacity_for(double duration, double dt) {
        if (dt <= 0.0) throw ConfigError("delay line time step must be > 0");
        if (duration < 0.0) throw ConfigError("delay duration must be >= 0");
        const double steps = std::ceil(duration / dt - 1e-9);
        return steps < 1.0 ? 1 : static_cast<std::size_t>(steps);
    }

    std::size_t capacity() const { return slots_.size(); }

    /// Emit the oldest value and enqueue a fresh one.
    double push_pop(double value) {
        const double out = slots_[head_];
        slots_[head_] = value;
        head_ = (head_ + 1) % slots_.size();
        return out;
    }

    /// Overwrite every slot, e.g. with the connection-lost sentinel.
    void flush(double sentinel) {
        for (auto& s : slots_) s = sentinel;
    }

    bool operator==(const DelayLine& other) const {
        return slots_ == other.slots_ && head_ == other.head_;
    }

private:
    std::vector<double> slots_;
    std::size_t head_ = 0;
};

inline DelayLine make_delay_line(std::size_t capacity_steps, double idle_value) {
    return DelayLine(capacity_steps, idle_value);
}

/// Named delay lines owned by one automaton instance.
class Buffers {
public:
    void add(const std::string& name, DelayLine line) { lines_.emplace_back(name, std::move(line)); }

    DelayLine& at(const std::string& name) {
        for (auto& e : lines_)
            if (e.first == name) return e.second;
        throw DefinitionError("reference to unknown delay line '" + name + "'");
    }

    bool empty() const { return lines_.empty(); }
    auto begin() { return lines_.begin(); }
    auto end() { return lines_.end(); }

    bool operator==(const Buffers& other) const { return lines_ == other.lines_; }

private:
    std::vector<std::pair<std::string, DelayLine>> lines_;
};

} // namespace cascadia
