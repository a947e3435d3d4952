#pragma once

#include "cogarch/errors.hpp"

#include <cmath>
#include <cstddef>

namespace cogarch {

/// Equally spaced grid 0, dt, ..., n·dt with dt = terminal / n.
class SamplingGrid {
public:
    SamplingGrid(double terminal, std::size_t steps) : terminal_(terminal), steps_(steps) {
        if (!(terminal > 0.0) || !std::isfinite(terminal))
            throw ValueError("sampling grid: terminal time must be positive");
        if (steps == 0) throw ValueError("sampling grid: step count must be positive");
    }

    [[nodiscard]] double terminal() const noexcept { return terminal_; }
    [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
    [[nodiscard]] double dt() const noexcept { return terminal_ / static_cast<double>(steps_); }
    [[nodiscard]] double time(std::size_t k) const noexcept {
        return k == steps_ ? terminal_ : static_cast<double>(k) * dt();
    }

private:
    double terminal_;
    std::size_t steps_;
};

}  // namespace cogarch
