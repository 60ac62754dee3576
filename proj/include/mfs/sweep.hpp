#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mfs/rational.hpp"

namespace mfs {

// Closed intervals, max point multiplicity by a sweep over 2N endpoints.
// At equal coordinates starts are processed before ends, so touching
// intervals count as intersecting.
struct SweepEvent {
    double x = 0;
    std::uint32_t owner = 0;
    bool start = true;
};

// exact_sign(a, b) must return sign(value(a) - value(b)) for two events whose
// double coordinates are too close to separate; it is never called otherwise.
using ExactEventCompare = std::function<int(const SweepEvent&, const SweepEvent&)>;

int sweep_max_overlap(std::vector<SweepEvent> events, const ExactEventCompare& exact_sign, double close_rel = 1e-9);

struct RationalInterval {
    Rational lo, hi;
};

int sweep_max_overlap(const std::vector<RationalInterval>& intervals);

// Plain double version, used for numeric systems without exact data.
int sweep_max_overlap(const std::vector<std::pair<double, double>>& intervals);

}  // namespace mfs
