#include "mfs/sweep.hpp"

#include <algorithm>
#include <cmath>

namespace mfs {

int sweep_max_overlap(std::vector<SweepEvent> events, const ExactEventCompare& exact_sign, double close_rel) {
    auto less = [&](const SweepEvent& a, const SweepEvent& b) {
        const double tol = close_rel * (1 + std::fabs(a.x) + std::fabs(b.x));
        int s = 0;
        if (a.x < b.x - tol) {
            s = -1;
        } else if (a.x > b.x + tol) {
            s = 1;
        } else if (a.owner == b.owner && a.start == b.start) {
            s = 0;
        } else {
            s = exact_sign(a, b);
        }
        if (s != 0) return s < 0;
        if (a.start != b.start) return a.start;
        return a.owner < b.owner;
    };
    std::sort(events.begin(), events.end(), less);
    int cur = 0, best = 0;
    for (const auto& e : events) {
        cur += e.start ? 1 : -1;
        best = std::max(best, cur);
    }
    return best;
}

int sweep_max_overlap(const std::vector<RationalInterval>& intervals) {
    struct Ev {
        const Rational* x;
        bool start;
    };
    std::vector<Ev> ev;
    ev.reserve(2 * intervals.size());
    for (const auto& iv : intervals) {
        ev.push_back({&iv.lo, true});
        ev.push_back({&iv.hi, false});
    }
    std::sort(ev.begin(), ev.end(), [](const Ev& a, const Ev& b) {
        const int c = cmp(*a.x, *b.x);
        if (c != 0) return c < 0;
        return a.start && !b.start;
    });
    int cur = 0, best = 0;
    for (const auto& e : ev) {
        cur += e.start ? 1 : -1;
        best = std::max(best, cur);
    }
    return best;
}

int sweep_max_overlap(const std::vector<std::pair<double, double>>& intervals) {
    std::vector<std::pair<double, int>> ev;
    ev.reserve(2 * intervals.size());
    for (const auto& [lo, hi] : intervals) {
        ev.emplace_back(lo, 0);
        ev.emplace_back(hi, 1);
    }
    std::sort(ev.begin(), ev.end());
    int cur = 0, best = 0;
    for (const auto& e : ev) {
        cur += e.second == 0 ? 1 : -1;
        best = std::max(best, cur);
    }
    return best;
}

}  // namespace mfs
