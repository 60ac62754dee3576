#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace mfs {

// Every parallel kernel has a serial twin kept as the reference
// implementation; both must produce identical results.
enum class Exec { Serial, Parallel };

int max_threads();
void set_threads(int n);

struct PairDistance {
    double distance = 0;
    std::size_t i = 0, j = 0;
};

// Minimum Euclidean distance over all pairs of points in C^m, points stored
// row-major with `dim` complex coordinates each. Ties resolve to the
// lexicographically smallest (i, j). Needs at least two points.
PairDistance min_pair_distance(std::span<const std::complex<double>> points, std::size_t dim, Exec exec);

}  // namespace mfs
