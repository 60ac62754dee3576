#include "mfs/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mfs/errors.hpp"

namespace mfs {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

namespace {

double dist2(std::span<const std::complex<double>> pts, std::size_t dim, std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < dim; ++k) s += std::norm(pts[i * dim + k] - pts[j * dim + k]);
    return s;
}

bool better(double d, std::size_t i, std::size_t j, const PairDistance& best) {
    if (d != best.distance) return d < best.distance;
    return i < best.i || (i == best.i && j < best.j);
}

}  // namespace

PairDistance min_pair_distance(std::span<const std::complex<double>> points, std::size_t dim, Exec exec) {
    if (dim == 0 || points.size() % dim != 0) throw DomainError("point array does not match dimension");
    const std::size_t n = points.size() / dim;
    if (n < 2) throw DomainError("minimum pair distance needs two points");
    PairDistance best{std::numeric_limits<double>::infinity(), 0, 0};
    if (exec == Exec::Serial) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double d = dist2(points, dim, i, j);
                if (better(d, i, j, best)) best = {d, i, j};
            }
    } else {
        std::vector<PairDistance> local(static_cast<std::size_t>(omp_get_max_threads()),
                                        PairDistance{std::numeric_limits<double>::infinity(), 0, 0});
#pragma omp parallel
        {
            PairDistance& mine = local[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 16)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    double d = dist2(points, dim, i, j);
                    if (better(d, i, j, mine)) mine = {d, i, j};
                }
        }
        for (const auto& p : local)
            if (better(p.distance, p.i, p.j, best)) best = p;
    }
    best.distance = std::sqrt(best.distance);
    return best;
}

}  // namespace mfs
