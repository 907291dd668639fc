#include "kge/kernels.hpp"

#include <omp.h>

#include <limits>

namespace kge {

namespace {

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

double nearest(std::span<const double> points, std::size_t dim, std::span<const double> centroids, std::size_t i,
               std::size_t& best) {
    const std::size_t kc = centroids.size() / dim;
    const double* x = points.data() + i * dim;
    double best_d = std::numeric_limits<double>::infinity();
    best = 0;
    for (std::size_t c = 0; c < kc; ++c) {
        const double* mu = centroids.data() + c * dim;
        double d = 0;
        for (std::size_t j = 0; j < dim; ++j) d += (x[j] - mu[j]) * (x[j] - mu[j]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best_d;
}

}  // namespace

namespace serial {

void score_batch(const ModelParameters& params, std::span<const Triple> triples, std::span<double> out) {
    for (std::size_t i = 0; i < triples.size(); ++i) out[i] = score(params, triples[i]);
}

std::vector<SideRanks> rank_all(const ModelParameters& params, const KnowledgeGraph& known,
                                std::span<const Triple> test, RankMode mode) {
    std::vector<SideRanks> out(test.size());
    for (std::size_t i = 0; i < test.size(); ++i)
        out[i] = {rank_triple(params, known, test[i], Side::subject, mode),
                  rank_triple(params, known, test[i], Side::object, mode)};
    return out;
}

double assign_nearest(std::span<const double> points, std::size_t dim, std::span<const double> centroids,
                      std::span<std::size_t> assignment) {
    double total = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) total += nearest(points, dim, centroids, i, assignment[i]);
    return total;
}

}  // namespace serial

namespace parallel {

void score_batch(const ModelParameters& params, std::span<const Triple> triples, std::span<double> out, int threads) {
    const auto n = static_cast<std::ptrdiff_t>(triples.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = score(params, triples[i]);
}

std::vector<SideRanks> rank_all(const ModelParameters& params, const KnowledgeGraph& known,
                                std::span<const Triple> test, RankMode mode, int threads) {
    std::vector<SideRanks> out(test.size());
    const auto n = static_cast<std::ptrdiff_t>(test.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = {rank_triple(params, known, test[i], Side::subject, mode),
                  rank_triple(params, known, test[i], Side::object, mode)};
    return out;
}

double assign_nearest(std::span<const double> points, std::size_t dim, std::span<const double> centroids,
                      std::span<std::size_t> assignment, int threads) {
    const auto n = static_cast<std::ptrdiff_t>(assignment.size());
    std::vector<double> dist(assignment.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t i = 0; i < n; ++i) dist[i] = nearest(points, dim, centroids, i, assignment[i]);
    // summed in index order so the total matches the serial kernel bit for bit
    double total = 0;
    for (double d : dist) total += d;
    return total;
}

}  // namespace parallel

}  // namespace kge
