#pragma once

// Data-parallel hot loops. Every kernel has a serial reference in
// kge::serial and an OpenMP version in kge::parallel; the two must agree
// exactly (tests compare them, bench_kernels times them).

#include <cstddef>
#include <span>
#include <vector>

#include "kge/evaluation.hpp"
#include "kge/kg.hpp"
#include "kge/model.hpp"

namespace kge {

namespace serial {

void score_batch(const ModelParameters& params, std::span<const Triple> triples, std::span<double> out);
std::vector<SideRanks> rank_all(const ModelParameters& params, const KnowledgeGraph& known,
                                std::span<const Triple> test, RankMode mode);
// Index of the nearest centroid (squared Euclidean, lowest index on ties)
// for each row of `points` (n x dim). Returns the summed squared distance.
double assign_nearest(std::span<const double> points, std::size_t dim, std::span<const double> centroids,
                      std::span<std::size_t> assignment);

}  // namespace serial

namespace parallel {

void score_batch(const ModelParameters& params, std::span<const Triple> triples, std::span<double> out,
                 int threads = 0);
std::vector<SideRanks> rank_all(const ModelParameters& params, const KnowledgeGraph& known,
                                std::span<const Triple> test, RankMode mode, int threads = 0);
double assign_nearest(std::span<const double> points, std::size_t dim, std::span<const double> centroids,
                      std::span<std::size_t> assignment, int threads = 0);

}  // namespace parallel

}  // namespace kge
