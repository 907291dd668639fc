#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kge/kg.hpp"
#include "kge/model.hpp"

namespace kge {

// Row-major n x dim block of vectors.
struct Points {
    std::size_t dim = 0;
    std::vector<double> data;

    std::size_t size() const { return dim ? data.size() / dim : 0; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

// Entities whose label starts with `prefix` (all when empty), or the
// explicit id list when one is given.
std::vector<EntityId> select_entities(const Dictionary& entities, std::string_view prefix,
                                      const std::vector<EntityId>& ids = {});
Points gather_entity_rows(const ModelParameters& params, const std::vector<EntityId>& ids);

struct ClusterAssignment {
    std::vector<std::size_t> labels;
    std::size_t num_clusters = 0;
    Points centroids;
    double inertia = 0;
    std::vector<double> inertia_trace;  // after each assignment step
    std::size_t iterations = 0;
};

// k-means++ seeding, then Lloyd iterations until the assignment stops
// changing or max_iter. Empty clusters are re-seeded at the point farthest
// from its centroid.
ClusterAssignment kmeans(const Points& points, std::size_t num_clusters, std::uint64_t seed,
                         std::size_t max_iter = 300, int threads = 1);

struct Projection {
    std::size_t dims = 0;
    Points coords;
    std::vector<double> explained_variance_ratio;
    bool zero_variance = false;
};

// Mean-centred projection onto the top principal directions; each direction
// is signed so its largest-magnitude component is positive.
Projection pca_project(const Points& points, std::size_t dims);

std::string format_embeddings_tsv(const Points& points);
Points parse_embeddings_tsv(std::string_view text);

// embeddings.tsv (no header) and metadata.tsv (header "label").
void export_projector(const Points& points, const std::vector<std::string>& labels, const std::filesystem::path& dir);

std::string format_clusters_tsv(const std::vector<std::string>& labels, const ClusterAssignment& clusters);
std::string format_projection_tsv(const std::vector<std::string>& labels, const Projection& projection);

}  // namespace kge
