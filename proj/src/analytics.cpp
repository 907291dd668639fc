#include "kge/analytics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "kge/error.hpp"
#include "kge/kernels.hpp"
#include "kge/util.hpp"

namespace kge {

std::vector<EntityId> select_entities(const Dictionary& entities, std::string_view prefix,
                                      const std::vector<EntityId>& ids) {
    if (!ids.empty()) {
        for (auto id : ids)
            if (id >= entities.size()) throw std::out_of_range("entity id " + std::to_string(id) + " out of range");
        return ids;
    }
    std::vector<EntityId> out;
    for (EntityId e = 0; e < entities.size(); ++e)
        if (entities.label(e).starts_with(prefix)) out.push_back(e);
    return out;
}

Points gather_entity_rows(const ModelParameters& params, const std::vector<EntityId>& ids) {
    Points p;
    p.dim = params.width;
    p.data.reserve(ids.size() * params.width);
    for (auto id : ids) {
        auto row = params.entity(id);
        p.data.insert(p.data.end(), row.begin(), row.end());
    }
    return p;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

}  // namespace

ClusterAssignment kmeans(const Points& points, std::size_t num_clusters, std::uint64_t seed, std::size_t max_iter,
                         int threads) {
    const auto n = points.size();
    const auto dim = points.dim;
    if (num_clusters == 0) throw std::invalid_argument("number of clusters must be >= 1");
    if (num_clusters > n) throw std::invalid_argument("more clusters than points");

    ClusterAssignment out;
    out.num_clusters = num_clusters;
    out.centroids.dim = dim;
    auto& mu = out.centroids.data;
    mu.reserve(num_clusters * dim);

    // k-means++ seeding
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    auto r0 = points.row(first(rng));
    mu.insert(mu.end(), r0.begin(), r0.end());
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points.row(i), r0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (std::size_t c = 1; c < num_clusters; ++c) {
        double total = 0;
        for (double d : d2) total += d;
        std::size_t pick = 0;
        if (total > 0) {
            double target = uni(rng) * total, acc = 0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target && d2[i] > 0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = first(rng);
        }
        auto r = points.row(pick);
        mu.insert(mu.end(), r.begin(), r.end());
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points.row(i), r));
    }

    std::vector<std::size_t> labels(n, 0), next(n, 0);
    std::vector<std::size_t> counts(num_clusters);
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double inertia = threads > 1 ? parallel::assign_nearest(points.data, dim, mu, next, threads)
                                           : serial::assign_nearest(points.data, dim, mu, next);
        out.inertia_trace.push_back(inertia);
        const bool changed = it == 0 || next != labels;
        labels.swap(next);
        ++out.iterations;

        // centroid update: deterministic serial reduce
        std::fill(mu.begin(), mu.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[labels[i]];
            auto r = points.row(i);
            for (std::size_t j = 0; j < dim; ++j) mu[labels[i] * dim + j] += r[j];
        }
        bool any_empty = false;
        std::vector<char> used(n, 0);
        for (std::size_t c = 0; c < num_clusters; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t j = 0; j < dim; ++j) mu[c * dim + j] /= static_cast<double>(counts[c]);
        }
        for (std::size_t c = 0; c < num_clusters; ++c) {
            if (counts[c] != 0) continue;
            any_empty = true;
            std::size_t far = 0;
            double far_d = -1;
            for (std::size_t i = 0; i < n; ++i) {
                if (used[i]) continue;
                const double d = sq_dist(points.row(i), {mu.data() + labels[i] * dim, dim});
                if (d > far_d) far_d = d, far = i;
            }
            used[far] = 1;
            auto r = points.row(far);
            std::copy(r.begin(), r.end(), mu.begin() + static_cast<std::ptrdiff_t>(c * dim));
        }
        if (!changed && !any_empty) break;
    }
    out.labels = std::move(labels);
    out.inertia = 0;
    for (std::size_t i = 0; i < n; ++i) out.inertia += sq_dist(points.row(i), {mu.data() + out.labels[i] * dim, dim});
    return out;
}

Projection pca_project(const Points& points, std::size_t dims) {
    const auto n = points.size();
    const auto dim = points.dim;
    if (dims != 2 && dims != 3) throw std::invalid_argument("projection dimensionality must be 2 or 3");
    if (n < dims + 1) throw std::invalid_argument("need at least dims + 1 vectors");
    if (dim < dims) throw std::invalid_argument("vectors have fewer components than the projection");

    Eigen::MatrixXd x(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j) x(i, j) = points.data[i * dim + j];
    Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);

    Projection out;
    out.dims = dims;
    out.coords.dim = dims;
    out.coords.data.assign(n * dims, 0.0);
    const double total = cov.trace();
    if (!(total > 0)) {
        out.zero_variance = true;
        out.explained_variance_ratio.assign(dims, 0.0);
        return out;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw DataError("eigendecomposition failed");
    Eigen::MatrixXd dirs(dim, dims);
    for (std::size_t c = 0; c < dims; ++c) {
        const auto idx = static_cast<Eigen::Index>(dim - 1 - c);  // ascending order
        Eigen::VectorXd v = eig.eigenvectors().col(idx);
        Eigen::Index arg;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        dirs.col(static_cast<Eigen::Index>(c)) = v;
        out.explained_variance_ratio.push_back(std::max(0.0, eig.eigenvalues()(idx)) / total);
    }
    Eigen::MatrixXd proj = x * dirs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < dims; ++c) out.coords.data[i * dims + c] = proj(i, c);
    return out;
}

std::string format_embeddings_tsv(const Points& points) {
    std::string out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto r = points.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out += '\t';
            out += format_double(r[j]);
        }
        out += '\n';
    }
    return out;
}

Points parse_embeddings_tsv(std::string_view text) {
    Points p;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (p.dim == 0) p.dim = cols.size();
        if (cols.size() != p.dim) throw DataError("embeddings line " + std::to_string(line_no) + ": ragged row");
        for (auto c : cols) p.data.push_back(parse_double(c));
    }
    return p;
}

void export_projector(const Points& points, const std::vector<std::string>& labels, const std::filesystem::path& dir) {
    if (labels.size() != points.size())
        throw DataError("label count " + std::to_string(labels.size()) + " does not match vector count " +
                        std::to_string(points.size()));
    std::filesystem::create_directories(dir);
    write_file(dir / "embeddings.tsv", format_embeddings_tsv(points));
    std::string meta = "label\n";
    for (const auto& l : labels) meta += l + '\n';
    write_file(dir / "metadata.tsv", meta);
}

std::string format_clusters_tsv(const std::vector<std::string>& labels, const ClusterAssignment& clusters) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) out += labels[i] + '\t' + std::to_string(clusters.labels[i]) + '\n';
    return out;
}

std::string format_projection_tsv(const std::vector<std::string>& labels, const Projection& projection) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += labels[i];
        for (double v : projection.coords.row(i)) out += '\t' + format_double(v);
        out += '\n';
    }
    return out;
}

}  // namespace kge
