#pragma once

// Shared test oracles: random graphs, brute-force ranking and
// finite-difference gradient checks. None of them call the code under test
// beyond the model score function.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "kge/evaluation.hpp"
#include "kge/kg.hpp"
#include "kge/model.hpp"

namespace kge::testing {

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("kge_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Random labelled graph: up to max_entities entities, max_relations
// relations and max_triples insert attempts (duplicates collapse).
inline KnowledgeGraph random_graph(std::mt19937_64& rng, std::uint32_t max_entities, std::uint32_t max_relations,
                                   std::size_t max_triples) {
    std::uniform_int_distribution<std::uint32_t> ne(3, max_entities), nr(1, max_relations);
    const auto n_ent = ne(rng), n_rel = nr(rng);
    std::uniform_int_distribution<std::size_t> nt(1, max_triples);
    std::uniform_int_distribution<std::uint32_t> pick_e(0, n_ent - 1), pick_r(0, n_rel - 1);
    KnowledgeGraph kg;
    const auto count = nt(rng);
    for (std::size_t i = 0; i < count; ++i)
        kg.add_triple("e" + std::to_string(pick_e(rng)), "r" + std::to_string(pick_r(rng)),
                      "e" + std::to_string(pick_e(rng)));
    return kg;
}

inline bool linear_contains(const KnowledgeGraph& kg, const Triple& t) {
    return std::find(kg.triples().begin(), kg.triples().end(), t) != kg.triples().end();
}

// Rank by full enumeration with the same tie convention: 1 + number of
// admissible corruptions scoring at least the test triple.
inline std::size_t brute_force_rank(const ModelParameters& params, const KnowledgeGraph& kg, const Triple& test,
                                    Side side, bool filtered) {
    const double f = score(params, test);
    std::size_t rank = 1;
    for (EntityId e = 0; e < params.num_entities; ++e) {
        Triple c = test;
        (side == Side::subject ? c.subject : c.object) = e;
        if (c == test) continue;
        if (filtered && linear_contains(kg, c)) continue;
        if (score(params, c) >= f) ++rank;
    }
    return rank;
}

inline double norm2(const std::vector<double>& v) {
    double acc = 0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

// True when a central difference of width h would straddle a kink of the
// piecewise-linear parts (TransE L1 components, ConvKB ReLU inputs).
inline bool near_kink(const ModelParameters& p, const Triple& t, double h) {
    const auto head = p.entity(t.subject), rel = p.relation(t.predicate), tail = p.entity(t.object);
    const double guard = 1e3 * h;
    if (p.kind == ModelKind::transe && p.transe_norm == 1)
        for (std::size_t i = 0; i < p.k; ++i)
            if (std::abs(head[i] + rel[i] - tail[i]) < guard) return true;
    if (p.kind == ModelKind::convkb)
        for (std::size_t m = 0; m < p.num_filters; ++m)
            for (std::size_t i = 0; i < p.k; ++i) {
                const double* w = p.filters.data() + 4 * m;
                const double scale = std::abs(w[0]) + std::abs(w[1]) + std::abs(w[2]) + 1.0;
                if (std::abs(w[0] * head[i] + w[1] * rel[i] + w[2] * tail[i] + w[3]) < guard * scale) return true;
            }
    return false;
}

struct GradientCheck {
    double worst = 0;
    std::size_t instances = 0;
    std::size_t regenerated = 0;
};

// Relative error ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-6)
// per parameter block, over `instances` random (params, triple) draws.
inline GradientCheck check_gradients(ModelKind kind, std::size_t instances, std::uint64_t seed) {
    constexpr double h = 1e-5;
    std::mt19937_64 rng(seed);
    GradientCheck out;
    while (out.instances < instances) {
        const std::size_t k = out.instances % 2 == 0 ? 2 : 8;
        std::uniform_int_distribution<std::uint32_t> ne(2, 9);
        const auto n_ent = ne(rng);
        ModelOptions opt;
        opt.transe_norm = rng() % 2 ? 1 : 2;
        opt.num_filters = 1 + rng() % 6;
        auto p = init_params(kind, k, rng(), n_ent, 3, opt);
        std::normal_distribution<double> jitter(0.0, 0.3);
        for (auto& x : p.entities) x += jitter(rng);
        for (auto& x : p.relations) x += jitter(rng);
        std::uniform_int_distribution<std::uint32_t> pe(0, n_ent - 1), pr(0, 2);
        const Triple t{pe(rng), pr(rng), pe(rng)};
        if (near_kink(p, t, h)) {
            ++out.regenerated;
            continue;
        }
        const auto g = gradient(p, t);

        auto numeric = [&](std::vector<double>& block, std::size_t offset, std::size_t n) {
            std::vector<double> d(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double keep = block[offset + i];
                block[offset + i] = keep + h;
                const double up = score(p, t);
                block[offset + i] = keep - h;
                const double down = score(p, t);
                block[offset + i] = keep;
                d[i] = (up - down) / (2 * h);
            }
            return d;
        };
        auto compare = [&](const std::vector<double>& analytic, const std::vector<double>& num) {
            std::vector<double> diff(analytic.size());
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = analytic[i] - num[i];
            const double denom = std::max({norm2(analytic), norm2(num), 1e-6});
            out.worst = std::max(out.worst, norm2(diff) / denom);
        };

        const auto w = p.width;
        if (t.subject == t.object) {
            auto both = g.head;
            for (std::size_t i = 0; i < w; ++i) both[i] += g.tail[i];
            compare(both, numeric(p.entities, t.subject * w, w));
        } else {
            compare(g.head, numeric(p.entities, t.subject * w, w));
            compare(g.tail, numeric(p.entities, t.object * w, w));
        }
        compare(g.relation, numeric(p.relations, t.predicate * w, w));
        if (kind == ModelKind::convkb) {
            compare(g.filters, numeric(p.filters, 0, p.filters.size()));
            compare(g.dense, numeric(p.dense, 0, p.dense.size()));
        }
        ++out.instances;
    }
    return out;
}

// Planted-structure helpers for clustering and projection.
inline std::vector<double> blob_points(std::size_t per_blob, std::uint64_t seed, std::vector<std::size_t>& truth) {
    const double centers[4][2] = {{-10, -10}, {-10, 10}, {10, -10}, {10, 10}};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<double> data;
    truth.clear();
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < per_blob; ++i) {
            data.push_back(centers[c][0] + noise(rng));
            data.push_back(centers[c][1] + noise(rng));
            truth.push_back(c);
        }
    return data;
}

}  // namespace kge::testing
