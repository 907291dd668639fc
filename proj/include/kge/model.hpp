#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kge/kg.hpp"

namespace kge {

enum class ModelKind { transe, distmult, complex, hole, convkb };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelOptions {
    int transe_norm = 1;          // L1 or L2
    std::size_t num_filters = 24; // ConvKB only

    friend bool operator==(const ModelOptions&, const ModelOptions&) = default;
};

// Embedding tensors for one model. Rows are contiguous; ComplEx rows hold
// the real half followed by the imaginary half (width 2k). ConvKB filters
// are stored as (w_head, w_relation, w_tail, bias) per filter, and the dense
// projection as num_filters rows of k.
struct ModelParameters {
    ModelKind kind = ModelKind::transe;
    std::size_t k = 0;
    std::size_t width = 0;
    std::uint32_t num_entities = 0;
    std::uint32_t num_relations = 0;
    int transe_norm = 1;
    std::size_t num_filters = 0;
    std::uint64_t seed = 0;
    std::vector<double> entities;
    std::vector<double> relations;
    std::vector<double> filters;
    std::vector<double> dense;

    std::span<const double> entity(EntityId e) const { return {entities.data() + e * width, width}; }
    std::span<double> entity(EntityId e) { return {entities.data() + e * width, width}; }
    std::span<const double> relation(RelationId r) const { return {relations.data() + r * width, width}; }
    std::span<double> relation(RelationId r) { return {relations.data() + r * width, width}; }

    friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

ModelParameters init_params(ModelKind kind, std::size_t k, std::uint64_t seed, std::uint32_t num_entities,
                            std::uint32_t num_relations, const ModelOptions& options = {});

// Rescales a row to unit L2 norm (TransE convention); zero rows are left alone.
void normalize_row(std::span<double> row);
// Rescales each entity row to unit L2 norm (TransE convention).
void normalize_entity(ModelParameters& params, EntityId e);

// Scoring kernels on raw rows. Higher means more plausible.
double transe_score(std::span<const double> h, std::span<const double> r, std::span<const double> t, int norm);
double distmult_score(std::span<const double> h, std::span<const double> r, std::span<const double> t);
double complex_score(std::span<const double> h, std::span<const double> r, std::span<const double> t);
// (h (x) t)[i] = sum_j h[j] * t[(j + i) mod k]
void circular_correlation(std::span<const double> h, std::span<const double> t, std::span<double> out);
double hole_score(std::span<const double> h, std::span<const double> w, std::span<const double> t);
// Same value through the Fourier identity (FFTW).
double hole_score_fft(std::span<const double> h, std::span<const double> w, std::span<const double> t);
double convkb_score(std::span<const double> h, std::span<const double> r, std::span<const double> t,
                    std::span<const double> filters, std::span<const double> dense);

double score(const ModelParameters& params, const Triple& triple);

// d score / d theta for the rows the triple touches. When head == tail the
// two rows refer to the same parameters and must be summed by the caller.
struct Gradient {
    Triple triple;
    std::vector<double> head;
    std::vector<double> relation;
    std::vector<double> tail;
    std::vector<double> filters;  // ConvKB only
    std::vector<double> dense;    // ConvKB only
};

Gradient gradient(const ModelParameters& params, const Triple& triple);

}  // namespace kge
