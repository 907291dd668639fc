#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kge/kg.hpp"
#include "kge/model.hpp"

namespace kge {

enum class LossKind { pairwise, nll, absolute_margin };
enum class RegularizerKind { none, lp };
enum class OptimizerKind { sgd, adagrad, adam };

std::string_view to_string(LossKind v);
std::string_view to_string(RegularizerKind v);
std::string_view to_string(OptimizerKind v);
LossKind parse_loss(std::string_view s);
RegularizerKind parse_regularizer(std::string_view s);
OptimizerKind parse_optimizer(std::string_view s);

struct TrainingConfig {
    ModelKind model = ModelKind::transe;
    std::size_t batches_count = 100;
    std::uint64_t seed = 0;
    std::size_t epochs = 100;
    std::size_t k = 100;
    std::size_t eta = 5;
    LossKind loss = LossKind::pairwise;
    double margin = 1.0;
    RegularizerKind regularizer = RegularizerKind::none;
    double lambda = 1e-5;
    int lp_p = 2;
    OptimizerKind optimizer = OptimizerKind::adagrad;
    double lr = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    ModelOptions model_options;
    bool verbose = false;

    void validate() const;  // throws std::invalid_argument
    std::string to_json() const;
    static TrainingConfig from_json(std::string_view text, TrainingConfig base);
    static TrainingConfig from_json(std::string_view text);

    friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

// eta corruptions per positive. Each replaces the head or the tail (fair
// coin) with a uniformly drawn different entity.
std::vector<Triple> sample_negatives(std::span<const Triple> batch, std::size_t eta, std::uint32_t num_entities,
                                     std::mt19937_64& rng);

struct LossTerms {
    double value = 0;
    double d_positive = 0;               // dL / df_pos
    std::vector<double> d_negatives;     // dL / df_neg
};

LossTerms loss_terms(double f_pos, std::span<const double> f_negs, const TrainingConfig& config);
inline double loss(double f_pos, std::span<const double> f_negs, const TrainingConfig& config) {
    return loss_terms(f_pos, f_negs, config).value;
}

// lambda * sum |theta|^p; adds the gradient into `grad` when given.
double lp_penalty(std::span<const double> row, double lambda, int p, std::span<double> grad = {});

// Sparse gradient of the batch loss: rows keyed by id, ordered.
struct SparseGradient {
    std::map<EntityId, std::vector<double>> entities;
    std::map<RelationId, std::vector<double>> relations;
    std::vector<double> filters;
    std::vector<double> dense;

    void add(const Gradient& g, double scale);
};

struct OptimizerState {
    std::vector<double> entity_m, entity_v, relation_m, relation_v, filter_m, filter_v, dense_m, dense_v;
    std::vector<std::uint64_t> entity_steps, relation_steps;
    std::uint64_t dense_steps = 0;

    static OptimizerState for_params(const ModelParameters& params);
};

// Rows absent from `grad` keep both value and state.
void optimizer_step(ModelParameters& params, const SparseGradient& grad, OptimizerState& state,
                    const TrainingConfig& config);

struct TrainResult {
    ModelParameters params;
    std::vector<double> epoch_loss;  // mean batch loss per epoch
};

// Single-threaded, bit-reproducible under the config seed.
TrainResult train(const std::vector<Triple>& positives, std::uint32_t num_entities, std::uint32_t num_relations,
                  const TrainingConfig& config);

}  // namespace kge
