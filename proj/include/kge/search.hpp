#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kge/kg.hpp"
#include "kge/training.hpp"

namespace kge {

// Candidate values per hyperparameter; a trial draws each uniformly.
struct SearchSpace {
    ModelKind model = ModelKind::transe;
    std::vector<std::size_t> batches_count{50, 100, 150};
    std::vector<std::uint64_t> seed{0, 555};
    std::vector<std::size_t> epochs{500, 1000, 2000, 4000};
    std::vector<std::size_t> k{100, 200};
    std::vector<std::size_t> eta{5, 10, 15, 20};
    std::vector<OptimizerKind> optimizer{OptimizerKind::adam, OptimizerKind::adagrad};
    std::vector<LossKind> loss{LossKind::pairwise, LossKind::nll, LossKind::absolute_margin};
    std::vector<RegularizerKind> regularizer{RegularizerKind::none, RegularizerKind::lp};
    std::vector<double> lr{0.1};
    std::vector<std::size_t> num_filters{24, 32};  // ConvKB only

    void validate() const;
};

// The grid examined for each model in the original experiments.
SearchSpace default_search_space(ModelKind model);
SearchSpace load_search_space(std::string_view json_text);

struct Trial {
    std::size_t id = 0;
    TrainingConfig config;
    double valid_mrr = 0;
};

struct SearchResult {
    TrainingConfig best;
    std::size_t best_trial = 0;
    std::vector<Trial> trials;

    std::string log_tsv() const;
};

std::vector<TrainingConfig> sample_configs(const SearchSpace& space, std::size_t trials, std::uint64_t seed);

// Trains every sampled config on the train split and keeps the one with the
// highest filtered validation MRR (earlier trial wins ties).
SearchResult random_search(const SearchSpace& space, std::size_t trials, const KnowledgeGraph& kg, std::uint64_t seed,
                           int threads = 1);

}  // namespace kge
