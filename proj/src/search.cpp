#include "kge/search.hpp"

#include <json.hpp>

#include <random>
#include <stdexcept>

#include "kge/error.hpp"
#include "kge/evaluation.hpp"
#include "kge/util.hpp"

namespace kge {

void SearchSpace::validate() const {
    if (batches_count.empty() || seed.empty() || epochs.empty() || k.empty() || eta.empty() || optimizer.empty() ||
        loss.empty() || regularizer.empty() || lr.empty() || (model == ModelKind::convkb && num_filters.empty()))
        throw std::invalid_argument("search space has an empty candidate list");
}

SearchSpace default_search_space(ModelKind model) {
    SearchSpace s;
    s.model = model;
    switch (model) {
        case ModelKind::transe: break;
        case ModelKind::distmult:
        case ModelKind::hole:
        case ModelKind::convkb: s.epochs = {500, 1000, 4000}; break;
        case ModelKind::complex:
            s.batches_count = {50, 100, 150, 200};
            s.epochs = {500, 1000, 4000};
            break;
    }
    return s;
}

SearchSpace load_search_space(std::string_view json_text) {
    SearchSpace s;
    try {
        auto j = nlohmann::json::parse(json_text);
        if (j.contains("model")) s = default_search_space(parse_model_kind(j["model"].get<std::string>()));
        auto take = [&](const char* key, auto& dst) {
            if (j.contains(key)) dst = j[key].get<std::decay_t<decltype(dst)>>();
        };
        take("batches_count", s.batches_count);
        take("seed", s.seed);
        take("epochs", s.epochs);
        take("k", s.k);
        take("eta", s.eta);
        take("lr", s.lr);
        take("num_filters", s.num_filters);
        if (j.contains("optimizer")) {
            s.optimizer.clear();
            for (const auto& v : j["optimizer"]) s.optimizer.push_back(parse_optimizer(v.get<std::string>()));
        }
        if (j.contains("loss")) {
            s.loss.clear();
            for (const auto& v : j["loss"]) s.loss.push_back(parse_loss(v.get<std::string>()));
        }
        if (j.contains("regularizer")) {
            s.regularizer.clear();
            for (const auto& v : j["regularizer"])
                s.regularizer.push_back(v.is_null() ? RegularizerKind::none : parse_regularizer(v.get<std::string>()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("search space: ") + e.what());
    }
    s.validate();
    return s;
}

std::vector<TrainingConfig> sample_configs(const SearchSpace& space, std::size_t trials, std::uint64_t seed) {
    space.validate();
    std::mt19937_64 rng(seed);
    auto pick = [&](const auto& values) {
        std::uniform_int_distribution<std::size_t> d(0, values.size() - 1);
        return values[d(rng)];
    };
    std::vector<TrainingConfig> out;
    for (std::size_t t = 0; t < trials; ++t) {
        TrainingConfig c;
        c.model = space.model;
        c.batches_count = pick(space.batches_count);
        c.seed = pick(space.seed);
        c.epochs = pick(space.epochs);
        c.k = pick(space.k);
        c.eta = pick(space.eta);
        c.optimizer = pick(space.optimizer);
        c.loss = pick(space.loss);
        c.regularizer = pick(space.regularizer);
        c.lr = pick(space.lr);
        if (space.model == ModelKind::convkb) c.model_options.num_filters = pick(space.num_filters);
        out.push_back(c);
    }
    return out;
}

SearchResult random_search(const SearchSpace& space, std::size_t trials, const KnowledgeGraph& kg, std::uint64_t seed,
                           int threads) {
    if (trials < 1) throw std::invalid_argument("random search needs at least one trial");
    const auto train_set = kg.triples_in(Split::train);
    const auto valid_set = kg.triples_in(Split::valid);
    if (valid_set.empty()) throw std::invalid_argument("random search needs a non-empty validation split");

    SearchResult result;
    std::size_t id = 0;
    for (const auto& config : sample_configs(space, trials, seed)) {
        auto trained = train(train_set, kg.num_entities(), kg.num_relations(), config);
        auto report = evaluate_ranking(trained.params, kg, valid_set, RankMode::filtered, threads);
        result.trials.push_back({id, config, report.metrics.mrr});
        if (id == 0 || report.metrics.mrr > result.trials[result.best_trial].valid_mrr) result.best_trial = id;
        ++id;
    }
    result.best = result.trials[result.best_trial].config;
    return result;
}

std::string SearchResult::log_tsv() const {
    std::string out;
    for (const auto& t : trials) out += std::to_string(t.id) + '\t' + t.config.to_json() + '\t' + format_double(t.valid_mrr) + '\n';
    return out;
}

}  // namespace kge
