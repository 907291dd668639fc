#include "kge/training.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "kge/error.hpp"

namespace kge {

std::string_view to_string(LossKind v) {
    switch (v) {
        case LossKind::pairwise: return "pairwise";
        case LossKind::nll: return "nll";
        case LossKind::absolute_margin: return "absolute_margin";
    }
    return "pairwise";
}

std::string_view to_string(RegularizerKind v) { return v == RegularizerKind::lp ? "LP" : "none"; }

std::string_view to_string(OptimizerKind v) {
    switch (v) {
        case OptimizerKind::sgd: return "sgd";
        case OptimizerKind::adagrad: return "adagrad";
        case OptimizerKind::adam: return "adam";
    }
    return "sgd";
}

LossKind parse_loss(std::string_view s) {
    for (auto v : {LossKind::pairwise, LossKind::nll, LossKind::absolute_margin})
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown loss '" + std::string(s) + "'");
}

RegularizerKind parse_regularizer(std::string_view s) {
    if (s == "none" || s == "None" || s.empty()) return RegularizerKind::none;
    if (s == "LP" || s == "lp") return RegularizerKind::lp;
    throw std::invalid_argument("unknown regularizer '" + std::string(s) + "'");
}

OptimizerKind parse_optimizer(std::string_view s) {
    for (auto v : {OptimizerKind::sgd, OptimizerKind::adagrad, OptimizerKind::adam})
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown optimizer '" + std::string(s) + "'");
}

void TrainingConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (eta < 1) throw std::invalid_argument("eta must be >= 1");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (batches_count < 1) throw std::invalid_argument("batches_count must be >= 1");
    if (!(lr > 0)) throw std::invalid_argument("lr must be > 0");
    if (loss != LossKind::nll && !(margin > 0)) throw std::invalid_argument("margin must be > 0");
    if (regularizer == RegularizerKind::lp && (lp_p < 1 || lp_p > 3)) throw std::invalid_argument("LP p must be 1, 2 or 3");
    if (regularizer == RegularizerKind::lp && lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    if (model_options.transe_norm != 1 && model_options.transe_norm != 2)
        throw std::invalid_argument("TransE norm must be 1 or 2");
}

std::string TrainingConfig::to_json() const {
    nlohmann::ordered_json j;
    j["model"] = to_string(model);
    j["batches_count"] = batches_count;
    j["seed"] = seed;
    j["epochs"] = epochs;
    j["k"] = k;
    j["eta"] = eta;
    j["loss"] = to_string(loss);
    j["loss_params"] = {{"margin", margin}};
    j["regularizer"] = to_string(regularizer);
    j["regularizer_params"] = {{"lambda", lambda}, {"p", lp_p}};
    j["optimizer"] = to_string(optimizer);
    j["optimizer_params"] = {{"lr", lr}, {"beta1", beta1}, {"beta2", beta2}, {"epsilon", epsilon}};
    j["transe_norm"] = model_options.transe_norm;
    j["num_filters"] = model_options.num_filters;
    j["verbose"] = verbose;
    return j.dump();
}

TrainingConfig TrainingConfig::from_json(std::string_view text) { return from_json(text, TrainingConfig{}); }

TrainingConfig TrainingConfig::from_json(std::string_view text, TrainingConfig c) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        if (j.contains("model")) c.model = parse_model_kind(j["model"].get<std::string>());
        if (j.contains("batches_count")) c.batches_count = j["batches_count"].get<std::size_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
        if (j.contains("k")) c.k = j["k"].get<std::size_t>();
        if (j.contains("eta")) c.eta = j["eta"].get<std::size_t>();
        if (j.contains("loss")) c.loss = parse_loss(j["loss"].get<std::string>());
        if (j.contains("loss_params")) c.margin = j["loss_params"].value("margin", c.margin);
        if (j.contains("regularizer"))
            c.regularizer = j["regularizer"].is_null() ? RegularizerKind::none
                                                       : parse_regularizer(j["regularizer"].get<std::string>());
        if (j.contains("regularizer_params")) {
            c.lambda = j["regularizer_params"].value("lambda", c.lambda);
            c.lp_p = j["regularizer_params"].value("p", c.lp_p);
        }
        if (j.contains("optimizer")) c.optimizer = parse_optimizer(j["optimizer"].get<std::string>());
        if (j.contains("optimizer_params")) {
            const auto& o = j["optimizer_params"];
            c.lr = o.value("lr", c.lr);
            c.beta1 = o.value("beta1", c.beta1);
            c.beta2 = o.value("beta2", c.beta2);
            c.epsilon = o.value("epsilon", c.epsilon);
        }
        if (j.contains("transe_norm")) c.model_options.transe_norm = j["transe_norm"].get<int>();
        if (j.contains("num_filters")) c.model_options.num_filters = j["num_filters"].get<std::size_t>();
        if (j.contains("verbose")) c.verbose = j["verbose"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("training config: ") + e.what());
    }
    return c;
}

std::vector<Triple> sample_negatives(std::span<const Triple> batch, std::size_t eta, std::uint32_t num_entities,
                                     std::mt19937_64& rng) {
    if (num_entities < 2) throw std::invalid_argument("negative sampling needs at least two entities");
    std::vector<Triple> out;
    out.reserve(batch.size() * eta);
    std::uniform_int_distribution<std::uint32_t> other(0, num_entities - 2);
    std::bernoulli_distribution coin(0.5);
    for (const auto& pos : batch) {
        for (std::size_t i = 0; i < eta; ++i) {
            Triple neg = pos;
            const bool head = coin(rng);
            auto& slot = head ? neg.subject : neg.object;
            auto e = other(rng);
            if (e >= slot) ++e;  // skip the replaced entity
            slot = e;
            out.push_back(neg);
        }
    }
    return out;
}

namespace {

// log(1 + exp(x)) without overflow
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

LossTerms loss_terms(double f_pos, std::span<const double> f_negs, const TrainingConfig& c) {
    LossTerms out;
    out.d_negatives.assign(f_negs.size(), 0.0);
    switch (c.loss) {
        case LossKind::pairwise:
            for (std::size_t i = 0; i < f_negs.size(); ++i) {
                const double h = c.margin - f_pos + f_negs[i];
                if (h > 0) {
                    out.value += h;
                    out.d_positive -= 1.0;
                    out.d_negatives[i] = 1.0;
                }
            }
            break;
        case LossKind::nll:
            out.value = softplus(-f_pos);
            out.d_positive = -sigmoid(-f_pos);
            for (std::size_t i = 0; i < f_negs.size(); ++i) {
                out.value += softplus(f_negs[i]);
                out.d_negatives[i] = sigmoid(f_negs[i]);
            }
            break;
        case LossKind::absolute_margin:
            if (c.margin - f_pos > 0) {
                out.value += c.margin - f_pos;
                out.d_positive = -1.0;
            }
            for (std::size_t i = 0; i < f_negs.size(); ++i) {
                if (f_negs[i] > 0) {
                    out.value += f_negs[i];
                    out.d_negatives[i] = 1.0;
                }
            }
            break;
    }
    return out;
}

double lp_penalty(std::span<const double> row, double lambda, int p, std::span<double> grad) {
    double acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const double a = std::abs(row[i]);
        const double s = row[i] > 0 ? 1.0 : row[i] < 0 ? -1.0 : 0.0;
        switch (p) {
            case 1:
                acc += a;
                if (!grad.empty()) grad[i] += lambda * s;
                break;
            case 2:
                acc += a * a;
                if (!grad.empty()) grad[i] += lambda * 2.0 * row[i];
                break;
            default:
                acc += a * a * a;
                if (!grad.empty()) grad[i] += lambda * 3.0 * a * a * s;
                break;
        }
    }
    return lambda * acc;
}

void SparseGradient::add(const Gradient& g, double scale) {
    auto axpy = [scale](std::vector<double>& dst, const std::vector<double>& src) {
        if (dst.empty()) dst.assign(src.size(), 0.0);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
    };
    axpy(entities[g.triple.subject], g.head);
    axpy(relations[g.triple.predicate], g.relation);
    axpy(entities[g.triple.object], g.tail);
    if (!g.filters.empty()) axpy(filters, g.filters);
    if (!g.dense.empty()) axpy(dense, g.dense);
}

OptimizerState OptimizerState::for_params(const ModelParameters& p) {
    OptimizerState s;
    s.entity_m.assign(p.entities.size(), 0.0);
    s.entity_v.assign(p.entities.size(), 0.0);
    s.relation_m.assign(p.relations.size(), 0.0);
    s.relation_v.assign(p.relations.size(), 0.0);
    s.filter_m.assign(p.filters.size(), 0.0);
    s.filter_v.assign(p.filters.size(), 0.0);
    s.dense_m.assign(p.dense.size(), 0.0);
    s.dense_v.assign(p.dense.size(), 0.0);
    s.entity_steps.assign(p.num_entities, 0);
    s.relation_steps.assign(p.num_relations, 0);
    return s;
}

namespace {

// m doubles as the adagrad accumulator; v is unused there.
void update(std::span<double> theta, std::span<const double> g, std::span<double> m, std::span<double> v,
            std::uint64_t step, const TrainingConfig& c) {
    switch (c.optimizer) {
        case OptimizerKind::sgd:
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= c.lr * g[i];
            break;
        case OptimizerKind::adagrad:
            for (std::size_t i = 0; i < theta.size(); ++i) {
                m[i] += g[i] * g[i];
                theta[i] -= c.lr * g[i] / (std::sqrt(m[i]) + c.epsilon);
            }
            break;
        case OptimizerKind::adam: {
            const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
            for (std::size_t i = 0; i < theta.size(); ++i) {
                m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
                v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
                theta[i] -= c.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + c.epsilon);
            }
            break;
        }
    }
}

void check_finite(const std::vector<double>& g, const char* what, std::uint32_t id) {
    for (double x : g)
        if (!std::isfinite(x)) throw TrainingError(std::string("non-finite gradient in ") + what + " row " + std::to_string(id));
}

}  // namespace

void optimizer_step(ModelParameters& p, const SparseGradient& grad, OptimizerState& s, const TrainingConfig& c) {
    for (const auto& [id, g] : grad.entities) check_finite(g, "entity", id);
    for (const auto& [id, g] : grad.relations) check_finite(g, "relation", id);
    check_finite(grad.filters, "convkb filters", 0);
    check_finite(grad.dense, "convkb dense", 0);

    const auto w = p.width;
    for (const auto& [id, g] : grad.entities) {
        const auto off = std::size_t{id} * w;
        update(p.entity(id), g, {s.entity_m.data() + off, w}, {s.entity_v.data() + off, w}, ++s.entity_steps[id], c);
    }
    for (const auto& [id, g] : grad.relations) {
        const auto off = std::size_t{id} * w;
        update(p.relation(id), g, {s.relation_m.data() + off, w}, {s.relation_v.data() + off, w},
               ++s.relation_steps[id], c);
    }
    if (!grad.filters.empty() || !grad.dense.empty()) {
        ++s.dense_steps;
        if (!grad.filters.empty()) update(p.filters, grad.filters, s.filter_m, s.filter_v, s.dense_steps, c);
        if (!grad.dense.empty()) update(p.dense, grad.dense, s.dense_m, s.dense_v, s.dense_steps, c);
    }
}

TrainResult train(const std::vector<Triple>& positives, std::uint32_t num_entities, std::uint32_t num_relations,
                  const TrainingConfig& c) {
    c.validate();
    if (positives.empty()) throw std::invalid_argument("training split is empty");

    TrainResult result{init_params(c.model, c.k, c.seed, num_entities, num_relations, c.model_options), {}};
    auto& p = result.params;
    auto state = OptimizerState::for_params(p);
    std::seed_seq seq{c.seed, std::uint64_t{0x6b6765}};
    std::mt19937_64 rng(seq);

    const auto n = positives.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Triple> batch;
    std::vector<double> f_negs(c.eta);

    for (std::size_t epoch = 0; epoch < c.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0;
        std::size_t batches = 0;
        for (std::size_t b = 0; b < c.batches_count; ++b) {
            const auto lo = b * n / c.batches_count, hi = (b + 1) * n / c.batches_count;
            if (lo == hi) continue;
            batch.clear();
            for (auto i = lo; i < hi; ++i) batch.push_back(positives[order[i]]);
            const auto negatives = sample_negatives(batch, c.eta, num_entities, rng);

            SparseGradient grad;
            double batch_loss = 0;
            const double scale = 1.0 / static_cast<double>(batch.size());
            for (std::size_t i = 0; i < batch.size(); ++i) {
                const double f_pos = score(p, batch[i]);
                for (std::size_t j = 0; j < c.eta; ++j) f_negs[j] = score(p, negatives[i * c.eta + j]);
                auto terms = loss_terms(f_pos, f_negs, c);
                batch_loss += terms.value;
                if (terms.d_positive != 0) grad.add(gradient(p, batch[i]), scale * terms.d_positive);
                for (std::size_t j = 0; j < c.eta; ++j)
                    if (terms.d_negatives[j] != 0) grad.add(gradient(p, negatives[i * c.eta + j]), scale * terms.d_negatives[j]);
            }
            batch_loss *= scale;

            if (c.regularizer == RegularizerKind::lp) {
                // penalise every row the batch touched, including zero-gradient ones
                std::set<EntityId> ents;
                std::set<RelationId> rels;
                for (const auto& t : batch) ents.insert(t.subject), ents.insert(t.object), rels.insert(t.predicate);
                for (const auto& t : negatives) ents.insert(t.subject), ents.insert(t.object);
                for (auto e : ents) {
                    auto& g = grad.entities[e];
                    if (g.empty()) g.assign(p.width, 0.0);
                    batch_loss += lp_penalty(p.entity(e), c.lambda, c.lp_p, g);
                }
                for (auto r : rels) {
                    auto& g = grad.relations[r];
                    if (g.empty()) g.assign(p.width, 0.0);
                    batch_loss += lp_penalty(p.relation(r), c.lambda, c.lp_p, g);
                }
            }
            if (!std::isfinite(batch_loss))
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(b));

            try {
                optimizer_step(p, grad, state, c);
            } catch (const TrainingError& e) {
                throw TrainingError("epoch " + std::to_string(epoch) + ", batch " + std::to_string(b) + ": " + e.what());
            }
            if (c.model == ModelKind::transe)
                for (const auto& [e, g] : grad.entities) normalize_entity(p, e);

            epoch_loss += batch_loss;
            ++batches;
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
        if (c.verbose) std::cerr << "epoch " << epoch + 1 << "/" << c.epochs << " loss " << result.epoch_loss.back() << '\n';
    }
    return result;
}

}  // namespace kge
