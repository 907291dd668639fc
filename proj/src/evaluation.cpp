#include "kge/evaluation.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kge/error.hpp"
#include "kge/kernels.hpp"
#include "kge/util.hpp"

namespace kge {

std::string_view to_string(RankMode m) { return m == RankMode::raw ? "raw" : "filtered"; }

std::size_t rank_triple(const ModelParameters& params, const KnowledgeGraph& known, const Triple& test, Side side,
                        RankMode mode) {
    const double f_test = score(params, test);
    const EntityId truth = side == Side::subject ? test.subject : test.object;
    std::size_t ahead = 0;
    Triple c = test;
    auto& slot = side == Side::subject ? c.subject : c.object;
    for (EntityId e = 0; e < params.num_entities; ++e) {
        if (e == truth) continue;
        slot = e;
        if (mode == RankMode::filtered && known.contains(c)) continue;
        if (score(params, c) >= f_test) ++ahead;
    }
    return ahead + 1;
}

std::size_t rank_from_scores(std::span<const double> scores, std::size_t true_index, std::span<const char> skip) {
    std::size_t ahead = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i == true_index || (!skip.empty() && skip[i])) continue;
        if (scores[i] >= scores[true_index]) ++ahead;
    }
    return ahead + 1;
}

double hits_at(std::span<const std::size_t> ranks, std::size_t n) {
    if (ranks.empty()) return 0;
    std::size_t hit = 0;
    for (auto r : ranks)
        if (r <= n) ++hit;
    return static_cast<double>(hit) / static_cast<double>(ranks.size());
}

RankingMetrics metrics_from_ranks(std::span<const std::size_t> ranks) {
    RankingMetrics m;
    m.count = ranks.size();
    if (ranks.empty()) return m;
    for (auto r : ranks) {
        m.mrr += 1.0 / static_cast<double>(r);
        m.mr += static_cast<double>(r);
    }
    m.mrr /= static_cast<double>(ranks.size());
    m.mr /= static_cast<double>(ranks.size());
    m.hits1 = hits_at(ranks, 1);
    m.hits3 = hits_at(ranks, 3);
    m.hits10 = hits_at(ranks, 10);
    return m;
}

RankingReport evaluate_ranking(const ModelParameters& params, const KnowledgeGraph& kg, const std::vector<Triple>& test,
                               RankMode mode, int threads) {
    if (test.empty()) throw std::invalid_argument("evaluation split is empty");
    RankingReport report;
    report.mode = mode;
    report.triples = test;
    report.ranks = threads <= 1 ? serial::rank_all(params, kg, test, mode) : parallel::rank_all(params, kg, test, mode, threads);
    std::vector<std::size_t> flat;
    flat.reserve(2 * test.size());
    for (const auto& r : report.ranks) {
        flat.push_back(r.subject);
        flat.push_back(r.object);
    }
    report.metrics = metrics_from_ranks(flat);
    return report;
}

std::string RankingReport::metrics_tsv() const {
    std::string out;
    out += "mode\t" + std::string(to_string(mode)) + '\n';
    out += "triples\t" + std::to_string(triples.size()) + '\n';
    out += "mrr\t" + format_double(metrics.mrr) + '\n';
    out += "mr\t" + format_double(metrics.mr) + '\n';
    out += "hits@1\t" + format_double(metrics.hits1) + '\n';
    out += "hits@3\t" + format_double(metrics.hits3) + '\n';
    out += "hits@10\t" + format_double(metrics.hits10) + '\n';
    return out;
}

std::string RankingReport::ranks_tsv(const KnowledgeGraph& kg) const {
    std::string out = "subject\tpredicate\tobject\tsubject_rank\tobject_rank\n";
    for (std::size_t i = 0; i < triples.size(); ++i) {
        const auto& t = triples[i];
        out += kg.entities().label(t.subject) + '\t' + kg.relations().label(t.predicate) + '\t' +
               kg.entities().label(t.object) + '\t' + std::to_string(ranks[i].subject) + '\t' +
               std::to_string(ranks[i].object) + '\n';
    }
    return out;
}

std::string RankingReport::summary() const {
    std::ostringstream ss;
    ss.precision(4);
    ss << std::fixed;
    ss << "Ranking evaluation (" << to_string(mode) << ", " << triples.size() << " triples, " << metrics.count
       << " side-ranks)\n"
       << "  MRR      " << metrics.mrr << '\n'
       << "  MR       " << metrics.mr << '\n'
       << "  Hits@1   " << metrics.hits1 << '\n'
       << "  Hits@3   " << metrics.hits3 << '\n'
       << "  Hits@10  " << metrics.hits10 << '\n';
    return ss.str();
}

// --- calibration ---------------------------------------------------------

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

double Calibration::probability(double score) const { return sigmoid(a * score + b); }

Calibration calibrate(std::span<const double> scores, std::span<const char> labels, std::size_t max_iter,
                      double tolerance) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    double n_pos = 0, n_neg = 0;
    for (char l : labels) (l ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("calibration needs both classes");

    const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    const double t_neg = 1.0 / (n_neg + 2.0);
    auto target = [&](std::size_t i) { return labels[i] ? t_pos : t_neg; };

    auto objective = [&](double a, double b) {
        double f = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double z = a * scores[i] + b;
            f += target(i) * softplus(-z) + (1.0 - target(i)) * softplus(z);
        }
        return f;
    };

    Calibration c;
    c.a = 0;
    c.b = std::log((n_pos + 1.0) / (n_neg + 1.0));
    double f = objective(c.a, c.b);
    for (c.iterations = 0; c.iterations < max_iter; ++c.iterations) {
        double ga = 0, gb = 0, haa = 1e-12, hab = 0, hbb = 1e-12;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double p = sigmoid(c.a * scores[i] + c.b);
            const double r = p - target(i);
            const double w = p * (1.0 - p);
            ga += r * scores[i];
            gb += r;
            haa += w * scores[i] * scores[i];
            hab += w * scores[i];
            hbb += w;
        }
        if (std::abs(ga) < tolerance && std::abs(gb) < tolerance) break;
        const double det = haa * hbb - hab * hab;
        const double da = -(hbb * ga - hab * gb) / det;
        const double db = -(-hab * ga + haa * gb) / det;
        const double slope = ga * da + gb * db;

        double step = 1.0;
        bool moved = false;
        while (step >= 1e-10) {
            const double na = c.a + step * da, nb = c.b + step * db;
            const double nf = objective(na, nb);
            if (nf < f + 1e-4 * step * slope) {
                c.a = na;
                c.b = nb;
                f = nf;
                moved = true;
                break;
            }
            step /= 2;
        }
        if (!moved) break;
    }
    return c;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
    ClassificationMetrics m;
    const auto total = cm.total();
    m.accuracy = total ? static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total) : 0.0;
    if (cm.tp + cm.fp == 0) m.precision_degenerate = true;
    else m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    if (cm.tp + cm.fn == 0) m.recall_degenerate = true;
    else m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    if (m.precision + m.recall == 0) m.f_degenerate = true;
    else m.f_score = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

std::vector<LabelledFact> parse_labelled_facts(std::string_view text, const KnowledgeGraph& kg) {
    std::vector<LabelledFact> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto cols = split_tabs(t);
        auto where = "line " + std::to_string(line_no) + ": ";
        if (cols.size() != 4) throw DataError(where + "expected subject TAB predicate TAB object TAB label");
        auto s = kg.entities().find(trim(cols[0]));
        auto p = kg.relations().find(trim(cols[1]));
        auto o = kg.entities().find(trim(cols[2]));
        if (!s || !p || !o) throw DataError(where + "unknown entity or relation");
        auto label = trim(cols[3]);
        if (label != "true" && label != "false") throw DataError(where + "label must be true or false");
        out.push_back({{*s, *p, *o}, label == "true"});
    }
    return out;
}

ClassificationResult classify(const ModelParameters& params, const Calibration& calibration,
                              const std::vector<LabelledFact>& facts) {
    ClassificationResult r;
    r.probabilities.reserve(facts.size());
    for (const auto& f : facts) {
        const double p = calibration.probability(score(params, f.triple));
        r.probabilities.push_back(p);
        const bool predicted = p >= 0.5;
        if (predicted && f.label) ++r.confusion.tp;
        else if (predicted) ++r.confusion.fp;
        else if (f.label) ++r.confusion.fn;
        else ++r.confusion.tn;
    }
    r.metrics = classification_metrics(r.confusion);
    return r;
}

std::vector<LabelledFact> synthesize_calibration_set(const KnowledgeGraph& kg, const std::vector<Triple>& positives,
                                                     std::uint64_t seed) {
    std::vector<LabelledFact> out;
    if (kg.num_entities() < 2) return out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<EntityId> pick(0, kg.num_entities() - 1);
    std::bernoulli_distribution coin(0.5);
    for (const auto& pos : positives) {
        out.push_back({pos, true});
        for (int attempt = 0; attempt < 100; ++attempt) {
            Triple neg = pos;
            (coin(rng) ? neg.subject : neg.object) = pick(rng);
            if (!kg.contains(neg)) {
                out.push_back({neg, false});
                break;
            }
        }
    }
    return out;
}

}  // namespace kge
