#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kge/kg.hpp"
#include "kge/model.hpp"

namespace kge {

enum class RankMode { raw, filtered };
enum class Side { subject, object };

std::string_view to_string(RankMode m);

// 1 + #{corruptions scoring >= the test triple}. Ties count against the
// test triple. In filtered mode, corruptions that are known triples (any
// split of `known`) are skipped.
std::size_t rank_triple(const ModelParameters& params, const KnowledgeGraph& known, const Triple& test, Side side,
                        RankMode mode);

// Same protocol over precomputed candidate scores (candidate e at index e).
std::size_t rank_from_scores(std::span<const double> scores, std::size_t true_index, std::span<const char> skip);

struct SideRanks {
    std::size_t subject = 1;
    std::size_t object = 1;
    friend bool operator==(const SideRanks&, const SideRanks&) = default;
};

struct RankingMetrics {
    double mrr = 0;
    double mr = 0;
    double hits1 = 0;
    double hits3 = 0;
    double hits10 = 0;
    std::size_t count = 0;  // number of side-ranks
};

RankingMetrics metrics_from_ranks(std::span<const std::size_t> ranks);
double hits_at(std::span<const std::size_t> ranks, std::size_t n);

struct RankingReport {
    RankMode mode = RankMode::filtered;
    std::vector<Triple> triples;
    std::vector<SideRanks> ranks;
    RankingMetrics metrics;

    std::string metrics_tsv() const;
    std::string ranks_tsv(const KnowledgeGraph& kg) const;
    std::string summary() const;
};

// threads <= 1 runs the serial kernel; otherwise the OpenMP kernel, which
// produces identical ranks.
RankingReport evaluate_ranking(const ModelParameters& params, const KnowledgeGraph& kg,
                               const std::vector<Triple>& test, RankMode mode, int threads = 1);

// --- classification ------------------------------------------------------

struct Calibration {
    double a = 0;  // slope
    double b = 0;  // intercept
    std::size_t iterations = 0;

    double probability(double score) const;
};

// Platt scaling: Newton iterations with backtracking on the regularised
// targets (N+ + 1) / (N+ + 2) and 1 / (N- + 2). Throws on single-class input.
Calibration calibrate(std::span<const double> scores, std::span<const char> labels, std::size_t max_iter = 100,
                      double tolerance = 1e-8);

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

struct ClassificationMetrics {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f_score = 0;
    bool precision_degenerate = false;
    bool recall_degenerate = false;
    bool f_degenerate = false;
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

struct LabelledFact {
    Triple triple;
    bool label = false;
};

std::vector<LabelledFact> parse_labelled_facts(std::string_view text, const KnowledgeGraph& kg);

struct ClassificationResult {
    ConfusionMatrix confusion;
    ClassificationMetrics metrics;
    std::vector<double> probabilities;
};

ClassificationResult classify(const ModelParameters& params, const Calibration& calibration,
                              const std::vector<LabelledFact>& facts);

// Validation positives plus one filtered corruption each, for calibration
// when no labelled negatives exist.
std::vector<LabelledFact> synthesize_calibration_set(const KnowledgeGraph& kg, const std::vector<Triple>& positives,
                                                     std::uint64_t seed);

}  // namespace kge
