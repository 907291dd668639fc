#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kge/ingest.hpp"

namespace kge {

// Ratio with a flag for the degenerate case (no words / no URLs), where the
// ratio is pinned to 1 so no penalty applies.
struct Similarity {
    double value = 1.0;
    bool empty = false;
};

// Whitespace split (Unicode spaces), ASCII lowercase, ASCII punctuation
// stripped from token edges. Tokens that end up empty are dropped.
std::vector<std::string> tokenize(std::string_view text);

// Lowercased host of a URL, without userinfo or port.
std::string url_host(std::string_view url);

Similarity tweet_similarity(std::size_t distinct_words, std::size_t words);
Similarity tweet_similarity(const UserRecord& record);
Similarity url_similarity(std::size_t distinct_urls, std::size_t distinct_hosts, std::size_t urls);
Similarity url_similarity(const UserRecord& record);

double combined_domain_score(double twt_sim, double sum_content_score, double url_sim, double sum_url_score);

// log10(n / df); nullopt when df == 0.
std::optional<double> inverse_domain_frequency(std::size_t df, std::size_t n);

// (FOL - FRD) / Age, or 1 / Age when FOL == FRD. Throws on Age <= 0.
double ff_ratio(std::uint64_t followers, std::uint64_t friends, double age_years);

struct Engagement {
    double retweets = 0;  // R
    double likes = 0;     // L
    double replies = 0;   // P
    double positive = 0;  // SP
    double negative = 0;  // SN (<= 0)
    double sentiment = 0; // S = SP - SN
};

// Every per-user, per-domain quantity of the credibility feature metric.
struct CredibilityFeatures {
    std::string user_id;
    std::string handle;
    Similarity twt_sim;
    Similarity url_sim;
    std::vector<double> sum_content_score;  // Sum_cnt_scr[d]
    std::vector<double> sum_url_score;      // Sum_url_scr[d]
    std::vector<double> combined_score;     // Sc[d]
    std::size_t df = 0;
    std::optional<double> idf;
    std::vector<double> weight;  // W[d] (0 when idf is undefined)
    std::vector<Engagement> engagement;
    std::uint64_t followers = 0;
    std::uint64_t friends = 0;
    double age_years = 1;
    double ff_r = 0;
};

CredibilityFeatures compute_features(const UserRecord& record, const std::vector<std::string>& domains,
                                     const DomainScoreProvider& provider = RecordScoreProvider{});

// Sums over the tweets assigned to domain `d` (content or URL score > 0).
Engagement engagement(const UserRecord& record, std::string_view domain,
                      const DomainScoreProvider& provider = RecordScoreProvider{});

// Order of the normalized per-domain feature vector.
enum class Feature : std::size_t { weight, retweets, likes, replies, sentiment, ff_ratio };
inline constexpr std::size_t kFeatureCount = 6;
using FeatureVector = std::array<double, kFeatureCount>;

// normalized[u][d] -- domain features divided by the per-domain maximum over
// users; FF_R min-max scaled over users (it can be negative).
std::vector<std::vector<FeatureVector>> normalize_per_domain(const std::vector<CredibilityFeatures>& users);
// Same reduction applied to already-raw vectors; used to check idempotence.
std::vector<std::vector<FeatureVector>> normalize_vectors(const std::vector<std::vector<FeatureVector>>& raw);
std::vector<std::vector<FeatureVector>> raw_vectors(const std::vector<CredibilityFeatures>& users);

struct SpamPolicy {
    double breadth_threshold = 0.95;     // DF / n
    double repetition_threshold = 0.5;   // Twt_Sim
};

struct CredibilityConfig {
    std::vector<std::string> domains = canonical_domains();
    FeatureVector weights{1, 1, 1, 1, 1, 1};
    SpamPolicy spam;
};

CredibilityConfig load_credibility_config(std::string_view json_text);

struct CredibilityRecord {
    std::string user_id;
    std::string handle;
    std::vector<FeatureVector> normalized;  // per domain, chunk-averaged
    std::vector<double> credibility;        // per domain, in [0, 1]
    bool spam = false;
    std::string reason;  // empty when not flagged
};

struct CredibilityReport {
    std::vector<std::string> domains;
    std::vector<CredibilityRecord> users;
    std::vector<CredibilityFeatures> features;  // whole-record features, same order as users

    // User indices ordered by descending credibility in domain d; ties by
    // user id. Excluded users are omitted.
    std::vector<std::size_t> ranking(std::size_t d) const;
    std::string to_tsv() const;
};

double credibility_value(const FeatureVector& normalized, const FeatureVector& weights);

// Per-chunk feature computation, normalization and weighted scoring, averaged
// across chunks, followed by the spam policy on each user's whole record.
CredibilityReport credibility_rank(const std::vector<UserRecord>& records, const CredibilityConfig& config,
                                   const DomainScoreProvider& provider = RecordScoreProvider{});

bool is_spammer(const CredibilityFeatures& features, std::size_t n_domains, const SpamPolicy& policy);

struct SpamSplit {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> flagged;
};

SpamSplit filter_spammers(const std::vector<CredibilityFeatures>& users, std::size_t n_domains,
                          const SpamPolicy& policy);

// Drops every triple whose subject is a flagged user's handle or id.
std::vector<LabelTriple> drop_flagged_facts(const std::vector<LabelTriple>& triples, const CredibilityReport& report);

}  // namespace kge
