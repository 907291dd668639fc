#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kge/kg.hpp"

namespace kge {

// --- triples -------------------------------------------------------------

std::vector<LabelTriple> parse_triples_tsv(std::string_view text);
std::vector<LabelTriple> parse_triples_tsv(const std::filesystem::path& path);
std::string format_triples_tsv(const std::vector<LabelTriple>& triples);

// --- social user records -------------------------------------------------

struct DomainScore {
    std::string domain;
    double score = 0;  // [0, 1]
};

struct Reply {
    std::string text;
    double sentiment = 0;  // [-1, 1]
};

struct Tweet {
    std::string text;
    std::vector<std::string> urls;
    std::uint64_t retweets = 0;
    std::uint64_t likes = 0;
    std::vector<Reply> replies;
    std::vector<DomainScore> domain_scores;
    std::vector<DomainScore> url_domain_scores;
};

struct UserRecord {
    std::string user_id;
    std::string handle;
    std::uint64_t followers = 0;
    std::uint64_t friends = 0;
    double age_years = 1;
    std::vector<Tweet> tweets;
    std::optional<std::string> chunk;
};

struct RecordError {
    std::size_t line = 0;
    std::string field;  // e.g. "tweets[2].replies[0].sentiment"
    std::string message;
};

struct UserRecordSet {
    std::vector<UserRecord> records;
    std::vector<RecordError> errors;
};

// One JSON object per line. Invalid records are reported, not thrown.
UserRecordSet parse_user_records(std::string_view text);
UserRecordSet parse_user_records(const std::filesystem::path& path);
std::string format_user_record(const UserRecord& record);

// The 23 top-level content domains used for domain scoring.
const std::vector<std::string>& canonical_domains();
std::vector<std::string> load_domains(const std::filesystem::path& path);

// Source of per-tweet domain scores. The default reads the scores carried
// in the record; a live classifier can be swapped in behind this interface.
class DomainScoreProvider {
public:
    virtual ~DomainScoreProvider() = default;
    virtual std::vector<DomainScore> content_scores(const Tweet& tweet) const = 0;
    virtual std::vector<DomainScore> url_scores(const Tweet& tweet) const = 0;
};

class RecordScoreProvider final : public DomainScoreProvider {
public:
    std::vector<DomainScore> content_scores(const Tweet& tweet) const override { return tweet.domain_scores; }
    std::vector<DomainScore> url_scores(const Tweet& tweet) const override { return tweet.url_domain_scores; }
};

// --- tabular mapping -----------------------------------------------------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table parse_table_tsv(std::string_view text);

struct MappingRule {
    std::string subject_column;
    std::string subject_prefix;
    std::string predicate;
    std::optional<std::string> object_column;
    std::optional<std::string> constant_object;
};

std::vector<MappingRule> parse_mapping_rules(std::string_view json_text);

// Row-major, rule-order triples; rows with an empty mapped cell are skipped
// for that rule.
std::vector<LabelTriple> map_tabular(const Table& table, const std::vector<MappingRule>& rules);

}  // namespace kge
