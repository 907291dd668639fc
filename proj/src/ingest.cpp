#include "kge/ingest.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>

#include "kge/error.hpp"
#include "kge/util.hpp"

namespace kge {

using nlohmann::json;

namespace {

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(line_no, line);
    }
}

}  // namespace

std::vector<LabelTriple> parse_triples_tsv(std::string_view text) {
    std::vector<LabelTriple> out;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (!valid_utf8(line)) throw DataError("line " + std::to_string(line_no) + ": invalid UTF-8");
        auto t = trim(line);
        if (t.empty() || t.front() == '#') return;
        auto cols = split_tabs(t);
        if (cols.size() != 3)
            throw DataError("line " + std::to_string(line_no) + ": expected 3 TAB-separated columns, got " +
                            std::to_string(cols.size()));
        LabelTriple lt{std::string(trim(cols[0])), std::string(trim(cols[1])), std::string(trim(cols[2]))};
        if (lt.subject.empty() || lt.predicate.empty() || lt.object.empty())
            throw DataError("line " + std::to_string(line_no) + ": empty label");
        out.push_back(std::move(lt));
    });
    return out;
}

std::vector<LabelTriple> parse_triples_tsv(const std::filesystem::path& path) {
    try {
        return parse_triples_tsv(std::string_view(read_file(path)));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string format_triples_tsv(const std::vector<LabelTriple>& triples) {
    std::string out;
    for (const auto& t : triples) out += t.subject + '\t' + t.predicate + '\t' + t.object + '\n';
    return out;
}

// --- user records --------------------------------------------------------

namespace {

struct FieldError : std::runtime_error {
    std::string field;
    FieldError(std::string f, const std::string& msg) : std::runtime_error(msg), field(std::move(f)) {}
};

std::string get_string(const json& obj, const std::string& key, const std::string& path, bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) throw FieldError(path + key, "missing");
        return {};
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    throw FieldError(path + key, "expected string");
}

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return 0;
    if (!it->is_number()) throw FieldError(path + key, "expected number");
    if (it->is_number_float()) {
        auto v = it->get<double>();
        if (v < 0) throw FieldError(path + key, "negative count");
        if (v != static_cast<double>(static_cast<std::uint64_t>(v))) throw FieldError(path + key, "expected integer");
        return static_cast<std::uint64_t>(v);
    }
    if (it->is_number_integer() && it->get<std::int64_t>() < 0) throw FieldError(path + key, "negative count");
    return it->get<std::uint64_t>();
}

double get_real(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) throw FieldError(path + key, "missing");
    if (!it->is_number()) throw FieldError(path + key, "expected number");
    return it->get<double>();
}

const json* get_array(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    if (!it->is_array()) throw FieldError(path + key, "expected array");
    return &*it;
}

std::vector<DomainScore> get_scores(const json& obj, const std::string& key, const std::string& path) {
    std::vector<DomainScore> out;
    const json* arr = get_array(obj, key, path);
    if (!arr) return out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
        auto p = path + key + "[" + std::to_string(i) + "].";
        const auto& item = (*arr)[i];
        if (!item.is_object()) throw FieldError(p, "expected object");
        DomainScore ds{get_string(item, "domain", p), get_real(item, "score", p)};
        if (!(ds.score >= 0.0 && ds.score <= 1.0)) throw FieldError(p + "score", "out of range [0,1]");
        out.push_back(std::move(ds));
    }
    return out;
}

UserRecord record_from_json(const json& j) {
    if (!j.is_object()) throw FieldError("", "expected object");
    UserRecord r;
    r.user_id = get_string(j, "user_id", "");
    r.handle = get_string(j, "handle", "", false);
    r.followers = get_count(j, "followers", "");
    r.friends = get_count(j, "friends", "");
    r.age_years = get_real(j, "age_years", "");
    if (!(r.age_years > 0)) throw FieldError("age_years", "must be > 0");
    if (auto it = j.find("chunk"); it != j.end() && !it->is_null())
        r.chunk = get_string(j, "chunk", "");

    if (const json* tweets = get_array(j, "tweets", "")) {
        for (std::size_t i = 0; i < tweets->size(); ++i) {
            const auto& tj = (*tweets)[i];
            auto p = "tweets[" + std::to_string(i) + "].";
            if (!tj.is_object()) throw FieldError(p, "expected object");
            Tweet t;
            t.text = get_string(tj, "text", p, false);
            if (const json* urls = get_array(tj, "urls", p)) {
                for (std::size_t u = 0; u < urls->size(); ++u) {
                    if (!(*urls)[u].is_string()) throw FieldError(p + "urls[" + std::to_string(u) + "]", "expected string");
                    t.urls.push_back((*urls)[u].get<std::string>());
                }
            }
            t.retweets = get_count(tj, "retweets", p);
            t.likes = get_count(tj, "likes", p);
            if (const json* replies = get_array(tj, "replies", p)) {
                for (std::size_t k = 0; k < replies->size(); ++k) {
                    auto rp = p + "replies[" + std::to_string(k) + "].";
                    const auto& rj = (*replies)[k];
                    if (!rj.is_object()) throw FieldError(rp, "expected object");
                    Reply reply{get_string(rj, "text", rp, false), get_real(rj, "sentiment", rp)};
                    if (!(reply.sentiment >= -1.0 && reply.sentiment <= 1.0))
                        throw FieldError(rp + "sentiment", "out of range [-1,1]");
                    t.replies.push_back(std::move(reply));
                }
            }
            t.domain_scores = get_scores(tj, "domain_scores", p);
            t.url_domain_scores = get_scores(tj, "url_domain_scores", p);
            r.tweets.push_back(std::move(t));
        }
    }
    return r;
}

json scores_to_json(const std::vector<DomainScore>& scores) {
    json arr = json::array();
    for (const auto& s : scores) arr.push_back({{"domain", s.domain}, {"score", s.score}});
    return arr;
}

}  // namespace

UserRecordSet parse_user_records(std::string_view text) {
    UserRecordSet out;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        try {
            out.records.push_back(record_from_json(json::parse(line)));
        } catch (const FieldError& e) {
            out.errors.push_back({line_no, e.field, e.what()});
        } catch (const json::exception& e) {
            out.errors.push_back({line_no, "", e.what()});
        }
    });
    return out;
}

UserRecordSet parse_user_records(const std::filesystem::path& path) { return parse_user_records(std::string_view(read_file(path))); }

std::string format_user_record(const UserRecord& r) {
    json j;
    j["user_id"] = r.user_id;
    j["handle"] = r.handle;
    j["followers"] = r.followers;
    j["friends"] = r.friends;
    j["age_years"] = r.age_years;
    json tweets = json::array();
    for (const auto& t : r.tweets) {
        json replies = json::array();
        for (const auto& rep : t.replies) replies.push_back({{"text", rep.text}, {"sentiment", rep.sentiment}});
        tweets.push_back({{"text", t.text},
                          {"urls", t.urls},
                          {"retweets", t.retweets},
                          {"likes", t.likes},
                          {"replies", replies},
                          {"domain_scores", scores_to_json(t.domain_scores)},
                          {"url_domain_scores", scores_to_json(t.url_domain_scores)}});
    }
    j["tweets"] = std::move(tweets);
    if (r.chunk) j["chunk"] = *r.chunk;
    return j.dump();
}

const std::vector<std::string>& canonical_domains() {
    static const std::vector<std::string> domains = {
        "art_and_entertainment", "automotive_and_vehicles", "business_and_industrial", "careers",
        "education",             "family_and_parenting",    "finance",                 "food_and_drink",
        "health_and_fitness",    "hobbies_and_interests",   "home_and_garden",         "law_govt_and_politics",
        "news",                  "pets",                    "real_estate",             "religion_and_spirituality",
        "science",               "shopping",                "society",                 "sports",
        "style_and_fashion",     "technology_and_computing", "travel"};
    return domains;
}

std::vector<std::string> load_domains(const std::filesystem::path& path) {
    std::vector<std::string> out;
    for_each_line(read_file(path), [&](std::size_t, std::string_view line) {
        auto t = trim(line);
        if (!t.empty() && t.front() != '#') out.emplace_back(t);
    });
    if (out.empty()) throw DataError(path.string() + ": no domains listed");
    return out;
}

// --- tabular mapping -----------------------------------------------------

Table parse_table_tsv(std::string_view text) {
    Table table;
    bool have_header = false;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (!valid_utf8(line)) throw DataError("line " + std::to_string(line_no) + ": invalid UTF-8");
        if (trim(line).empty()) return;
        std::vector<std::string> cells;
        for (auto c : split_tabs(line)) cells.emplace_back(trim(c));
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            return;
        }
        if (cells.size() != table.header.size())
            throw DataError("line " + std::to_string(line_no) + ": row has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    });
    return table;
}

std::vector<MappingRule> parse_mapping_rules(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("mapping rules: ") + e.what());
    }
    const json& arr = j.is_object() && j.contains("rules") ? j["rules"] : j;
    if (!arr.is_array()) throw DataError("mapping rules: expected an array of rules");
    std::vector<MappingRule> rules;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& r = arr[i];
        auto where = "mapping rule " + std::to_string(i) + ": ";
        if (!r.is_object() || !r.contains("subject") || !r.contains("predicate"))
            throw DataError(where + "needs 'subject' and 'predicate'");
        MappingRule rule;
        rule.subject_column = r["subject"].get<std::string>();
        rule.subject_prefix = r.value("subject_prefix", std::string{});
        rule.predicate = r["predicate"].get<std::string>();
        if (r.contains("object")) rule.object_column = r["object"].get<std::string>();
        if (r.contains("object_constant")) rule.constant_object = r["object_constant"].get<std::string>();
        if (rule.object_column.has_value() == rule.constant_object.has_value())
            throw DataError(where + "exactly one of 'object' or 'object_constant' is required");
        if (rule.predicate.empty()) throw DataError(where + "empty predicate");
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<LabelTriple> map_tabular(const Table& table, const std::vector<MappingRule>& rules) {
    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (table.header[i] == name) return i;
        throw DataError("mapping rule references missing column '" + name + "'");
    };
    struct Resolved {
        std::size_t subject;
        std::optional<std::size_t> object;
    };
    std::vector<Resolved> resolved;
    for (const auto& rule : rules)
        resolved.push_back({column(rule.subject_column),
                            rule.object_column ? std::optional(column(*rule.object_column)) : std::nullopt});

    std::vector<LabelTriple> out;
    for (const auto& row : table.rows) {
        for (std::size_t r = 0; r < rules.size(); ++r) {
            const auto& subject = row[resolved[r].subject];
            const auto& object = resolved[r].object ? row[*resolved[r].object] : *rules[r].constant_object;
            if (subject.empty() || object.empty()) continue;
            out.push_back({rules[r].subject_prefix + subject, rules[r].predicate, object});
        }
    }
    return out;
}

}  // namespace kge
