#include "kge/credibility.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "kge/error.hpp"
#include "kge/util.hpp"

namespace kge {

namespace {

// Decodes one code point starting at s[i]; advances i. Input is assumed valid.
std::uint32_t next_code_point(std::string_view s, std::size_t& i) {
    auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : 4;
    std::uint32_t cp = len == 1 ? c : len == 2 ? (c & 0x1f) : len == 3 ? (c & 0x0f) : (c & 0x07);
    for (int k = 1; k < len && i + k < s.size(); ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
    i += len;
    return cp;
}

bool is_unicode_space(std::uint32_t cp) {
    return (cp >= 0x09 && cp <= 0x0d) || cp == 0x20 || cp == 0x85 || cp == 0xa0 || cp == 0x1680 ||
           (cp >= 0x2000 && cp <= 0x200a) || cp == 0x2028 || cp == 0x2029 || cp == 0x202f || cp == 0x205f ||
           cp == 0x3000;
}

bool is_ascii_punct(char c) {
    auto u = static_cast<unsigned char>(c);
    return (u >= 0x21 && u <= 0x2f) || (u >= 0x3a && u <= 0x40) || (u >= 0x5b && u <= 0x60) || (u >= 0x7b && u <= 0x7e);
}

void push_token(std::string& tok, std::vector<std::string>& out) {
    std::size_t b = 0, e = tok.size();
    while (b < e && is_ascii_punct(tok[b])) ++b;
    while (e > b && is_ascii_punct(tok[e - 1])) --e;
    if (e > b) {
        std::string t = tok.substr(b, e - b);
        for (auto& c : t)
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(std::move(t));
    }
    tok.clear();
}

double score_for(const std::vector<DomainScore>& scores, std::string_view domain) {
    double s = 0;
    for (const auto& ds : scores)
        if (ds.domain == domain) s += ds.score;
    return s;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string tok;
    std::size_t i = 0;
    while (i < text.size()) {
        auto start = i;
        auto cp = next_code_point(text, i);
        if (is_unicode_space(cp))
            push_token(tok, out);
        else
            tok.append(text.substr(start, i - start));
    }
    push_token(tok, out);
    return out;
}

std::string url_host(std::string_view url) {
    auto scheme = url.find("://");
    auto rest = scheme == std::string_view::npos ? url : url.substr(scheme + 3);
    auto end = rest.find_first_of("/?#");
    auto authority = rest.substr(0, end);
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
    if (auto colon = authority.rfind(':'); colon != std::string_view::npos && authority.find(']') == std::string_view::npos)
        authority = authority.substr(0, colon);
    std::string host(authority);
    for (auto& c : host)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return host;
}

Similarity tweet_similarity(std::size_t distinct_words, std::size_t words) {
    if (words == 0) return {1.0, true};
    return {static_cast<double>(distinct_words) / static_cast<double>(words), false};
}

Similarity tweet_similarity(const UserRecord& record) {
    std::unordered_set<std::string> distinct;
    std::size_t total = 0;
    for (const auto& t : record.tweets) {
        for (auto& tok : tokenize(t.text)) {
            ++total;
            distinct.insert(std::move(tok));
        }
    }
    return tweet_similarity(distinct.size(), total);
}

Similarity url_similarity(std::size_t distinct_urls, std::size_t distinct_hosts, std::size_t urls) {
    if (urls == 0) return {1.0, true};
    return {0.5 * (static_cast<double>(distinct_urls + distinct_hosts) / static_cast<double>(urls)), false};
}

Similarity url_similarity(const UserRecord& record) {
    std::unordered_set<std::string> urls, hosts;
    std::size_t total = 0;
    for (const auto& t : record.tweets) {
        for (const auto& u : t.urls) {
            ++total;
            urls.insert(u);
            hosts.insert(url_host(u));
        }
    }
    return url_similarity(urls.size(), hosts.size(), total);
}

double combined_domain_score(double twt_sim, double sum_content_score, double url_sim, double sum_url_score) {
    return twt_sim * sum_content_score + url_sim * sum_url_score;
}

std::optional<double> inverse_domain_frequency(std::size_t df, std::size_t n) {
    if (df == 0) return std::nullopt;
    return std::log10(static_cast<double>(n) / static_cast<double>(df));
}

double ff_ratio(std::uint64_t followers, std::uint64_t friends, double age_years) {
    if (!(age_years > 0)) throw std::invalid_argument("account age must be > 0");
    if (followers == friends) return 1.0 / age_years;
    return (static_cast<double>(followers) - static_cast<double>(friends)) / age_years;
}

Engagement engagement(const UserRecord& record, std::string_view domain, const DomainScoreProvider& provider) {
    Engagement e;
    for (const auto& t : record.tweets) {
        if (score_for(provider.content_scores(t), domain) <= 0 && score_for(provider.url_scores(t), domain) <= 0)
            continue;
        e.retweets += static_cast<double>(t.retweets);
        e.likes += static_cast<double>(t.likes);
        e.replies += static_cast<double>(t.replies.size());
        for (const auto& r : t.replies) {
            if (r.sentiment > 0) e.positive += r.sentiment;
            else if (r.sentiment < 0) e.negative += r.sentiment;
        }
    }
    e.sentiment = e.positive - e.negative;
    return e;
}

CredibilityFeatures compute_features(const UserRecord& record, const std::vector<std::string>& domains,
                                     const DomainScoreProvider& provider) {
    const auto n = domains.size();
    CredibilityFeatures f;
    f.user_id = record.user_id;
    f.handle = record.handle;
    f.twt_sim = tweet_similarity(record);
    f.url_sim = url_similarity(record);
    f.sum_content_score.assign(n, 0.0);
    f.sum_url_score.assign(n, 0.0);
    f.engagement.assign(n, Engagement{});

    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t d = 0; d < n; ++d) index.emplace(domains[d], d);

    for (const auto& t : record.tweets) {
        std::vector<char> assigned(n, 0);
        for (const auto& ds : provider.content_scores(t)) {
            if (auto it = index.find(ds.domain); it != index.end()) {
                f.sum_content_score[it->second] += ds.score;
                if (ds.score > 0) assigned[it->second] = 1;
            }
        }
        for (const auto& ds : provider.url_scores(t)) {
            if (auto it = index.find(ds.domain); it != index.end()) {
                f.sum_url_score[it->second] += ds.score;
                if (ds.score > 0) assigned[it->second] = 1;
            }
        }
        for (std::size_t d = 0; d < n; ++d) {
            if (!assigned[d]) continue;
            auto& e = f.engagement[d];
            e.retweets += static_cast<double>(t.retweets);
            e.likes += static_cast<double>(t.likes);
            e.replies += static_cast<double>(t.replies.size());
            for (const auto& r : t.replies) {
                if (r.sentiment > 0) e.positive += r.sentiment;
                else if (r.sentiment < 0) e.negative += r.sentiment;
            }
        }
    }

    f.combined_score.resize(n);
    for (std::size_t d = 0; d < n; ++d) {
        f.engagement[d].sentiment = f.engagement[d].positive - f.engagement[d].negative;
        f.combined_score[d] =
            combined_domain_score(f.twt_sim.value, f.sum_content_score[d], f.url_sim.value, f.sum_url_score[d]);
        if (f.combined_score[d] > 0) ++f.df;
    }
    f.idf = inverse_domain_frequency(f.df, n);
    f.weight.resize(n);
    for (std::size_t d = 0; d < n; ++d) f.weight[d] = f.combined_score[d] * f.idf.value_or(0.0);

    f.followers = record.followers;
    f.friends = record.friends;
    f.age_years = record.age_years;
    f.ff_r = ff_ratio(record.followers, record.friends, record.age_years);
    return f;
}

std::vector<std::vector<FeatureVector>> raw_vectors(const std::vector<CredibilityFeatures>& users) {
    std::vector<std::vector<FeatureVector>> raw(users.size());
    for (std::size_t u = 0; u < users.size(); ++u) {
        const auto& f = users[u];
        raw[u].resize(f.weight.size());
        for (std::size_t d = 0; d < f.weight.size(); ++d) {
            const auto& e = f.engagement[d];
            raw[u][d] = {f.weight[d], e.retweets, e.likes, e.replies, e.sentiment, f.ff_r};
        }
    }
    return raw;
}

std::vector<std::vector<FeatureVector>> normalize_vectors(const std::vector<std::vector<FeatureVector>>& raw) {
    auto out = raw;
    if (raw.empty()) return out;
    const auto n_domains = raw.front().size();
    constexpr auto ff = static_cast<std::size_t>(Feature::ff_ratio);

    for (std::size_t d = 0; d < n_domains; ++d) {
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            if (k == ff) continue;
            double mx = 0;
            for (const auto& u : raw) mx = std::max(mx, u[d][k]);
            for (auto& u : out) u[d][k] = mx > 0 ? u[d][k] / mx : 0.0;
        }
    }

    // FF_R is domain independent: min-max over users; a constant column maps
    // to 1 when positive, else 0.
    double lo = raw.front().empty() ? 0 : raw.front()[0][ff], hi = lo;
    for (const auto& u : raw)
        if (!u.empty()) lo = std::min(lo, u[0][ff]), hi = std::max(hi, u[0][ff]);
    for (auto& u : out)
        for (auto& v : u) v[ff] = hi > lo ? (v[ff] - lo) / (hi - lo) : (hi > 0 ? 1.0 : 0.0);
    return out;
}

std::vector<std::vector<FeatureVector>> normalize_per_domain(const std::vector<CredibilityFeatures>& users) {
    return normalize_vectors(raw_vectors(users));
}

double credibility_value(const FeatureVector& normalized, const FeatureVector& weights) {
    double total = 0, acc = 0;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        total += weights[k];
        acc += weights[k] * normalized[k];
    }
    return total > 0 ? acc / total : 0.0;
}

CredibilityConfig load_credibility_config(std::string_view json_text) {
    CredibilityConfig cfg;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("credibility config: ") + e.what());
    }
    if (j.contains("domains")) cfg.domains = j["domains"].get<std::vector<std::string>>();
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        static const char* names[kFeatureCount] = {"weight", "retweets", "likes", "replies", "sentiment", "ff_ratio"};
        for (std::size_t k = 0; k < kFeatureCount; ++k)
            if (w.contains(names[k])) cfg.weights[k] = w[names[k]].get<double>();
        for (double v : cfg.weights)
            if (v < 0) throw DataError("credibility config: weights must be non-negative");
    }
    if (j.contains("breadth_threshold")) cfg.spam.breadth_threshold = j["breadth_threshold"].get<double>();
    if (j.contains("repetition_threshold")) cfg.spam.repetition_threshold = j["repetition_threshold"].get<double>();
    return cfg;
}

bool is_spammer(const CredibilityFeatures& f, std::size_t n_domains, const SpamPolicy& policy) {
    if (n_domains == 0) return false;
    const double breadth = static_cast<double>(f.df) / static_cast<double>(n_domains);
    return breadth >= policy.breadth_threshold && f.twt_sim.value >= policy.repetition_threshold;
}

SpamSplit filter_spammers(const std::vector<CredibilityFeatures>& users, std::size_t n_domains,
                          const SpamPolicy& policy) {
    SpamSplit out;
    for (std::size_t u = 0; u < users.size(); ++u)
        (is_spammer(users[u], n_domains, policy) ? out.flagged : out.kept).push_back(u);
    return out;
}

namespace {

UserRecord merge(const std::vector<const UserRecord*>& parts) {
    UserRecord m = *parts.back();
    m.tweets.clear();
    for (const auto* p : parts) m.tweets.insert(m.tweets.end(), p->tweets.begin(), p->tweets.end());
    return m;
}

}  // namespace

CredibilityReport credibility_rank(const std::vector<UserRecord>& records, const CredibilityConfig& config,
                                   const DomainScoreProvider& provider) {
    const auto n = config.domains.size();
    CredibilityReport report;
    report.domains = config.domains;

    // users in first-seen order; chunks in lexical order
    std::vector<std::string> user_ids;
    std::unordered_map<std::string, std::size_t> user_index;
    std::map<std::string, std::map<std::size_t, std::vector<const UserRecord*>>> chunks;
    std::vector<std::vector<const UserRecord*>> all_parts;
    for (const auto& r : records) {
        auto [it, fresh] = user_index.emplace(r.user_id, user_ids.size());
        if (fresh) {
            user_ids.push_back(r.user_id);
            all_parts.emplace_back();
        }
        all_parts[it->second].push_back(&r);
        chunks[r.chunk.value_or("")][it->second].push_back(&r);
    }

    const auto n_users = user_ids.size();
    report.features.reserve(n_users);
    for (std::size_t u = 0; u < n_users; ++u) report.features.push_back(compute_features(merge(all_parts[u]), config.domains, provider));

    std::vector<std::vector<FeatureVector>> norm_sum(n_users, std::vector<FeatureVector>(n, FeatureVector{}));
    std::vector<std::vector<double>> cred_sum(n_users, std::vector<double>(n, 0.0));
    std::vector<std::size_t> chunk_count(n_users, 0);

    for (const auto& [chunk_id, members] : chunks) {
        std::vector<std::size_t> who;
        std::vector<CredibilityFeatures> feats;
        for (const auto& [u, parts] : members) {
            auto f = compute_features(merge(parts), config.domains, provider);
            if (!f.idf) continue;  // no domain activity in this chunk
            who.push_back(u);
            feats.push_back(std::move(f));
        }
        if (feats.empty()) continue;
        auto normalized = normalize_per_domain(feats);
        for (std::size_t i = 0; i < who.size(); ++i) {
            const auto u = who[i];
            ++chunk_count[u];
            for (std::size_t d = 0; d < n; ++d) {
                for (std::size_t k = 0; k < kFeatureCount; ++k) norm_sum[u][d][k] += normalized[i][d][k];
                cred_sum[u][d] += credibility_value(normalized[i][d], config.weights);
            }
        }
    }

    report.users.resize(n_users);
    for (std::size_t u = 0; u < n_users; ++u) {
        auto& rec = report.users[u];
        const auto& f = report.features[u];
        rec.user_id = user_ids[u];
        rec.handle = f.handle;
        rec.normalized.assign(n, FeatureVector{});
        rec.credibility.assign(n, 0.0);
        if (chunk_count[u] > 0) {
            const auto c = static_cast<double>(chunk_count[u]);
            for (std::size_t d = 0; d < n; ++d) {
                for (std::size_t k = 0; k < kFeatureCount; ++k) rec.normalized[d][k] = norm_sum[u][d][k] / c;
                rec.credibility[d] = cred_sum[u][d] / c;
            }
        }
        if (!f.idf) {
            rec.spam = true;
            rec.reason = "no_domain_activity";
        } else if (is_spammer(f, n, config.spam)) {
            rec.spam = true;
            rec.reason = "breadth_and_repetition";
        }
    }
    return report;
}

std::vector<std::size_t> CredibilityReport::ranking(std::size_t d) const {
    std::vector<std::size_t> order;
    for (std::size_t u = 0; u < users.size(); ++u)
        if (features[u].idf) order.push_back(u);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (users[a].credibility[d] != users[b].credibility[d]) return users[a].credibility[d] > users[b].credibility[d];
        return users[a].user_id < users[b].user_id;
    });
    return order;
}

std::string CredibilityReport::to_tsv() const {
    std::string out;
    for (std::size_t d = 0; d < domains.size(); ++d) {
        auto order = ranking(d);
        for (std::size_t u = 0; u < users.size(); ++u)
            if (!features[u].idf) order.push_back(u);
        for (auto u : order) {
            const auto& r = users[u];
            out += r.user_id + '\t' + domains[d] + '\t' + format_double(r.credibility[d]) + '\t' + (r.spam ? "1" : "0") +
                   '\t' + (r.reason.empty() ? "-" : r.reason) + '\n';
        }
    }
    return out;
}

std::vector<LabelTriple> drop_flagged_facts(const std::vector<LabelTriple>& triples, const CredibilityReport& report) {
    std::unordered_set<std::string> flagged;
    for (const auto& u : report.users) {
        if (!u.spam) continue;
        flagged.insert(u.user_id);
        if (!u.handle.empty()) flagged.insert(u.handle);
    }
    std::vector<LabelTriple> out;
    for (const auto& t : triples)
        if (!flagged.contains(t.subject)) out.push_back(t);
    return out;
}

}  // namespace kge
