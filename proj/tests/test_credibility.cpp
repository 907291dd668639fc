#include "doctest.h"

#include <cmath>
#include <random>

#include "kge/credibility.hpp"
#include "kge/fixture.hpp"

using namespace kge;

namespace {

UserRecord user(const std::string& id, std::uint64_t fol, std::uint64_t frd, double age) {
    UserRecord r;
    r.user_id = id;
    r.handle = id;
    r.followers = fol;
    r.friends = frd;
    r.age_years = age;
    return r;
}

Tweet tweet(const std::string& text, std::vector<DomainScore> scores) {
    Tweet t;
    t.text = text;
    t.domain_scores = std::move(scores);
    return t;
}

}  // namespace

TEST_CASE("tokenizer lowercases and strips edge punctuation") {
    auto toks = tokenize("Vote #Labor, NOW!!\xe2\x80\x83" "don't  ... stop");
    REQUIRE(toks.size() == 5);
    CHECK(toks[0] == "vote");
    CHECK(toks[1] == "labor");
    CHECK(toks[2] == "now");
    CHECK(toks[3] == "don't");
    CHECK(toks[4] == "stop");
}

TEST_CASE("url host drops scheme, userinfo, port and path") {
    CHECK(url_host("https://User@Example.ORG:8080/a?b") == "example.org");
    CHECK(url_host("http://bit.ly/promo") == "bit.ly");
    CHECK(url_host("www.abc.net.au/news") == "www.abc.net.au");
}

TEST_CASE("tweet and url similarity worked values") {
    CHECK(tweet_similarity(5392, 10733).value == doctest::Approx(0.502).epsilon(0.002));
    CHECK(url_similarity(291, 85, 861).value == doctest::Approx(0.218).epsilon(0.002));
    CHECK(url_similarity(1, 1, 10).value == doctest::Approx(0.1));
    auto none = tweet_similarity(0, 0);
    CHECK(none.empty);
    CHECK(none.value == 1.0);
    CHECK(url_similarity(0, 0, 0).empty);
}

TEST_CASE("similarity from records counts tokens and hosts") {
    auto r = user("u", 1, 2, 1);
    auto t = tweet("a a b", {});
    t.urls = {"http://x.org/1", "http://x.org/1", "http://y.org/2", "http://x.org/3"};
    r.tweets = {t, tweet("b c", {})};
    CHECK(tweet_similarity(r).value == doctest::Approx(3.0 / 5.0));
    // 3 distinct urls, 2 hosts, 4 urls
    CHECK(url_similarity(r).value == doctest::Approx(0.5 * 5.0 / 4.0));
}

TEST_CASE("combined score, idf and follower ratio worked values") {
    CHECK(combined_domain_score(0.5, 2.0, 0.2, 1.0) == doctest::Approx(1.2));
    CHECK(*inverse_domain_frequency(1, 23) == doctest::Approx(1.3617).epsilon(1e-4));
    CHECK(*inverse_domain_frequency(23, 23) == 0.0);
    CHECK_FALSE(inverse_domain_frequency(0, 23).has_value());
    CHECK(ff_ratio(5606, 1437, 7) == doctest::Approx(595.571).epsilon(1e-6));
    CHECK(ff_ratio(248, 120, 13) == doctest::Approx(9.846).epsilon(1e-4));
    CHECK(ff_ratio(10, 10, 4) == 0.25);
    CHECK(ff_ratio(3, 10, 1) == -7.0);
    CHECK_THROWS_AS(ff_ratio(1, 2, 0), std::invalid_argument);
}

TEST_CASE("engagement sums replies and sentiment of tweets in a domain") {
    auto r = user("u", 1, 2, 1);
    auto t = tweet("x", {{"Politics", 0.8}});
    t.retweets = 4;
    t.likes = 9;
    t.replies = {{"yes", 0.5}, {"no", -0.3}, {"meh", 0.0}};
    r.tweets = {t, tweet("y", {{"Sports", 0.4}})};
    auto e = engagement(r, "Politics");
    CHECK(e.retweets == 4);
    CHECK(e.likes == 9);
    CHECK(e.replies == 3);
    CHECK(e.positive == doctest::Approx(0.5));
    CHECK(e.negative == doctest::Approx(-0.3));
    CHECK(e.sentiment == doctest::Approx(0.8));
    CHECK(engagement(r, "Music").replies == 0);
}

TEST_CASE("features follow the worked definitions") {
    const std::vector<std::string> domains{"Politics", "Sports", "Music"};
    auto r = user("u", 20, 10, 2);
    r.tweets = {tweet("one two", {{"Politics", 0.5}}), tweet("three four", {{"Politics", 0.25}, {"Sports", 0.5}})};
    auto f = compute_features(r, domains);
    CHECK(f.df == 2);
    CHECK(*f.idf == doctest::Approx(std::log10(1.5)));
    CHECK(f.sum_content_score[0] == doctest::Approx(0.75));
    CHECK(f.combined_score[0] == doctest::Approx(0.75));  // Twt_Sim 1, no urls
    CHECK(f.weight[1] == doctest::Approx(0.5 * std::log10(1.5)));
    CHECK(f.weight[2] == 0.0);
    CHECK(f.ff_r == 5.0);
}

TEST_CASE("per-domain normalization divides by the column maximum") {
    std::vector<std::vector<FeatureVector>> raw(3, std::vector<FeatureVector>(1));
    const double w[3] = {2, 4, 8};
    const double ff[3] = {-1, 1, 3};
    for (int u = 0; u < 3; ++u) raw[u][0] = {w[u], w[u], 0, w[u], w[u], ff[u]};
    auto n = normalize_vectors(raw);
    CHECK(n[0][0][0] == 0.25);
    CHECK(n[1][0][0] == 0.5);
    CHECK(n[2][0][0] == 1.0);
    CHECK(n[1][0][2] == 0.0);  // all-zero column
    CHECK(n[0][0][5] == 0.0);
    CHECK(n[1][0][5] == 0.5);
    CHECK(n[2][0][5] == 1.0);
}

TEST_CASE("normalization is idempotent, scale invariant and monotone") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> val(0.0, 50.0), ffv(-20.0, 20.0), scale(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t users = 2 + rng() % 6, domains = 1 + rng() % 4;
        std::vector<std::vector<FeatureVector>> raw(users, std::vector<FeatureVector>(domains));
        std::vector<double> ff(users);
        for (auto& x : ff) x = ffv(rng);
        for (std::size_t u = 0; u < users; ++u)
            for (std::size_t d = 0; d < domains; ++d) {
                for (std::size_t k = 0; k < 5; ++k) raw[u][d][k] = val(rng);
                raw[u][d][5] = ff[u];
            }
        auto once = normalize_vectors(raw);
        auto twice = normalize_vectors(once);
        const double s = scale(rng);
        auto scaled = raw;
        for (auto& u : scaled)
            for (auto& v : u)
                for (auto& x : v) x *= s;
        auto rescaled = normalize_vectors(scaled);
        for (std::size_t u = 0; u < users; ++u)
            for (std::size_t d = 0; d < domains; ++d)
                for (std::size_t k = 0; k < kFeatureCount; ++k) {
                    CHECK(twice[u][d][k] == doctest::Approx(once[u][d][k]).epsilon(1e-12));
                    CHECK(rescaled[u][d][k] == doctest::Approx(once[u][d][k]).epsilon(1e-12));
                    CHECK(once[u][d][k] >= 0.0);
                    CHECK(once[u][d][k] <= 1.0);
                    for (std::size_t v = 0; v < users; ++v)
                        if (raw[u][d][k] < raw[v][d][k]) CHECK(once[u][d][k] <= once[v][d][k]);
                }
    }
}

TEST_CASE("credibility value is the weighted mean of normalized features") {
    CHECK(credibility_value({1, 0, 0, 0, 0, 0}, {1, 1, 1, 1, 1, 1}) == doctest::Approx(1.0 / 6.0));
    CHECK(credibility_value({1, 0.5, 0, 0, 0, 0}, {2, 2, 0, 0, 0, 0}) == doctest::Approx(0.75));
    CHECK(credibility_value({1, 1, 1, 1, 1, 1}, {0, 0, 0, 0, 0, 0}) == 0.0);
}

TEST_CASE("spam rule needs both breadth and low repetition") {
    SpamPolicy policy;
    CredibilityFeatures f;
    f.df = 23;
    f.twt_sim = {0.502, false};
    CHECK(is_spammer(f, 23, policy));
    f.twt_sim = {0.1, false};
    CHECK_FALSE(is_spammer(f, 23, policy));
    f.twt_sim = {0.9, false};
    f.df = 3;
    CHECK_FALSE(is_spammer(f, 23, policy));
}

TEST_CASE("fixture spammer is flagged and the politics user is kept") {
    auto fx = make_fixture(0);
    CredibilityConfig cfg;
    auto report = credibility_rank(fx.users, cfg);
    bool saw_spammer = false, saw_politics = false;
    for (const auto& u : report.users) {
        if (u.handle == fx.spammer_handle) {
            saw_spammer = true;
            CHECK(u.spam);
            CHECK(u.reason == "breadth_and_repetition");
        } else {
            CHECK_FALSE(u.spam);
        }
        if (u.handle == fx.politics_user_handle) saw_politics = true;
    }
    CHECK(saw_spammer);
    CHECK(saw_politics);

    auto kept = drop_flagged_facts(fx.triples, report);
    CHECK(kept.size() < fx.triples.size());
    for (const auto& t : kept) CHECK(t.subject != fx.spammer_handle);
}

TEST_CASE("ranking orders users by credibility and omits inactive users") {
    auto a = user("a", 10, 1, 1), b = user("b", 5, 1, 1), idle = user("c", 1, 1, 1);
    a.tweets = {tweet("x y", {{"Politics", 1.0}})};
    b.tweets = {tweet("x y", {{"Politics", 0.2}})};
    idle.tweets = {tweet("z", {})};
    CredibilityConfig cfg;
    cfg.domains = {"Politics", "Sports"};
    auto report = credibility_rank({a, b, idle}, cfg);
    auto order = report.ranking(0);
    REQUIRE(order.size() == 2);
    CHECK(report.users[order[0]].user_id == "a");
    CHECK(report.users[2].spam);
    CHECK(report.users[2].reason == "no_domain_activity");
    for (double c : report.users[0].credibility) {
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
    }
}

TEST_CASE("config overrides weights and thresholds") {
    auto cfg = load_credibility_config(R"({"domains":["A","B"],"weights":{"likes":3},"breadth_threshold":0.5})");
    CHECK(cfg.domains.size() == 2);
    CHECK(cfg.weights[2] == 3);
    CHECK(cfg.weights[0] == 1);
    CHECK(cfg.spam.breadth_threshold == 0.5);
    CHECK(cfg.spam.repetition_threshold == 0.5);
}
