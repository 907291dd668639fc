#include "doctest.h"

#include <random>

#include "kge/error.hpp"
#include "kge/ingest.hpp"

using namespace kge;

TEST_CASE("triple tsv skips blanks and comments and trims cells") {
    auto ts = parse_triples_tsv(std::string_view("# header\n\nJoanne Ryan\tmemberOfParty\t Australian Labor Party \r\n"
                                                 "Lalor\thasLocation\tVictoria"));
    REQUIRE(ts.size() == 2);
    CHECK(ts[0] == LabelTriple{"Joanne Ryan", "memberOfParty", "Australian Labor Party"});
    CHECK(ts[1] == LabelTriple{"Lalor", "hasLocation", "Victoria"});
}

TEST_CASE("triple tsv rejects bad rows") {
    CHECK_THROWS_AS(parse_triples_tsv(std::string_view("a\tb\n")), DataError);
    CHECK_THROWS_AS(parse_triples_tsv(std::string_view("a\tb\tc\td\n")), DataError);
    CHECK_THROWS_AS(parse_triples_tsv(std::string_view("a\t \tc\n")), DataError);
    CHECK_THROWS_AS(parse_triples_tsv(std::string_view("a\tb\t\xff\xfe\n")), DataError);
}

TEST_CASE("triple tsv round trip") {
    std::vector<LabelTriple> ts{{"Bill Shorten", "memberOfParty", "Australian Labor Party"},
                                {"Kooyong", "hasLocation", "Victoria"},
                                {"Adam Bandt", "memberOfParliament", "House of Representatives"}};
    CHECK(parse_triples_tsv(std::string_view(format_triples_tsv(ts))) == ts);
}

TEST_CASE("user records validate fields and keep good lines") {
    const std::string good =
        R"({"user_id":"u1","handle":"JoanneRyanLalor","followers":5606,"friends":1437,"age_years":7,)"
        R"("tweets":[{"text":"Great day in Lalor","urls":["https://example.org/a"],"retweets":3,"likes":10,)"
        R"("replies":[{"text":"yes","sentiment":0.5}],"domain_scores":[{"domain":"Politics","score":0.9}]}]})";
    const std::string bad_sentiment =
        R"({"user_id":"u2","followers":1,"friends":1,"age_years":1,)"
        R"("tweets":[{"text":"x","replies":[{"text":"no","sentiment":1.5}]}]})";
    const std::string bad_age = R"({"user_id":"u3","followers":1,"friends":1,"age_years":0})";
    auto set = parse_user_records(std::string_view(good + "\n" + bad_sentiment + "\n" + bad_age + "\nnot json\n"));
    REQUIRE(set.records.size() == 1);
    REQUIRE(set.errors.size() == 3);
    CHECK(set.errors[0].line == 2);
    CHECK(set.errors[0].field == "tweets[0].replies[0].sentiment");
    CHECK(set.errors[1].field == "age_years");
    CHECK(set.errors[2].line == 4);

    const auto& r = set.records[0];
    CHECK(r.followers == 5606);
    CHECK(r.friends == 1437);
    CHECK(r.age_years == 7);
    REQUIRE(r.tweets.size() == 1);
    CHECK(r.tweets[0].replies[0].sentiment == 0.5);
    CHECK(r.tweets[0].domain_scores[0].domain == "Politics");
}

TEST_CASE("user record format parses back unchanged") {
    UserRecord r;
    r.user_id = "u7";
    r.handle = "hamjuku";
    r.followers = 248;
    r.friends = 120;
    r.age_years = 13;
    Tweet t;
    t.text = "promo code 42";
    t.urls = {"http://bit.ly/promo"};
    t.likes = 2;
    t.replies = {{"meh", -0.3}};
    t.domain_scores = {{"Shopping", 0.25}};
    t.url_domain_scores = {{"Shopping", 0.125}};
    r.tweets.push_back(t);
    auto set = parse_user_records(std::string_view(format_user_record(r)));
    REQUIRE(set.errors.empty());
    REQUIRE(set.records.size() == 1);
    const auto& b = set.records[0];
    CHECK(b.handle == "hamjuku");
    CHECK(b.followers == 248);
    CHECK(b.tweets[0].urls == t.urls);
    CHECK(b.tweets[0].replies[0].sentiment == -0.3);
    CHECK(b.tweets[0].url_domain_scores[0].score == 0.125);
}

TEST_CASE("canonical domain list has 23 entries") {
    CHECK(canonical_domains().size() == 23);
}

TEST_CASE("tabular mapping produces the politician facts") {
    auto table = parse_table_tsv("name\tparty\tstate\tchamber\n"
                                 "Joanne Ryan\tAustralian Labor Party\tVictoria\tHouse of Representatives\n");
    auto rules = parse_mapping_rules(R"({"rules":[
        {"subject":"name","predicate":"memberOfParty","object":"party"},
        {"subject":"name","predicate":"hasLocation","object":"state"},
        {"subject":"name","predicate":"isA","object_constant":"Politician"}]})");
    auto ts = map_tabular(table, rules);
    REQUIRE(ts.size() == 3);
    CHECK(ts[0] == LabelTriple{"Joanne Ryan", "memberOfParty", "Australian Labor Party"});
    CHECK(ts[1] == LabelTriple{"Joanne Ryan", "hasLocation", "Victoria"});
    CHECK(ts[2] == LabelTriple{"Joanne Ryan", "isA", "Politician"});
}

TEST_CASE("mapping rules are validated") {
    CHECK_THROWS_AS(parse_mapping_rules(R"([{"subject":"a","predicate":"p"}])"), DataError);
    CHECK_THROWS_AS(parse_mapping_rules(R"([{"subject":"a","predicate":"p","object":"b","object_constant":"c"}])"),
                    DataError);
    CHECK_THROWS_AS(parse_mapping_rules("{"), DataError);
    auto table = parse_table_tsv("a\tb\nx\ty\n");
    CHECK_THROWS_AS(map_tabular(table, parse_mapping_rules(R"([{"subject":"a","predicate":"p","object":"z"}])")),
                    DataError);
    CHECK_THROWS_AS(parse_table_tsv("a\tb\nx\n"), DataError);
}

TEST_CASE("mapping output size is the count of non-empty mapped cells") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t cols = 2 + rng() % 4, rows = rng() % 20;
        Table table;
        for (std::size_t c = 0; c < cols; ++c) table.header.push_back("c" + std::to_string(c));
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<std::string> row;
            for (std::size_t c = 0; c < cols; ++c) row.push_back(rng() % 4 == 0 ? "" : "v" + std::to_string(rng() % 9));
            table.rows.push_back(row);
        }
        std::vector<MappingRule> rules;
        const std::size_t n_rules = 1 + rng() % 4;
        for (std::size_t i = 0; i < n_rules; ++i) {
            MappingRule rule;
            rule.subject_column = table.header[rng() % cols];
            rule.predicate = "p" + std::to_string(i);
            if (rng() % 3 == 0) rule.constant_object = "K";
            else rule.object_column = table.header[rng() % cols];
            rules.push_back(rule);
        }
        std::size_t expected = 0;
        for (const auto& row : table.rows)
            for (const auto& rule : rules) {
                const auto sc = std::stoul(rule.subject_column.substr(1));
                const bool obj_ok = rule.constant_object || !row[std::stoul(rule.object_column->substr(1))].empty();
                if (!row[sc].empty() && obj_ok) ++expected;
            }
        CHECK(map_tabular(table, rules).size() == expected);
    }
}
