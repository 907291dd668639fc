#include "kge/fixture.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "kge/util.hpp"

namespace kge {

namespace {

const std::vector<std::string> kParties = {"Australian Labor Party", "Liberal Party of Australia", "Australian Greens"};
const std::vector<std::string> kStates = {"New South Wales", "Victoria"};
const std::vector<std::string> kChambers = {"House of Representatives", "Senate"};
const std::vector<std::string> kAreas = {"Economic Policy", "Environmental Policy", "Health Policy"};
// twelve per party
const std::vector<std::vector<std::string>> kPolicies = {
    {"Fair Work Reform", "Secure Jobs Plan", "Wage Growth Bill", "Manufacturing Fund", "Union Rights Act",
     "Public Housing Fund", "Free TAFE", "Cheaper Childcare", "Medicare Urgent Care", "Aged Care Wages",
     "National Reconstruction Fund", "Paid Parental Leave Expansion"},
    {"Tax Relief Package", "Small Business Grants", "Budget Surplus Plan", "Deregulation Agenda",
     "Stage Three Tax Cuts", "Trade Expansion Deal", "Nuclear Energy Plan", "Home Super Access", "Border Protection",
     "Defence Spending Boost", "Fuel Excise Cut", "Red Tape Reduction"},
    {"Coal Phase Out", "Renewable Energy Target", "Forest Protection Act", "Climate Trigger", "Wildlife Corridor Plan",
     "Plastic Ban", "Dental Into Medicare", "Billionaire Tax", "Rent Freeze", "Free University",
     "Public Electric Transport", "Great Forest National Park"}};
// twelve per state
const std::vector<std::vector<std::string>> kIssues = {
    {"Western Sydney Airport", "Murray Darling Basin", "Sydney Housing Prices", "Hunter Valley Mining",
     "WestConnex Tolls", "Snowy Hydro Expansion", "Northern Rivers Floods", "Parramatta Light Rail",
     "Sydney Desalination Plant", "Illawarra Steelworks", "Central Coast Hospital", "Newcastle Port"},
    {"Melbourne Metro Tunnel", "Victorian Bushfire Recovery", "Geelong Port Upgrade", "Gippsland Transition",
     "Suburban Rail Loop", "West Gate Tunnel", "Murray River Irrigation", "Melbourne Airport Rail",
     "Latrobe Valley Jobs", "Great Ocean Road", "Ballarat Rail Upgrade", "Bendigo Hospital"}};
// indexed by state * 3 + party
const std::vector<std::string> kElectorates = {"Division of Parramatta", "Division of Bennelong",
                                               "Division of Grayndler",  "Division of Lalor",
                                               "Division of Kooyong",    "Division of Melbourne"};
const std::vector<std::string> kFirst = {"Anthony", "Tanya",  "Penny",  "Mark",   "Linda", "Sussan", "Peter",
                                         "Karen",   "Jason",  "Clare",  "David",  "Kristy", "Adam",  "Sarah",
                                         "Josh",    "Amanda", "Michael", "Helen", "Tony",  "Julie",  "Bridget",
                                         "Richard", "Larissa", "Simon"};
const std::vector<std::string> kLast = {"Albanese", "Plibersek", "Wong",     "Butler",  "Burney",   "Ley",
                                        "Dutton",   "Andrews",   "Clare",    "O'Neil",  "Littleproud", "McBain",
                                        "Bandt",    "Hanson",    "Frydenberg", "Rishworth", "McCormack", "Haines",
                                        "Burke",    "Collins",   "McKenzie", "Marles",  "Waters",   "Birmingham"};

const std::vector<std::string> kVocabulary = {
    "parliament", "budget",  "community", "families", "jobs",     "health",   "education", "climate",   "energy",
    "housing",    "local",   "vote",      "policy",   "reform",   "support",  "workers",   "schools",   "hospital",
    "future",     "plan",    "investment", "regional", "services", "minister", "electorate", "debate",  "senate",
    "bill",       "funding", "nurses",    "teachers", "roads",    "transport", "water",    "farmers",   "small",
    "business",   "cost",    "living",    "wages",    "tax",      "relief",   "seniors",   "veterans",  "youth",
    "childcare",  "aged",    "care",      "disability", "ndis",   "medicare", "pharmacy",  "renewables", "emissions",
    "target",     "net",     "zero",      "coal",     "gas",      "solar",    "wind",      "grid",      "prices",
    "inflation",  "interest", "rates",    "mortgage", "rent",     "homelessness", "safety", "police",   "justice",
    "indigenous", "voice",   "treaty",    "culture",  "arts",     "sport",    "tourism",   "trade",     "exports",
    "china",      "security", "defence",  "submarines", "alliance", "foreign", "aid",      "refugees",  "migration",
    "skills",     "tafe",    "university", "research", "science",  "innovation", "digital", "nbn",      "broadband",
    "thanks",     "today",   "great",     "proud",    "announce", "together", "listening", "meeting",   "visit"};

UserRecord legit_user(const std::string& id, const std::string& handle, std::mt19937_64& rng,
                      const std::vector<std::string>& extra_domains, std::size_t tweets) {
    UserRecord u;
    u.user_id = id;
    u.handle = handle;
    std::uniform_int_distribution<int> fol(500, 20000), frd(100, 3000), age(2, 14), eng(0, 60), word(0, 199);
    std::uniform_int_distribution<std::size_t> vocab(0, kVocabulary.size() - 1);
    std::uniform_real_distribution<double> senti(-0.6, 1.0), score(0.3, 0.95);
    u.followers = static_cast<std::uint64_t>(fol(rng));
    u.friends = static_cast<std::uint64_t>(frd(rng));
    u.age_years = age(rng);
    for (std::size_t i = 0; i < tweets; ++i) {
        Tweet t;
        for (int w = 0; w < 14; ++w) {
            if (w) t.text += ' ';
            t.text += kVocabulary[vocab(rng)];
        }
        t.urls.push_back("https://www.aph.gov.au/news/" + std::to_string(i % 7));
        if (i % 3 == 0) t.urls.push_back("https://www.abc.net.au/news/politics/" + std::to_string(i % 5));
        t.retweets = static_cast<std::uint64_t>(eng(rng));
        t.likes = static_cast<std::uint64_t>(eng(rng) * 3);
        for (int r = 0; r < eng(rng) % 4; ++r) t.replies.push_back({"reply", senti(rng)});
        t.domain_scores.push_back({"law_govt_and_politics", score(rng)});
        if (!extra_domains.empty() && i % 4 == 0) t.domain_scores.push_back({extra_domains[i % extra_domains.size()], score(rng) / 2});
        t.url_domain_scores.push_back({"law_govt_and_politics", score(rng)});
        u.tweets.push_back(std::move(t));
    }
    return u;
}

UserRecord spammer(const std::string& id, const std::string& handle, std::mt19937_64& rng) {
    UserRecord u;
    u.user_id = id;
    u.handle = handle;
    u.followers = 248;
    u.friends = 120;
    u.age_years = 13;
    std::uniform_int_distribution<int> code(100000, 999999), eng(0, 3);
    const auto& domains = canonical_domains();
    for (std::size_t i = 0; i < 92; ++i) {
        Tweet t;
        // every tweet carries fresh promo codes, so most tokens are unique
        t.text = "win free followers now " + std::to_string(code(rng)) + " " + std::to_string(code(rng)) + " " +
                 std::to_string(code(rng)) + " code" + std::to_string(code(rng)) + " deal" + std::to_string(code(rng)) +
                 " promo" + std::to_string(code(rng));
        t.urls.push_back("http://bit.ly/promo");
        t.retweets = static_cast<std::uint64_t>(eng(rng));
        t.likes = static_cast<std::uint64_t>(eng(rng));
        t.domain_scores.push_back({domains[i % domains.size()], 0.9});
        t.domain_scores.push_back({domains[(i + 7) % domains.size()], 0.6});
        t.url_domain_scores.push_back({domains[(i + 3) % domains.size()], 0.5});
        u.tweets.push_back(std::move(t));
    }
    return u;
}

}  // namespace

Fixture make_fixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Fixture fx;
    auto add = [&](const std::string& s, const std::string& p, const std::string& o) { fx.triples.push_back({s, p, o}); };

    // politician names: Joanne Ryan plus distinct generated names
    std::vector<std::string> names;
    for (const auto& f : kFirst)
        for (const auto& l : kLast) names.push_back(f + " " + l);
    std::shuffle(names.begin(), names.end(), rng);
    constexpr std::size_t per_group = 22;
    const std::size_t groups = kParties.size() * kStates.size();
    names.resize(groups * per_group - 1);
    names.insert(names.begin() + per_group, "Joanne Ryan");  // first Labor Victoria member

    fx.politicians.header = {"name", "party", "state", "chamber"};
    for (std::size_t party = 0; party < kParties.size(); ++party)
        for (const auto& policy : kPolicies[party]) add(policy, "hasSubtype", kAreas[party]);

    std::size_t next = 0;
    for (std::size_t party = 0; party < kParties.size(); ++party) {
        for (std::size_t state = 0; state < kStates.size(); ++state) {
            const auto& electorate = kElectorates[state * 3 + party];
            add(electorate, "hasSubtype", "Federal Electorate");
            const auto& chamber = kChambers[party == 2 ? 1 : 0];
            for (std::size_t i = 0; i < per_group; ++i) {
                const auto& pol = names[next++];
                fx.politician_names.push_back(pol);
                fx.politicians.rows.push_back({pol, kParties[party], kStates[state], chamber});
                add(pol, "memberOfParty", kParties[party]);
                add(pol, "hasLocation", electorate);
                add(pol, "hasLocation", kStates[state]);
                add(pol, "memberOfParliament", chamber);
                for (const auto& policy : kPolicies[party]) add(pol, "supports", policy);
                for (const auto& issue : kIssues[state]) add(pol, "hasPoliticsInterest", issue);
                add(pol, "hasPoliticsInterest", kAreas[party]);
            }
        }
    }

    // social users: each follows one party and mentions all of its politicians
    const std::vector<std::string> extra = {"news", "sports", "travel", "technology_and_computing", "education"};
    auto user_facts = [&](const std::string& handle, std::size_t group) {
        const auto party = group / kStates.size();
        add(handle, "supports", kParties[party]);
        add(handle, "hasPoliticsInterest", kAreas[party]);
        const auto per_party = per_group * kStates.size();
        for (std::size_t i = 0; i < per_party; ++i) add(handle, "hasMentioned", fx.politician_names[party * per_party + i]);
    };

    fx.politics_user_handle = "JoanneRyanLalor";
    fx.users.push_back(legit_user("u00", fx.politics_user_handle, rng, {"news"}, 60));
    user_facts(fx.politics_user_handle, 1);  // Labor, Victoria

    for (int i = 1; i <= 18; ++i) {
        char id[8], handle[32];
        std::snprintf(id, sizeof id, "u%02d", i);
        std::snprintf(handle, sizeof handle, "voter%02d", i);
        std::vector<std::string> doms{extra[static_cast<std::size_t>(i) % extra.size()]};
        fx.users.push_back(legit_user(id, handle, rng, doms, 30 + static_cast<std::size_t>(i)));
        user_facts(handle, static_cast<std::size_t>(i - 1) % groups);
    }

    fx.spammer_handle = "hamjuku";
    fx.users.push_back(spammer("u19", fx.spammer_handle, rng));
    std::uniform_int_distribution<std::size_t> any_pol(0, fx.politician_names.size() - 1);
    std::set<std::size_t> mentioned;
    while (mentioned.size() < 10) mentioned.insert(any_pol(rng));
    for (auto m : mentioned) add(fx.spammer_handle, "hasMentioned", fx.politician_names[m]);
    for (const auto& p : kParties) add(fx.spammer_handle, "supports", p);
    for (const auto& a : kAreas) add(fx.spammer_handle, "hasPoliticsInterest", a);

    // labelled statements: true memberships/policies and swapped-party negatives
    std::uniform_int_distribution<std::size_t> other(1, kParties.size() - 1);
    for (std::size_t i = 0; i < fx.politician_names.size(); i += 6) {
        const auto party = i / (per_group * kStates.size());
        const auto wrong = (party + other(rng)) % kParties.size();
        const auto& pol = fx.politician_names[i];
        fx.labelled.push_back({{pol, "memberOfParty", kParties[party]}, true});
        fx.labelled.push_back({{pol, "memberOfParty", kParties[wrong]}, false});
        fx.labelled.push_back({{pol, "supports", kPolicies[party][i % 3]}, true});
        fx.labelled.push_back({{pol, "supports", kPolicies[wrong][i % 3]}, false});
    }
    return fx;
}

Fixture generate_fixture(std::uint64_t seed, const std::filesystem::path& dir) {
    auto fx = make_fixture(seed);
    std::filesystem::create_directories(dir);
    write_file(dir / "triples.tsv", format_triples_tsv(fx.triples));

    std::string users;
    for (const auto& u : fx.users) users += format_user_record(u) + '\n';
    write_file(dir / "users.jsonl", users);

    std::string labelled;
    for (const auto& [t, label] : fx.labelled)
        labelled += t.subject + '\t' + t.predicate + '\t' + t.object + '\t' + (label ? "true" : "false") + '\n';
    write_file(dir / "labelled.tsv", labelled);

    std::string table;
    for (std::size_t i = 0; i < fx.politicians.header.size(); ++i)
        table += (i ? "\t" : "") + fx.politicians.header[i];
    table += '\n';
    for (const auto& row : fx.politicians.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) table += (i ? "\t" : "") + row[i];
        table += '\n';
    }
    write_file(dir / "politicians.tsv", table);
    write_file(dir / "mapping.json",
               R"({"rules": [
  {"subject": "name", "predicate": "memberOfParty", "object": "party"},
  {"subject": "name", "predicate": "memberOfParliament", "object": "chamber"},
  {"subject": "name", "predicate": "hasLocation", "object": "state"}
]}
)");
    return fx;
}

}  // namespace kge
