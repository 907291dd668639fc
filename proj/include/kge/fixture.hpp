#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kge/ingest.hpp"
#include "kge/kg.hpp"

namespace kge {

// Synthetic politics knowledge graph with party-consistent structure plus
// social user records (one planted spammer).
struct Fixture {
    std::vector<LabelTriple> triples;          // includes every user's facts
    std::vector<UserRecord> users;
    std::vector<std::pair<LabelTriple, bool>> labelled;
    Table politicians;                         // name, party, state, chamber
    std::string spammer_handle;
    std::string politics_user_handle;
    std::vector<std::string> politician_names;
};

Fixture make_fixture(std::uint64_t seed);

// Writes triples.tsv, users.jsonl, labelled.tsv, politicians.tsv and
// mapping.json into `dir`.
Fixture generate_fixture(std::uint64_t seed, const std::filesystem::path& dir);

}  // namespace kge
