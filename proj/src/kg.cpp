#include "kge/kg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kge/error.hpp"
#include "kge/util.hpp"

namespace kge {

std::uint32_t Dictionary::intern(std::string_view label) {
    auto it = ids_.find(std::string(label));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.emplace_back(label);
    ids_.emplace(labels_.back(), id);
    return id;
}

std::optional<std::uint32_t> Dictionary::find(std::string_view label) const {
    auto it = ids_.find(std::string(label));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& Dictionary::label(std::uint32_t id) const {
    if (id >= labels_.size()) throw std::out_of_range("dictionary id " + std::to_string(id) + " out of range");
    return labels_[id];
}

std::string Dictionary::to_tsv() const {
    std::string out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        out += std::to_string(i);
        out += '\t';
        out += labels_[i];
        out += '\n';
    }
    return out;
}

Dictionary Dictionary::from_tsv(std::string_view text, std::string_view what) {
    Dictionary d;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 2)
            throw DataError(std::string(what) + " line " + std::to_string(line_no) + ": expected id TAB label");
        auto id = parse_uint(cols[0]);
        if (id != d.size() || d.find(cols[1]))
            throw DataError(std::string(what) + " line " + std::to_string(line_no) + ": ids must be dense and labels unique");
        d.intern(cols[1]);
    }
    return d;
}

std::uint64_t Dictionary::checksum() const { return fnv1a64(to_tsv()); }

std::string_view to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::valid: return "valid";
        case Split::test: return "test";
    }
    return "train";
}

Split parse_split(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "valid") return Split::valid;
    if (s == "test") return Split::test;
    throw DataError("unknown split tag '" + std::string(s) + "'");
}

namespace {

void check_label(std::string_view label, const char* position) {
    if (label.empty()) throw std::invalid_argument(std::string("empty ") + position + " label");
    if (label.find_first_of("\t\n\r") != std::string_view::npos)
        throw std::invalid_argument(std::string(position) + " label contains TAB or newline");
}

}  // namespace

KnowledgeGraph::Insert KnowledgeGraph::add_triple(std::string_view s, std::string_view p, std::string_view o) {
    check_label(s, "subject");
    check_label(p, "predicate");
    check_label(o, "object");
    Triple t{entities_.intern(s), relations_.intern(p), entities_.intern(o)};
    if (auto it = index_.find(t); it != index_.end()) return {it->second, true};
    index_.emplace(t, triples_.size());
    triples_.push_back(t);
    tags_.push_back(Split::train);
    return {triples_.size() - 1, false};
}

bool KnowledgeGraph::contains(EntityId s, RelationId p, EntityId o) const {
    if (s >= num_entities() || o >= num_entities() || p >= num_relations())
        throw std::out_of_range("triple id out of range");
    return index_.contains(Triple{s, p, o});
}

std::vector<Triple> KnowledgeGraph::triples_in(Split s) const {
    std::vector<Triple> out;
    for (std::size_t i = 0; i < triples_.size(); ++i)
        if (tags_[i] == s) out.push_back(triples_[i]);
    return out;
}

std::size_t KnowledgeGraph::count(Split s) const {
    return static_cast<std::size_t>(std::count(tags_.begin(), tags_.end(), s));
}

void KnowledgeGraph::set_tags(std::vector<Split> tags) {
    if (tags.size() != triples_.size()) throw std::invalid_argument("tag count does not match triple count");
    tags_ = std::move(tags);
}

void KnowledgeGraph::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    write_file(dir / "entities.tsv", entities_.to_tsv());
    write_file(dir / "relations.tsv", relations_.to_tsv());
    std::string triples, splits;
    for (std::size_t i = 0; i < triples_.size(); ++i) {
        const auto& t = triples_[i];
        triples += std::to_string(t.subject) + '\t' + std::to_string(t.predicate) + '\t' + std::to_string(t.object) + '\n';
        splits += std::to_string(i) + '\t' + std::string(to_string(tags_[i])) + '\n';
    }
    write_file(dir / "triples.tsv", triples);
    write_file(dir / "splits.tsv", splits);
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& dir) {
    KnowledgeGraph kg;
    kg.entities_ = Dictionary::from_tsv(read_file(dir / "entities.tsv"), "entities.tsv");
    kg.relations_ = Dictionary::from_tsv(read_file(dir / "relations.tsv"), "relations.tsv");

    std::istringstream triples(read_file(dir / "triples.tsv"));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(triples, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 3) throw DataError("triples.tsv line " + std::to_string(line_no) + ": expected 3 columns");
        Triple t{static_cast<EntityId>(parse_uint(cols[0])), static_cast<RelationId>(parse_uint(cols[1])),
                 static_cast<EntityId>(parse_uint(cols[2]))};
        if (t.subject >= kg.num_entities() || t.object >= kg.num_entities() || t.predicate >= kg.num_relations())
            throw DataError("triples.tsv line " + std::to_string(line_no) + ": id out of range");
        if (!kg.index_.emplace(t, kg.triples_.size()).second)
            throw DataError("triples.tsv line " + std::to_string(line_no) + ": duplicate triple");
        kg.triples_.push_back(t);
        kg.tags_.push_back(Split::train);
    }

    auto splits_path = dir / "splits.tsv";
    if (std::filesystem::exists(splits_path)) {
        std::istringstream splits(read_file(splits_path));
        line_no = 0;
        while (std::getline(splits, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto cols = split_tabs(line);
            if (cols.size() != 2) throw DataError("splits.tsv line " + std::to_string(line_no) + ": expected 2 columns");
            auto idx = parse_uint(cols[0]);
            if (idx >= kg.triples_.size()) throw DataError("splits.tsv line " + std::to_string(line_no) + ": index out of range");
            kg.tags_[idx] = parse_split(cols[1]);
        }
    }
    return kg;
}

KnowledgeGraph split(const KnowledgeGraph& kg, const SplitRatios& ratios, std::uint64_t seed) {
    if (ratios.train <= 0 || ratios.valid <= 0 || ratios.test <= 0)
        throw std::invalid_argument("split ratios must be positive");
    if (std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9)
        throw std::invalid_argument("split ratios must sum to 1");

    const auto n = kg.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_valid = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.valid));
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.test));
    const auto n_train = n - std::min(n, n_valid + n_test);

    std::vector<Split> tags(n, Split::train);
    for (std::size_t i = n_train; i < n; ++i)
        tags[order[i]] = i < n_train + n_valid ? Split::valid : Split::test;

    std::vector<char> entity_seen(kg.num_entities(), 0), relation_seen(kg.num_relations(), 0);
    const auto& triples = kg.triples();
    for (std::size_t i = 0; i < n; ++i) {
        if (tags[i] != Split::train) continue;
        entity_seen[triples[i].subject] = entity_seen[triples[i].object] = 1;
        relation_seen[triples[i].predicate] = 1;
    }
    // Held-out triples are visited in shuffled order; each reassignment can
    // only widen train coverage, so one pass reaches the fixpoint.
    for (std::size_t i = n_train; i < n; ++i) {
        const auto idx = order[i];
        const auto& t = triples[idx];
        if (entity_seen[t.subject] && entity_seen[t.object] && relation_seen[t.predicate]) continue;
        tags[idx] = Split::train;
        entity_seen[t.subject] = entity_seen[t.object] = 1;
        relation_seen[t.predicate] = 1;
    }

    KnowledgeGraph out = kg;
    out.set_tags(std::move(tags));
    return out;
}

}  // namespace kge
