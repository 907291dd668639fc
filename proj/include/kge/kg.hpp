#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kge {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
    EntityId subject = 0;
    RelationId predicate = 0;
    EntityId object = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t h = t.subject;
        h = h * 0x9e3779b97f4a7c15ULL ^ t.predicate;
        h = h * 0x9e3779b97f4a7c15ULL ^ t.object;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

struct LabelTriple {
    std::string subject;
    std::string predicate;
    std::string object;

    friend bool operator==(const LabelTriple&, const LabelTriple&) = default;
};

// Bijective label <-> dense id map. Ids are assigned in first-seen order.
class Dictionary {
public:
    std::uint32_t intern(std::string_view label);
    std::optional<std::uint32_t> find(std::string_view label) const;
    const std::string& label(std::uint32_t id) const;
    std::uint32_t size() const { return static_cast<std::uint32_t>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }

    // "id TAB label" lines, the persisted layout.
    std::string to_tsv() const;
    static Dictionary from_tsv(std::string_view text, std::string_view what);
    std::uint64_t checksum() const;

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::string> labels_;
};

enum class Split : std::uint8_t { train, valid, test };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct SplitRatios {
    double train = 0.8;
    double valid = 0.1;
    double test = 0.1;
};

// Dictionary-encoded triple store. Build with a single writer, then share
// by const reference; all const members are safe for concurrent readers.
class KnowledgeGraph {
public:
    struct Insert {
        std::size_t index;
        bool duplicate;
    };

    Insert add_triple(std::string_view s, std::string_view p, std::string_view o);
    Insert add_triple(const LabelTriple& t) { return add_triple(t.subject, t.predicate, t.object); }

    bool contains(EntityId s, RelationId p, EntityId o) const;
    bool contains(const Triple& t) const { return contains(t.subject, t.predicate, t.object); }

    const Dictionary& entities() const { return entities_; }
    const Dictionary& relations() const { return relations_; }
    std::uint32_t num_entities() const { return entities_.size(); }
    std::uint32_t num_relations() const { return relations_.size(); }

    const std::vector<Triple>& triples() const { return triples_; }
    const std::vector<Split>& tags() const { return tags_; }
    std::size_t size() const { return triples_.size(); }
    std::vector<Triple> triples_in(Split s) const;
    std::size_t count(Split s) const;

    void set_tags(std::vector<Split> tags);

    void save(const std::filesystem::path& dir) const;
    static KnowledgeGraph load(const std::filesystem::path& dir);

private:
    Dictionary entities_;
    Dictionary relations_;
    std::vector<Triple> triples_;
    std::vector<Split> tags_;
    std::unordered_map<Triple, std::size_t, TripleHash> index_;
};

// Seeded train/valid/test assignment. Valid/test triples whose entities or
// relation are not covered by train are moved to train.
KnowledgeGraph split(const KnowledgeGraph& kg, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace kge
