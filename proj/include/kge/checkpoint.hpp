#pragma once

#include <cstdint>
#include <filesystem>

#include "kge/kg.hpp"
#include "kge/model.hpp"

namespace kge {

inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointManifest {
    int format_version = kCheckpointFormatVersion;
    ModelKind kind = ModelKind::transe;
    std::size_t k = 0;
    std::size_t num_filters = 0;
    int transe_norm = 1;
    std::uint32_t num_entities = 0;
    std::uint32_t num_relations = 0;
    std::uint64_t seed = 0;
    std::uint64_t entity_checksum = 0;
    std::uint64_t relation_checksum = 0;
};

struct Checkpoint {
    CheckpointManifest manifest;
    ModelParameters params;
};

// `manifest` (JSON) plus entities.vec / relations.vec / convkb.vec holding
// little-endian IEEE-754 doubles, row-major.
void save_checkpoint(const std::filesystem::path& dir, const ModelParameters& params, const KnowledgeGraph& kg);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// Throws DataError when the checkpoint was trained on other dictionaries.
void verify_dictionaries(const CheckpointManifest& manifest, const KnowledgeGraph& kg);

}  // namespace kge
