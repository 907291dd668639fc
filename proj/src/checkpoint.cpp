#include "kge/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>

#include "kge/error.hpp"
#include "kge/util.hpp"

namespace kge {

namespace {

std::string encode(const std::vector<double>& values) {
    std::string out(values.size() * 8, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bits = std::bit_cast<std::uint64_t>(values[i]);
        for (int b = 0; b < 8; ++b) out[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    return out;
}

std::vector<double> decode(const std::string& bytes, std::size_t expected, const std::string& what) {
    if (bytes.size() != expected * 8)
        throw DataError(what + ": expected " + std::to_string(expected) + " doubles, found " +
                        std::to_string(bytes.size()) + " bytes");
    std::vector<double> out(expected);
    for (std::size_t i = 0; i < expected; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= std::uint64_t{static_cast<unsigned char>(bytes[i * 8 + b])} << (8 * b);
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const ModelParameters& p, const KnowledgeGraph& kg) {
    if (p.num_entities != kg.num_entities() || p.num_relations != kg.num_relations())
        throw DataError("parameter shapes do not match the knowledge graph dictionaries");
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json m;
    m["format_version"] = kCheckpointFormatVersion;
    m["model_kind"] = to_string(p.kind);
    m["k"] = p.k;
    m["num_filters"] = p.num_filters;
    m["transe_norm"] = p.transe_norm;
    m["num_entities"] = p.num_entities;
    m["num_relations"] = p.num_relations;
    m["seed"] = p.seed;
    m["entity_checksum"] = hex(kg.entities().checksum());
    m["relation_checksum"] = hex(kg.relations().checksum());
    write_file(dir / "manifest", m.dump(2) + "\n");
    write_file(dir / "entities.vec", encode(p.entities));
    write_file(dir / "relations.vec", encode(p.relations));
    if (p.kind == ModelKind::convkb) {
        auto convkb = p.filters;
        convkb.insert(convkb.end(), p.dense.begin(), p.dense.end());
        write_file(dir / "convkb.vec", encode(convkb));
    } else {
        std::filesystem::remove(dir / "convkb.vec");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    Checkpoint c;
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(read_file(dir / "manifest"));
        auto& mf = c.manifest;
        mf.format_version = m.at("format_version").get<int>();
        if (mf.format_version != kCheckpointFormatVersion)
            throw DataError("unsupported checkpoint format version " + std::to_string(mf.format_version));
        mf.kind = parse_model_kind(m.at("model_kind").get<std::string>());
        mf.k = m.at("k").get<std::size_t>();
        mf.num_filters = m.at("num_filters").get<std::size_t>();
        mf.transe_norm = m.at("transe_norm").get<int>();
        mf.num_entities = m.at("num_entities").get<std::uint32_t>();
        mf.num_relations = m.at("num_relations").get<std::uint32_t>();
        mf.seed = m.at("seed").get<std::uint64_t>();
        mf.entity_checksum = std::stoull(m.at("entity_checksum").get<std::string>(), nullptr, 16);
        mf.relation_checksum = std::stoull(m.at("relation_checksum").get<std::string>(), nullptr, 16);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint manifest: " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
        throw DataError("checkpoint manifest: " + std::string(e.what()));
    }

    const auto& mf = c.manifest;
    auto& p = c.params;
    p.kind = mf.kind;
    p.k = mf.k;
    p.width = mf.kind == ModelKind::complex ? 2 * mf.k : mf.k;
    p.num_entities = mf.num_entities;
    p.num_relations = mf.num_relations;
    p.transe_norm = mf.transe_norm;
    p.num_filters = mf.num_filters;
    p.seed = mf.seed;
    p.entities = decode(read_file(dir / "entities.vec"), std::size_t{mf.num_entities} * p.width, "entities.vec");
    p.relations = decode(read_file(dir / "relations.vec"), std::size_t{mf.num_relations} * p.width, "relations.vec");
    if (mf.kind == ModelKind::convkb) {
        auto all = decode(read_file(dir / "convkb.vec"), mf.num_filters * 4 + mf.num_filters * mf.k, "convkb.vec");
        p.filters.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mf.num_filters * 4));
        p.dense.assign(all.begin() + static_cast<std::ptrdiff_t>(mf.num_filters * 4), all.end());
    }
    return c;
}

void verify_dictionaries(const CheckpointManifest& m, const KnowledgeGraph& kg) {
    if (m.num_entities != kg.num_entities() || m.num_relations != kg.num_relations() ||
        m.entity_checksum != kg.entities().checksum() || m.relation_checksum != kg.relations().checksum())
        throw DataError("checkpoint dictionaries do not match the knowledge graph");
}

}  // namespace kge
