#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "pkg/rdf.hpp"

namespace pkg {

enum class NodeKind { Statement, Concept, Preference };

std::string_view node_kind_segment(NodeKind kind);

/// Mints skolem IRIs `<namespace>/<kind>/<uuid>`.
class IdMinter {
public:
    virtual ~IdMinter() = default;
    virtual Iri mint(const Iri& owner_namespace, NodeKind kind) = 0;
};

/// Version-4 UUIDs from a Mersenne twister; seeded runs are reproducible.
class RandomIdMinter final : public IdMinter {
public:
    RandomIdMinter();
    explicit RandomIdMinter(std::uint64_t seed);

    Iri mint(const Iri& owner_namespace, NodeKind kind) override;
    std::string uuid();

private:
    std::mutex mutex_;
    std::mt19937_64 rng_;
};

Iri skolem_iri(const Iri& owner_namespace, NodeKind kind, std::string_view uuid);

} // namespace pkg
