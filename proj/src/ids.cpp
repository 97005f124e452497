#include "pkg/ids.hpp"

#include <cstdio>

namespace pkg {

std::string_view node_kind_segment(NodeKind kind) {
    switch (kind) {
    case NodeKind::Statement:
        return "stmt";
    case NodeKind::Concept:
        return "concept";
    case NodeKind::Preference:
        return "pref";
    }
    return "node";
}

Iri skolem_iri(const Iri& owner_namespace, NodeKind kind, std::string_view uuid) {
    std::string base = owner_namespace.str();
    if (!base.ends_with('/')) {
        base += '/';
    }
    base += node_kind_segment(kind);
    base += '/';
    base += uuid;
    return Iri{std::move(base)};
}

RandomIdMinter::RandomIdMinter() : rng_(std::random_device{}()) {}

RandomIdMinter::RandomIdMinter(std::uint64_t seed) : rng_(seed) {}

std::string RandomIdMinter::uuid() {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    {
        std::lock_guard lock(mutex_);
        hi = rng_();
        lo = rng_();
    }
    hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
    lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
    char buf[37];
    std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx", static_cast<unsigned>(hi >> 32),
                  static_cast<unsigned>((hi >> 16) & 0xffff), static_cast<unsigned>(hi & 0xffff),
                  static_cast<unsigned>(lo >> 48), static_cast<unsigned long long>(lo & 0xffffffffffffULL));
    return buf;
}

Iri RandomIdMinter::mint(const Iri& owner_namespace, NodeKind kind) {
    return skolem_iri(owner_namespace, kind, uuid());
}

} // namespace pkg
