#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "gridsim/broker/policy.hpp"
#include "gridsim/model/types.hpp"

namespace gridsim::discovery {

using broker::ResourceDescription;

struct RegistryEntry {
    ResourceDescription description;
    bool stale = false;  // owner stopped answering heartbeats

    friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// Per-sub-grid directory held by the super-peer. Every mutation bumps the
/// version.
class Registry {
public:
    Registry() = default;
    Registry(SubgridId subgrid, NodeId owner) : subgrid_(subgrid), owner_(owner) {}

    SubgridId subgrid() const { return subgrid_; }
    NodeId owner() const { return owner_; }
    std::uint64_t version() const { return version_; }
    const std::map<NodeId, RegistryEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool contains(NodeId id) const { return entries_.count(id) != 0; }

    /// Insert or replace; clears any stale flag.
    void upsert(const ResourceDescription& desc);
    /// Returns false (no version bump) if absent or already stale.
    bool mark_stale(NodeId id);
    void set_owner(NodeId owner);

    /// Live entries satisfying the constraint's thresholds, ascending.
    std::vector<NodeId> match(const model::QueryConstraint& constraint) const;

    /// Little-endian fixed-width encoding; self-delimiting, so trailing
    /// padding is ignored by deserialize.
    std::vector<std::uint8_t> serialize() const;
    static Registry deserialize(std::span<const std::uint8_t> bytes);  // throws GridError

    friend bool operator==(const Registry&, const Registry&) = default;

private:
    SubgridId subgrid_ = -1;
    NodeId owner_ = kNoNode;
    std::uint64_t version_ = 0;
    std::map<NodeId, RegistryEntry> entries_;
};

/// Registration interface of a super-peer. Throws InvalidSpec when the node
/// is not a member of the sub-grid.
void register_node(Registry& registry, const model::SubGrid& subgrid, const ResourceDescription& desc);

struct CumulativePower {
    SubgridId subgrid = -1;
    double peak_flops = 0.0;    // sum of capability * owner_share
    double peak_storage = 0.0;  // sum of free storage
    int member_count = 0;

    friend bool operator==(const CumulativePower&, const CumulativePower&) = default;
};

/// Theoretical peak over the registry's live entries.
CumulativePower aggregate_power(const Registry& registry);

}  // namespace gridsim::discovery
