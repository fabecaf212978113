#include "gridsim/discovery/registry.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "gridsim/error.hpp"

namespace gridsim::discovery {

namespace {

constexpr std::uint32_t kMagic = 0x47455247;  // "GREG"
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 4;
constexpr std::size_t kEntryBytes = 4 + 8 + 8 + 4 + 8 + 8 + 1;

class Writer {
public:
    explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

private:
    std::vector<std::uint8_t>& out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > in_.size()) throw GridError("truncated registry encoding");
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

void Registry::upsert(const ResourceDescription& desc) {
    entries_[desc.node_id] = RegistryEntry{desc, false};
    ++version_;
}

bool Registry::mark_stale(NodeId id) {
    auto it = entries_.find(id);
    if (it == entries_.end() || it->second.stale) return false;
    it->second.stale = true;
    ++version_;
    return true;
}

void Registry::set_owner(NodeId owner) {
    if (owner == owner_) return;
    owner_ = owner;
    ++version_;
}

std::vector<NodeId> Registry::match(const model::QueryConstraint& constraint) const {
    std::vector<NodeId> out;
    for (const auto& [id, entry] : entries_) {
        if (!entry.stale && constraint.satisfied_by(entry.description.capability, entry.description.free_storage))
            out.push_back(id);
    }
    return out;
}

std::vector<std::uint8_t> Registry::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + entries_.size() * kEntryBytes);
    Writer w(out);
    w.u32(kMagic);
    w.u32(static_cast<std::uint32_t>(subgrid_));
    w.u32(static_cast<std::uint32_t>(owner_));
    w.u64(version_);
    w.u32(static_cast<std::uint32_t>(entries_.size()));
    for (const auto& [id, entry] : entries_) {
        const auto& d = entry.description;
        w.u32(static_cast<std::uint32_t>(d.node_id));
        w.f64(d.capability);
        w.f64(d.owner_share);
        w.u32(static_cast<std::uint32_t>(d.running_jobs));
        w.f64(d.free_storage);
        w.f64(d.timestamp);
        w.u8(entry.stale ? 1 : 0);
    }
    return out;
}

Registry Registry::deserialize(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (r.u32() != kMagic) throw GridError("not a registry encoding");
    Registry reg;
    reg.subgrid_ = static_cast<SubgridId>(r.u32());
    reg.owner_ = static_cast<NodeId>(r.u32());
    reg.version_ = r.u64();
    const std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        RegistryEntry e;
        e.description.node_id = static_cast<NodeId>(r.u32());
        e.description.capability = r.f64();
        e.description.owner_share = r.f64();
        e.description.running_jobs = static_cast<int>(r.u32());
        e.description.free_storage = r.f64();
        e.description.timestamp = r.f64();
        e.stale = r.u8() != 0;
        reg.entries_[e.description.node_id] = e;
    }
    return reg;
}

void register_node(Registry& registry, const model::SubGrid& subgrid, const ResourceDescription& desc) {
    if (!std::binary_search(subgrid.members.begin(), subgrid.members.end(), desc.node_id))
        throw InvalidSpec("node " + std::to_string(desc.node_id) + " is not a member of sub-grid " +
                          std::to_string(subgrid.id));
    registry.upsert(desc);
}

CumulativePower aggregate_power(const Registry& registry) {
    CumulativePower p;
    p.subgrid = registry.subgrid();
    for (const auto& [id, entry] : registry.entries()) {
        if (entry.stale) continue;
        p.peak_flops += entry.description.capability * entry.description.owner_share;
        p.peak_storage += entry.description.free_storage;
        ++p.member_count;
    }
    return p;
}

}  // namespace gridsim::discovery
