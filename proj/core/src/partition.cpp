#include "rccs/partition.hpp"

#include "rccs/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace rccs {

Partition Partition::coarsest(const Lts& lts) {
    Partition p;
    std::size_t n = lts.state_count();
    p.blocks_.resize(1);
    p.blocks_[0].reserve(n);
    for (StateId s = 0; s < n; ++s) p.blocks_[0].push_back(s);
    p.block_of_.assign(n, 0);
    p.active_ = {0};
    return p;
}

Partition Partition::from_blocks(std::size_t n_states,
                                 const std::vector<std::vector<StateId>>& blocks) {
    Partition p;
    p.block_of_.assign(n_states, 0);
    std::vector<bool> seen(n_states, false);
    for (const auto& block : blocks) {
        if (block.empty()) throw Error("seed partition contains an empty block");
        BlockId id = static_cast<BlockId>(p.blocks_.size());
        std::vector<StateId> members = block;
        std::sort(members.begin(), members.end());
        for (StateId s : members) {
            if (s >= n_states) throw Error("seed partition references an unknown state");
            if (seen[s]) throw Error("seed partition blocks are not disjoint");
            seen[s] = true;
            p.block_of_[s] = id;
        }
        p.blocks_.push_back(std::move(members));
        p.active_.push_back(id);
    }
    for (StateId s = 0; s < n_states; ++s)
        if (!seen[s]) throw Error("seed partition does not cover every state");
    return p;
}

Partition Partition::split(BlockId block, const std::vector<StateId>& part) const {
    if (block >= blocks_.size() || blocks_[block].empty())
        throw PartNotSubsetError();
    const std::vector<StateId>& whole = blocks_[block];
    std::vector<StateId> inside = part;
    std::sort(inside.begin(), inside.end());
    inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
    if (inside.empty() || !std::includes(whole.begin(), whole.end(), inside.begin(), inside.end()))
        throw PartNotSubsetError();
    if (inside.size() == whole.size())
        return *this; // empty complement: unchanged

    Partition next = *this;
    std::vector<StateId> rest;
    rest.reserve(whole.size() - inside.size());
    std::set_difference(whole.begin(), whole.end(), inside.begin(), inside.end(),
                        std::back_inserter(rest));

    BlockId id_part = static_cast<BlockId>(next.blocks_.size());
    BlockId id_rest = id_part + 1;
    for (StateId s : inside) next.block_of_[s] = id_part;
    for (StateId s : rest) next.block_of_[s] = id_rest;
    next.blocks_[block].clear(); // retired
    next.blocks_.push_back(std::move(inside));
    next.blocks_.push_back(std::move(rest));

    auto it = std::find(next.active_.begin(), next.active_.end(), block);
    next.active_.erase(it);
    next.active_.push_back(id_part);
    next.active_.push_back(id_rest);
    return next;
}

bool Partition::refines(const Partition& coarser) const {
    if (state_count() != coarser.state_count()) return false;
    for (BlockId b : active_) {
        const auto& m = blocks_[b];
        BlockId target = coarser.block_of(m.front());
        for (StateId s : m)
            if (coarser.block_of(s) != target) return false;
    }
    return true;
}

std::vector<std::vector<StateId>> Partition::canonical_blocks() const {
    std::vector<std::vector<StateId>> out;
    out.reserve(active_.size());
    for (BlockId b : active_) out.push_back(blocks_[b]);
    std::sort(out.begin(), out.end());
    return out;
}

ClassMassVector class_mass(const Partition& p, const Distribution& d) {
    ClassMassVector m;
    for (const auto& [s, mass] : d)
        m[p.block_of(s)] += mass;
    for (auto it = m.begin(); it != m.end();)
        it = is_zero(it->second) ? m.erase(it) : std::next(it);
    return m;
}

std::string partition_to_json(const Partition& p, const Lts& lts,
                              const std::function<std::string(StateId)>& namer) {
    std::vector<std::vector<std::string>> blocks;
    for (BlockId b : p.block_ids()) {
        std::vector<std::string> names;
        for (StateId s : p.members(b))
            names.push_back(namer ? namer(s) : pretty(lts.term(s)));
        std::sort(names.begin(), names.end());
        blocks.push_back(std::move(names));
    }
    std::sort(blocks.begin(), blocks.end());
    nlohmann::json j = blocks;
    return j.dump();
}

} // namespace rccs
