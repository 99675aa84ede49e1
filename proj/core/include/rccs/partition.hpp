#ifndef RCCS_PARTITION_HPP
#define RCCS_PARTITION_HPP

#include "rccs/lts.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace rccs {

using BlockId = std::uint32_t;

/// Mass per equivalence class; absent blocks carry zero.
using ClassMassVector = std::map<BlockId, Rational>;

/// An equivalence on the state set, represented as disjoint blocks.
/// Values are immutable snapshots; split() returns a refined copy. Block
/// ids are stable: a split retires the old id and mints two fresh ones, so
/// ids recorded during one refinement pass stay meaningful.
class Partition {
public:
    static Partition coarsest(const Lts& lts);
    /// Builds a partition from explicit blocks; they must exactly cover
    /// 0..n_states-1 and be pairwise disjoint.
    static Partition from_blocks(std::size_t n_states, const std::vector<std::vector<StateId>>& blocks);

    std::size_t state_count() const { return block_of_.size(); }
    std::size_t block_count() const { return active_.size(); }
    BlockId block_of(StateId s) const { return block_of_[s]; }
    bool same_block(StateId a, StateId b) const { return block_of_[a] == block_of_[b]; }
    /// Members of a block, ascending.
    const std::vector<StateId>& members(BlockId b) const { return blocks_[b]; }
    /// Active block ids, ascending.
    const std::vector<BlockId>& block_ids() const { return active_; }

    /// Replaces `block` by `part` and its complement. The part must be a
    /// nonempty subset of the block; an empty complement leaves the
    /// partition unchanged.
    Partition split(BlockId block, const std::vector<StateId>& part) const;

    /// True iff every block of this partition is contained in one block of
    /// `coarser`.
    bool refines(const Partition& coarser) const;

    /// Blocks as sorted sets of sorted member lists, independent of ids.
    std::vector<std::vector<StateId>> canonical_blocks() const;

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.canonical_blocks() == b.canonical_blocks();
    }

private:
    std::vector<std::vector<StateId>> blocks_; // indexed by BlockId; retired ids are empty
    std::vector<BlockId> block_of_;
    std::vector<BlockId> active_;
};

ClassMassVector class_mass(const Partition& p, const Distribution& d);

/// Canonical JSON rendering: a list of lists of member names, members and
/// blocks sorted lexicographically. The namer defaults to the pretty term.
std::string partition_to_json(const Partition& p, const Lts& lts,
                              const std::function<std::string(StateId)>& namer = {});

} // namespace rccs

#endif
