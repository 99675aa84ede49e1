#ifndef RCCS_DIVERGENCE_HPP
#define RCCS_DIVERGENCE_HPP

#include "rccs/branching.hpp"
#include "rccs/lts.hpp"
#include "rccs/partition.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace rccs {

/// A block mixing divergent and non-divergent members; its smallest member
/// acts as the witness.
struct DivSplitter {
    StateId witness = 0;
};

/// Does s admit a divergent epsilon-tree with regard to p? Non-divergent
/// nodes are collected in waves starting from the sinks of the
/// epsilon-graph: a node joins once every one of its state-preserving
/// immediate silent transitions has at least one target already collected.
/// When join_order is given it receives the nodes in joining order (sinks
/// first, ascending within each wave).
bool det_div_tree(const Lts& lts, const Partition& p, StateId s,
                  std::vector<StateId>* join_order = nullptr);

/// Scans the partition for a block mixing divergent and non-divergent
/// states. Returns (true, nullopt) when the partition is divergent
/// epsilon-tree preserving. Divergence is evaluated once per state, not
/// once per pair.
std::pair<bool, std::optional<DivSplitter>> find_div_split(const Lts& lts, const Partition& p);

/// Splits the witness's block into its divergent and non-divergent parts.
Partition div_refine(const Lts& lts, const Partition& p, const DivSplitter& w);

struct RefinementStats {
    std::size_t iterations = 0;      // outer refinement loop
    std::size_t quotient_passes = 0; // summed over all quotient calls
};

/// Alternates the branching quotient with divergence refinement until the
/// partition is divergent epsilon-tree preserving: the quotient under
/// branching bisimilarity with explicit divergence.
Partition div_bran_quotient(const Lts& lts, const Partition& seed,
                            RefinementStats* stats = nullptr, std::ostream* trace = nullptr);

struct Decision {
    bool equal = false;
    Partition partition;
    RefinementStats stats;
};

/// Decides whether two root states are branching bisimilar with explicit
/// divergence.
Decision div_bran_bisim(const Lts& lts, StateId a, StateId b, std::ostream* trace = nullptr);

} // namespace rccs

#endif
