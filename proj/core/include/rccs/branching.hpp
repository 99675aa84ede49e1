#ifndef RCCS_BRANCHING_HPP
#define RCCS_BRANCHING_HPP

#include "rccs/lts.hpp"
#include "rccs/partition.hpp"

#include <set>
#include <utility>
#include <vector>

namespace rccs {

/// The epsilon-graph of a state: the closure of the state under
/// state-preserving immediate silent transitions, together with those
/// transitions. Every node and every transition target stays inside the
/// anchor state's block.
struct EpsGraph {
    StateId anchor = 0;
    BlockId anchor_block = 0;
    std::vector<StateId> nodes;          // ascending
    std::vector<std::vector<Itr>> itrs;  // parallel to nodes

    bool contains(StateId s) const;
    std::size_t index_of(StateId s) const;
};

EpsGraph eps_graph(const Lts& lts, const Partition& p, StateId s);

/// Nodes of g from which some scheduler over g's transitions (stopping
/// allowed) reaches the goal set with probability 1. Computed by the
/// standard two-level pruning fixpoint: repeatedly restrict to nodes that
/// can still reach the goal, dropping transitions with a target outside
/// the restriction.
std::vector<StateId> almost_sure_reach(const Lts& lts, const EpsGraph& g,
                                       const std::set<StateId>& goal);

/// Is there an l-transition from s to the target block? For tau the
/// target must differ from s's own block.
bool l_transition(const Lts& lts, const Partition& p, StateId s, const Action& l, BlockId target);

/// Is there a q-transition from s to the target block with normalized
/// probability exactly q?
bool q_transition(const Lts& lts, const Partition& p, StateId s, const Rational& q, BlockId target);

/// Everything a state can do up to the current partition: its enabled
/// l-transitions and q-transitions. Two states in one block are separated
/// exactly when their signatures differ.
struct Signature {
    std::set<std::pair<Action, BlockId>> vis;
    std::set<std::pair<Rational, BlockId>> probs;

    friend bool operator==(const Signature& a, const Signature& b) {
        return a.vis == b.vis && a.probs == b.probs;
    }
    friend bool operator<(const Signature& a, const Signature& b) {
        if (a.vis != b.vis) return a.vis < b.vis;
        return a.probs < b.probs;
    }
};

Signature signature(const Lts& lts, const Partition& p, StateId s);

struct QuotientStats {
    std::size_t passes = 0;
};

/// Greatest fixpoint of signature-based splitting: the largest branching
/// bisimulation contained in the seed partition.
Partition quotient(const Lts& lts, const Partition& seed, QuotientStats* stats = nullptr);

} // namespace rccs

#endif
