#include "rccs/branching.hpp"

#include "rccs/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace rccs {

bool EpsGraph::contains(StateId s) const {
    return std::binary_search(nodes.begin(), nodes.end(), s);
}

std::size_t EpsGraph::index_of(StateId s) const {
    return static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), s) - nodes.begin());
}

namespace {

bool state_preserving(const Lts& lts, const Partition& p, BlockId anchor, const Itr& itr) {
    for (StateId t : itr_targets(lts, itr))
        if (p.block_of(t) != anchor) return false;
    return true;
}

} // namespace

EpsGraph eps_graph(const Lts& lts, const Partition& p, StateId s) {
    EpsGraph g;
    g.anchor = s;
    g.anchor_block = p.block_of(s);

    std::deque<StateId> queue{s};
    std::set<StateId> seen{s};
    while (!queue.empty()) {
        StateId u = queue.front();
        queue.pop_front();
        for (const Itr& itr : immediate_silent_transitions(lts, u)) {
            if (!state_preserving(lts, p, g.anchor_block, itr)) continue;
            for (StateId t : itr_targets(lts, itr)) {
                if (seen.insert(t).second) queue.push_back(t);
            }
        }
    }
    g.nodes.assign(seen.begin(), seen.end());
    g.itrs.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        for (const Itr& itr : immediate_silent_transitions(lts, g.nodes[i]))
            if (state_preserving(lts, p, g.anchor_block, itr)) g.itrs[i].push_back(itr);
    }
    return g;
}

std::vector<StateId> almost_sure_reach(const Lts& lts, const EpsGraph& g,
                                       const std::set<StateId>& goal) {
    const std::size_t n = g.nodes.size();
    for (StateId s : goal)
        if (!g.contains(s)) throw GoalOutsideGraphError();

    std::vector<bool> alive(n, true);
    std::vector<bool> is_goal(n, false);
    for (StateId s : goal) is_goal[g.index_of(s)] = true;

    // allowed[i] holds the itrs of node i whose targets all survive.
    std::vector<std::vector<Itr>> allowed = g.itrs;

    while (true) {
        // Nodes that can reach the goal through currently allowed itrs.
        std::vector<bool> reach(n, false);
        for (std::size_t i = 0; i < n; ++i) reach[i] = is_goal[i] && alive[i];
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (reach[i] || !alive[i]) continue;
                for (const Itr& itr : allowed[i]) {
                    bool hits = false;
                    for (StateId t : itr_targets(lts, itr))
                        hits = hits || reach[g.index_of(t)];
                    if (hits) {
                        reach[i] = true;
                        grew = true;
                        break;
                    }
                }
            }
        }

        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (alive[i] && !reach[i]) {
                alive[i] = false;
                changed = true;
            }
        }
        if (!changed) break;

        // Delete itrs with a target outside the kept set.
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) {
                allowed[i].clear();
                continue;
            }
            std::vector<Itr> kept;
            for (const Itr& itr : allowed[i]) {
                bool ok = true;
                for (StateId t : itr_targets(lts, itr))
                    ok = ok && alive[g.index_of(t)];
                if (ok) kept.push_back(itr);
            }
            allowed[i] = std::move(kept);
        }
    }

    std::vector<StateId> result;
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) result.push_back(g.nodes[i]);
    return result;
}

namespace {

// Mass a collective sends into one block.
Rational block_mass(const Lts& lts, const Partition& p, const CollectiveTransition& ct,
                    BlockId block) {
    Rational m = 0;
    for (const auto& [t, prob] : ct.targets)
        if (p.block_of(t) == block) m += prob;
    return m;
}

bool as_reach_from_anchor(const Lts& lts, const EpsGraph& g, const std::set<StateId>& goal) {
    if (goal.empty()) return false;
    std::vector<StateId> winning = almost_sure_reach(lts, g, goal);
    return std::binary_search(winning.begin(), winning.end(), g.anchor);
}

} // namespace

bool l_transition(const Lts& lts, const Partition& p, StateId s, const Action& l, BlockId target) {
    if (l.is_tau() && target == p.block_of(s))
        throw IllFormedQueryError("tau l-transition into the state's own block");

    EpsGraph g = eps_graph(lts, p, s);
    std::set<StateId> goal;
    for (StateId u : g.nodes) {
        for (const auto& e : lts.state(u).act_edges) {
            if (e.act == l && p.block_of(e.target) == target) {
                goal.insert(u);
                break;
            }
        }
    }
    return as_reach_from_anchor(lts, g, goal);
}

bool q_transition(const Lts& lts, const Partition& p, StateId s, const Rational& q,
                  BlockId target) {
    if (target == p.block_of(s))
        throw IllFormedQueryError("q-transition into the state's own block");
    if (sgn(q) <= 0 || q > 1)
        throw IllFormedQueryError("q must lie in (0,1]");

    BlockId own = p.block_of(s);
    EpsGraph g = eps_graph(lts, p, s);
    std::set<StateId> goal;
    for (StateId u : g.nodes) {
        for (CollectiveId c : lts.state(u).collectives) {
            const CollectiveTransition& ct = lts.collective(c);
            Rational stay = block_mass(lts, p, ct, own);
            if (stay >= 1) continue;
            Rational mass = block_mass(lts, p, ct, target);
            if (mass / (1 - stay) == q) {
                goal.insert(u);
                break;
            }
        }
    }
    return as_reach_from_anchor(lts, g, goal);
}

Signature signature(const Lts& lts, const Partition& p, StateId s) {
    BlockId own = p.block_of(s);
    Signature sig;

    // Candidate pairs come from the transitions of the block's members:
    // a witnessing leaf always lies in the block, so nothing else can
    // enable an l- or q-transition.
    std::set<std::pair<Action, BlockId>> vis_candidates;
    std::set<std::pair<Rational, BlockId>> prob_candidates;
    for (StateId u : p.members(own)) {
        for (const auto& e : lts.state(u).act_edges) {
            BlockId tb = p.block_of(e.target);
            if (e.act.is_tau() && tb == own) continue;
            vis_candidates.insert({e.act, tb});
        }
        for (CollectiveId c : lts.state(u).collectives) {
            const CollectiveTransition& ct = lts.collective(c);
            Rational stay = block_mass(lts, p, ct, own);
            if (stay >= 1) continue;
            ClassMassVector masses;
            for (const auto& [t, prob] : ct.targets)
                masses[p.block_of(t)] += prob;
            for (const auto& [b, m] : masses) {
                if (b == own) continue;
                prob_candidates.insert({m / (1 - stay), b});
            }
        }
    }

    for (const auto& [act, block] : vis_candidates)
        if (l_transition(lts, p, s, act, block)) sig.vis.insert({act, block});
    for (const auto& [q, block] : prob_candidates)
        if (q_transition(lts, p, s, q, block)) sig.probs.insert({q, block});
    return sig;
}

Partition quotient(const Lts& lts, const Partition& seed, QuotientStats* stats) {
    Partition current = seed;
    bool changed = true;
    std::size_t passes = 0;
    while (changed) {
        changed = false;
        ++passes;
        std::vector<Signature> sigs(lts.state_count());
        for (StateId s = 0; s < lts.state_count(); ++s)
            sigs[s] = signature(lts, current, s);

        const std::vector<BlockId> ids = current.block_ids();
        for (BlockId b : ids) {
            std::map<Signature, std::vector<StateId>> groups;
            for (StateId s : current.members(b)) groups[sigs[s]].push_back(s);
            if (groups.size() < 2) continue;
            changed = true;
            // Peel groups off one at a time; after each split the
            // complement carries the highest freshly minted id.
            BlockId rest = b;
            std::size_t peeled = 0;
            for (const auto& [sig, group] : groups) {
                if (++peeled == groups.size()) break; // remainder is the last group
                current = current.split(rest, group);
                rest = current.block_ids().back();
            }
        }
    }
    if (stats) stats->passes = passes;
    return current;
}

} // namespace rccs
