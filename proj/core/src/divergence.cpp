#include "rccs/divergence.hpp"

#include "rccs/errors.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace rccs {

bool det_div_tree(const Lts& lts, const Partition& p, StateId s,
                  std::vector<StateId>* join_order) {
    EpsGraph g = eps_graph(lts, p, s);
    const std::size_t n = g.nodes.size();
    std::vector<bool> ndiv(n, false);

    // Wave 0: sink nodes of the epsilon-graph.
    std::vector<std::size_t> wave;
    for (std::size_t i = 0; i < n; ++i) {
        if (g.itrs[i].empty()) {
            ndiv[i] = true;
            wave.push_back(i);
        }
    }
    if (join_order)
        for (std::size_t i : wave) join_order->push_back(g.nodes[i]);

    bool grew = !wave.empty();
    while (grew) {
        grew = false;
        wave.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (ndiv[i]) continue;
            bool non_divergent = true;
            for (const Itr& itr : g.itrs[i]) {
                bool hits_ndiv = false;
                for (StateId t : itr_targets(lts, itr))
                    hits_ndiv = hits_ndiv || ndiv[g.index_of(t)];
                if (!hits_ndiv) {
                    non_divergent = false;
                    break;
                }
            }
            if (non_divergent) wave.push_back(i);
        }
        for (std::size_t i : wave) {
            ndiv[i] = true;
            grew = true;
            if (join_order) join_order->push_back(g.nodes[i]);
        }
    }
    return !ndiv[g.index_of(s)];
}

std::pair<bool, std::optional<DivSplitter>> find_div_split(const Lts& lts, const Partition& p) {
    for (BlockId b : p.block_ids()) {
        const auto& members = p.members(b);
        if (members.size() < 2) continue;
        bool first = det_div_tree(lts, p, members.front());
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (det_div_tree(lts, p, members[i]) != first)
                return {false, DivSplitter{members.front()}};
        }
    }
    return {true, std::nullopt};
}

Partition div_refine(const Lts& lts, const Partition& p, const DivSplitter& w) {
    BlockId b = p.block_of(w.witness);
    std::vector<StateId> divergent;
    std::vector<StateId> rest;
    for (StateId s : p.members(b)) {
        if (det_div_tree(lts, p, s)) divergent.push_back(s);
        else rest.push_back(s);
    }
    if (divergent.empty() || rest.empty()) throw NotASplitterError();
    return p.split(b, divergent);
}

namespace {

std::string block_sizes(const Partition& p) {
    std::ostringstream out;
    out << "[";
    bool first = true;
    for (BlockId b : p.block_ids()) {
        if (!first) out << ",";
        first = false;
        out << p.members(b).size();
    }
    out << "]";
    return out.str();
}

} // namespace

Partition div_bran_quotient(const Lts& lts, const Partition& seed, RefinementStats* stats,
                            std::ostream* trace) {
    Partition initial = seed;
    RefinementStats local;
    while (true) {
        ++local.iterations;
        QuotientStats qs;
        Partition refined = quotient(lts, initial, &qs);
        local.quotient_passes += qs.passes;
        auto [preserving, splitter] = find_div_split(lts, refined);
        if (trace) {
            *trace << "div iter=" << local.iterations << " blocks=" << refined.block_count()
                   << " sizes=" << block_sizes(refined) << " splitter="
                   << (preserving ? std::string("none")
                                  : "s" + std::to_string(splitter->witness))
                   << "\n";
        }
        if (preserving) {
            if (stats) *stats = local;
            return refined;
        }
        initial = div_refine(lts, refined, *splitter);
    }
}

Decision div_bran_bisim(const Lts& lts, StateId a, StateId b, std::ostream* trace) {
    Decision d;
    d.partition = div_bran_quotient(lts, Partition::coarsest(lts), &d.stats, trace);
    d.equal = d.partition.same_block(a, b);
    return d;
}

} // namespace rccs
