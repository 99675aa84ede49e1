#include "rccs/tauec.hpp"

#include "rccs/errors.hpp"
#include "rccs/weak.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <ostream>
#include <set>
#include <sstream>

namespace rccs {

namespace {

std::vector<SilentEdge> silent_edges_of(const Lts& lts, StateId u) {
    std::vector<SilentEdge> out;
    for (const auto& e : lts.state(u).act_edges)
        if (e.act.is_tau()) out.push_back(SilentEdge{u, e.target, false, Rational(0), 0});
    for (CollectiveId c : lts.state(u).collectives)
        for (const auto& [t, p] : lts.collective(c).targets)
            out.push_back(SilentEdge{u, t, true, p, c});
    return out;
}

} // namespace

TauGraph tau_graph(const Lts& lts, StateId s) {
    std::set<StateId> seen{s};
    std::deque<StateId> queue{s};
    while (!queue.empty()) {
        StateId u = queue.front();
        queue.pop_front();
        for (const SilentEdge& e : silent_edges_of(lts, u))
            if (seen.insert(e.dst).second) queue.push_back(e.dst);
    }
    TauGraph g;
    g.nodes.assign(seen.begin(), seen.end());
    for (StateId u : g.nodes)
        for (SilentEdge& e : silent_edges_of(lts, u)) g.edges.push_back(e);
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

namespace {

struct Subgraph {
    std::vector<StateId> nodes;     // ascending
    std::vector<SilentEdge> edges;  // sorted
};

// Iterative Tarjan over a subgraph; components are returned in a
// deterministic order (sorted by smallest member).
std::vector<std::vector<StateId>> sccs(const Subgraph& g) {
    const std::size_t n = g.nodes.size();
    std::map<StateId, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) index_of[g.nodes[i]] = i;

    std::vector<std::vector<std::size_t>> adj(n);
    for (const SilentEdge& e : g.edges)
        adj[index_of.at(e.src)].push_back(index_of.at(e.dst));

    std::vector<int> disc(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<StateId>> result;
    int counter = 0;

    struct Frame {
        std::size_t v;
        std::size_t edge = 0;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (disc[root] != -1) continue;
        std::vector<Frame> frames{{root}};
        disc[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge < adj[f.v].size()) {
                std::size_t w = adj[f.v][f.edge++];
                if (disc[w] == -1) {
                    disc[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], disc[w]);
                }
            } else {
                if (low[f.v] == disc[f.v]) {
                    std::vector<StateId> comp;
                    while (true) {
                        std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(g.nodes[w]);
                        if (w == f.v) break;
                    }
                    std::sort(comp.begin(), comp.end());
                    result.push_back(std::move(comp));
                }
                std::size_t v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

bool every_node_has_out_edge(const Subgraph& g) {
    if (g.edges.empty()) return false;
    std::set<StateId> sources;
    for (const SilentEdge& e : g.edges) sources.insert(e.src);
    return sources.size() == g.nodes.size();
}

} // namespace

std::vector<TauEc> comp_mec(const Lts& lts, StateId s) {
    TauGraph whole = tau_graph(lts, s);
    std::deque<Subgraph> work;
    work.push_back(Subgraph{whole.nodes, whole.edges});
    std::vector<TauEc> result;

    while (!work.empty()) {
        Subgraph sub = std::move(work.front());
        work.pop_front();
        for (const std::vector<StateId>& comp : sccs(sub)) {
            Subgraph cand;
            cand.nodes = comp;
            for (const SilentEdge& e : sub.edges) {
                if (std::binary_search(comp.begin(), comp.end(), e.src) &&
                    std::binary_search(comp.begin(), comp.end(), e.dst))
                    cand.edges.push_back(e);
            }

            // Remove every collective group that lost a branch: a pt edge may
            // stay only if all of its siblings stay inside the component.
            std::set<std::pair<StateId, CollectiveId>> present;
            for (const SilentEdge& e : cand.edges)
                if (e.prob) present.insert({e.src, e.group});
            bool changed = false;
            for (const auto& [src, group] : present) {
                std::size_t inside = 0;
                for (const SilentEdge& e : cand.edges)
                    if (e.prob && e.src == src && e.group == group) ++inside;
                if (inside != lts.collective(group).targets.size()) {
                    changed = true;
                    std::vector<SilentEdge> kept;
                    for (const SilentEdge& e : cand.edges)
                        if (!(e.prob && e.src == src && e.group == group)) kept.push_back(e);
                    cand.edges = std::move(kept);
                }
            }

            if (changed) {
                work.push_back(std::move(cand));
            } else if (every_node_has_out_edge(cand)) {
                result.push_back(TauEc{std::move(cand.nodes), std::move(cand.edges)});
            }
            // else: a trivial component without a silent self-loop; discard.
        }
    }
    std::sort(result.begin(), result.end(),
              [](const TauEc& a, const TauEc& b) { return a.nodes < b.nodes; });
    return result;
}

bool ec_related(const Partition& p, const TauEc& ec1, const TauEc& ec2) {
    std::set<BlockId> blocks1;
    for (StateId s : ec1.nodes) blocks1.insert(p.block_of(s));
    for (StateId s : ec2.nodes)
        if (!blocks1.count(p.block_of(s))) return false;
    return true;
}

const std::vector<TauEc>& MecCache::get(const Lts& lts, StateId s) {
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(s, comp_mec(lts, s)).first->second;
}

bool reaches_related_mec(const Lts& lts, const Partition& p, StateId q, const TauEc& target,
                         MecCache* cache) {
    MecCache local;
    MecCache& c = cache ? *cache : local;
    // Every mec of q's tau-graph is silently reachable from q by
    // construction.
    for (const TauEc& mec : c.get(lts, q))
        if (ec_related(p, target, mec)) return true;
    return false;
}

std::pair<bool, std::optional<MecSplitter>> find_mec_split(const Lts& lts, const Partition& p,
                                                           MecCache* cache) {
    MecCache local;
    MecCache& c = cache ? *cache : local;
    for (BlockId b : p.block_ids()) {
        const auto& members = p.members(b);
        for (StateId P : members) {
            for (StateId Q : members) {
                if (P == Q) continue;
                for (const TauEc& mec : c.get(lts, P)) {
                    bool matched = false;
                    for (const TauEc& other : c.get(lts, Q))
                        matched = matched || ec_related(p, mec, other);
                    if (!matched) return {false, MecSplitter{P, mec}};
                }
            }
        }
    }
    return {true, std::nullopt};
}

Partition mec_refine(const Lts& lts, const Partition& p, const MecSplitter& w, MecCache* cache) {
    MecCache local;
    MecCache& c = cache ? *cache : local;
    BlockId b = p.block_of(w.witness);
    std::vector<StateId> reaching;
    std::vector<StateId> rest;
    for (StateId s : p.members(b)) {
        if (reaches_related_mec(lts, p, s, w.mec, &c)) reaching.push_back(s);
        else rest.push_back(s);
    }
    if (reaching.empty() || rest.empty()) throw NotASplitterError();
    return p.split(b, reaching);
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

Partition exh_quotient(const Lts& lts, const Partition& seed, BisimBase base,
                       RefinementStats* stats, std::ostream* trace, std::ostream* lp_dump) {
    Partition initial = seed;
    RefinementStats local;
    MecCache cache;
    while (true) {
        ++local.iterations;
        Partition refined = [&] {
            if (base == BisimBase::Branching) {
                QuotientStats qs;
                Partition r = quotient(lts, initial, &qs);
                local.quotient_passes += qs.passes;
                return r;
            }
            RefinementStats ws;
            Partition r = weak_quotient(lts, initial, &ws, lp_dump);
            local.quotient_passes += ws.quotient_passes;
            return r;
        }();
        auto [invariant, splitter] = find_mec_split(lts, refined, &cache);
        if (trace) {
            *trace << "exh iter=" << local.iterations << " blocks=" << refined.block_count()
                   << " sizes=" << block_sizes(refined) << " splitter="
                   << (invariant ? std::string("none")
                                 : "s" + std::to_string(splitter->witness))
                   << "\n";
        }
        if (invariant) {
            if (stats) *stats = local;
            return refined;
        }
        initial = mec_refine(lts, refined, *splitter, &cache);
    }
}

Decision exh_bisim(const Lts& lts, StateId a, StateId b, BisimBase base, std::ostream* trace) {
    Decision d;
    d.partition = exh_quotient(lts, Partition::coarsest(lts), base, &d.stats, trace);
    d.equal = d.partition.same_block(a, b);
    return d;
}

std::string mecs_to_json(const Lts& lts, const std::vector<TauEc>& mecs,
                         const std::function<std::string(StateId)>& namer) {
    auto name = [&](StateId s) { return namer ? namer(s) : pretty(lts.term(s)); };
    std::vector<nlohmann::json> items;
    for (const TauEc& mec : mecs) {
        std::vector<std::string> nodes;
        for (StateId s : mec.nodes) nodes.push_back(name(s));
        std::sort(nodes.begin(), nodes.end());
        std::vector<std::vector<std::string>> edges;
        for (const SilentEdge& e : mec.edges) {
            std::string label = e.prob ? to_string(e.p) + " tau" : "tau";
            edges.push_back({name(e.src), label, name(e.dst)});
        }
        std::sort(edges.begin(), edges.end());
        items.push_back({{"nodes", nodes}, {"edges", edges}});
    }
    std::sort(items.begin(), items.end(),
              [](const nlohmann::json& a, const nlohmann::json& b) { return a.dump() < b.dump(); });
    nlohmann::json j = items;
    return j.dump(2);
}

} // namespace rccs
