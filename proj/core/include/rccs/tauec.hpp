#ifndef RCCS_TAUEC_HPP
#define RCCS_TAUEC_HPP

#include "rccs/divergence.hpp"
#include "rccs/lts.hpp"
#include "rccs/partition.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rccs {

/// A silent edge of the transition graph: a tau edge or one probabilistic
/// branch of a collective.
struct SilentEdge {
    StateId src = 0;
    StateId dst = 0;
    bool prob = false;
    Rational p;              // meaningful when prob
    CollectiveId group = 0;  // meaningful when prob

    friend bool operator==(const SilentEdge& a, const SilentEdge& b) {
        return a.src == b.src && a.dst == b.dst && a.prob == b.prob &&
               (!a.prob || (a.p == b.p && a.group == b.group));
    }
    friend bool operator<(const SilentEdge& a, const SilentEdge& b) {
        if (a.src != b.src) return a.src < b.src;
        if (a.dst != b.dst) return a.dst < b.dst;
        if (a.prob != b.prob) return a.prob < b.prob;
        if (a.prob && a.group != b.group) return a.group < b.group;
        return false;
    }
};

/// A strongly connected, silent, collectively closed subgraph in which
/// every node keeps an outgoing edge: the probabilistic counterpart of a
/// tau-cycle. A single node with no silent self-loop is not a tau-EC.
struct TauEc {
    std::vector<StateId> nodes;      // ascending
    std::vector<SilentEdge> edges;   // sorted

    friend bool operator==(const TauEc& a, const TauEc& b) {
        return a.nodes == b.nodes && a.edges == b.edges;
    }
};

/// Subgraph of the transition graph reachable through silent edges.
struct TauGraph {
    std::vector<StateId> nodes;      // ascending
    std::vector<SilentEdge> edges;   // sorted
};

TauGraph tau_graph(const Lts& lts, StateId s);

/// Maximal tau-ECs of the tau-graph of s: alternate SCC decomposition with
/// removal of collective groups that have a branch leaving the component,
/// until every component is closed. The results are pairwise disjoint.
std::vector<TauEc> comp_mec(const Lts& lts, StateId s);

/// Is ec1 related to ec2: does every node of ec2 have an equivalent node
/// in ec1?
bool ec_related(const Partition& p, const TauEc& ec1, const TauEc& ec2);

/// Memoizes comp_mec per state; maximal tau-ECs depend only on the graph,
/// never on the partition, so refinement loops reuse them.
class MecCache {
public:
    const std::vector<TauEc>& get(const Lts& lts, StateId s);

private:
    std::map<StateId, std::vector<TauEc>> memo_;
};

/// Can q silently reach a maximal tau-EC related to `target`?
bool reaches_related_mec(const Lts& lts, const Partition& p, StateId q, const TauEc& target,
                         MecCache* cache = nullptr);

struct MecSplitter {
    StateId witness = 0;
    TauEc mec;
};

/// Scans same-block pairs for a maximal tau-EC one member reaches that the
/// other cannot match with a related one.
std::pair<bool, std::optional<MecSplitter>> find_mec_split(const Lts& lts, const Partition& p,
                                                           MecCache* cache = nullptr);

/// Splits the witness's block into members that reach a mec related to the
/// splitter's and members that do not.
Partition mec_refine(const Lts& lts, const Partition& p, const MecSplitter& w,
                     MecCache* cache = nullptr);

enum class BisimBase { Branching, Weak };

/// Alternates the base quotient (branching or weak) with maximal-tau-EC
/// refinement until the partition is tau-EC invariant: the quotient under
/// exhaustive branching / exhaustive weak bisimilarity.
Partition exh_quotient(const Lts& lts, const Partition& seed, BisimBase base,
                       RefinementStats* stats = nullptr, std::ostream* trace = nullptr,
                       std::ostream* lp_dump = nullptr);

Decision exh_bisim(const Lts& lts, StateId a, StateId b, BisimBase base,
                   std::ostream* trace = nullptr);

/// Canonical JSON list of maximal tau-ECs, nodes and edges rendered with
/// the namer (defaults to pretty terms).
std::string mecs_to_json(const Lts& lts, const std::vector<TauEc>& mecs,
                         const std::function<std::string(StateId)>& namer = {});

} // namespace rccs

#endif
