#ifndef RCCS_LTS_HPP
#define RCCS_LTS_HPP

#include "rccs/syntax.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rccs {

using StateId = std::uint32_t;
using CollectiveId = std::uint32_t;

/// Probability mass over states, exact and normalized.
using Distribution = std::map<StateId, Rational>;

/// One probabilistic choice, treated as a single silent step that hits all
/// of its targets at once. Duplicate targets are merged by summing.
struct CollectiveTransition {
    StateId source = 0;
    std::vector<std::pair<StateId, Rational>> targets; // probabilities sum to 1
};

/// An immediate silent transition: a plain tau edge or a whole collective.
struct Itr {
    enum class Kind { NonProb, Collective };
    Kind kind = Kind::NonProb;
    StateId target = 0;        // NonProb
    CollectiveId group = 0;    // Collective
};

/// A pLTS step: action plus evolved distribution.
struct PltsTransition {
    Action act;
    Distribution dist;
};

struct BuildOptions {
    std::size_t max_states = 100000;
};

/// The induced transition graph of a set of root processes. States are
/// canonical closed terms, deduplicated by alpha-equivalence; the graph is
/// closed under transitions and immutable once built.
class Lts {
public:
    struct ActEdge {
        Action act;
        StateId target;
    };

    struct State {
        TermPtr term;                          // canonical form
        std::vector<ActEdge> act_edges;        // tau and visible edges, AST order, deduplicated
        std::vector<CollectiveId> collectives; // groups sourced at this state
    };

    static Lts build(const std::vector<TermPtr>& roots, const BuildOptions& opts = {});

    std::size_t state_count() const { return states_.size(); }
    const State& state(StateId s) const { return states_[s]; }
    const TermPtr& term(StateId s) const { return states_[s].term; }
    const std::vector<StateId>& roots() const { return roots_; }
    const CollectiveTransition& collective(CollectiveId c) const { return collectives_[c]; }
    std::size_t collective_count() const { return collectives_.size(); }

    /// Looks up a state by term (validated/canonical or not).
    std::optional<StateId> find(const TermPtr& t) const;

    std::string dot(const std::vector<std::string>& labels = {}) const;
    std::string json(const std::vector<std::string>& labels = {}) const;

private:
    std::vector<State> states_;
    std::vector<CollectiveTransition> collectives_;
    std::vector<StateId> roots_;
    std::map<std::string, StateId> index_; // canonical pretty form -> id
};

std::vector<Itr> immediate_silent_transitions(const Lts& lts, StateId s);

/// Target set of an immediate silent transition.
std::vector<StateId> itr_targets(const Lts& lts, const Itr& itr);

std::vector<PltsTransition> plts_transitions(const Lts& lts, StateId s);

} // namespace rccs

#endif
