#ifndef RCCS_WEAK_HPP
#define RCCS_WEAK_HPP

#include "rccs/divergence.hpp"
#include "rccs/lts.hpp"
#include "rccs/partition.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rccs {

/// Distribution lifting for an equivalence: equal mass on every block.
bool lift_equal(const Partition& p, const Distribution& d1, const Distribution& d2);

/// The flow formulation of one weak-combined-transition query. Variables
/// are transition usages per phase plus per-state stop masses; constraints
/// are per-state flow conservation and per-block stop masses. The query
/// A =alpha=>_c rho holds iff the system has a nonnegative solution.
struct FlowProblem {
    std::vector<std::string> var_names;
    std::vector<std::string> row_names;
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;

    bool feasible() const;
    /// Plain-text rendering, one constraint per line.
    std::string to_text() const;
};

FlowProblem build_flow_problem(const Lts& lts, StateId s, const Action& alpha,
                               const ClassMassVector& m, const Partition& p);

/// Does some scheduler realize a weak combined transition from s labeled
/// alpha whose final per-block masses equal m? For visible alpha the flow
/// runs in two phases (before and after the single visible step, stopping
/// only after); for tau it runs in one phase with stopping allowed
/// everywhere, including the zero-step transition.
bool weak_combined_exists(const Lts& lts, StateId s, const Action& alpha,
                          const ClassMassVector& m, const Partition& p,
                          std::ostream* dump = nullptr);

/// Greatest fixpoint of challenger-transition splitting: the largest weak
/// bisimulation contained in the seed partition.
Partition weak_quotient(const Lts& lts, const Partition& seed, RefinementStats* stats = nullptr,
                        std::ostream* dump = nullptr);

} // namespace rccs

#endif
