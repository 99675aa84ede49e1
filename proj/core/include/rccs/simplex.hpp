#ifndef RCCS_SIMPLEX_HPP
#define RCCS_SIMPLEX_HPP

#include "rccs/rational.hpp"

#include <vector>

namespace rccs {

/// Decides whether {x >= 0 : A x = b} is nonempty, exactly. Phase-1
/// simplex over rationals with Bland's rule, so it terminates on every
/// input and never equivocates near ties.
bool equality_system_feasible(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs);

} // namespace rccs

#endif
