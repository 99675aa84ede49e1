#ifndef RCCS_SYNTAX_HPP
#define RCCS_SYNTAX_HPP

#include "rccs/errors.hpp"
#include "rccs/rational.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rccs {

/// An action label: either the internal action tau or a visible channel name.
struct Action {
    std::string name; // empty means tau

    bool is_tau() const { return name.empty(); }
    static Action tau() { return Action{}; }
    static Action visible(std::string n) { return Action{std::move(n)}; }

    friend bool operator==(const Action& a, const Action& b) { return a.name == b.name; }
    friend bool operator!=(const Action& a, const Action& b) { return a.name != b.name; }
    friend bool operator<(const Action& a, const Action& b) { return a.name < b.name; }
};

inline std::string to_string(const Action& a) { return a.is_tau() ? "tau" : a.name; }

class Term;
using TermPtr = std::shared_ptr<const Term>;

struct NdBranch {
    Action act;
    TermPtr cont;
};

struct PBranch {
    Rational prob;
    TermPtr cont;
};

/// Immutable process term. Values are shared freely; substitution reuses
/// unchanged subtrees.
class Term {
public:
    enum class Kind { Nil, Var, NdChoice, PChoice, Fix };

    Kind kind() const { return kind_; }
    const std::string& var() const { return var_; }                        // Var name / Fix binder
    const std::vector<NdBranch>& nd_branches() const { return nd_; }
    const std::vector<PBranch>& p_branches() const { return pd_; }
    const TermPtr& fix_body() const { return body_; }

    static TermPtr nil();
    static TermPtr make_var(std::string name);
    static TermPtr nd_choice(std::vector<NdBranch> branches);
    static TermPtr p_choice(std::vector<PBranch> branches);
    static TermPtr fix(std::string var, TermPtr body);

private:
    Kind kind_ = Kind::Nil;
    std::string var_;
    std::vector<NdBranch> nd_;
    std::vector<PBranch> pd_;
    TermPtr body_;
};

bool structurally_equal(const Term& a, const Term& b);
inline bool structurally_equal(const TermPtr& a, const TermPtr& b) {
    return structurally_equal(*a, *b);
}

/// Renders a term in the concrete syntax. parse(pretty(t)) == t for every
/// validated term; trailing ".0" after a prefix is omitted.
std::string pretty(const Term& t);
inline std::string pretty(const TermPtr& t) { return pretty(*t); }

/// Parses the concrete term syntax. Throws ParseError with position info.
TermPtr parse(std::string_view text);

/// Checks that the term is closed, every fixpoint variable is guarded, and
/// every probabilistic choice is well formed, then renames bound variables
/// to the canonical scheme X0, X1, ... in preorder. Idempotent.
TermPtr validate(const TermPtr& t);

/// Renames bound variables to the canonical scheme without any checking.
/// State identity in the transition graph relies on this normal form:
/// two closed terms are alpha-equivalent iff their canonical renamings are
/// structurally equal.
TermPtr canonical_rename(const TermPtr& t);

/// One-step fixpoint unfolding: for t = mu X.T returns T{t/X}.
/// Precondition: t is a validated Fix term (in particular closed, so the
/// substitution cannot capture).
TermPtr unfold(const TermPtr& t);

/// A definitions file binds capitalized names to terms, one "Name = term"
/// per line; '#' starts a comment. Names are macro-expanded before
/// validation; recursion through names is rejected (recursion only via mu).
class Definitions {
public:
    /// Parses and expands a whole definitions file.
    static Definitions parse_file_text(std::string_view text);

    bool contains(const std::string& name) const;
    /// Expanded and validated term bound to the name.
    TermPtr term(const std::string& name) const;
    /// Definition names in file order.
    const std::vector<std::string>& names() const { return order_; }

private:
    std::vector<std::string> order_;
    std::vector<std::pair<std::string, TermPtr>> bindings_;
};

} // namespace rccs

#endif
