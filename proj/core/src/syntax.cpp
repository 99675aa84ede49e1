#include "rccs/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace rccs {

// ---------------------------------------------------------------------------
// Term construction

namespace {
TermPtr finish(Term&& t) { return std::make_shared<Term>(std::move(t)); }
} // namespace

TermPtr Term::nil() {
    static const TermPtr instance = std::make_shared<Term>();
    return instance;
}

TermPtr Term::make_var(std::string name) {
    Term t;
    t.kind_ = Kind::Var;
    t.var_ = std::move(name);
    return finish(std::move(t));
}

TermPtr Term::nd_choice(std::vector<NdBranch> branches) {
    Term t;
    t.kind_ = Kind::NdChoice;
    t.nd_ = std::move(branches);
    return finish(std::move(t));
}

TermPtr Term::p_choice(std::vector<PBranch> branches) {
    Term t;
    t.kind_ = Kind::PChoice;
    t.pd_ = std::move(branches);
    return finish(std::move(t));
}

TermPtr Term::fix(std::string var, TermPtr body) {
    Term t;
    t.kind_ = Kind::Fix;
    t.var_ = std::move(var);
    t.body_ = std::move(body);
    return finish(std::move(t));
}

// ---------------------------------------------------------------------------
// Structural equality

bool structurally_equal(const Term& a, const Term& b) {
    if (&a == &b) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Term::Kind::Nil:
        return true;
    case Term::Kind::Var:
        return a.var() == b.var();
    case Term::Kind::NdChoice: {
        const auto& x = a.nd_branches();
        const auto& y = b.nd_branches();
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].act != y[i].act || !structurally_equal(*x[i].cont, *y[i].cont)) return false;
        return true;
    }
    case Term::Kind::PChoice: {
        const auto& x = a.p_branches();
        const auto& y = b.p_branches();
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].prob != y[i].prob || !structurally_equal(*x[i].cont, *y[i].cont)) return false;
        return true;
    }
    case Term::Kind::Fix:
        return a.var() == b.var() && structurally_equal(*a.fix_body(), *b.fix_body());
    }
    return false;
}

// ---------------------------------------------------------------------------
// Pretty printer

namespace {

void print_term(const Term& t, std::string& out);

// Continuation position after "act." — atoms and prefix chains print bare,
// anything that could swallow a following "+"/"(+)" is parenthesized.
void print_cont(const Term& t, std::string& out) {
    switch (t.kind()) {
    case Term::Kind::Nil:
        out += "0";
        return;
    case Term::Kind::Var:
        out += t.var();
        return;
    case Term::Kind::NdChoice:
        if (t.nd_branches().size() == 1) {
            const auto& b = t.nd_branches().front();
            out += to_string(b.act);
            if (b.cont->kind() != Term::Kind::Nil) {
                out += ".";
                print_cont(*b.cont, out);
            }
            return;
        }
        break;
    default:
        break;
    }
    out += "(";
    print_term(t, out);
    out += ")";
}

void print_nd_branch(const NdBranch& b, std::string& out) {
    out += to_string(b.act);
    if (b.cont->kind() != Term::Kind::Nil) {
        out += ".";
        print_cont(*b.cont, out);
    }
}

void print_p_branch(const PBranch& b, std::string& out) {
    out += to_string(b.prob);
    out += " tau";
    if (b.cont->kind() != Term::Kind::Nil) {
        out += ".";
        print_cont(*b.cont, out);
    }
}

void print_term(const Term& t, std::string& out) {
    switch (t.kind()) {
    case Term::Kind::Nil:
        out += "0";
        return;
    case Term::Kind::Var:
        out += t.var();
        return;
    case Term::Kind::NdChoice: {
        bool first = true;
        for (const auto& b : t.nd_branches()) {
            if (!first) out += " + ";
            first = false;
            print_nd_branch(b, out);
        }
        return;
    }
    case Term::Kind::PChoice: {
        bool first = true;
        for (const auto& b : t.p_branches()) {
            if (!first) out += " (+) ";
            first = false;
            print_p_branch(b, out);
        }
        return;
    }
    case Term::Kind::Fix: {
        out += "mu ";
        out += t.var();
        out += ".";
        const Term& body = *t.fix_body();
        bool wrap = (body.kind() == Term::Kind::NdChoice && body.nd_branches().size() > 1) ||
                    body.kind() == Term::Kind::PChoice;
        if (wrap) out += "(";
        print_term(body, out);
        if (wrap) out += ")";
        return;
    }
    }
}

} // namespace

std::string pretty(const Term& t) {
    std::string out;
    print_term(t, out);
    return out;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok { End, LIdent, UIdent, Int, Dot, Plus, PPlus, LParen, RParen, Slash, Mu, Tau };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    Lexer(std::string_view text, std::size_t line0, std::size_t col0)
        : text_(text), line_(line0), col_(col0) {
        advance();
    }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(tok_.line, tok_.column, msg);
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            step();
        tok_ = Token{Tok::End, "", line_, col_};
        if (pos_ >= text_.size()) return;
        char c = text_[pos_];
        if (c == '(') {
            // "(+)" is a single token
            if (pos_ + 2 < text_.size() && text_[pos_ + 1] == '+' && text_[pos_ + 2] == ')') {
                tok_.kind = Tok::PPlus;
                tok_.text = "(+)";
                step(); step(); step();
                return;
            }
            tok_.kind = Tok::LParen;
            tok_.text = "(";
            step();
            return;
        }
        if (c == ')') { tok_.kind = Tok::RParen; tok_.text = ")"; step(); return; }
        if (c == '+') { tok_.kind = Tok::Plus; tok_.text = "+"; step(); return; }
        if (c == '.') { tok_.kind = Tok::Dot; tok_.text = "."; step(); return; }
        if (c == '/') { tok_.kind = Tok::Slash; tok_.text = "/"; step(); return; }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            tok_.kind = Tok::Int;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                tok_.text += text_[pos_];
                step();
            }
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string id;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                id += text_[pos_];
                step();
            }
            if (id == "mu") { tok_.kind = Tok::Mu; }
            else if (id == "tau") { tok_.kind = Tok::Tau; }
            else if (std::islower(static_cast<unsigned char>(id[0]))) { tok_.kind = Tok::LIdent; }
            else { tok_.kind = Tok::UIdent; }
            tok_.text = std::move(id);
            return;
        }
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }

    void step() {
        if (text_[pos_] == '\n') { ++line_; col_ = 1; }
        else { ++col_; }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t col_;
    Token tok_;
};

class Parser {
public:
    Parser(std::string_view text, std::size_t line0, std::size_t col0) : lex_(text, line0, col0) {}

    TermPtr parse_whole() {
        TermPtr t = parse_term();
        if (lex_.peek().kind != Tok::End)
            lex_.fail("unexpected trailing input '" + lex_.peek().text + "'");
        return t;
    }

private:
    Lexer lex_;

    bool at_action_start() const {
        Tok k = lex_.peek().kind;
        return k == Tok::Tau || k == Tok::LIdent;
    }

    TermPtr parse_term() {
        const Token& t = lex_.peek();
        switch (t.kind) {
        case Tok::Mu:
            return parse_fix();
        case Tok::Int: {
            Token num = lex_.next();
            if (lex_.peek().kind == Tok::Slash)
                return parse_psum(num);
            if (num.text == "0") {
                if (lex_.peek().kind == Tok::Plus)
                    lex_.fail("sum branches must be action prefixes");
                return Term::nil();
            }
            throw ParseError(num.line, num.column, "expected a term, got '" + num.text + "'");
        }
        case Tok::Tau:
        case Tok::LIdent:
            return parse_sum();
        case Tok::UIdent: {
            Token name = lex_.next();
            if (lex_.peek().kind == Tok::Plus)
                lex_.fail("sum branches must be action prefixes");
            return Term::make_var(name.text);
        }
        case Tok::LParen: {
            lex_.next();
            TermPtr inner = parse_term();
            expect(Tok::RParen, "')'");
            if (lex_.peek().kind == Tok::Plus)
                lex_.fail("sum branches must be action prefixes");
            return inner;
        }
        default:
            lex_.fail("expected a term, got '" + t.text + "'");
        }
    }

    TermPtr parse_fix() {
        lex_.next(); // mu
        Token var = lex_.next();
        if (var.kind != Tok::UIdent)
            throw ParseError(var.line, var.column, "fixpoint variable must be a capitalized name");
        expect(Tok::Dot, "'.' after fixpoint variable");
        // The fixpoint body extends as far to the right as possible.
        TermPtr body = parse_term();
        return Term::fix(var.text, std::move(body));
    }

    TermPtr parse_sum() {
        std::vector<NdBranch> branches;
        branches.push_back(parse_prefix());
        while (lex_.peek().kind == Tok::Plus) {
            lex_.next();
            if (!at_action_start())
                lex_.fail("sum branches must be action prefixes");
            branches.push_back(parse_prefix());
        }
        if (lex_.peek().kind == Tok::PPlus)
            lex_.fail("cannot mix '+' and '(+)' without parentheses");
        return Term::nd_choice(std::move(branches));
    }

    NdBranch parse_prefix() {
        Token act = lex_.next();
        Action a = (act.kind == Tok::Tau) ? Action::tau() : Action::visible(act.text);
        TermPtr cont = Term::nil();
        if (lex_.peek().kind == Tok::Dot) {
            lex_.next();
            cont = parse_cont();
        }
        return NdBranch{std::move(a), std::move(cont)};
    }

    // The continuation of a prefix: an atom or a further prefix chain.
    // Sums and probabilistic sums must be parenthesized here.
    TermPtr parse_cont() {
        const Token& t = lex_.peek();
        switch (t.kind) {
        case Tok::Int:
            if (t.text == "0") {
                lex_.next();
                return Term::nil();
            }
            lex_.fail("probabilistic choice must be parenthesized after a prefix");
        case Tok::UIdent:
            return Term::make_var(lex_.next().text);
        case Tok::LParen: {
            lex_.next();
            TermPtr inner = parse_term();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Mu:
            return parse_fix();
        case Tok::Tau:
        case Tok::LIdent: {
            std::vector<NdBranch> one;
            one.push_back(parse_prefix());
            return Term::nd_choice(std::move(one));
        }
        default:
            lex_.fail("expected a continuation term, got '" + t.text + "'");
        }
    }

    // The leading numerator token has already been consumed.
    TermPtr parse_psum(const Token& first_num) {
        std::vector<PBranch> branches;
        branches.push_back(parse_pterm(first_num));
        std::size_t n = 1;
        while (lex_.peek().kind == Tok::PPlus) {
            lex_.next();
            Token num = lex_.next();
            if (num.kind != Tok::Int)
                throw ParseError(num.line, num.column, "expected a fraction");
            branches.push_back(parse_pterm(num));
            ++n;
        }
        if (lex_.peek().kind == Tok::Plus)
            lex_.fail("cannot mix '+' and '(+)' without parentheses");
        if (n < 2)
            lex_.fail("probabilistic choice needs at least two branches");
        return Term::p_choice(std::move(branches));
    }

    PBranch parse_pterm(const Token& num) {
        expect(Tok::Slash, "'/' in fraction");
        Token den = lex_.next();
        if (den.kind != Tok::Int)
            throw ParseError(den.line, den.column, "malformed fraction: missing denominator");
        if (den.text.find_first_not_of('0') == std::string::npos)
            throw ParseError(den.line, den.column, "malformed fraction: zero denominator");
        Rational p(num.text + "/" + den.text, 10);
        p.canonicalize();
        Token tau = lex_.next();
        if (tau.kind != Tok::Tau)
            throw ParseError(tau.line, tau.column, "probabilistic branches must be tau-prefixed");
        TermPtr cont = Term::nil();
        if (lex_.peek().kind == Tok::Dot) {
            lex_.next();
            cont = parse_cont();
        }
        return PBranch{std::move(p), std::move(cont)};
    }

    void expect(Tok k, const std::string& what) {
        Token t = lex_.next();
        if (t.kind != k)
            throw ParseError(t.line, t.column, "expected " + what + ", got '" + t.text + "'");
    }
};

} // namespace

TermPtr parse(std::string_view text) {
    return Parser(text, 1, 1).parse_whole();
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_closed(const Term& t, std::set<std::string>& bound) {
    switch (t.kind()) {
    case Term::Kind::Nil:
        return;
    case Term::Kind::Var:
        if (!bound.count(t.var())) throw FreeVariableError(t.var());
        return;
    case Term::Kind::NdChoice:
        if (t.nd_branches().empty()) throw Error("empty choice");
        for (const auto& b : t.nd_branches()) check_closed(*b.cont, bound);
        return;
    case Term::Kind::PChoice:
        for (const auto& b : t.p_branches()) check_closed(*b.cont, bound);
        return;
    case Term::Kind::Fix: {
        bool inserted = bound.insert(t.var()).second;
        check_closed(*t.fix_body(), bound);
        if (inserted) bound.erase(t.var());
        return;
    }
    }
}

void check_probabilities(const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Nil:
    case Term::Kind::Var:
        return;
    case Term::Kind::NdChoice:
        for (const auto& b : t.nd_branches()) check_probabilities(*b.cont);
        return;
    case Term::Kind::PChoice: {
        if (t.p_branches().size() < 2)
            throw Error("probabilistic choice needs at least two branches");
        Rational sum = 0;
        for (const auto& b : t.p_branches()) {
            if (sgn(b.prob) <= 0 || b.prob >= 1)
                throw ProbabilityOutOfRangeError(to_string(b.prob));
            sum += b.prob;
        }
        if (!is_one(sum)) throw ProbabilitySumNotOneError(to_string(sum));
        for (const auto& b : t.p_branches()) check_probabilities(*b.cont);
        return;
    }
    case Term::Kind::Fix:
        check_probabilities(*t.fix_body());
        return;
    }
}

// True iff x occurs in t at an unguarded position (not under any prefix).
bool occurs_unguarded(const Term& t, const std::string& x) {
    switch (t.kind()) {
    case Term::Kind::Nil:
        return false;
    case Term::Kind::Var:
        return t.var() == x;
    case Term::Kind::NdChoice:
    case Term::Kind::PChoice:
        return false; // every occurrence below sits behind a prefix
    case Term::Kind::Fix:
        if (t.var() == x) return false; // shadowed
        return occurs_unguarded(*t.fix_body(), x);
    }
    return false;
}

void check_guarded(const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Nil:
    case Term::Kind::Var:
        return;
    case Term::Kind::NdChoice:
        for (const auto& b : t.nd_branches()) check_guarded(*b.cont);
        return;
    case Term::Kind::PChoice:
        for (const auto& b : t.p_branches()) check_guarded(*b.cont);
        return;
    case Term::Kind::Fix:
        if (occurs_unguarded(*t.fix_body(), t.var()))
            throw UnguardedVariableError(t.var());
        check_guarded(*t.fix_body());
        return;
    }
}

TermPtr rename(const TermPtr& t, std::map<std::string, std::string>& env, std::size_t& counter) {
    switch (t->kind()) {
    case Term::Kind::Nil:
        return t;
    case Term::Kind::Var: {
        auto it = env.find(t->var());
        if (it == env.end()) return t; // free; validation rejects this elsewhere
        if (it->second == t->var()) return t;
        return Term::make_var(it->second);
    }
    case Term::Kind::NdChoice: {
        std::vector<NdBranch> branches;
        branches.reserve(t->nd_branches().size());
        bool changed = false;
        for (const auto& b : t->nd_branches()) {
            TermPtr c = rename(b.cont, env, counter);
            changed = changed || c != b.cont;
            branches.push_back(NdBranch{b.act, std::move(c)});
        }
        return changed ? Term::nd_choice(std::move(branches)) : t;
    }
    case Term::Kind::PChoice: {
        std::vector<PBranch> branches;
        branches.reserve(t->p_branches().size());
        bool changed = false;
        for (const auto& b : t->p_branches()) {
            TermPtr c = rename(b.cont, env, counter);
            changed = changed || c != b.cont;
            branches.push_back(PBranch{b.prob, std::move(c)});
        }
        return changed ? Term::p_choice(std::move(branches)) : t;
    }
    case Term::Kind::Fix: {
        std::string fresh = "X" + std::to_string(counter++);
        auto old = env.find(t->var());
        std::string saved;
        bool had = old != env.end();
        if (had) saved = old->second;
        env[t->var()] = fresh;
        TermPtr body = rename(t->fix_body(), env, counter);
        if (had) env[t->var()] = saved;
        else env.erase(t->var());
        if (fresh == t->var() && body == t->fix_body()) return t;
        return Term::fix(std::move(fresh), std::move(body));
    }
    }
    return t;
}

} // namespace

TermPtr canonical_rename(const TermPtr& t) {
    std::map<std::string, std::string> env;
    std::size_t counter = 0;
    return rename(t, env, counter);
}

TermPtr validate(const TermPtr& t) {
    std::set<std::string> bound;
    check_closed(*t, bound);
    check_probabilities(*t);
    TermPtr renamed = canonical_rename(t);
    check_guarded(*renamed);
    return renamed;
}

// ---------------------------------------------------------------------------
// Unfolding

namespace {

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& repl) {
    switch (t->kind()) {
    case Term::Kind::Nil:
        return t;
    case Term::Kind::Var:
        return t->var() == x ? repl : t;
    case Term::Kind::NdChoice: {
        std::vector<NdBranch> branches;
        branches.reserve(t->nd_branches().size());
        bool changed = false;
        for (const auto& b : t->nd_branches()) {
            TermPtr c = substitute(b.cont, x, repl);
            changed = changed || c != b.cont;
            branches.push_back(NdBranch{b.act, std::move(c)});
        }
        return changed ? Term::nd_choice(std::move(branches)) : t;
    }
    case Term::Kind::PChoice: {
        std::vector<PBranch> branches;
        branches.reserve(t->p_branches().size());
        bool changed = false;
        for (const auto& b : t->p_branches()) {
            TermPtr c = substitute(b.cont, x, repl);
            changed = changed || c != b.cont;
            branches.push_back(PBranch{b.prob, std::move(c)});
        }
        return changed ? Term::p_choice(std::move(branches)) : t;
    }
    case Term::Kind::Fix: {
        if (t->var() == x) return t; // shadowed
        TermPtr body = substitute(t->fix_body(), x, repl);
        return body == t->fix_body() ? t : Term::fix(t->var(), std::move(body));
    }
    }
    return t;
}

} // namespace

TermPtr unfold(const TermPtr& t) {
    if (t->kind() != Term::Kind::Fix)
        throw Error("unfold: term is not a fixpoint");
    return substitute(t->fix_body(), t->var(), t);
}

// ---------------------------------------------------------------------------
// Definitions files

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool is_process_name(const std::string& s) {
    if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

struct PendingDef {
    TermPtr raw;
    std::size_t line;
};

class Expander {
public:
    explicit Expander(const std::map<std::string, PendingDef>& defs) : defs_(defs) {}

    TermPtr expand_name(const std::string& name) {
        auto done = memo_.find(name);
        if (done != memo_.end()) return done->second;
        if (!visiting_.insert(name).second)
            throw Error("recursive definition through names: " + name +
                        " (recursion is only allowed via mu)");
        std::set<std::string> bound;
        TermPtr result = expand(defs_.at(name).raw, bound);
        visiting_.erase(name);
        memo_[name] = result;
        return result;
    }

private:
    TermPtr expand(const TermPtr& t, std::set<std::string>& bound) {
        switch (t->kind()) {
        case Term::Kind::Nil:
            return t;
        case Term::Kind::Var: {
            if (bound.count(t->var())) return t;
            auto it = defs_.find(t->var());
            if (it == defs_.end()) return t; // free; reported by validate
            return expand_name(t->var());
        }
        case Term::Kind::NdChoice: {
            std::vector<NdBranch> branches;
            bool changed = false;
            for (const auto& b : t->nd_branches()) {
                TermPtr c = expand(b.cont, bound);
                changed = changed || c != b.cont;
                branches.push_back(NdBranch{b.act, std::move(c)});
            }
            return changed ? Term::nd_choice(std::move(branches)) : t;
        }
        case Term::Kind::PChoice: {
            std::vector<PBranch> branches;
            bool changed = false;
            for (const auto& b : t->p_branches()) {
                TermPtr c = expand(b.cont, bound);
                changed = changed || c != b.cont;
                branches.push_back(PBranch{b.prob, std::move(c)});
            }
            return changed ? Term::p_choice(std::move(branches)) : t;
        }
        case Term::Kind::Fix: {
            bool inserted = bound.insert(t->var()).second;
            TermPtr body = expand(t->fix_body(), bound);
            if (inserted) bound.erase(t->var());
            return body == t->fix_body() ? t : Term::fix(t->var(), std::move(body));
        }
        }
        return t;
    }

    const std::map<std::string, PendingDef>& defs_;
    std::map<std::string, TermPtr> memo_;
    std::set<std::string> visiting_;
};

} // namespace

Definitions Definitions::parse_file_text(std::string_view text) {
    std::map<std::string, PendingDef> raw;
    std::vector<std::string> order;

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string stripped = strip(line);
        if (stripped.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(lineno, 1, "expected 'Name = term'");
        std::string name = strip(line.substr(0, eq));
        if (!is_process_name(name))
            throw ParseError(lineno, 1, "definition name must be capitalized: '" + name + "'");
        if (raw.count(name))
            throw ParseError(lineno, 1, "duplicate definition of " + name);
        TermPtr body = Parser(line.substr(eq + 1), lineno, eq + 2).parse_whole();
        raw.emplace(name, PendingDef{std::move(body), lineno});
        order.push_back(name);
    }

    Definitions defs;
    defs.order_ = order;
    Expander expander(raw);
    for (const auto& name : order) {
        TermPtr expanded = expander.expand_name(name);
        defs.bindings_.emplace_back(name, validate(expanded));
    }
    return defs;
}

bool Definitions::contains(const std::string& name) const {
    for (const auto& [n, t] : bindings_)
        if (n == name) return true;
    return false;
}

TermPtr Definitions::term(const std::string& name) const {
    for (const auto& [n, t] : bindings_)
        if (n == name) return t;
    throw Error("undefined process name: " + name);
}

} // namespace rccs
