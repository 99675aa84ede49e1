#include "rccs/lts.hpp"

#include "rccs/errors.hpp"

#include <nlohmann/json.hpp>

#include <deque>
#include <sstream>

namespace rccs {

namespace {

// Strips fixpoints until the outermost constructor is a choice (or nil).
// Guardedness bounds the number of unfoldings.
TermPtr expose(TermPtr t) {
    while (t->kind() == Term::Kind::Fix)
        t = unfold(t);
    return t;
}

} // namespace

Lts Lts::build(const std::vector<TermPtr>& roots, const BuildOptions& opts) {
    Lts lts;
    std::deque<StateId> queue;

    auto intern = [&](const TermPtr& t) -> StateId {
        TermPtr canon = canonical_rename(t);
        std::string key = pretty(canon);
        auto it = lts.index_.find(key);
        if (it != lts.index_.end()) return it->second;
        if (lts.states_.size() >= opts.max_states)
            throw StateExplosionError(opts.max_states);
        StateId id = static_cast<StateId>(lts.states_.size());
        lts.states_.push_back(State{std::move(canon), {}, {}});
        lts.index_.emplace(std::move(key), id);
        queue.push_back(id);
        return id;
    };

    for (const auto& r : roots) {
        StateId id = intern(r);
        bool seen = false;
        for (StateId other : lts.roots_) seen = seen || other == id;
        if (!seen) lts.roots_.push_back(id);
    }

    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        TermPtr t = expose(lts.states_[s].term);
        switch (t->kind()) {
        case Term::Kind::Nil:
            break;
        case Term::Kind::NdChoice: {
            for (const auto& b : t->nd_branches()) {
                StateId target = intern(b.cont);
                bool dup = false;
                for (const auto& e : lts.states_[s].act_edges)
                    dup = dup || (e.act == b.act && e.target == target);
                if (!dup) lts.states_[s].act_edges.push_back(ActEdge{b.act, target});
            }
            break;
        }
        case Term::Kind::PChoice: {
            CollectiveTransition ct;
            ct.source = s;
            for (const auto& b : t->p_branches()) {
                StateId target = intern(b.cont);
                bool merged = false;
                for (auto& [tgt, p] : ct.targets) {
                    if (tgt == target) {
                        p += b.prob;
                        merged = true;
                        break;
                    }
                }
                if (!merged) ct.targets.emplace_back(target, b.prob);
            }
            CollectiveId cid = static_cast<CollectiveId>(lts.collectives_.size());
            lts.collectives_.push_back(std::move(ct));
            lts.states_[s].collectives.push_back(cid);
            break;
        }
        case Term::Kind::Var:
        case Term::Kind::Fix:
            throw Error("internal: unexpected term shape during exploration");
        }
    }
    return lts;
}

std::optional<StateId> Lts::find(const TermPtr& t) const {
    auto it = index_.find(pretty(canonical_rename(t)));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<Itr> immediate_silent_transitions(const Lts& lts, StateId s) {
    std::vector<Itr> itrs;
    for (const auto& e : lts.state(s).act_edges) {
        if (e.act.is_tau())
            itrs.push_back(Itr{Itr::Kind::NonProb, e.target, 0});
    }
    for (CollectiveId c : lts.state(s).collectives)
        itrs.push_back(Itr{Itr::Kind::Collective, 0, c});
    return itrs;
}

std::vector<StateId> itr_targets(const Lts& lts, const Itr& itr) {
    if (itr.kind == Itr::Kind::NonProb) return {itr.target};
    std::vector<StateId> out;
    for (const auto& [t, p] : lts.collective(itr.group).targets)
        out.push_back(t);
    return out;
}

std::vector<PltsTransition> plts_transitions(const Lts& lts, StateId s) {
    std::vector<PltsTransition> out;
    for (const auto& e : lts.state(s).act_edges) {
        Distribution d;
        d[e.target] = 1;
        out.push_back(PltsTransition{e.act, std::move(d)});
    }
    for (CollectiveId c : lts.state(s).collectives) {
        Distribution d;
        for (const auto& [t, p] : lts.collective(c).targets)
            d[t] += p;
        out.push_back(PltsTransition{Action::tau(), std::move(d)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exports

namespace {

std::string state_label(const Lts& lts, StateId s, const std::vector<std::string>& labels) {
    if (s < labels.size() && !labels[s].empty()) return labels[s];
    return pretty(lts.term(s));
}

const char* kGroupColors[] = {"blue", "red", "darkgreen", "orange", "purple",
                              "brown", "cadetblue", "magenta"};

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string Lts::dot(const std::vector<std::string>& labels) const {
    std::ostringstream out;
    out << "digraph lts {\n";
    out << "  rankdir=TB;\n";
    for (StateId s = 0; s < states_.size(); ++s) {
        bool is_root = false;
        for (StateId r : roots_) is_root = is_root || r == s;
        out << "  n" << s << " [label=\"" << dot_escape(state_label(*this, s, labels)) << "\""
            << (is_root ? ", shape=doublecircle" : ", shape=circle") << "];\n";
    }
    for (StateId s = 0; s < states_.size(); ++s) {
        for (const auto& e : states_[s].act_edges) {
            std::string lbl = e.act.is_tau() ? "\xCF\x84" : e.act.name;
            out << "  n" << s << " -> n" << e.target << " [label=\"" << lbl << "\"];\n";
        }
        for (CollectiveId c : states_[s].collectives) {
            const char* color = kGroupColors[c % (sizeof(kGroupColors) / sizeof(kGroupColors[0]))];
            for (const auto& [t, p] : collectives_[c].targets) {
                out << "  n" << s << " -> n" << t << " [label=\"" << to_string(p)
                    << " \xCF\x84\", color=" << color << "];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

std::string Lts::json(const std::vector<std::string>& labels) const {
    nlohmann::json j;
    j["states"] = nlohmann::json::array();
    for (StateId s = 0; s < states_.size(); ++s) {
        j["states"].push_back({{"id", s},
                               {"term", pretty(states_[s].term)},
                               {"label", state_label(*this, s, labels)}});
    }
    j["edges"] = nlohmann::json::array();
    for (StateId s = 0; s < states_.size(); ++s) {
        for (const auto& e : states_[s].act_edges)
            j["edges"].push_back({{"src", s}, {"act", to_string(e.act)}, {"dst", e.target}});
        for (CollectiveId c : states_[s].collectives) {
            for (const auto& [t, p] : collectives_[c].targets)
                j["edges"].push_back(
                    {{"src", s}, {"prob", to_string(p)}, {"group", c}, {"dst", t}});
        }
    }
    j["collectives"] = nlohmann::json::array();
    for (CollectiveId c = 0; c < collectives_.size(); ++c) {
        nlohmann::json targets = nlohmann::json::array();
        for (const auto& [t, p] : collectives_[c].targets)
            targets.push_back({{"state", t}, {"prob", to_string(p)}});
        j["collectives"].push_back({{"id", c}, {"source", collectives_[c].source}, {"targets", targets}});
    }
    j["roots"] = roots_;
    return j.dump(2);
}

} // namespace rccs
