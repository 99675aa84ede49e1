#include "rccs/weak.hpp"

#include "rccs/errors.hpp"
#include "rccs/simplex.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace rccs {

bool lift_equal(const Partition& p, const Distribution& d1, const Distribution& d2) {
    return class_mass(p, d1) == class_mass(p, d2);
}

bool FlowProblem::feasible() const {
    return equality_system_feasible(rows, rhs);
}

std::string FlowProblem::to_text() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << row_names[i] << ":";
        bool any = false;
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (sgn(rows[i][j]) == 0) continue;
            Rational c = rows[i][j];
            if (!any) {
                out << " ";
                if (sgn(c) < 0) out << "-";
            } else {
                out << (sgn(c) < 0 ? " - " : " + ");
            }
            Rational mag = abs(c);
            if (!is_one(mag)) out << to_string(mag) << "*";
            out << var_names[j];
            any = true;
        }
        if (!any) out << " 0";
        out << " = " << to_string(rhs[i]) << "\n";
    }
    return out.str();
}

namespace {

// Silent closure of a set of states (over tau and p-tau edges).
std::vector<StateId> silent_closure(const Lts& lts, std::vector<StateId> seeds) {
    std::set<StateId> seen(seeds.begin(), seeds.end());
    std::deque<StateId> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
        StateId u = queue.front();
        queue.pop_front();
        for (const auto& e : lts.state(u).act_edges)
            if (e.act.is_tau() && seen.insert(e.target).second) queue.push_back(e.target);
        for (CollectiveId c : lts.state(u).collectives)
            for (const auto& [t, p] : lts.collective(c).targets)
                if (seen.insert(t).second) queue.push_back(t);
    }
    return {seen.begin(), seen.end()};
}

void check_mass(const ClassMassVector& m) {
    Rational sum = 0;
    for (const auto& [b, mass] : m) {
        if (sgn(mass) < 0) throw MassNotNormalizedError();
        sum += mass;
    }
    if (!is_one(sum)) throw MassNotNormalizedError();
}

struct Builder {
    FlowProblem fp;
    std::map<std::string, std::size_t> var_index;

    std::size_t var(const std::string& name) {
        auto it = var_index.find(name);
        if (it != var_index.end()) return it->second;
        std::size_t id = fp.var_names.size();
        fp.var_names.push_back(name);
        var_index.emplace(name, id);
        return id;
    }

    void finish_rows(std::vector<std::map<std::size_t, Rational>>& sparse) {
        for (auto& row : sparse) {
            std::vector<Rational> dense(fp.var_names.size(), Rational(0));
            for (auto& [j, c] : row) dense[j] = c;
            fp.rows.push_back(std::move(dense));
        }
    }
};

} // namespace

FlowProblem build_flow_problem(const Lts& lts, StateId s, const Action& alpha,
                               const ClassMassVector& m, const Partition& p) {
    check_mass(m);
    Builder b;
    std::vector<std::map<std::size_t, Rational>> sparse;

    const bool visible = !alpha.is_tau();
    const std::vector<StateId> pre = silent_closure(lts, {s});

    // Post region: states where stopping is allowed. For tau the single
    // phase plays both roles.
    std::vector<StateId> post;
    if (visible) {
        std::vector<StateId> seeds;
        for (StateId u : pre)
            for (const auto& t : plts_transitions(lts, u))
                if (t.act == alpha)
                    for (const auto& [v, mass] : t.dist) seeds.push_back(v);
        post = silent_closure(lts, std::move(seeds));
    } else {
        post = pre;
    }

    std::map<StateId, std::size_t> pre_row;
    std::map<StateId, std::size_t> post_row;
    if (visible) {
        for (StateId u : pre) {
            pre_row[u] = sparse.size();
            sparse.emplace_back();
            b.fp.row_names.push_back("flow.pre(s" + std::to_string(u) + ")");
            b.fp.rhs.push_back(u == s ? Rational(1) : Rational(0));
        }
    }
    for (StateId u : post) {
        post_row[u] = sparse.size();
        sparse.emplace_back();
        b.fp.row_names.push_back((visible ? "flow.post(s" : "flow(s") + std::to_string(u) + ")");
        b.fp.rhs.push_back((!visible && u == s) ? Rational(1) : Rational(0));
    }

    // Transition usage variables. Outflow counts positively at the source,
    // inflow negatively at each target, weighted by the step distribution.
    auto add_tau_vars = [&](StateId u, bool pre_phase) {
        std::size_t k = 0;
        for (const auto& t : plts_transitions(lts, u)) {
            ++k;
            if (!t.act.is_tau()) continue;
            std::string phase = visible ? (pre_phase ? "pre." : "post.") : "";
            std::size_t j = b.var(phase + "t(s" + std::to_string(u) + "," + std::to_string(k - 1) + ")");
            auto& rows = pre_phase ? pre_row : post_row;
            sparse[rows.at(u)][j] += 1;
            for (const auto& [v, mass] : t.dist)
                sparse[rows.at(v)][j] -= mass;
        }
    };

    if (visible) {
        for (StateId u : pre) add_tau_vars(u, true);
        for (StateId u : post) add_tau_vars(u, false);
        // The visible step moves mass from the pre phase to the post phase.
        for (StateId u : pre) {
            std::size_t k = 0;
            for (const auto& t : plts_transitions(lts, u)) {
                ++k;
                if (t.act != alpha) continue;
                std::size_t j =
                    b.var("act(s" + std::to_string(u) + "," + std::to_string(k - 1) + ")");
                sparse[pre_row.at(u)][j] += 1;
                for (const auto& [v, mass] : t.dist)
                    sparse[post_row.at(v)][j] -= mass;
            }
        }
    } else {
        for (StateId u : post) add_tau_vars(u, false);
    }

    // Stop masses, one per post-phase state, tied to the block masses.
    std::map<BlockId, std::vector<std::size_t>> stops_per_block;
    for (StateId u : post) {
        std::size_t j = b.var("stop(s" + std::to_string(u) + ")");
        sparse[post_row.at(u)][j] += 1;
        stops_per_block[p.block_of(u)].push_back(j);
    }
    std::set<BlockId> mass_blocks;
    for (const auto& [block, js] : stops_per_block) mass_blocks.insert(block);
    for (const auto& [block, mass] : m)
        if (sgn(mass) > 0) mass_blocks.insert(block);
    for (BlockId block : mass_blocks) {
        sparse.emplace_back();
        b.fp.row_names.push_back("mass(b" + std::to_string(block) + ")");
        auto it = m.find(block);
        b.fp.rhs.push_back(it == m.end() ? Rational(0) : it->second);
        auto js = stops_per_block.find(block);
        if (js != stops_per_block.end())
            for (std::size_t j : js->second) sparse.back()[j] += 1;
    }

    b.finish_rows(sparse);
    return b.fp;
}

namespace {

// Fast sufficient check: one immediate transition then stop, or (for tau)
// stopping right away.
bool single_step_witness(const Lts& lts, StateId s, const Action& alpha, const ClassMassVector& m,
                         const Partition& p) {
    if (alpha.is_tau()) {
        ClassMassVector self;
        self[p.block_of(s)] = 1;
        if (self == m) return true;
    }
    for (const auto& t : plts_transitions(lts, s)) {
        if (t.act != alpha) continue;
        if (class_mass(p, t.dist) == m) return true;
    }
    return false;
}

// Fast necessary check: every block carrying mass must be reachable in the
// stopping phase.
bool support_reachable(const Lts& lts, StateId s, const Action& alpha, const ClassMassVector& m,
                       const Partition& p) {
    std::vector<StateId> pre = silent_closure(lts, {s});
    std::vector<StateId> post;
    if (alpha.is_tau()) {
        post = pre;
    } else {
        std::vector<StateId> seeds;
        for (StateId u : pre)
            for (const auto& t : plts_transitions(lts, u))
                if (t.act == alpha)
                    for (const auto& [v, mass] : t.dist) seeds.push_back(v);
        if (seeds.empty()) return false;
        post = silent_closure(lts, std::move(seeds));
    }
    std::set<BlockId> reachable;
    for (StateId u : post) reachable.insert(p.block_of(u));
    for (const auto& [block, mass] : m)
        if (sgn(mass) > 0 && !reachable.count(block)) return false;
    return true;
}

} // namespace

bool weak_combined_exists(const Lts& lts, StateId s, const Action& alpha,
                          const ClassMassVector& m, const Partition& p, std::ostream* dump) {
    check_mass(m);
    if (!dump) {
        if (!support_reachable(lts, s, alpha, m, p)) return false;
        if (single_step_witness(lts, s, alpha, m, p)) return true;
    }
    FlowProblem fp = build_flow_problem(lts, s, alpha, m, p);
    if (dump) {
        *dump << "; weak combined transition query: s" << s << " =" << to_string(alpha)
              << "=> masses";
        for (const auto& [block, mass] : m) *dump << " b" << block << ":" << to_string(mass);
        *dump << "\n" << fp.to_text();
    }
    bool ok = fp.feasible();
    if (dump) *dump << "; feasible: " << (ok ? "yes" : "no") << "\n";
    return ok;
}

namespace {

// States whose tau-reachable visible action sets differ are never weakly
// bisimilar; splitting by that signature first keeps the LP loop on small
// blocks.
std::map<StateId, std::set<std::string>> reachable_action_sets(const Lts& lts) {
    std::map<StateId, std::set<std::string>> sig;
    for (StateId s = 0; s < lts.state_count(); ++s) {
        std::set<std::string> acts;
        for (StateId u : silent_closure(lts, {s}))
            for (const auto& e : lts.state(u).act_edges)
                if (!e.act.is_tau()) acts.insert(e.act.name);
        sig[s] = std::move(acts);
    }
    return sig;
}

} // namespace

Partition weak_quotient(const Lts& lts, const Partition& seed, RefinementStats* stats,
                        std::ostream* dump) {
    Partition current = seed;

    auto rsig = reachable_action_sets(lts);
    const std::vector<BlockId> ids = current.block_ids();
    for (BlockId block : ids) {
        std::map<std::set<std::string>, std::vector<StateId>> groups;
        for (StateId u : current.members(block)) groups[rsig[u]].push_back(u);
        if (groups.size() < 2) continue;
        BlockId rest = block;
        std::size_t peeled = 0;
        for (const auto& [k, group] : groups) {
            if (++peeled == groups.size()) break;
            current = current.split(rest, group);
            rest = current.block_ids().back();
        }
    }

    std::size_t passes = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        ++passes;
        for (StateId challenger = 0; challenger < lts.state_count(); ++challenger) {
            for (const auto& t : plts_transitions(lts, challenger)) {
                BlockId block = current.block_of(challenger);
                const auto& members = current.members(block);
                if (members.size() < 2) continue;
                ClassMassVector m = class_mass(current, t.dist);
                std::vector<StateId> part;
                for (StateId u : members)
                    if (weak_combined_exists(lts, u, t.act, m, current, dump)) part.push_back(u);
                if (!part.empty() && part.size() < members.size()) {
                    current = current.split(block, part);
                    changed = true;
                }
            }
        }
    }
    if (stats) {
        stats->iterations = passes;
        stats->quotient_passes = passes;
    }
    return current;
}

} // namespace rccs
