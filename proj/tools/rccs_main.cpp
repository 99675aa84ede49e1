// Command-line front end: loads a definitions file, builds the induced
// transition graph, and runs the equivalence deciders.
//
// Exit codes: 0 equivalent (or command succeeded), 1 not equivalent,
// 2 usage/parse/runtime error.

#include "rccs/branching.hpp"
#include "rccs/divergence.hpp"
#include "rccs/errors.hpp"
#include "rccs/lts.hpp"
#include "rccs/partition.hpp"
#include "rccs/syntax.hpp"
#include "rccs/tauec.hpp"
#include "rccs/weak.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace rccs;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct Loaded {
    Definitions defs;
    Lts lts;
    std::vector<StateId> root_ids;
    std::vector<std::string> labels;          // per state: definition name or pretty term
    std::map<std::string, StateId> by_label;  // labels and pretty terms
};

Loaded load(const std::string& path, const std::vector<std::string>& names,
            std::size_t max_states) {
    Loaded out{Definitions::parse_file_text(read_file(path)), Lts{}, {}, {}, {}};
    std::vector<TermPtr> roots;
    for (const auto& name : names) {
        if (!out.defs.contains(name)) throw Error("undefined process name: " + name);
        roots.push_back(out.defs.term(name));
    }
    BuildOptions opts;
    opts.max_states = max_states;
    out.lts = Lts::build(roots, opts);
    for (const auto& name : names)
        out.root_ids.push_back(*out.lts.find(out.defs.term(name)));

    out.labels.assign(out.lts.state_count(), "");
    for (const auto& name : out.defs.names()) {
        auto id = out.lts.find(out.defs.term(name));
        if (id && out.labels[*id].empty()) out.labels[*id] = name;
    }
    for (StateId s = 0; s < out.lts.state_count(); ++s) {
        if (out.labels[s].empty()) out.labels[s] = pretty(out.lts.term(s));
        out.by_label.emplace(out.labels[s], s);
        out.by_label.emplace(pretty(out.lts.term(s)), s);
    }
    return out;
}

std::function<std::string(StateId)> namer(const Loaded& l) {
    return [&l](StateId s) { return l.labels[s]; };
}

Partition parse_seed_partition(const Loaded& l, const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (!j.is_array()) throw Error("seed partition must be a JSON list of lists");
    std::vector<std::vector<StateId>> blocks;
    for (const auto& block : j) {
        std::vector<StateId> ids;
        for (const auto& member : block) {
            std::string label = member.get<std::string>();
            auto it = l.by_label.find(label);
            if (it != l.by_label.end()) {
                ids.push_back(it->second);
                continue;
            }
            auto found = l.lts.find(parse(label));
            if (!found) throw Error("seed partition member is not a reachable state: " + label);
            ids.push_back(*found);
        }
        blocks.push_back(std::move(ids));
    }
    return Partition::from_blocks(l.lts.state_count(), blocks);
}

struct RunResult {
    Partition partition;
    std::size_t iterations = 0;
};

RunResult run_relation(const Loaded& l, const std::string& rel, const Partition& seed, bool trace,
                       bool dump_lp) {
    std::ostream* tr = trace ? &std::cerr : nullptr;
    std::ostream* lp = dump_lp ? &std::cerr : nullptr;
    RunResult r;
    if (rel == "branching") {
        QuotientStats qs;
        r.partition = quotient(l.lts, seed, &qs);
        r.iterations = qs.passes;
        if (tr) *tr << "quotient passes=" << qs.passes << "\n";
    } else if (rel == "weak") {
        RefinementStats ws;
        r.partition = weak_quotient(l.lts, seed, &ws, lp);
        r.iterations = ws.iterations;
        if (tr) *tr << "weak quotient passes=" << ws.iterations << "\n";
    } else if (rel == "branching-div") {
        RefinementStats st;
        r.partition = div_bran_quotient(l.lts, seed, &st, tr);
        r.iterations = st.iterations;
    } else if (rel == "branching-exh") {
        RefinementStats st;
        r.partition = exh_quotient(l.lts, seed, BisimBase::Branching, &st, tr, lp);
        r.iterations = st.iterations;
    } else if (rel == "weak-exh") {
        RefinementStats st;
        r.partition = exh_quotient(l.lts, seed, BisimBase::Weak, &st, tr, lp);
        r.iterations = st.iterations;
    } else {
        throw Error("unknown relation: " + rel);
    }
    return r;
}

nlohmann::json partition_json(const Loaded& l, const Partition& p) {
    return nlohmann::json::parse(partition_to_json(p, l.lts, namer(l)));
}

int cmd_check(const std::string& file, const std::string& name_a, const std::string& name_b,
              const std::string& rel, const std::optional<std::string>& seed_path,
              std::size_t max_states, bool trace, const std::string& format, bool dump_lp) {
    auto t0 = std::chrono::steady_clock::now();
    Loaded l = load(file, {name_a, name_b}, max_states);
    Partition seed =
        seed_path ? parse_seed_partition(l, *seed_path) : Partition::coarsest(l.lts);
    RunResult r = run_relation(l, rel, seed, trace, dump_lp);
    bool equal = r.partition.same_block(l.root_ids[0], l.root_ids[1]);
    auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();

    if (format == "json") {
        nlohmann::json verdict = {
            {"relation", rel},
            {"equal", equal},
            {"partition", partition_json(l, r.partition)},
            {"stats",
             {{"states", l.lts.state_count()},
              {"iterations", r.iterations},
              {"wall_ms", wall_ms}}},
        };
        std::cout << verdict.dump(2) << "\n";
    } else {
        std::cout << (equal ? "EQUIVALENT" : "NOT EQUIVALENT") << "\n";
        auto name = namer(l);
        for (int i = 0; i < 2; ++i) {
            StateId root = l.root_ids[i];
            std::vector<std::string> block;
            for (StateId s : r.partition.members(r.partition.block_of(root)))
                block.push_back(name(s));
            std::sort(block.begin(), block.end());
            std::cout << "[" << (i == 0 ? name_a : name_b) << "] = {";
            for (std::size_t k = 0; k < block.size(); ++k)
                std::cout << (k ? ", " : "") << block[k];
            std::cout << "}\n";
        }
    }
    return equal ? 0 : 1;
}

int cmd_quotient(const std::string& file, const std::vector<std::string>& names,
                 const std::string& rel, const std::optional<std::string>& seed_path,
                 std::size_t max_states, bool trace, bool dump_lp) {
    Loaded l = load(file, names, max_states);
    Partition seed =
        seed_path ? parse_seed_partition(l, *seed_path) : Partition::coarsest(l.lts);
    RunResult r = run_relation(l, rel, seed, trace, dump_lp);
    std::cout << partition_json(l, r.partition).dump(2) << "\n";
    return 0;
}

int cmd_mec(const std::string& file, const std::string& name, std::size_t max_states) {
    Loaded l = load(file, {name}, max_states);
    std::cout << mecs_to_json(l.lts, comp_mec(l.lts, l.root_ids[0]), namer(l)) << "\n";
    return 0;
}

int cmd_dot(const std::string& file, const std::vector<std::string>& names,
            const std::string& out_path, std::size_t max_states) {
    Loaded l = load(file, names, max_states);
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write file: " + out_path);
    out << l.lts.dot(l.labels);
    if (!out.good()) throw Error("write failed: " + out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rccs: equivalence checking for finite-state randomized CCS processes"};
    app.require_subcommand(1);

    const std::vector<std::string> relations = {"branching", "branching-div", "branching-exh",
                                                "weak", "weak-exh"};

    std::string file, name_a, name_b, rel = "branching", format = "json", dot_out;
    std::vector<std::string> names;
    std::optional<std::string> seed_path;
    std::size_t max_states = 100000;
    bool trace = false;
    bool dump_lp = false;

    auto add_common = [&](CLI::App* cmd, bool with_rel) {
        if (with_rel)
            cmd->add_option("--rel", rel, "relation to decide")
                ->check(CLI::IsMember(relations))
                ->required();
        cmd->add_option("--seed-partition", seed_path,
                        "JSON file with an initial partition (default: one block)");
        cmd->add_option("--max-states", max_states, "state exploration cap")
            ->default_val(std::size_t{100000});
        cmd->add_flag("--trace", trace, "emit a refinement log to stderr");
        cmd->add_flag("--dump-lp", dump_lp,
                      "dump weak-transition constraint systems to stderr");
    };

    CLI::App* check = app.add_subcommand("check", "decide whether two processes are equivalent");
    check->add_option("file", file, "definitions file")->required();
    check->add_option("A", name_a, "first process name")->required();
    check->add_option("B", name_b, "second process name")->required();
    add_common(check, true);
    check->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->default_val("json");

    CLI::App* quot = app.add_subcommand("quotient", "print the quotient partition");
    quot->add_option("file", file, "definitions file")->required();
    quot->add_option("names", names, "root process names")->required()->expected(-1);
    add_common(quot, true);

    CLI::App* mec = app.add_subcommand("mec", "print the maximal tau-end-components");
    mec->add_option("file", file, "definitions file")->required();
    mec->add_option("name", name_a, "process name")->required();
    mec->add_option("--max-states", max_states, "state exploration cap")
        ->default_val(std::size_t{100000});

    CLI::App* dot = app.add_subcommand("dot", "export the transition graph in DOT format");
    dot->add_option("file", file, "definitions file")->required();
    dot->add_option("names", names, "root process names")->required()->expected(-1);
    dot->add_option("-o,--out", dot_out, "output path")->required();
    dot->add_option("--max-states", max_states, "state exploration cap")
        ->default_val(std::size_t{100000});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(check))
            return cmd_check(file, name_a, name_b, rel, seed_path, max_states, trace, format,
                             dump_lp);
        if (app.got_subcommand(quot))
            return cmd_quotient(file, names, rel, seed_path, max_states, trace, dump_lp);
        if (app.got_subcommand(mec)) return cmd_mec(file, name_a, max_states);
        if (app.got_subcommand(dot)) return cmd_dot(file, names, dot_out, max_states);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
