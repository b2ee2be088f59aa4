// Command-line front end: analyze, count, projectors, drazin, adjugate,
// classes, validate. Exit codes: 0 ok, 2 input error, 3 numerical failure.

#include "walkspec/analyze.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace walkspec;

struct InputFlags {
    std::string regex;
    std::string digraph_path;
    std::string dfa_path;
    std::string from_list;
    std::string to_list;
    double tol = kDefaultRankTol;
};

void add_input_flags(CLI::App* cmd, InputFlags& in) {
    auto* r = cmd->add_option("--regex", in.regex, "regular expression over ASCII letters");
    auto* d = cmd->add_option("--digraph", in.digraph_path, "digraph text file");
    auto* f = cmd->add_option("--dfa", in.dfa_path, "DFA JSON file");
    r->excludes(d)->excludes(f);
    d->excludes(f);
    cmd->add_option("--from", in.from_list, "initial vertex set, comma separated");
    cmd->add_option("--to", in.to_list, "final vertex set, comma separated");
    cmd->add_option("--tol", in.tol, "rank tolerance (default 1e-9)");
}

VertexSet parse_vertex_list(const std::string& s, int n, const char* what) {
    VertexSet out;
    std::istringstream ls(s);
    std::string item;
    while (std::getline(ls, item, ',')) {
        size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw InputError(std::string(what) + ": expected a vertex id, got \"" + item + "\"");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size())
            throw InputError(std::string(what) + ": expected a vertex id, got \"" + item + "\"");
        if (v < 1 || v > n)
            throw InputError(std::string(what) + ": vertex " + std::to_string(v) +
                             " out of range 1.." + std::to_string(n));
        out.insert(v);
    }
    if (out.empty()) throw InputError(std::string(what) + ": empty vertex set");
    return out;
}

struct LoadedSystem {
    AutomatonSystem sys;
    std::string descriptor;
};

LoadedSystem load_system(const InputFlags& in, bool regex_given, bool digraph_given,
                         bool dfa_given) {
    const int sources = int(regex_given) + int(digraph_given) + int(dfa_given);
    if (sources != 1)
        throw InputError("exactly one of --regex, --digraph, --dfa is required");
    LoadedSystem ls;
    if (regex_given) {
        ls.sys = trim(compile(parse_regex(in.regex)));
        ls.descriptor = "regex " + in.regex;
    } else if (digraph_given) {
        ls.sys.digraph = read_digraph_file(in.digraph_path);
        // A bare digraph counts all walks unless --from/--to narrow it.
        for (int v = 1; v <= ls.sys.digraph.n; ++v) {
            ls.sys.initial.insert(v);
            ls.sys.final.insert(v);
        }
        ls.descriptor = "digraph " + in.digraph_path;
    } else {
        ls.sys = read_dfa_json_file(in.dfa_path);
        ls.descriptor = "dfa " + in.dfa_path;
    }
    if (!in.from_list.empty())
        ls.sys.initial = parse_vertex_list(in.from_list, ls.sys.digraph.n, "--from");
    if (!in.to_list.empty())
        ls.sys.final = parse_vertex_list(in.to_list, ls.sys.digraph.n, "--to");
    return ls;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"walk counting in digraphs and regular languages"};
    app.require_subcommand(1);

    InputFlags in;
    bool as_json = false;
    long long length = -1;
    int depth = 12;

    auto* analyze = app.add_subcommand("analyze", "spectrum, closed form, asymptotics");
    add_input_flags(analyze, in);
    analyze->add_flag("--json", as_json, "emit the report as JSON");

    auto* count = app.add_subcommand("count", "exact walk count at one length");
    add_input_flags(count, in);
    count->add_option("--length", length, "walk length m >= 0")->required();

    auto* projectors = app.add_subcommand("projectors", "spectral projectors as JSON");
    add_input_flags(projectors, in);

    auto* drazin_cmd = app.add_subcommand("drazin", "Drazin inverse as JSON");
    add_input_flags(drazin_cmd, in);

    auto* adjugate_cmd = app.add_subcommand("adjugate", "adjugate matrix as JSON");
    add_input_flags(adjugate_cmd, in);

    auto* classes = app.add_subcommand("classes", "periodic class masks and eigenpairs as JSON");
    add_input_flags(classes, in);

    auto* validate = app.add_subcommand("validate", "run the full invariant suite");
    add_input_flags(validate, in);
    validate->add_option("--depth", depth, "oracle comparison depth (default 12)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const LoadedSystem ls =
            load_system(in, sub->count("--regex") > 0, sub->count("--digraph") > 0,
                        sub->count("--dfa") > 0);

        if (analyze->parsed()) {
            const AnalysisReport rep = run_analysis(ls.sys, ls.descriptor, in.tol);
            if (as_json)
                std::cout << report_to_json(rep).dump(2) << "\n";
            else
                std::cout << render_report(rep);
            return 0;
        }

        if (count->parsed()) {
            if (length < 0) throw InputError("--length must be >= 0");
            std::cout << count_walks(ls.sys.digraph, ls.sys.initial, ls.sys.final,
                                     static_cast<unsigned long long>(length))
                      << "\n";
            return 0;
        }

        if (projectors->parsed()) {
            const auto d = decompose(ls.sys.digraph.adj, in.tol);
            Json out = Json::array();
            for (size_t i = 0; i < d.projectors.size(); ++i) {
                const auto& r = d.spectrum.values[i];
                out.push_back(
                    Json{{"eigenvalue", Json{{"re", r.lambda.real()}, {"im", r.lambda.imag()}}},
                         {"algebraic_multiplicity", r.alg_mult},
                         {"index", r.index},
                         {"projector", matrix_to_json(d.projectors[i])}});
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (drazin_cmd->parsed()) {
            const auto d = decompose(ls.sys.digraph.adj, in.tol);
            std::cout << matrix_to_json(drazin(d)).dump(2) << "\n";
            return 0;
        }

        if (adjugate_cmd->parsed()) {
            const auto d = decompose(ls.sys.digraph.adj, in.tol);
            std::cout << matrix_to_json(adjugate_spectral(d)).dump(2) << "\n";
            return 0;
        }

        if (classes->parsed()) {
            const auto st = dominant_structure(ls.sys.digraph);
            if (!st.incomparable)
                throw std::runtime_error("dominant components are comparable: index > 1; "
                                         "use the projectors subcommand instead");
            Json out = Json::array();
            const auto masks = all_class_masks(ls.sys.digraph, st);
            for (size_t i = 0; i < masks.size(); ++i)
                for (const auto& mp : masks[i]) {
                    Json j;
                    j["component"] = std::vector<int>(st.dominant[i].vertices.begin(),
                                                      st.dominant[i].vertices.end());
                    j["class"] = std::vector<int>(st.dominant[i].classes[mp.j].begin(),
                                                  st.dominant[i].classes[mp.j].end());
                    j["support"] = std::vector<int>(mp.support.begin(), mp.support.end());
                    j["mask"] = matrix_to_json(mp.a_mask);
                    j["v_left"] = vector_to_json(mp.v_left);
                    j["v_right"] = vector_to_json(mp.v_right);
                    out.push_back(j);
                }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (validate->parsed()) {
            if (depth < 0) throw InputError("--depth must be >= 0");
            const ValidationSummary sum = validate_system(ls.sys, depth, in.tol);
            for (const auto& c : sum.checks)
                std::cout << (c.pass ? "pass" : "FAIL") << "  " << c.name
                          << (c.detail.empty() ? "" : "  [" + c.detail + "]") << "\n";
            std::cout << (sum.pass ? "all checks passed" : "VALIDATION FAILED") << "\n";
            return sum.pass ? 0 : 3;
        }
    } catch (const RegexSyntaxError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
