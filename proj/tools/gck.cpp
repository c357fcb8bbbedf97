// gck: K-theory of graph algebras from the command line.  Reads the
// line-oriented graph / kdata / invariant formats, runs the analyses,
// and reports verdicts through the exit code: 0 pass or success,
// 1 definite failure, 2 usage or input error, 3 undecided.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gck/error.hpp"
#include "gck/extension.hpp"
#include "gck/graph.hpp"
#include "gck/io.hpp"
#include "gck/ktheory.hpp"
#include "gck/sixterm.hpp"
#include "gck/synth.hpp"

using namespace gck;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUndecided = 3;

struct Args {
    std::string command;
    std::vector<std::string> files;
    unsigned long seed = 1;
    std::size_t depth = 16;
    long long bound = 2;
    int cap = kDefaultCap;
    std::optional<std::string> ideal, ideal2;
    std::optional<std::string> out;
    bool list = false;
    bool help = false;
};

const char* kUsage = R"(gck: K-theory of graph algebras, extension verdicts, witness synthesis

usage: gck <command> [files] [flags]

commands:
  kth FILE            K-groups of a graph (finite or staged) or of a
                      declared K-data file; finite graphs include the
                      class of the unit
  ideals FILE         hereditary saturated vertex sets of a finite graph
  classify FILE       simplicity class of a finite graph
  sixterm FILE        six-term invariant of the one-ideal decomposition
  augmented FILE      the invariant extended by the unitization row
  check FILE          full-criterion verdict on an invariant file
  check-corollary FILE
                      restricted verdict for the doubly unital,
                      stabilized-ideal shape
  check-hypotheses FILE
                      hypothesis-by-hypothesis report on a graph or on
                      an invariant file carrying `elem g2`
  glue A B            seeded one-ideal join of two finite graphs
                      (A becomes the ideal, B the quotient)
  synthesize FILE     build a graph realizing the invariant file (which
                      must carry `elem g2`); the graph goes to stdout
                      with the construction log in comments
  iso A B             search for an invariant isomorphism between two
                      graphs or two invariant files
  fixtures            built-in example corpus (--list or --out DIR)

flags:
  --seed N      random seed for glue (default 1)
  --depth N     staged stabilization depth cap (default 16)
  --bound N     iso search bound (default 2)
  --cap N       positivity iteration cap (default 64)
  --ideal a,b   ideal vertex names, comma separated (default: the unique
                proper nonempty hereditary saturated set)
  --ideal2 a,b  ideal of the second graph (iso)
  --out DIR     target directory for fixtures
  --list        list the fixture corpus
  --help        this text

exit codes: 0 pass or success, 1 definite failure, 2 usage or input
error, 3 undecided
)";

[[noreturn]] void usage_error(const std::string& msg) {
    throw Error("usage: " + msg + " (see gck --help)");
}

Args parse_args(int argc, char** argv) {
    Args a;
    auto value = [&](int& i, const std::string& flag) -> std::string {
        if (i + 1 >= argc) usage_error("flag " + flag + " needs a value");
        return argv[++i];
    };
    auto number = [&](int& i, const std::string& flag) -> long long {
        std::string v = value(i, flag);
        try {
            std::size_t used = 0;
            long long n = std::stoll(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return n;
        } catch (const std::exception&) {
            usage_error("flag " + flag + " needs an integer, got '" + v + "'");
        }
    };
    for (int i = 1; i < argc; ++i) {
        std::string t = argv[i];
        if (t == "--help" || t == "-h") {
            a.help = true;
        } else if (t == "--list") {
            a.list = true;
        } else if (t == "--seed") {
            a.seed = static_cast<unsigned long>(number(i, t));
        } else if (t == "--depth") {
            long long n = number(i, t);
            if (n < 1) usage_error("--depth must be positive");
            a.depth = static_cast<std::size_t>(n);
        } else if (t == "--bound") {
            long long n = number(i, t);
            if (n < 0) usage_error("--bound must be nonnegative");
            a.bound = n;
        } else if (t == "--cap") {
            long long n = number(i, t);
            if (n < 1) usage_error("--cap must be positive");
            a.cap = static_cast<int>(n);
        } else if (t == "--ideal") {
            a.ideal = value(i, t);
        } else if (t == "--ideal2") {
            a.ideal2 = value(i, t);
        } else if (t == "--out") {
            a.out = value(i, t);
        } else if (!t.empty() && t[0] == '-') {
            usage_error("unknown flag '" + t + "'");
        } else if (a.command.empty()) {
            a.command = t;
        } else {
            a.files.push_back(t);
        }
    }
    return a;
}

void need_files(const Args& a, std::size_t n) {
    if (a.files.size() != n)
        usage_error(a.command + " takes " + std::to_string(n) + " file argument" +
                    (n == 1 ? "" : "s"));
}

// First declaration keyword of a document, for format sniffing.
std::string first_keyword(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (ls >> tok) return tok;
    }
    return "";
}

std::string fmt_coords(const Vec& v) {
    if (v.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        os << v[i];
    }
    return os.str();
}

std::string fmt_names(const Graph& g, const std::vector<std::size_t>& verts) {
    std::string s = "{";
    for (std::size_t i = 0; i < verts.size(); ++i) {
        if (i) s += ' ';
        s += g.name(verts[i]);
    }
    return s + "}";
}

std::string fmt_meta(const GroupMeta& m) {
    std::string s = "not finitely generated";
    if (m.rank_infinite)
        s += " (rank infinite)";
    else if (m.rank)
        s += " (rank " + m.rank->str() + ")";
    return s;
}

std::vector<std::size_t> resolve_ideal(const Graph& g, const std::optional<std::string>& csv,
                                       const std::string& flag) {
    if (csv) {
        std::vector<std::size_t> subset;
        std::string name;
        std::istringstream is(*csv);
        while (std::getline(is, name, ',')) {
            auto v = g.index_of(name);
            if (!v) throw Error(flag + ": unknown vertex '" + name + "'");
            subset.push_back(*v);
        }
        if (subset.empty()) throw Error(flag + " names no vertices");
        return subset;
    }
    std::vector<std::vector<std::size_t>> proper;
    for (auto& s : hereditary_saturated_subsets(g))
        if (!s.empty() && s.size() < g.size()) proper.push_back(std::move(s));
    if (proper.size() == 1) return proper[0];
    throw Error("the graph has " + std::to_string(proper.size()) +
                " proper nonempty hereditary saturated sets; pick one with --ideal");
}

int verdict_exit(const Verdict& v) {
    std::cout << v.to_string();
    switch (v.overall) {
        case Tri::Pass: return kExitPass;
        case Tri::Fail: return kExitFail;
        case Tri::Inconclusive: return kExitUndecided;
    }
    return kExitUndecided;
}

// ------------------------------------------------------------ kth

void print_kdata(const KDataDecl& d) {
    auto side = [&](const char* key, const FgAbelianGroup& g, const GroupMeta& m) {
        std::cout << key << " = ";
        if (m.not_finitely_generated || m.rank_infinite || m.rank)
            std::cout << fmt_meta(m) << '\n';
        else
            std::cout << g.to_string() << '\n';
    };
    side("K0", d.k0, d.meta_k0);
    side("K1", d.k1, d.meta_k1);
    std::cout << "kind = " << (d.kind == PieceKind::AF ? "af" : "kirchberg") << '\n';
}

int cmd_kth(const Args& a) {
    need_files(a, 1);
    std::string text = read_file(a.files[0]);
    if (first_keyword(text) == "kdata") {
        print_kdata(parse_kdata(text));
        return kExitPass;
    }
    StagedGraph s = parse_staged_graph(text);
    if (s.tails.empty() && !s.block) {
        KPair p = k_groups(s.core);
        std::cout << "K0 = " << p.k0.to_string() << '\n';
        std::cout << "K1 = " << p.k1.to_string() << '\n';
        Vec u = p.unit ? *p.unit : unit_class(s.core);
        std::cout << "unit class = " << fmt_coords(p.k0.reduce(u)) << '\n';
        return kExitPass;
    }
    StagedKReport r = staged_k_groups(s, a.depth);
    std::cout << "K0 = " << r.stable.k0.to_string() << '\n';
    std::cout << "K1 = " << r.stable.k1.to_string() << '\n';
    std::cout << "stabilized at depth " << r.depth << '\n';
    if (r.step_identity) {
        std::cout << "step maps: identity\n";
    } else {
        std::cout << "step k0 = " << r.step_k0.to_string() << '\n';
        std::cout << "step k1 = " << r.step_k1.to_string() << '\n';
    }
    if (r.cone) std::cout << "cone: " << r.cone->to_string() << '\n';
    if (!r.note.empty()) std::cout << "note: " << r.note << '\n';
    return kExitPass;
}

// ------------------------------------------------- graph analyses

int cmd_ideals(const Args& a) {
    need_files(a, 1);
    Graph g = parse_graph(read_file(a.files[0]));
    auto subs = hereditary_saturated_subsets(g);
    for (const auto& s : subs) std::cout << fmt_names(g, s) << '\n';
    std::cout << "total: " << subs.size() << '\n';
    return kExitPass;
}

int cmd_classify(const Args& a) {
    need_files(a, 1);
    Graph g = parse_graph(read_file(a.files[0]));
    Classification c = classify_simple(g);
    std::cout << "class: " << to_string(c.cls) << '\n';
    std::cout << "reason: " << c.reason << '\n';
    return kExitPass;
}

int cmd_sixterm(const Args& a) {
    need_files(a, 1);
    Graph g = parse_graph(read_file(a.files[0]));
    auto subset = resolve_ideal(g, a.ideal, "--ideal");
    IdealQuotient split = split_by_ideal(g, subset);
    SixTermInvariant inv = ksix_from_graph(g, subset);

    std::cout << "ideal: " << fmt_names(g, split.ideal_vertices) << '\n';
    std::cout << "quotient: " << fmt_names(g, split.quotient_vertices) << '\n';
    std::cout << "case: " << inv.unital_case << '\n';
    std::cout << "K0: ideal " << inv.k0i.to_string() << ", algebra " << inv.k0a.to_string()
              << ", quotient " << inv.k0q.to_string() << '\n';
    std::cout << "K1: ideal " << inv.k1i.to_string() << ", algebra " << inv.k1a.to_string()
              << ", quotient " << inv.k1q.to_string() << '\n';
    std::cout << "iota0 = " << canonical_matrix(inv.iota0).to_string() << '\n';
    std::cout << "pi0 = " << canonical_matrix(inv.pi0).to_string() << '\n';
    std::cout << "del0 = " << (inv.del0.is_zero_map() ? "zero" : "nonzero") << '\n';
    std::cout << "iota1 = " << canonical_matrix(inv.iota1).to_string() << '\n';
    std::cout << "pi1 = " << canonical_matrix(inv.pi1).to_string() << '\n';
    std::cout << "del1 = " << canonical_matrix(inv.del1).to_string() << '\n';
    std::cout << "cones: ideal " << inv.cone_i.to_string() << ", algebra "
              << inv.cone_a.to_string() << ", quotient " << inv.cone_q.to_string() << '\n';
    std::cout << "scales: ideal " << inv.scale_i.to_string() << ", quotient "
              << inv.scale_q.to_string() << '\n';
    if (inv.unit_a)
        std::cout << "unit class (algebra) = " << fmt_coords(inv.k0a.reduce(*inv.unit_a))
                  << '\n';
    if (inv.unit_q)
        std::cout << "unit class (quotient) = " << fmt_coords(inv.k0q.reduce(*inv.unit_q))
                  << '\n';
    std::cout << "exactness: " << (verify_exactness(inv).ok ? "ok" : "violated") << '\n';
    return kExitPass;
}

int cmd_augmented(const Args& a) {
    need_files(a, 1);
    Graph g = parse_graph(read_file(a.files[0]));
    auto subset = resolve_ideal(g, a.ideal, "--ideal");
    AugmentedInvariant av = augmented_from_graph(g, subset);

    auto row = [&](const char* name, const ScaledGroup& sg) {
        std::cout << name << " = " << sg.group.to_string() << "  order " << sg.cone.to_string()
                  << "  scale " << sg.scale.to_string() << '\n';
    };
    row("h1", av.h1);
    row("h2", av.h2);
    row("h3", av.h3);
    std::cout << "eps = " << canonical_matrix(av.eps_tilde).to_string() << '\n';
    std::cout << "gamma = " << canonical_matrix(av.gamma_tilde).to_string() << '\n';
    std::cout << "base point (h2 coordinates) = " << fmt_coords(av.h2_elem) << '\n';
    std::cout << "marked class in k0(algebra) = " << fmt_coords(av.six.k0a.reduce(av.g2_elem))
              << '\n';
    std::cout << "unit class in k0(quotient) = " << fmt_coords(av.six.k0q.reduce(av.g3_elem))
              << '\n';
    return kExitPass;
}

// ----------------------------------------------------- verdicts

int cmd_check(const Args& a) {
    need_files(a, 1);
    InvariantFile f = parse_invariant(read_file(a.files[0]));
    return verdict_exit(check_extension(f.data));
}

int cmd_check_corollary(const Args& a) {
    need_files(a, 1);
    InvariantFile f = parse_invariant(read_file(a.files[0]));
    try {
        return verdict_exit(check_corollary(f.data));
    } catch (const HypothesesNotMet& e) {
        std::cout << e.what() << '\n';
        return kExitUsage;
    }
}

int cmd_check_hypotheses(const Args& a) {
    need_files(a, 1);
    std::string text = read_file(a.files[0]);
    AugmentedInvariant av = [&] {
        if (first_keyword(text) == "sixterm") {
            InvariantFile f = parse_invariant(text);
            if (!f.g2_elem)
                usage_error("check-hypotheses on an invariant file needs `elem g2`");
            return standard_augmentation(f.data.inv, *f.g2_elem);
        }
        Graph g = parse_graph(text);
        return augmented_from_graph(g, resolve_ideal(g, a.ideal, "--ideal"));
    }();
    return verdict_exit(check_hypotheses(av, a.cap));
}

// --------------------------------------------------------- glue

int cmd_glue(const Args& a) {
    need_files(a, 2);
    Graph ideal = parse_graph(read_file(a.files[0]));
    Graph quotient = parse_graph(read_file(a.files[1]));
    if (ideal.size() == 0 || quotient.size() == 0)
        throw Error("glue needs nonempty graphs");

    Graph g;
    for (std::size_t v = 0; v < ideal.size(); ++v) g.add_vertex(ideal.name(v));
    for (std::size_t v = 0; v < quotient.size(); ++v) {
        std::string name = quotient.name(v);
        while (g.index_of(name)) name = "q." + name;
        g.add_vertex(name);
    }
    for (const auto& e : ideal.edges()) g.add_edge(e.src, e.dst, e.m);
    for (const auto& e : quotient.edges())
        g.add_edge(ideal.size() + e.src, ideal.size() + e.dst, e.m);

    // random downward edges; quotient sinks stay sinks so the ideal set
    // stays saturated
    std::mt19937 rng(a.seed);
    std::uniform_int_distribution<long long> emult(0, 2);
    for (std::size_t w = 0; w < quotient.size(); ++w) {
        if (quotient.is_sink(w)) continue;
        for (std::size_t v = 0; v < ideal.size(); ++v) {
            long long m = emult(rng);
            if (m > 0) g.add_edge(ideal.size() + w, v, m);
        }
    }

    std::vector<std::size_t> subset(ideal.size());
    for (std::size_t v = 0; v < ideal.size(); ++v) subset[v] = v;
    SixTermInvariant inv = ksix_from_graph(g, subset);

    std::cout << "# glue: ideal " << a.files[0] << " (" << ideal.size()
              << " vertices) under quotient " << a.files[1] << " (" << quotient.size()
              << " vertices), seed " << a.seed << '\n';
    std::cout << "# K0: ideal " << inv.k0i.to_string() << ", algebra " << inv.k0a.to_string()
              << ", quotient " << inv.k0q.to_string() << '\n';
    std::cout << "# K1: ideal " << inv.k1i.to_string() << ", algebra " << inv.k1a.to_string()
              << ", quotient " << inv.k1q.to_string() << '\n';
    std::cout << "# exactness: " << (verify_exactness(inv).ok ? "ok" : "violated")
              << ", del0 " << (inv.del0.is_zero_map() ? "zero" : "nonzero") << '\n';
    std::cout << emit_graph(g);
    return kExitPass;
}

// --------------------------------------------------- synthesize

int cmd_synthesize(const Args& a) {
    need_files(a, 1);
    InvariantFile f = parse_invariant(read_file(a.files[0]));
    if (!f.g2_elem) usage_error("synthesize needs an invariant file carrying `elem g2`");

    SixTermInvariant six = f.data.inv;
    Vec g3e = six.pi0.apply(*f.g2_elem);
    if (six.unital_case == 2 && !six.unit_a) six.unit_a = *f.g2_elem;
    if (six.unital_case >= 1 && !six.unit_q) six.unit_q = g3e;

    AugmentedInvariant request = standard_augmentation(six, *f.g2_elem);
    SynthesisResult r = synthesize(request);

    IsoReport rep = iso_verify(r.recomputed, request, r.certificate);
    if (!rep.ok) {
        std::cout << "# round-trip verification failed\n";
        for (const auto& fail : rep.failures) std::cout << "#   " << fail << '\n';
        return kExitFail;
    }

    for (const auto& line : r.log) std::cout << "# " << line << '\n';
    const Graph& core = std::holds_alternative<Graph>(r.graph)
                            ? std::get<Graph>(r.graph)
                            : std::get<StagedGraph>(r.graph).core;
    std::cout << "# ideal vertices: " << fmt_names(core, r.ideal_vertices) << '\n';
    if (std::holds_alternative<StagedGraph>(r.graph)) {
        std::cout << "# verified at truncation depth " << r.depth << '\n';
        std::cout << emit_staged_graph(std::get<StagedGraph>(r.graph));
    } else {
        std::cout << emit_graph(std::get<Graph>(r.graph));
    }
    return kExitPass;
}

// ----------------------------------------------------------- iso

int cmd_iso(const Args& a) {
    need_files(a, 2);
    std::string ta = read_file(a.files[0]);
    std::string tb = read_file(a.files[1]);
    bool inv_a = first_keyword(ta) == "sixterm";
    bool inv_b = first_keyword(tb) == "sixterm";
    if (inv_a != inv_b)
        usage_error("iso compares two graph files or two invariant files, not a mix");

    IsoSearchResult r;
    if (inv_a) {
        InvariantFile fa = parse_invariant(ta);
        InvariantFile fb = parse_invariant(tb);
        if (fa.g2_elem && fb.g2_elem) {
            r = iso_search(standard_augmentation(fa.data.inv, *fa.g2_elem),
                           standard_augmentation(fb.data.inv, *fb.g2_elem), a.bound);
        } else {
            r = iso_search(fa.data.inv, fb.data.inv, a.bound);
        }
    } else {
        Graph ga = parse_graph(ta);
        Graph gb = parse_graph(tb);
        r = iso_search(augmented_from_graph(ga, resolve_ideal(ga, a.ideal, "--ideal")),
                       augmented_from_graph(gb, resolve_ideal(gb, a.ideal2, "--ideal2")),
                       a.bound);
    }
    if (r.certificate) {
        std::cout << "isomorphic (certificate verified, bound " << a.bound << ")\n";
        if (!r.detail.empty()) std::cout << r.detail << '\n';
        return kExitPass;
    }
    if (r.refuted) {
        std::cout << "not isomorphic: " << r.detail << '\n';
        return kExitFail;
    }
    std::cout << "undecided: no certificate within bound " << a.bound;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << '\n';
    return kExitUndecided;
}

// ------------------------------------------------------ fixtures

int cmd_fixtures(const Args& a) {
    if (a.out) {
        for (const auto& f : fixture_corpus()) write_file(*a.out + "/" + f.relpath, f.text);
        std::cout << "wrote " << fixture_corpus().size() << " files under " << *a.out << '\n';
        return kExitPass;
    }
    for (const auto& f : fixture_corpus())
        std::cout << f.relpath << "\n    " << f.description << '\n';
    return kExitPass;
}

int run(const Args& a) {
    if (a.help || a.command.empty()) {
        std::cout << kUsage;
        return a.help ? kExitPass : kExitUsage;
    }
    if (a.command == "kth") return cmd_kth(a);
    if (a.command == "ideals") return cmd_ideals(a);
    if (a.command == "classify") return cmd_classify(a);
    if (a.command == "sixterm") return cmd_sixterm(a);
    if (a.command == "augmented") return cmd_augmented(a);
    if (a.command == "check") return cmd_check(a);
    if (a.command == "check-corollary") return cmd_check_corollary(a);
    if (a.command == "check-hypotheses") return cmd_check_hypotheses(a);
    if (a.command == "glue") return cmd_glue(a);
    if (a.command == "synthesize") return cmd_synthesize(a);
    if (a.command == "iso") return cmd_iso(a);
    if (a.command == "fixtures") return cmd_fixtures(a);
    usage_error("unknown command '" + a.command + "'");
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(parse_args(argc, argv));
    } catch (const HypothesesNotMet& e) {
        std::cerr << e.what() << '\n';
        return kExitFail;
    } catch (const Infeasible& e) {
        std::cerr << e.what() << '\n';
        return kExitFail;
    } catch (const NoDominance& e) {
        std::cerr << e.what() << '\n';
        return kExitFail;
    } catch (const UnsolvableZ& e) {
        std::cerr << e.what() << '\n';
        return kExitFail;
    } catch (const BadBasePoint& e) {
        std::cerr << e.what() << '\n';
        return kExitFail;
    } catch (const VerificationFailed& e) {
        std::cerr << e.what() << '\n';
        return kExitFail;
    } catch (const UnsupportedCertificate& e) {
        std::cerr << e.what() << '\n';
        return kExitUndecided;
    } catch (const ConstructionFailed& e) {
        std::cerr << e.what() << '\n';
        return kExitUndecided;
    } catch (const NoStabilization& e) {
        std::cerr << e.what() << '\n';
        return kExitUndecided;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitUsage;
    }
}
