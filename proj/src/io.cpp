#include "gck/io.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gck/error.hpp"

// The fixture builders below initialize only the fields that differ
// from a default-constructed ExtensionData.
#if defined(__GNUC__)
#pragma GCC diagnostic ignored "-Wmissing-field-initializers"
#endif

namespace gck {

namespace {

struct TokLine {
    std::size_t no = 0;
    std::vector<std::string> toks;
};

[[noreturn]] void fail(std::size_t no, const std::string& msg) {
    throw ParseError("line " + std::to_string(no) + ": " + msg);
}

std::vector<TokLine> tokenize(const std::string& text) {
    std::vector<TokLine> out;
    std::size_t no = 0, pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line = nl == std::string::npos ? text.substr(pos)
                                                   : text.substr(pos, nl - pos);
        ++no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        TokLine tl{no, {}};
        std::string cur;
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!cur.empty()) tl.toks.push_back(std::move(cur)), cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) tl.toks.push_back(std::move(cur));
        if (!tl.toks.empty()) out.push_back(std::move(tl));
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return out;
}

Int parse_int(const TokLine& l, const std::string& tok) {
    std::size_t i = tok.size() > 1 && tok[0] == '-' ? 1 : 0;
    if (i == tok.size()) fail(l.no, "expected an integer, got '" + tok + "'");
    for (; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i])))
            fail(l.no, "expected an integer, got '" + tok + "'");
    return Int(tok);
}

std::size_t parse_size(const TokLine& l, const std::string& tok) {
    Int v = parse_int(l, tok);
    if (v < 0 || v > 1000000) fail(l.no, "count out of range: '" + tok + "'");
    return v.convert_to<std::size_t>();
}

// Cursor over the tokens of one line.
struct Cursor {
    const TokLine& l;
    std::size_t at;

    bool done() const { return at >= l.toks.size(); }
    const std::string& peek() const {
        if (done()) fail(l.no, "unexpected end of line");
        return l.toks[at];
    }
    std::string next() {
        if (done()) fail(l.no, "unexpected end of line");
        return l.toks[at++];
    }
    Int next_int() { return parse_int(l, next()); }
    std::size_t next_size() { return parse_size(l, next()); }
    Vec take_ints(std::size_t n) {
        Vec v;
        v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) v.push_back(next_int());
        return v;
    }
    IntMatrix take_matrix(std::size_t rows, std::size_t cols) {
        IntMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = next_int();
        return m;
    }
    void finish() {
        if (!done()) fail(l.no, "trailing tokens after '" + l.toks[at] + "'");
    }
};

void append_ints(std::ostream& os, const Vec& v) {
    for (const Int& x : v) os << ' ' << x;
}

void append_matrix(std::ostream& os, const IntMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) os << ' ' << m.at(r, c);
}

// ------------------------------------------------------------ graphs

bool writable_name(const std::string& n) {
    if (n.empty()) return false;
    for (char c : n)
        if (std::isspace(static_cast<unsigned char>(c)) || c == '#') return false;
    return true;
}

void require_writable(const Graph& g) {
    std::set<std::string> seen;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const std::string& n = g.name(v);
        if (!writable_name(n))
            throw InconsistentData("vertex " + std::to_string(v) +
                                   " has no writable name; name vertices before writing");
        if (!seen.insert(n).second)
            throw InconsistentData("duplicate vertex name '" + n + "'");
    }
}

void emit_core(std::ostream& os, const Graph& g) {
    require_writable(g);
    for (std::size_t v = 0; v < g.size(); ++v) os << "v " << g.name(v) << '\n';
    for (const Graph::Edge& e : g.edges()) {
        os << "e " << g.name(e.src) << ' ' << g.name(e.dst) << ' ';
        if (e.m.infinite)
            os << "inf";
        else
            os << e.m.count;
        os << '\n';
    }
}

StagedGraph parse_graph_impl(const std::string& text, bool allow_staged) {
    StagedGraph s;
    std::vector<std::string> block_names;
    std::vector<Vec> block_rows;
    std::size_t block_line = 0;

    auto vertex = [&](const TokLine& l, const std::string& name) {
        auto idx = s.core.index_of(name);
        if (!idx) fail(l.no, "unknown vertex '" + name + "'");
        return *idx;
    };

    for (const TokLine& l : tokenize(text)) {
        Cursor c{l, 0};
        std::string key = c.next();
        if (key == "v") {
            std::string name = c.next();
            c.finish();
            if (s.core.index_of(name)) fail(l.no, "duplicate vertex '" + name + "'");
            s.core.add_vertex(name);
        } else if (key == "e") {
            std::size_t src = vertex(l, c.next());
            std::size_t dst = vertex(l, c.next());
            std::string m = c.next();
            c.finish();
            if (m == "inf") {
                s.core.add_edge(src, dst, Mult::inf());
            } else {
                Int count = parse_int(l, m);
                if (count < 1) fail(l.no, "edge count must be positive or 'inf'");
                s.core.add_edge(src, dst, Mult::fin(count));
            }
        } else if (key == "tail" || key == "block" || key == "brow") {
            if (!allow_staged)
                fail(l.no, "staged declaration '" + key + "' in a finite graph file");
            if (key == "tail") {
                StagedTail t;
                t.attach = c.next();
                vertex(l, t.attach);
                std::string dir = c.next();
                if (dir == "in")
                    t.inward = true;
                else if (dir == "out")
                    t.inward = false;
                else
                    fail(l.no, "tail direction must be 'in' or 'out'");
                if (!c.done()) t.base_name = c.next();
                c.finish();
                s.tails.push_back(std::move(t));
            } else if (key == "block") {
                if (!block_names.empty()) fail(l.no, "a staged graph holds at most one block");
                while (!c.done()) {
                    std::string n = c.next();
                    vertex(l, n);
                    block_names.push_back(std::move(n));
                }
                if (block_names.empty()) fail(l.no, "block needs at least one vertex");
                block_line = l.no;
            } else {
                if (block_names.empty()) fail(l.no, "brow before its block line");
                if (block_rows.size() == block_names.size())
                    fail(l.no, "more brow lines than block vertices");
                Vec row = c.take_ints(block_names.size());
                c.finish();
                for (const Int& x : row)
                    if (x < 0) fail(l.no, "block entries are nonnegative");
                block_rows.push_back(std::move(row));
            }
        } else {
            fail(l.no, "unknown declaration '" + key + "'");
        }
    }
    if (!block_names.empty()) {
        if (block_rows.size() != block_names.size())
            fail(block_line, "block over " + std::to_string(block_names.size()) +
                                 " vertices needs as many brow lines");
        IntMatrix b(block_names.size(), block_names.size());
        for (std::size_t r = 0; r < block_rows.size(); ++r)
            for (std::size_t k = 0; k < block_names.size(); ++k) b.at(r, k) = block_rows[r][k];
        s.block = StagedBlock{std::move(block_names), std::move(b)};
    }
    return s;
}

// --------------------------------------------------- keyed documents

const char* kGroupSlots[6] = {"k0i", "k0a", "k0q", "k1i", "k1a", "k1q"};
const char* kMapNames[6] = {"iota0", "pi0", "del0", "iota1", "pi1", "del1"};

std::size_t slot_index(const TokLine& l, const std::string& name) {
    for (std::size_t i = 0; i < 6; ++i)
        if (name == kGroupSlots[i]) return i;
    fail(l.no, "unknown group slot '" + name + "'");
}

// [torsion <d> ...] free <n>
FgAbelianGroup parse_group_body(Cursor& c) {
    Vec torsion;
    if (c.peek() == "torsion") {
        c.next();
        while (c.peek() != "free") {
            Int d = c.next_int();
            if (d < 2) fail(c.l.no, "torsion orders are at least 2");
            torsion.push_back(std::move(d));
        }
    }
    if (c.next() != "free") fail(c.l.no, "expected 'free <rank>'");
    std::size_t rank = c.next_size();
    c.finish();
    return FgAbelianGroup::from_orders(torsion, rank);
}

void emit_group_body(std::ostream& os, const FgAbelianGroup& g) {
    if (!g.torsion().empty()) {
        os << " torsion";
        append_ints(os, g.torsion());
    }
    os << " free " << g.free_rank();
}

void require_canonical(const FgAbelianGroup& g, const std::string& slot) {
    FgAbelianGroup canon = FgAbelianGroup::from_orders(g.torsion(), g.free_rank());
    if (!(g.relations() == canon.relations()))
        throw InconsistentData("group " + slot +
                               " is not in canonical presentation; re-present it before writing");
}

// nfg [rank <n>|rank inf]  or  rank <n>|rank inf
GroupMeta parse_meta_body(Cursor& c) {
    GroupMeta m;
    if (c.peek() == "nfg") {
        c.next();
        m.not_finitely_generated = true;
    }
    if (!c.done() && c.peek() == "rank") {
        c.next();
        std::string r = c.next();
        if (r == "inf")
            m.rank_infinite = true;
        else
            m.rank = parse_int(c.l, r);
    }
    c.finish();
    if (!m.not_finitely_generated && !m.rank_infinite && !m.rank)
        fail(c.l.no, "empty declaration");
    return m;
}

bool meta_is_default(const GroupMeta& m) {
    return !m.not_finitely_generated && !m.rank_infinite && !m.rank;
}

void emit_meta_body(std::ostream& os, const GroupMeta& m) {
    if (m.not_finitely_generated) os << " nfg";
    if (m.rank_infinite)
        os << " rank inf";
    else if (m.rank)
        os << " rank " << *m.rank;
}

ConeCert parse_cone_body(Cursor& c, std::size_t ambient) {
    std::string tag = c.next();
    if (tag == "full") {
        c.finish();
        return ConeCert{FullCone{}};
    }
    if (tag == "declared") {
        std::string f = c.next();
        c.finish();
        if (f == "full") return ConeCert{DeclaredCone{true}};
        if (f == "notfull") return ConeCert{DeclaredCone{false}};
        fail(c.l.no, "declared order is 'full' or 'notfull'");
    }
    if (tag == "simplicial") {
        std::size_t k = c.next_size();
        std::vector<Vec> gens;
        for (std::size_t i = 0; i < k; ++i) gens.push_back(c.take_ints(ambient));
        c.finish();
        return ConeCert{SimplicialCone{std::move(gens)}};
    }
    if (tag == "stationary") {
        std::size_t m = c.next_size();
        IntMatrix block = c.take_matrix(m, m);
        std::size_t k = c.next_size();
        std::vector<Vec> classes;
        for (std::size_t i = 0; i < k; ++i) classes.push_back(c.take_ints(ambient));
        c.finish();
        return ConeCert{StationaryCone{std::move(block), std::move(classes)}};
    }
    fail(c.l.no, "unknown order certificate '" + tag + "'");
}

void emit_cone_body(std::ostream& os, const ConeCert& cone, const std::string& slot) {
    if (std::holds_alternative<FullCone>(cone.data)) {
        os << " full";
    } else if (const auto* d = std::get_if<DeclaredCone>(&cone.data)) {
        os << " declared " << (d->full ? "full" : "notfull");
    } else if (const auto* s = std::get_if<SimplicialCone>(&cone.data)) {
        os << " simplicial " << s->generators.size();
        for (const Vec& g : s->generators) append_ints(os, g);
    } else if (const auto* s = std::get_if<StationaryCone>(&cone.data)) {
        os << " stationary " << s->block.rows();
        append_matrix(os, s->block);
        os << ' ' << s->stage_classes.size();
        for (const Vec& g : s->stage_classes) append_ints(os, g);
    } else {
        throw UnsupportedCertificate("the " + slot +
                                     " order certificate is derived at run time and has no "
                                     "file form");
    }
}

ScaleCert parse_scale_body(Cursor& c, std::size_t ambient) {
    std::string tag = c.next();
    if (tag == "full") {
        c.finish();
        return ScaleCert{FullScale{}};
    }
    if (tag == "unit") {
        Vec u = c.take_ints(ambient);
        c.finish();
        return ScaleCert{UnitScale{std::move(u)}};
    }
    if (tag == "orbit") {
        Vec seed = c.take_ints(ambient);
        IntMatrix block = c.take_matrix(ambient, ambient);
        c.finish();
        return ScaleCert{OrbitScale{std::move(seed), std::move(block)}};
    }
    if (tag == "bounded") {
        std::size_t k = c.next_size();
        std::vector<Vec> bounds;
        for (std::size_t i = 0; i < k; ++i) bounds.push_back(c.take_ints(ambient));
        c.finish();
        return ScaleCert{BoundedByScale{std::move(bounds)}};
    }
    fail(c.l.no, "unknown scale certificate '" + tag + "'");
}

void emit_scale_body(std::ostream& os, const ScaleCert& scale, const std::string& slot) {
    if (std::holds_alternative<FullScale>(scale.data)) {
        os << " full";
    } else if (const auto* u = std::get_if<UnitScale>(&scale.data)) {
        os << " unit";
        append_ints(os, u->u);
    } else if (const auto* o = std::get_if<OrbitScale>(&scale.data)) {
        os << " orbit";
        append_ints(os, o->seed);
        append_matrix(os, o->block);
    } else if (const auto* b = std::get_if<BoundedByScale>(&scale.data)) {
        os << " bounded " << b->bounds.size();
        for (const Vec& v : b->bounds) append_ints(os, v);
    } else {
        throw UnsupportedCertificate("the " + slot +
                                     " scale certificate is derived at run time and has no "
                                     "file form");
    }
}

} // namespace

Graph parse_graph(const std::string& text) { return parse_graph_impl(text, false).core; }

std::string emit_graph(const Graph& g) {
    std::ostringstream os;
    emit_core(os, g);
    return os.str();
}

StagedGraph parse_staged_graph(const std::string& text) { return parse_graph_impl(text, true); }

std::string emit_staged_graph(const StagedGraph& s) {
    std::ostringstream os;
    emit_core(os, s.core);
    for (const StagedTail& t : s.tails)
        os << "tail " << t.attach << ' ' << (t.inward ? "in" : "out") << ' ' << t.base_name
           << '\n';
    if (s.block) {
        os << "block";
        for (const std::string& n : s.block->names) os << ' ' << n;
        os << '\n';
        for (std::size_t r = 0; r < s.block->block.rows(); ++r) {
            os << "brow";
            for (std::size_t c = 0; c < s.block->block.cols(); ++c)
                os << ' ' << s.block->block.at(r, c);
            os << '\n';
        }
    }
    return os.str();
}

KDataDecl parse_kdata(const std::string& text) {
    auto lines = tokenize(text);
    if (lines.empty() || lines[0].toks[0] != "kdata")
        throw ParseError("line 1: expected a kdata header");
    if (lines[0].toks.size() > 1) fail(lines[0].no, "trailing tokens after the header");
    KDataDecl d;
    bool seen_k0 = false, seen_k1 = false, seen_kind = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        Cursor c{lines[i], 0};
        std::string key = c.next();
        bool is_k0 = key == "k0";
        if (is_k0 || key == "k1") {
            bool& seen = is_k0 ? seen_k0 : seen_k1;
            if (seen) fail(lines[i].no, "duplicate '" + key + "'");
            seen = true;
            if (c.peek() == "nfg" || c.peek() == "rank")
                (is_k0 ? d.meta_k0 : d.meta_k1) = parse_meta_body(c);
            else
                (is_k0 ? d.k0 : d.k1) = parse_group_body(c);
        } else if (key == "kind") {
            if (seen_kind) fail(lines[i].no, "duplicate 'kind'");
            seen_kind = true;
            std::string k = c.next();
            c.finish();
            if (k == "af")
                d.kind = PieceKind::AF;
            else if (k == "kirchberg")
                d.kind = PieceKind::Kirchberg;
            else
                fail(lines[i].no, "kind is 'af' or 'kirchberg'");
        } else {
            fail(lines[i].no, "unknown declaration '" + key + "'");
        }
    }
    return d;
}

std::string emit_kdata(const KDataDecl& d) {
    std::ostringstream os;
    os << "kdata\n";
    auto side = [&](const char* key, const FgAbelianGroup& g, const GroupMeta& m) {
        os << key;
        if (!meta_is_default(m)) {
            if (!g.is_trivial())
                throw InconsistentData(std::string(key) +
                                       " declares both a presentation and a shape override");
            emit_meta_body(os, m);
        } else {
            require_canonical(g, key);
            emit_group_body(os, g);
        }
        os << '\n';
    };
    side("k0", d.k0, d.meta_k0);
    side("k1", d.k1, d.meta_k1);
    os << "kind " << (d.kind == PieceKind::AF ? "af" : "kirchberg") << '\n';
    return os.str();
}

InvariantFile parse_invariant(const std::string& text) {
    auto lines = tokenize(text);
    if (lines.empty() || lines[0].toks[0] != "sixterm")
        throw ParseError("line 1: expected a sixterm header");
    if (lines[0].toks.size() > 1) fail(lines[0].no, "trailing tokens after the header");

    std::optional<FgAbelianGroup> groups[6];
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].toks[0] != "group") continue;
        Cursor c{lines[i], 1};
        std::size_t slot = slot_index(lines[i], c.next());
        if (groups[slot]) fail(lines[i].no, "duplicate group declaration");
        groups[slot] = parse_group_body(c);
    }
    for (std::size_t s = 0; s < 6; ++s)
        if (!groups[s])
            throw ParseError(std::string("missing declaration 'group ") + kGroupSlots[s] + "'");
    auto ambient = [&](std::size_t s) { return groups[s]->ambient_rank(); };

    // map name -> (source slot, target slot)
    const std::pair<std::size_t, std::size_t> ends[6] = {{0, 1}, {1, 2}, {2, 3},
                                                         {3, 4}, {4, 5}, {5, 0}};
    std::optional<IntMatrix> maps[6];
    std::optional<ConeCert> cones[3];
    std::optional<ScaleCert> scales[2];
    std::optional<Vec> units[3];
    std::optional<Vec> g2_elem;
    GroupMeta metas[6];
    bool metas_seen[6] = {};
    std::optional<bool> del0_declared;
    int ucase = -1;
    PieceKind ideal_kind = PieceKind::Kirchberg;
    PieceKind quotient_kind = PieceKind::Kirchberg;
    bool kind_seen[2] = {};
    bool stabilized = false;
    bool stabilized_seen = false;

    auto k0_slot = [&](const TokLine& l, const std::string& name) -> std::size_t {
        if (name == "i") return 0;
        if (name == "a") return 1;
        if (name == "q") return 2;
        fail(l.no, "expected one of i, a, q; got '" + name + "'");
    };

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const TokLine& l = lines[i];
        Cursor c{l, 0};
        std::string key = c.next();
        if (key == "group") continue;
        if (key == "sixterm") fail(l.no, "duplicate header");
        if (key == "case") {
            if (ucase >= 0) fail(l.no, "duplicate 'case'");
            std::size_t v = c.next_size();
            c.finish();
            if (v > 2) fail(l.no, "case is 0, 1 or 2");
            ucase = static_cast<int>(v);
        } else if (key == "kind") {
            std::string which = c.next();
            std::string k = c.next();
            c.finish();
            PieceKind pk;
            if (k == "af")
                pk = PieceKind::AF;
            else if (k == "kirchberg")
                pk = PieceKind::Kirchberg;
            else
                fail(l.no, "kind is 'af' or 'kirchberg'");
            if (which == "ideal") {
                if (kind_seen[0]) fail(l.no, "duplicate 'kind ideal'");
                kind_seen[0] = true;
                ideal_kind = pk;
            } else if (which == "quotient") {
                if (kind_seen[1]) fail(l.no, "duplicate 'kind quotient'");
                kind_seen[1] = true;
                quotient_kind = pk;
            } else {
                fail(l.no, "kind names 'ideal' or 'quotient'");
            }
        } else if (key == "stabilized") {
            if (stabilized_seen) fail(l.no, "duplicate 'stabilized'");
            stabilized_seen = true;
            std::string v = c.next();
            c.finish();
            if (v == "1")
                stabilized = true;
            else if (v == "0")
                stabilized = false;
            else
                fail(l.no, "stabilized is 0 or 1");
        } else if (key == "map") {
            std::string name = c.next();
            std::size_t m = 6;
            for (std::size_t j = 0; j < 6; ++j)
                if (name == kMapNames[j]) m = j;
            if (m == 6) fail(l.no, "unknown map '" + name + "'");
            if (maps[m]) fail(l.no, "duplicate map declaration");
            std::size_t rows = c.next_size();
            std::size_t cols = c.next_size();
            if (rows != ambient(ends[m].second) || cols != ambient(ends[m].first))
                fail(l.no, "map " + name + " must be " +
                               std::to_string(ambient(ends[m].second)) + " x " +
                               std::to_string(ambient(ends[m].first)) +
                               " in the declared presentations");
            maps[m] = c.take_matrix(rows, cols);
            c.finish();
        } else if (key == "cone") {
            std::size_t s = k0_slot(l, c.next());
            if (cones[s]) fail(l.no, "duplicate cone declaration");
            cones[s] = parse_cone_body(c, ambient(s));
        } else if (key == "scale") {
            std::string which = c.next();
            std::size_t s = which == "i" ? 0 : which == "q" ? 1 : 2;
            if (s == 2) fail(l.no, "scales attach to i or q");
            if (scales[s]) fail(l.no, "duplicate scale declaration");
            scales[s] = parse_scale_body(c, ambient(s == 0 ? 0 : 2));
        } else if (key == "unit") {
            std::size_t s = k0_slot(l, c.next());
            if (units[s]) fail(l.no, "duplicate unit declaration");
            units[s] = c.take_ints(ambient(s));
            c.finish();
        } else if (key == "elem") {
            if (c.next() != "g2") fail(l.no, "only 'elem g2' is recognized");
            if (g2_elem) fail(l.no, "duplicate 'elem g2'");
            g2_elem = c.take_ints(ambient(1));
            c.finish();
        } else if (key == "meta") {
            std::size_t slot = slot_index(l, c.next());
            if (metas_seen[slot]) fail(l.no, "duplicate meta declaration");
            metas_seen[slot] = true;
            metas[slot] = parse_meta_body(c);
        } else if (key == "del0") {
            if (c.next() != "declared") fail(l.no, "expected 'del0 declared zero|nonzero'");
            if (del0_declared) fail(l.no, "duplicate 'del0 declared'");
            std::string v = c.next();
            c.finish();
            if (v == "zero")
                del0_declared = true;
            else if (v == "nonzero")
                del0_declared = false;
            else
                fail(l.no, "expected 'del0 declared zero|nonzero'");
        } else {
            fail(l.no, "unknown declaration '" + key + "'");
        }
    }

    for (std::size_t m = 0; m < 6; ++m)
        if (!maps[m]) throw ParseError(std::string("missing declaration 'map ") + kMapNames[m] + "'");
    const char* cone_names[3] = {"cone i", "cone a", "cone q"};
    for (std::size_t s = 0; s < 3; ++s)
        if (!cones[s]) throw ParseError(std::string("missing declaration '") + cone_names[s] + "'");
    if (!scales[0]) throw ParseError("missing declaration 'scale i'");
    if (!scales[1]) throw ParseError("missing declaration 'scale q'");
    if (ucase < 0) throw ParseError("missing declaration 'case'");

    SixTermInvariant inv{*groups[0],
                         *groups[1],
                         *groups[2],
                         *groups[3],
                         *groups[4],
                         *groups[5],
                         induced_hom(*groups[0], *groups[1], std::move(*maps[0])),
                         induced_hom(*groups[1], *groups[2], std::move(*maps[1])),
                         induced_hom(*groups[2], *groups[3], std::move(*maps[2])),
                         induced_hom(*groups[3], *groups[4], std::move(*maps[3])),
                         induced_hom(*groups[4], *groups[5], std::move(*maps[4])),
                         induced_hom(*groups[5], *groups[0], std::move(*maps[5])),
                         std::move(*cones[0]),
                         std::move(*cones[1]),
                         std::move(*cones[2]),
                         std::move(*scales[0]),
                         std::move(*scales[1]),
                         std::move(units[0]),
                         std::move(units[1]),
                         std::move(units[2]),
                         ucase};
    ExtensionData data{std::move(inv), ideal_kind,       quotient_kind, stabilized,
                       metas[0],       metas[1],         metas[2],      metas[3],
                       metas[4],       metas[5],         del0_declared};
    return InvariantFile{std::move(data), std::move(g2_elem)};
}

std::string emit_invariant(const InvariantFile& f) {
    const ExtensionData& d = f.data;
    const SixTermInvariant& inv = d.inv;
    std::ostringstream os;
    os << "sixterm\n";
    os << "case " << inv.unital_case << '\n';
    os << "kind ideal " << (d.ideal_kind == PieceKind::AF ? "af" : "kirchberg") << '\n';
    os << "kind quotient " << (d.quotient_kind == PieceKind::AF ? "af" : "kirchberg") << '\n';
    if (d.ideal_stabilized) os << "stabilized 1\n";

    const FgAbelianGroup* groups[6] = {&inv.k0i, &inv.k0a, &inv.k0q,
                                       &inv.k1i, &inv.k1a, &inv.k1q};
    for (std::size_t s = 0; s < 6; ++s) {
        require_canonical(*groups[s], kGroupSlots[s]);
        os << "group " << kGroupSlots[s];
        emit_group_body(os, *groups[s]);
        os << '\n';
    }

    const GroupHom* homs[6] = {&inv.iota0, &inv.pi0, &inv.del0,
                               &inv.iota1, &inv.pi1, &inv.del1};
    for (std::size_t m = 0; m < 6; ++m) {
        os << "map " << kMapNames[m] << ' ' << homs[m]->h.rows() << ' ' << homs[m]->h.cols();
        append_matrix(os, homs[m]->h);
        os << '\n';
    }

    const ConeCert* cones[3] = {&inv.cone_i, &inv.cone_a, &inv.cone_q};
    const char* k0names[3] = {"i", "a", "q"};
    for (std::size_t s = 0; s < 3; ++s) {
        os << "cone " << k0names[s];
        emit_cone_body(os, *cones[s], std::string("cone ") + k0names[s]);
        os << '\n';
    }
    os << "scale i";
    emit_scale_body(os, inv.scale_i, "scale i");
    os << '\n';
    os << "scale q";
    emit_scale_body(os, inv.scale_q, "scale q");
    os << '\n';

    const std::optional<Vec>* units[3] = {&inv.unit_i, &inv.unit_a, &inv.unit_q};
    for (std::size_t s = 0; s < 3; ++s)
        if (*units[s]) {
            os << "unit " << k0names[s];
            append_ints(os, **units[s]);
            os << '\n';
        }
    if (f.g2_elem) {
        os << "elem g2";
        append_ints(os, *f.g2_elem);
        os << '\n';
    }

    const GroupMeta* metas[6] = {&d.meta_k0i, &d.meta_k0a, &d.meta_k0q,
                                 &d.meta_k1i, &d.meta_k1a, &d.meta_k1q};
    for (std::size_t s = 0; s < 6; ++s)
        if (!meta_is_default(*metas[s])) {
            os << "meta " << kGroupSlots[s];
            emit_meta_body(os, *metas[s]);
            os << '\n';
        }
    if (d.del0_declared_zero)
        os << "del0 declared " << (*d.del0_declared_zero ? "zero" : "nonzero") << '\n';
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("cannot write '" + path + "'");
}

// ----------------------------------------------------------- corpus

namespace {

using G = FgAbelianGroup;

Graph fx_e1() {
    Graph g;
    g.add_vertex("a");
    return g;
}

Graph fx_e2() {
    Graph g;
    std::size_t a = g.add_vertex("a");
    g.add_edge(a, a, 2);
    return g;
}

Graph fx_e3() {
    Graph g;
    std::size_t a = g.add_vertex("a");
    std::size_t b = g.add_vertex("b");
    g.add_edge(a, a, 2);
    g.add_edge(a, b);
    g.add_edge(b, a);
    g.add_edge(b, b, 2);
    return g;
}

StagedGraph fx_e4() { return StagedGraph{fx_e3(), {StagedTail{"a", true, "t"}}, std::nullopt}; }

StagedGraph fx_e5() {
    Graph core;
    core.add_vertex("a");
    return StagedGraph{std::move(core), {}, StagedBlock{{"a"}, IntMatrix::of({{2}})}};
}

StagedGraph fx_e6() {
    Graph core;
    core.add_vertex("a");
    core.add_vertex("b");
    return StagedGraph{std::move(core), {}, StagedBlock{{"a", "b"}, IntMatrix::of({{1, 1}, {1, 0}})}};
}

KDataDecl fx_e7() { return KDataDecl{G::trivial(), G::free_group(1), {}, {}, PieceKind::Kirchberg}; }

KDataDecl fx_e8() {
    return KDataDecl{G::trivial(), G::trivial(), GroupMeta{true, true, std::nullopt}, {},
                     PieceKind::Kirchberg};
}

// The five extension-data rows, each failing exactly one condition of
// the main criterion, assembled from the declared K-data of the graph
// fixtures above.

// stable (Z,Z) ideal under the unital (Z,Z) quotient, unit class 0,
// identity exponential map: fails (1)
ExtensionData fx_row_1() {
    G z = G::free_group(1);
    SixTermInvariant inv{z,
                         z,
                         z,
                         z,
                         z,
                         z,
                         induced_hom(z, z, IntMatrix::identity(1)),
                         zero_hom(z, z),
                         induced_hom(z, z, IntMatrix::identity(1)),
                         zero_hom(z, z),
                         induced_hom(z, z, IntMatrix::identity(1)),
                         zero_hom(z, z),
                         ConeCert{FullCone{}},
                         ConeCert{FullCone{}},
                         ConeCert{FullCone{}},
                         ScaleCert{FullScale{}},
                         ScaleCert{UnitScale{Vec{Int(0)}}},
                         std::nullopt,
                         Vec{Int(0)},
                         Vec{Int(0)},
                         2};
    return ExtensionData{.inv = std::move(inv),
                         .ideal_kind = PieceKind::Kirchberg,
                         .quotient_kind = PieceKind::Kirchberg};
}

// dyadic rank-one ideal (declared) under the trivial-K quotient, middle
// order declared not full: fails (2)
ExtensionData fx_row_2() {
    G z = G::free_group(1);
    G t = G::trivial();
    SixTermInvariant inv{z,
                         z,
                         t,
                         t,
                         t,
                         t,
                         induced_hom(z, z, IntMatrix::identity(1)),
                         zero_hom(z, t),
                         zero_hom(t, t),
                         zero_hom(t, t),
                         zero_hom(t, t),
                         zero_hom(t, z),
                         ConeCert{DeclaredCone{false}},
                         ConeCert{DeclaredCone{false}},
                         ConeCert{FullCone{}},
                         ScaleCert{FullScale{}},
                         ScaleCert{UnitScale{Vec{}}},
                         std::nullopt,
                         std::nullopt,
                         Vec{},
                         1};
    return ExtensionData{.inv = std::move(inv),
                         .ideal_kind = PieceKind::AF,
                         .quotient_kind = PieceKind::Kirchberg,
                         .meta_k0i = {true, false, Int(1)},
                         .meta_k0a = {true, false, Int(1)}};
}

// declared infinite-rank ideal k0 under the one-dimensional quotient:
// fails (3)(a)
ExtensionData fx_row_3a() {
    G z = G::free_group(1);
    G z2 = G::free_group(2);
    G t = G::trivial();
    SixTermInvariant inv{z,
                         z2,
                         z,
                         t,
                         t,
                         t,
                         induced_hom(z, z2, IntMatrix::of({{1}, {0}})),
                         induced_hom(z2, z, IntMatrix::of({{0, 1}})),
                         zero_hom(z, t),
                         zero_hom(t, t),
                         zero_hom(t, t),
                         zero_hom(t, z),
                         ConeCert{FullCone{}},
                         ConeCert{DeclaredCone{false}},
                         ConeCert{SimplicialCone{{Vec{Int(1)}}}},
                         ScaleCert{FullScale{}},
                         ScaleCert{UnitScale{Vec{Int(1)}}},
                         std::nullopt,
                         Vec{Int(0), Int(1)},
                         Vec{Int(1)},
                         2};
    return ExtensionData{.inv = std::move(inv),
                         .ideal_kind = PieceKind::Kirchberg,
                         .quotient_kind = PieceKind::AF,
                         .meta_k0i = {true, true, std::nullopt},
                         .meta_k0a = {true, true, std::nullopt}};
}

// ideal with k0 = 0 but k1 = Z under the one-dimensional quotient:
// fails (3)(b)
ExtensionData fx_row_3b() {
    G z = G::free_group(1);
    G t = G::trivial();
    SixTermInvariant inv{t,
                         z,
                         z,
                         z,
                         z,
                         t,
                         zero_hom(t, z),
                         induced_hom(z, z, IntMatrix::identity(1)),
                         zero_hom(z, z),
                         induced_hom(z, z, IntMatrix::identity(1)),
                         zero_hom(z, t),
                         zero_hom(t, t),
                         ConeCert{FullCone{}},
                         ConeCert{DeclaredCone{false}},
                         ConeCert{SimplicialCone{{Vec{Int(1)}}}},
                         ScaleCert{FullScale{}},
                         ScaleCert{UnitScale{Vec{Int(1)}}},
                         std::nullopt,
                         Vec{Int(1)},
                         Vec{Int(1)},
                         2};
    return ExtensionData{.inv = std::move(inv),
                         .ideal_kind = PieceKind::Kirchberg,
                         .quotient_kind = PieceKind::AF};
}

// golden-mean dimension-group ideal under the one-dimensional quotient:
// fails (3)(c)
ExtensionData fx_row_3c() {
    G z = G::free_group(1);
    G z2 = G::free_group(2);
    G z3 = G::free_group(3);
    G t = G::trivial();
    SixTermInvariant inv{z2,
                         z3,
                         z,
                         t,
                         t,
                         t,
                         induced_hom(z2, z3, IntMatrix::of({{1, 0}, {0, 1}, {0, 0}})),
                         induced_hom(z3, z, IntMatrix::of({{0, 0, 1}})),
                         zero_hom(z, t),
                         zero_hom(t, t),
                         zero_hom(t, t),
                         zero_hom(t, z2),
                         ConeCert{StationaryCone{IntMatrix::of({{0, 1}, {1, 1}}),
                                                 {Vec{Int(1), Int(0)}, Vec{Int(0), Int(1)}}}},
                         ConeCert{DeclaredCone{false}},
                         ConeCert{SimplicialCone{{Vec{Int(1)}}}},
                         ScaleCert{FullScale{}},
                         ScaleCert{UnitScale{Vec{Int(1)}}},
                         std::nullopt,
                         Vec{Int(0), Int(0), Int(1)},
                         Vec{Int(1)},
                         2};
    return ExtensionData{.inv = std::move(inv),
                         .ideal_kind = PieceKind::AF,
                         .quotient_kind = PieceKind::AF};
}

} // namespace

const std::vector<FixtureFile>& fixture_corpus() {
    static const std::vector<FixtureFile> corpus = [] {
        std::vector<FixtureFile> v;
        v.push_back({"E1.graph", "one vertex, no edges: the complex numbers",
                     emit_graph(fx_e1())});
        v.push_back({"E2.graph", "one vertex, two loops: the Cuntz algebra O_2",
                     emit_graph(fx_e2())});
        v.push_back({"E3.graph",
                     "two double-loop vertices feeding each other: unital Kirchberg "
                     "algebra, K = (Z, Z), unit class 0",
                     emit_graph(fx_e3())});
        v.push_back({"E4.graph",
                     "E3 with an infinite incoming tail: stable Kirchberg algebra, "
                     "K = (Z, Z)",
                     emit_staged_graph(fx_e4())});
        v.push_back({"E5.graph",
                     "stationary doubling line: the stabilized 2-adic matrix limit",
                     emit_staged_graph(fx_e5())});
        v.push_back({"E6.graph",
                     "stationary golden-mean pair: stable AF algebra whose dimension "
                     "group is Z + phi Z",
                     emit_staged_graph(fx_e6())});
        v.push_back({"E7.kdata", "declared K-data (0, Z): a stable Kirchberg algebra",
                     emit_kdata(fx_e7())});
        v.push_back({"E8.kdata",
                     "declared K-data (Z^infinity, 0): a stable Kirchberg algebra",
                     emit_kdata(fx_e8())});
        v.push_back({"example-table/row-1.inv",
                     "fails exactly (1): nonzero exponential map (E4 ideal, E3 quotient)",
                     emit_invariant({fx_row_1(), std::nullopt})});
        v.push_back({"example-table/row-2.inv",
                     "fails exactly (2): full quotient order over a non-full middle "
                     "order (E5 ideal, E2 quotient)",
                     emit_invariant({fx_row_2(), std::nullopt})});
        v.push_back({"example-table/row-3a.inv",
                     "fails exactly (3)(a): ideal k0 not finitely generated (E8 ideal, "
                     "E1 quotient)",
                     emit_invariant({fx_row_3a(), std::nullopt})});
        v.push_back({"example-table/row-3b.inv",
                     "fails exactly (3)(b): ideal k1 rank exceeds k0 rank (E7 ideal, "
                     "E1 quotient)",
                     emit_invariant({fx_row_3b(), std::nullopt})});
        v.push_back({"example-table/row-3c.inv",
                     "fails exactly (3)(c): proper stationary order on ideal k0 = Z^2 "
                     "(E6 ideal, E1 quotient)",
                     emit_invariant({fx_row_3c(), std::nullopt})});
        return v;
    }();
    return corpus;
}

} // namespace gck
