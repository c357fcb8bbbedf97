#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gck/extension.hpp"
#include "gck/graph.hpp"
#include "gck/ktheory.hpp"

namespace gck {

// Line-oriented text formats shared by the library and the command-line
// tool.  '#' starts a comment anywhere on a line; blank lines are
// skipped.  Parsers throw ParseError naming the offending line; every
// emitter produces text whose parse equals its input.

// Finite graphs, one declaration per line:
//   v <name>
//   e <src> <dst> <count|inf>
// The order of the v lines fixes the vertex order, hence every matrix
// derived from the graph.  Edge counts are positive; repeated e lines
// for the same pair accumulate.
Graph parse_graph(const std::string& text);
std::string emit_graph(const Graph& g);

// Staged graphs add three declarations after the core:
//   tail <attach> in|out [base]    an eventually-constant tail
//   block <name> <name> ...        a stationary stage over core vertices
//   brow <k integers>              one row of the stage matrix
StagedGraph parse_staged_graph(const std::string& text);
std::string emit_staged_graph(const StagedGraph& s);

// Declared K-data for pieces whose groups carry no finite presentation,
// headed by a `kdata` line:
//   k0 [torsion <d> ...] free <n>
//   k0 nfg [rank <n> | rank inf]
//   k1 ...
//   kind af|kirchberg
struct KDataDecl {
    FgAbelianGroup k0 = FgAbelianGroup::trivial();
    FgAbelianGroup k1 = FgAbelianGroup::trivial();
    GroupMeta meta_k0, meta_k1;
    PieceKind kind = PieceKind::Kirchberg;
};
KDataDecl parse_kdata(const std::string& text);
std::string emit_kdata(const KDataDecl& d);

// Extension-criteria input, headed by a `sixterm` line: groups by
// invariant factors (`group k0a torsion 2 4 free 1`), maps by ambient
// matrices (`map iota0 <rows> <cols> <entries row-major>`), order and
// scale data by certificate tag (`cone i full`, `scale q unit 0`, ...),
// optional unit classes (`unit a 0 1`), shape declarations for groups
// given only by name (`meta k0i nfg rank inf`), a declared exponential
// map (`del0 declared zero`), and the case tag (`case 2`).  The
// optional `elem g2` line marks a middle class for synthesis requests.
// Groups must be in canonical presentation to be written.
struct InvariantFile {
    ExtensionData data;
    std::optional<Vec> g2_elem;
};
InvariantFile parse_invariant(const std::string& text);
std::string emit_invariant(const InvariantFile& f);

std::string read_file(const std::string& path);
// Creates parent directories as needed.
void write_file(const std::string& path, const std::string& text);

// The example corpus shipped with the tool: eight graph or K-data
// fixtures and five extension-data files, each of the latter failing
// exactly one condition of the main criterion.
struct FixtureFile {
    std::string relpath;
    std::string description;
    std::string text;
};
const std::vector<FixtureFile>& fixture_corpus();

} // namespace gck
