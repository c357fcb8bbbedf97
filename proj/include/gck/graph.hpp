#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gck/int_matrix.hpp"

namespace gck {

// Edge multiplicity: a nonnegative count or infinity.  Infinite
// multiplicities model infinite emitters without storing edge lists.
struct Mult {
    Int count{};
    bool infinite = false;

    static Mult fin(Int c) { return Mult{std::move(c), false}; }
    static Mult inf() { return Mult{0, true}; }

    bool zero() const { return !infinite && count == 0; }
    bool operator==(const Mult& o) const {
        if (infinite != o.infinite) return false;
        return infinite || count == o.count;
    }
};

// Directed multigraph.  Vertices are dense indices with optional names;
// parallel edges are stored as multiplicities.
class Graph {
public:
    std::size_t add_vertex(std::string name = "");
    // Accumulates onto any existing multiplicity.
    void add_edge(std::size_t src, std::size_t dst, const Mult& m);
    void add_edge(std::size_t src, std::size_t dst, long long count = 1);

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t v) const { return names_[v]; }
    std::optional<std::size_t> index_of(const std::string& name) const;
    const Mult& mult(std::size_t src, std::size_t dst) const;

    bool is_sink(std::size_t v) const;
    bool is_infinite_emitter(std::size_t v) const;
    // Regular: emits at least one and finitely many edges.
    bool is_regular(std::size_t v) const { return !is_sink(v) && !is_infinite_emitter(v); }
    bool is_singular(std::size_t v) const { return !is_regular(v); }
    std::vector<std::size_t> regular_vertices() const;
    std::vector<std::size_t> singular_vertices() const;

    std::vector<std::size_t> out_neighbors(std::size_t v) const;
    std::vector<std::size_t> in_neighbors(std::size_t v) const;

    bool has_cycle() const;
    // Vertices reachable from v by a nonempty path with no internal v,
    // excluding v itself.
    std::vector<bool> forward_set(std::size_t v) const;
    std::vector<bool> backward_set(std::size_t v) const;

    struct Edge {
        std::size_t src, dst;
        Mult m;
    };
    std::vector<Edge> edges() const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<Mult>> adj_;
};

Graph induced_subgraph(const Graph& g, const std::vector<std::size_t>& verts);

bool is_hereditary(const Graph& g, const std::vector<std::size_t>& subset);
bool is_saturated(const Graph& g, const std::vector<std::size_t>& subset);

// All hereditary and saturated vertex subsets, in increasing bitmask
// order (so the empty set comes first and the full set last).  Throws
// TooLarge beyond 20 vertices.  The parallel version is the default;
// the serial one is the reference implementation for benchmarks.
std::vector<std::vector<std::size_t>> hereditary_saturated_subsets(const Graph& g);
std::vector<std::vector<std::size_t>> hereditary_saturated_subsets_serial(const Graph& g);

// Count of first-return paths at each vertex, saturated at 2 (2 stands
// for "two or more", including infinitely many).  A first-return path
// leaves the vertex and comes back to it exactly once, at the end.
struct ReturnPathSummary {
    std::vector<int> counts;
    bool no_unique_return;  // no vertex has exactly one first-return path
};
ReturnPathSummary count_return_paths(const Graph& g);

// Smallest hereditary saturated superset of seed, as sorted indices.
std::vector<std::size_t> hereditary_saturated_closure(const Graph& g,
                                                      const std::vector<std::size_t>& seed);

// Vertex adjacency counts, with infinite multiplicities listed apart
// (their slots in the count matrix hold 0).
struct Adjacency {
    IntMatrix counts;  // counts.at(v, w) = number of edges v -> w
    std::vector<std::pair<std::size_t, std::size_t>> infinite;
};
Adjacency adjacency(const Graph& g);

// Every cycle has an exit at some vertex it visits, in the form used by
// ideal-structure arguments: no vertex lies on exactly one return path.
inline bool condition_K(const Graph& g) { return count_return_paths(g).no_unique_return; }

enum class SimpleClass { NotSimple, SimpleAF, SimplePurelyInfinite };

struct Classification {
    SimpleClass cls;
    std::string reason;
};
Classification classify_simple(const Graph& g);
std::string to_string(SimpleClass c);

// Splits a graph along a hereditary saturated subset into the induced
// subgraph (the ideal side) and the induced complement (the quotient
// side).  Throws NotHereditarySaturated on a bad subset and NotOneIdeal
// when an infinite emitter sends infinitely many edges into the subset
// but only finitely many (and at least one) outside it: such a vertex
// changes character in the quotient and the split is not usable here.
struct IdealQuotient {
    Graph ideal;
    Graph quotient;
    std::vector<std::size_t> ideal_vertices;     // indices into the original
    std::vector<std::size_t> quotient_vertices;  // indices into the original
};
IdealQuotient split_by_ideal(const Graph& g, const std::vector<std::size_t>& subset);

} // namespace gck
