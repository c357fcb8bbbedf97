#include "gck/graph.hpp"

#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gck {

std::size_t Graph::add_vertex(std::string name) {
    std::size_t v = names_.size();
    if (name.empty()) name = "v" + std::to_string(v);
    names_.push_back(std::move(name));
    for (auto& row : adj_) row.emplace_back();
    adj_.emplace_back(names_.size());
    return v;
}

void Graph::add_edge(std::size_t src, std::size_t dst, const Mult& m) {
    Mult& cur = adj_[src][dst];
    if (m.infinite || cur.infinite) {
        cur = Mult::inf();
    } else {
        if (m.count < 0) throw InconsistentData("negative edge multiplicity");
        cur.count += m.count;
    }
}

void Graph::add_edge(std::size_t src, std::size_t dst, long long count) {
    add_edge(src, dst, Mult::fin(count));
}

std::optional<std::size_t> Graph::index_of(const std::string& name) const {
    for (std::size_t v = 0; v < names_.size(); ++v)
        if (names_[v] == name) return v;
    return std::nullopt;
}

const Mult& Graph::mult(std::size_t src, std::size_t dst) const { return adj_[src][dst]; }

bool Graph::is_sink(std::size_t v) const {
    for (const Mult& m : adj_[v])
        if (!m.zero()) return false;
    return true;
}

bool Graph::is_infinite_emitter(std::size_t v) const {
    for (const Mult& m : adj_[v])
        if (m.infinite) return true;
    return false;
}

std::vector<std::size_t> Graph::regular_vertices() const {
    std::vector<std::size_t> r;
    for (std::size_t v = 0; v < size(); ++v)
        if (is_regular(v)) r.push_back(v);
    return r;
}

std::vector<std::size_t> Graph::singular_vertices() const {
    std::vector<std::size_t> r;
    for (std::size_t v = 0; v < size(); ++v)
        if (is_singular(v)) r.push_back(v);
    return r;
}

std::vector<std::size_t> Graph::out_neighbors(std::size_t v) const {
    std::vector<std::size_t> r;
    for (std::size_t w = 0; w < size(); ++w)
        if (!adj_[v][w].zero()) r.push_back(w);
    return r;
}

std::vector<std::size_t> Graph::in_neighbors(std::size_t v) const {
    std::vector<std::size_t> r;
    for (std::size_t w = 0; w < size(); ++w)
        if (!adj_[w][v].zero()) r.push_back(w);
    return r;
}

bool Graph::has_cycle() const {
    std::size_t n = size();
    std::vector<int> color(n, 0);  // 0 fresh, 1 on stack, 2 done
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (color[s] != 0) continue;
        stack.push_back({s, 0});
        color[s] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            bool descended = false;
            for (std::size_t w = next; w < n; ++w) {
                if (adj_[v][w].zero()) continue;
                if (color[w] == 1) return true;
                if (color[w] == 0) {
                    next = w + 1;
                    stack.push_back({w, 0});
                    color[w] = 1;
                    descended = true;
                    break;
                }
            }
            if (!descended) {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

std::vector<bool> Graph::forward_set(std::size_t v) const {
    std::size_t n = size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> todo;
    for (std::size_t w = 0; w < n; ++w)
        if (w != v && !adj_[v][w].zero()) {
            seen[w] = true;
            todo.push_back(w);
        }
    while (!todo.empty()) {
        std::size_t u = todo.back();
        todo.pop_back();
        for (std::size_t w = 0; w < n; ++w)
            if (w != v && !seen[w] && !adj_[u][w].zero()) {
                seen[w] = true;
                todo.push_back(w);
            }
    }
    return seen;
}

std::vector<bool> Graph::backward_set(std::size_t v) const {
    std::size_t n = size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> todo;
    for (std::size_t w = 0; w < n; ++w)
        if (w != v && !adj_[w][v].zero()) {
            seen[w] = true;
            todo.push_back(w);
        }
    while (!todo.empty()) {
        std::size_t u = todo.back();
        todo.pop_back();
        for (std::size_t w = 0; w < n; ++w)
            if (w != v && !seen[w] && !adj_[w][u].zero()) {
                seen[w] = true;
                todo.push_back(w);
            }
    }
    return seen;
}

std::vector<Graph::Edge> Graph::edges() const {
    std::vector<Edge> r;
    for (std::size_t v = 0; v < size(); ++v)
        for (std::size_t w = 0; w < size(); ++w)
            if (!adj_[v][w].zero()) r.push_back({v, w, adj_[v][w]});
    return r;
}

Graph induced_subgraph(const Graph& g, const std::vector<std::size_t>& verts) {
    Graph h;
    for (std::size_t v : verts) h.add_vertex(g.name(v));
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = 0; j < verts.size(); ++j) {
            const Mult& m = g.mult(verts[i], verts[j]);
            if (!m.zero()) h.add_edge(i, j, m);
        }
    return h;
}

namespace {

std::vector<bool> to_mask(const Graph& g, const std::vector<std::size_t>& subset) {
    std::vector<bool> in(g.size(), false);
    for (std::size_t v : subset) {
        if (v >= g.size()) throw InconsistentData("vertex index out of range");
        in[v] = true;
    }
    return in;
}

} // namespace

bool is_hereditary(const Graph& g, const std::vector<std::size_t>& subset) {
    std::vector<bool> in = to_mask(g, subset);
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (!in[v]) continue;
        for (std::size_t w = 0; w < g.size(); ++w)
            if (!g.mult(v, w).zero() && !in[w]) return false;
    }
    return true;
}

bool is_saturated(const Graph& g, const std::vector<std::size_t>& subset) {
    std::vector<bool> in = to_mask(g, subset);
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (in[v] || !g.is_regular(v)) continue;
        bool escapes = false;
        for (std::size_t w = 0; w < g.size(); ++w)
            if (!g.mult(v, w).zero() && !in[w]) {
                escapes = true;
                break;
            }
        if (!escapes) return false;  // all targets inside, so v must be inside
    }
    return true;
}

namespace {

constexpr std::size_t kSubsetVertexCap = 20;

struct MaskContext {
    std::size_t n;
    std::vector<std::uint32_t> out;  // out-neighbor mask per vertex
    std::uint32_t regular;           // mask of regular vertices
};

MaskContext mask_context(const Graph& g) {
    MaskContext c{g.size(), std::vector<std::uint32_t>(g.size(), 0), 0};
    for (std::size_t v = 0; v < c.n; ++v) {
        for (std::size_t w = 0; w < c.n; ++w)
            if (!g.mult(v, w).zero()) c.out[v] |= std::uint32_t(1) << w;
        if (g.is_regular(v)) c.regular |= std::uint32_t(1) << v;
    }
    return c;
}

bool mask_ok(const MaskContext& c, std::uint32_t mask) {
    for (std::size_t v = 0; v < c.n; ++v) {
        std::uint32_t bit = std::uint32_t(1) << v;
        if (mask & bit) {
            if (c.out[v] & ~mask) return false;  // an edge leaves the set
        } else if (c.regular & bit) {
            if (!(c.out[v] & ~mask)) return false;  // trapped vertex is missing
        }
    }
    return true;
}

std::vector<std::size_t> mask_to_list(std::uint32_t mask, std::size_t n) {
    std::vector<std::size_t> l;
    for (std::size_t v = 0; v < n; ++v)
        if (mask & (std::uint32_t(1) << v)) l.push_back(v);
    return l;
}

} // namespace

std::vector<std::vector<std::size_t>> hereditary_saturated_subsets_serial(const Graph& g) {
    if (g.size() > kSubsetVertexCap)
        throw TooLarge("subset enumeration capped at " + std::to_string(kSubsetVertexCap) +
                       " vertices");
    MaskContext c = mask_context(g);
    std::vector<std::vector<std::size_t>> out;
    std::uint64_t total = std::uint64_t(1) << c.n;
    for (std::uint64_t mask = 0; mask < total; ++mask)
        if (mask_ok(c, std::uint32_t(mask))) out.push_back(mask_to_list(std::uint32_t(mask), c.n));
    return out;
}

std::vector<std::vector<std::size_t>> hereditary_saturated_subsets(const Graph& g) {
#ifndef _OPENMP
    return hereditary_saturated_subsets_serial(g);
#else
    if (g.size() > kSubsetVertexCap)
        throw TooLarge("subset enumeration capped at " + std::to_string(kSubsetVertexCap) +
                       " vertices");
    MaskContext c = mask_context(g);
    std::uint64_t total = std::uint64_t(1) << c.n;
    // fixed chunking keeps the output order independent of thread count
    std::size_t nchunks = total < 256 ? 1 : 256;
    std::uint64_t per = total / nchunks;
    std::vector<std::vector<std::vector<std::size_t>>> found(nchunks);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t chunk = 0; chunk < nchunks; ++chunk) {
        std::uint64_t lo = chunk * per;
        std::uint64_t hi = chunk + 1 == nchunks ? total : lo + per;
        for (std::uint64_t mask = lo; mask < hi; ++mask)
            if (mask_ok(c, std::uint32_t(mask)))
                found[chunk].push_back(mask_to_list(std::uint32_t(mask), c.n));
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& part : found)
        for (auto& s : part) out.push_back(std::move(s));
    return out;
#endif
}

namespace {

// saturating {0,1,2} arithmetic for path counting; 2 means "2 or more"
int sat_of(const Mult& m) {
    if (m.infinite) return 2;
    if (m.count >= 2) return 2;
    return int(m.count);
}
int sat_add(int a, int b) { return std::min(a + b, 2); }
int sat_mul(int a, int b) { return std::min(a * b, 2); }

// cycle detection restricted to the vertices flagged in `in`
bool induced_has_cycle(const Graph& g, const std::vector<bool>& in) {
    std::size_t n = g.size();
    std::vector<int> color(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (!in[s] || color[s] != 0) continue;
        stack.push_back({s, 0});
        color[s] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            bool descended = false;
            for (std::size_t w = next; w < n; ++w) {
                if (!in[w] || g.mult(v, w).zero()) continue;
                if (color[w] == 1) return true;
                if (color[w] == 0) {
                    next = w + 1;
                    stack.push_back({w, 0});
                    color[w] = 1;
                    descended = true;
                    break;
                }
            }
            if (!descended) {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

// topological order of the induced subgraph (must be acyclic)
std::vector<std::size_t> induced_topo(const Graph& g, const std::vector<bool>& in) {
    std::size_t n = g.size();
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (!in[v]) continue;
        for (std::size_t w = 0; w < n; ++w)
            if (in[w] && !g.mult(v, w).zero()) ++indeg[w];
    }
    std::vector<std::size_t> order, todo;
    for (std::size_t v = 0; v < n; ++v)
        if (in[v] && indeg[v] == 0) todo.push_back(v);
    while (!todo.empty()) {
        std::size_t v = todo.back();
        todo.pop_back();
        order.push_back(v);
        for (std::size_t w = 0; w < n; ++w)
            if (in[w] && !g.mult(v, w).zero() && --indeg[w] == 0) todo.push_back(w);
    }
    return order;
}

} // namespace

std::vector<std::size_t> hereditary_saturated_closure(const Graph& g,
                                                      const std::vector<std::size_t>& seed) {
    std::vector<bool> in(g.size(), false);
    for (std::size_t v : seed) in.at(v) = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t v = 0; v < g.size(); ++v) {
            if (in[v]) {
                for (std::size_t w : g.out_neighbors(v))
                    if (!in[w]) {
                        in[w] = true;
                        changed = true;
                    }
            } else if (g.is_regular(v)) {
                bool all_inside = true;
                for (std::size_t w : g.out_neighbors(v))
                    if (!in[w]) {
                        all_inside = false;
                        break;
                    }
                if (all_inside) {
                    in[v] = true;
                    changed = true;
                }
            }
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (in[v]) out.push_back(v);
    return out;
}

Adjacency adjacency(const Graph& g) {
    Adjacency a{IntMatrix::zero(g.size(), g.size()), {}};
    for (std::size_t v = 0; v < g.size(); ++v)
        for (std::size_t w = 0; w < g.size(); ++w) {
            const Mult& m = g.mult(v, w);
            if (m.infinite)
                a.infinite.emplace_back(v, w);
            else
                a.counts.at(v, w) = m.count;
        }
    return a;
}

ReturnPathSummary count_return_paths(const Graph& g) {
    std::size_t n = g.size();
    ReturnPathSummary s{std::vector<int>(n, 0), true};
    for (std::size_t v = 0; v < n; ++v) {
        int cnt = sat_of(g.mult(v, v));  // loop edges are length-1 returns
        if (cnt < 2) {
            // longer returns run through vertices both reachable from v
            // and leading back to v, never touching v in between
            std::vector<bool> fwd = g.forward_set(v);
            std::vector<bool> bwd = g.backward_set(v);
            std::vector<bool> r(n, false);
            bool any = false;
            for (std::size_t w = 0; w < n; ++w) {
                r[w] = w != v && fwd[w] && bwd[w];
                any = any || r[w];
            }
            if (any) {
                if (induced_has_cycle(g, r)) {
                    cnt = 2;  // a cycle strictly between departures yields infinitely many
                } else {
                    std::vector<std::size_t> topo = induced_topo(g, r);
                    std::vector<int> paths(n, 0);  // returns from w to v within r
                    for (std::size_t i = topo.size(); i-- > 0;) {
                        std::size_t w = topo[i];
                        int acc = sat_of(g.mult(w, v));
                        for (std::size_t x = 0; x < n; ++x)
                            if (r[x] && paths[x] > 0)
                                acc = sat_add(acc, sat_mul(sat_of(g.mult(w, x)), paths[x]));
                        paths[w] = acc;
                    }
                    for (std::size_t w = 0; w < n; ++w)
                        if (r[w] && paths[w] > 0)
                            cnt = sat_add(cnt, sat_mul(sat_of(g.mult(v, w)), paths[w]));
                }
            }
        }
        s.counts[v] = cnt;
        if (cnt == 1) s.no_unique_return = false;
    }
    return s;
}

std::string to_string(SimpleClass c) {
    switch (c) {
        case SimpleClass::NotSimple: return "not-simple";
        case SimpleClass::SimpleAF: return "simple-af";
        case SimpleClass::SimplePurelyInfinite: return "simple-purely-infinite";
    }
    return "?";
}

Classification classify_simple(const Graph& g) {
    if (g.size() == 0) return {SimpleClass::NotSimple, "no vertices"};
    // every proper invariant subset contains the closure of one of its
    // points, so checking single-vertex closures suffices
    for (std::size_t v = 0; v < g.size(); ++v) {
        auto cl = hereditary_saturated_closure(g, {v});
        if (cl.size() == g.size()) continue;
        std::string names;
        for (std::size_t u : cl) names += (names.empty() ? "" : ",") + g.name(u);
        return {SimpleClass::NotSimple, "proper invariant subset {" + names + "}"};
    }
    if (!g.has_cycle())
        return {SimpleClass::SimpleAF, "no proper invariant subsets and no cycles"};
    ReturnPathSummary rp = count_return_paths(g);
    for (std::size_t v = 0; v < g.size(); ++v)
        if (rp.counts[v] == 1)
            return {SimpleClass::NotSimple,
                    "vertex " + g.name(v) + " has a unique first-return path"};
    return {SimpleClass::SimplePurelyInfinite,
            "no proper invariant subsets, cycles exist, no unique returns"};
}

IdealQuotient split_by_ideal(const Graph& g, const std::vector<std::size_t>& subset) {
    if (!is_hereditary(g, subset) || !is_saturated(g, subset))
        throw NotHereditarySaturated("subset does not support an ideal");
    std::vector<bool> in = to_mask(g, subset);
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (in[v] || !g.is_infinite_emitter(v)) continue;
        bool outside_infinite = false;
        Int outside_count = 0;
        for (std::size_t w = 0; w < g.size(); ++w) {
            if (in[w]) continue;
            const Mult& m = g.mult(v, w);
            if (m.infinite) outside_infinite = true;
            else outside_count += m.count;
        }
        if (!outside_infinite && outside_count > 0)
            throw NotOneIdeal("vertex " + g.name(v) +
                              " emits infinitely into the subset but finitely outside");
    }
    IdealQuotient iq;
    for (std::size_t v = 0; v < g.size(); ++v)
        (in[v] ? iq.ideal_vertices : iq.quotient_vertices).push_back(v);
    iq.ideal = induced_subgraph(g, iq.ideal_vertices);
    iq.quotient = induced_subgraph(g, iq.quotient_vertices);
    return iq;
}

} // namespace gck
