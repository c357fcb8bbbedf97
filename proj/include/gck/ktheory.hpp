#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gck/abelian.hpp"
#include "gck/graph.hpp"

namespace gck {

// Three-valued verdict for membership tests and hypothesis checks: a
// definite yes, a definite no, or an honest "undecided within budget".
enum class Tri { Pass, Fail, Inconclusive };

const char* to_string(Tri t);
// Conjunction: any Fail wins, then any Inconclusive, else Pass.
Tri tri_all(Tri a, Tri b);
Tri tri_from(bool b);

// Iteration budget shared by positivity tests and orbit scans.
inline constexpr int kDefaultCap = 64;

// K-theory matrix of a finite graph: transposed adjacency minus
// identity, one row per vertex, one column per regular vertex.
// Singular vertices (sinks and infinite emitters) have no column.
IntMatrix kmap_matrix(const Graph& g);

// k0 = cokernel and k1 = kernel of the K-theory matrix.  Elements of k0
// are ambient vectors over the vertices; k1 is free on the kernel basis
// columns (which live in regular-vertex coordinates).
struct KPair {
    FgAbelianGroup k0;
    FgAbelianGroup k1;
    IntMatrix k1_basis;
    std::vector<std::size_t> column_vertex;  // kmap column -> vertex index
    std::optional<Vec> unit;                 // ambient unit representative
};

KPair k_groups(const Graph& g);

// Ambient representative of the class of the vertex projection.
Vec vertex_class(const Graph& g, std::size_t v);
// Ambient representative of the class of the sum of all vertex
// projections (the unit for a finite graph).
Vec unit_class(const Graph& g);

// ----------------------------------------------------------- cones

struct ConeCert;

// Every class is positive (purely infinite simple case).
struct FullCone {};

// Cone generated by classes forming a basis of a free k0; membership is
// decided by the signs of the unique coordinates over the generators.
struct SimplicialCone {
    std::vector<Vec> generators;  // ambient representatives
};

// Stationary dimension-group order.  stage_classes are ambient
// representatives of the stage basis; a class is positive iff some
// transpose-iterate of the block maps its stage coordinates to a
// nonnegative vector.
struct StationaryCone {
    IntMatrix block;
    std::vector<Vec> stage_classes;
};

// Order data supplied by the caller: only "is the cone everything" is
// known, so membership of nonzero classes in a non-full declared cone
// is undecidable here.
struct DeclaredCone {
    bool full = false;
};

// Cone on a group presented as inner + Z (last ambient coordinate):
// (q, n) is positive iff n >= 1, or n == 0 and q is inner-positive.
struct ExtensionCone {
    std::shared_ptr<const ConeCert> inner;
};

struct ConeCert {
    std::variant<FullCone, SimplicialCone, StationaryCone, DeclaredCone, ExtensionCone> data;

    // Whether the cone is all of g.  Simplicial and stationary cones on
    // nontrivial free groups never are.
    bool is_full_for(const FgAbelianGroup& g) const;
    std::string to_string() const;
};

Tri cone_member(const ConeCert& c, const FgAbelianGroup& g, const Vec& x,
                int cap = kDefaultCap);

// Order certificate for a finite graph's k0: FullCone when the graph is
// simple purely infinite, simplicial on the sink classes when simple
// AF.  Throws Unsupported otherwise (callers use declared flags).
ConeCert cone_certificate(const Graph& g);

// ----------------------------------------------------------- scales

struct ScaleCert;
struct ScaledGroup;

// Scale equals the positive cone (stable algebras).
struct FullScale {};

// x in the scale iff 0 <= x <= s for one of the listed bounds.
struct BoundedByScale {
    std::vector<Vec> bounds;
};

// x in the scale iff 0 <= x <= block^n * seed for some n <= cap.
struct OrbitScale {
    Vec seed;
    IntMatrix block;
};

// x in the scale iff 0 <= x <= u.
struct UnitScale {
    Vec u;
};

// Scale on an extension group inner + Z whose base point is the class
// with last coordinate 1: x = (q, n) belongs iff x is positive and
// x <= basepoint + (embedded s) for some s in the inner scale.  Only
// n = 0 and n = 1 can occur in the scale.
struct HullScale {
    std::shared_ptr<const ScaledGroup> inner;
};

// Scale induced on a subgroup H1 of a scaled host H2 by a base point
// h2: h belongs iff h is positive and h2 + eps(h) is in the host scale.
struct InducedScaleCert {
    std::shared_ptr<const ScaledGroup> host;
    Vec h2;          // ambient in the host presentation
    IntMatrix eps;   // ambient embedding H1 -> H2
};

struct ScaleCert {
    std::variant<FullScale, BoundedByScale, OrbitScale, UnitScale, HullScale,
                 InducedScaleCert>
        data;
    std::string to_string() const;
};

// Group together with its order and scale certificates.
struct ScaledGroup {
    FgAbelianGroup group;
    ConeCert cone;
    ScaleCert scale;
};

Tri scale_member(const ScaledGroup& sg, const Vec& x, int cap = kDefaultCap);
// Does some scale element dominate the class of x?
Tri scale_dominates(const ScaledGroup& sg, const Vec& x, int cap = kDefaultCap);

// ------------------------------------------- stationary positivity

enum class DgVerdict { Positive, NotPositive, Inconclusive };
const char* to_string(DgVerdict v);

// Primitivity of a square nonnegative matrix (some power is entrywise
// strictly positive), decided by boolean powers up to the sharp
// (n-1)^2 + 1 exponent bound.
bool is_primitive(const IntMatrix& a);

// Positivity of the class with stage coordinates x in the stationary
// dimension group of the primitive block a.  Iterates y <- a^t y up to
// cap times: a nonnegative iterate proves Positive, a nonpositive
// iterate with a strict entry proves NotPositive.  Throws NotPrimitive.
DgVerdict dg_positive(const IntMatrix& a, const Vec& x, int cap = kDefaultCap);

// ------------------------------------------------- staged graphs

// Chain attached to a core vertex, one vertex per stage.  Inward tails
// point toward the core (each stage feeds the previous one); outward
// tails point away and end in a sink at the deepest stage.
struct StagedTail {
    std::string attach;
    bool inward = true;
    std::string base_name = "t";
};

// Stationary repetition: stage-0 vertices are core vertices, and each
// stage maps to the next with the block's multiplicities; the deepest
// stage consists of sinks.
struct StagedBlock {
    std::vector<std::string> names;
    IntMatrix block;
};

// Finite core plus infinite attachments, materialized on demand.
struct StagedGraph {
    Graph core;
    std::vector<StagedTail> tails;
    std::optional<StagedBlock> block;

    Graph truncate(std::size_t depth) const;
};

// K-groups of depth-truncations computed until two consecutive depths
// agree in canonical form and in the canonical matrix of the step map
// (the hom induced by including one truncation in the next).
struct StagedKReport {
    KPair stable;
    std::size_t depth;           // first stabilized depth
    IntMatrix step_k0;           // canonical matrix of the step map on k0
    IntMatrix step_k1;
    bool step_identity;          // both step maps are identities
    std::optional<ConeCert> cone;
    std::string note;
};

// Throws NoStabilization when depth_cap is reached without agreement.
StagedKReport staged_k_groups(const StagedGraph& s, std::size_t depth_cap = 16);

// Canonical-coordinate matrix of a hom (columns = reduced images of the
// source's canonical generators).
IntMatrix canonical_matrix(const GroupHom& f);

} // namespace gck
