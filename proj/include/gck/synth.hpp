#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "gck/abelian.hpp"
#include "gck/graph.hpp"
#include "gck/int_matrix.hpp"
#include "gck/ktheory.hpp"
#include "gck/sixterm.hpp"

namespace gck {

// ------------------------------------------------------------- glue

// Block upper triangular gluing of two relation matrices:
//   [ a  y ]
//   [ 0  b ]
// This is the relation matrix of a two-piece graph whose quotient
// block is b and whose ideal block is a, with y counting the edges
// dropped from quotient vertices into the ideal.
IntMatrix glued_matrix(const IntMatrix& a, const IntMatrix& y, const IntMatrix& b);

// Adjust the off-diagonal block of a glued presentation so that it
// dominates a prescribed floor and the distinguished column class hits
// a prescribed target, without changing the cokernel or the kernel.
//
// Data: the diagonal blocks a (n1 x n1') and b (n3 x n3'), the current
// off-diagonal block y and the floor z (both n1 x n3'), a vector x of
// length n1, and a pair of rows of b with b.row(dom_low) strictly
// below b.row(dom_high).  The distinguished class is [(x, 1)] where 1
// fills the b rows.  alpha1 identifies coker(a) with an abstract g1,
// alpha2 identifies coker(glued) with an abstract g2, and eps embeds
// g1 into g2; the composite alpha2 restricted to the ideal coordinates
// must agree with eps after alpha1.  g2 is the target class for the
// distinguished column.
struct GlueProblem {
    IntMatrix a, b, y, z;
    Vec x;
    std::size_t dom_low = 0, dom_high = 0;
    GroupHom alpha1;  // coker(a)  -> g1
    GroupHom eps;     // g1        -> g2
    GroupHom alpha2;  // coker(glued(a, y, b)) -> g2
    Vec g2;           // desired image of the distinguished class
};

// y_prime = y + q * b with q = c * q'' + q': q' puts the solved column
// vector in the first column, q'' has +1 at dom_high and -1 at dom_low
// in every row, and c is the smallest count >= 1 making y_prime >= z.
// The transition [[I, -q], [0, I]] carries the new presentation to the
// old one, and adjusted_alpha2 is alpha2 composed with it.
struct GlueResult {
    IntMatrix y_prime;
    IntMatrix q;
    Int c{};
    Vec z_lift;  // row sums of q
    GroupHom adjusted_alpha2;  // coker(glued(a, y_prime, b)) -> g2
    std::string log;
};

GlueResult glue(const GlueProblem& p);

// --------------------------------------- simple purely infinite piece

// A realized graph together with the identification of its k0 with the
// prescribed group.  dom_low / dom_high index rows of the vertex
// matrix with one strictly below the other, ready for a later glue.
struct PiRealization {
    Graph graph;
    GroupHom alpha;  // coker(vertex matrix) -> prescribed group, [1..1] -> elem
    std::size_t dom_low = 0, dom_high = 0;
};

// Builds a simple purely infinite graph with k0 = g, k1 free of rank
// k1_rank, and the class of the all-ones vector equal to elem.  Needs
// k1_rank <= free rank of g (throws Infeasible otherwise).  The result
// is verified by recomputation before returning.
PiRealization realize_pi_simple_cert(const FgAbelianGroup& g, const Vec& elem,
                                     std::size_t k1_rank);
Graph realize_pi_simple(const FgAbelianGroup& g, const Vec& elem, std::size_t k1_rank);

// ------------------------------------------------------ induced scale

struct InducedScale {
    ScaleCert cert;
    std::vector<std::string> notes;
};

// The scale induced on a subgroup by a base point of a scaled host:
// h belongs iff h is positive and h2_elem + eps(h) lies in the host
// scale.  Requires gamma(h2_elem) = 1 and h2_elem in the host scale
// (throws BadBasePoint).  The certificate is simplified when the host
// data allows it: a full host scale induces the full scale, and a hull
// over an inner scale, based at its own base point, restricts to that
// inner scale.
InducedScale induced_scale(const ScaledGroup& host, const Vec& h2_elem,
                           const GroupHom& eps, const GroupHom& gamma);

// ----------------------------------------------------- scaled AF piece

// Builds a staged graph whose stabilized k-theory realizes the scaled
// ordered group h1: a single sink with one inward tail for a rank-one
// simplicial cone, a stationary block for a primitive stationary cone.
// The scale must equal the cone (full, or an orbit scale that exhausts
// it).  Anything else throws UnsupportedCertificate.  The result is
// verified through its stabilized k-theory before returning.
StagedGraph realize_af_scaled(const ScaledGroup& h1);

// --------------------------------------------------------- synthesize

// A realized one-ideal extension: the graph (finite, or staged when
// the ideal piece is an AF limit), the core vertices of its unique
// proper ideal, and a verified isomorphism from the recomputed
// augmented invariant to the requested one.
struct SynthesisResult {
    std::variant<Graph, StagedGraph> graph;
    std::vector<std::size_t> ideal_vertices;  // indices into the (core) graph
    std::size_t depth = 0;  // staged outputs: depth whose truncation was checked
    IsoCertificate certificate;
    AugmentedInvariant recomputed;
    std::vector<std::string> log;
};

// Constructs a graph whose one-ideal decomposition realizes the
// requested augmented invariant.  The request is first checked for
// internal consistency (throws InconsistentData) and against the
// realizability hypotheses (throws HypothesesNotMet naming the failed
// ones); undecided hypotheses are recorded in the log as assumptions.
// The ideal order certificate picks the construction: a full cone
// yields a finite graph, a rank-one simplicial or primitive stationary
// cone a staged one.  Staged outputs are verified at two consecutive
// truncation depths.  Never returns an unverified graph (throws
// VerificationFailed or ConstructionFailed instead).
SynthesisResult synthesize(const AugmentedInvariant& request);

} // namespace gck
