#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gck/sixterm.hpp"

namespace gck {

// Where a simple piece falls in the dichotomy for simple graph algebras:
// approximately finite-dimensional, or purely infinite (Kirchberg).
enum class PieceKind { AF, Kirchberg };
const char* to_string(PieceKind k);

// Declared shape of a K-group slot that cannot be presented finitely.
// When not_finitely_generated is set, the corresponding group in the
// invariant is a placeholder and only this record is consulted.
struct GroupMeta {
    bool not_finitely_generated = false;
    bool rank_infinite = false;       // declared rank is infinite
    std::optional<Int> rank;          // declared rank when finite and known
};

// Input to the extension criteria: a six-term invariant, computed from a
// graph or declared in a file, plus the case data the bare K-theory does
// not carry (which pieces are AF, whether the ideal is a stabilization,
// and shape overrides for groups given only by declaration).
struct ExtensionData {
    SixTermInvariant inv;
    PieceKind ideal_kind = PieceKind::Kirchberg;
    PieceKind quotient_kind = PieceKind::Kirchberg;
    bool ideal_stabilized = false;
    GroupMeta meta_k0i, meta_k0a, meta_k0q, meta_k1i, meta_k1a, meta_k1q;
    // Overrides the exponential-map test when its endpoints are only
    // declared; unset means "read it off inv.del0".
    std::optional<bool> del0_declared_zero;
};

enum class CondStatus { Pass, Fail, Inconclusive, Vacuous };
const char* to_string(CondStatus s);

struct ConditionResult {
    std::string name;  // "(1)", "(3)(b)", "(iv)", ...
    CondStatus status = CondStatus::Inconclusive;
    std::string note;
};

// Structured verdict: overall is Fail if any applicable item fails,
// Inconclusive if any item is undecided, Pass otherwise.
struct Verdict {
    Tri overall = Tri::Inconclusive;
    std::vector<ConditionResult> items;

    const ConditionResult* find(const std::string& name) const;
    std::string to_string() const;  // one line per condition
};

// The criterion for the middle algebra of a one-ideal extension with
// simple graph-algebra pieces to be a graph algebra itself:
//   (1) the exponential map is zero;
//   (2) if the quotient's order is full then so is the middle one's;
//   (3) when the middle algebra is unital: (a) the ideal's k0 is
//       finitely generated, (b) rank k1 <= rank k0 for the ideal, and
//       (c) a proper ideal cone forces ideal k0 = Z.
// (3) is vacuous unless the data is doubly unital (case 2).
Verdict check_extension(const ExtensionData& d);

// For a unital extension of a unital simple quotient by a stabilized
// unital simple ideal, the criterion above collapses: the middle
// algebra is a graph algebra iff it has real rank zero iff the
// exponential map vanishes.  Inputs outside that shape are rejected.
Verdict check_corollary(const ExtensionData& d);

// The nine realizability hypotheses a synthesizable augmented invariant
// must satisfy, checked certificate-by-certificate:
//   (i)    H1 a simple dimension group with scale = cone;
//   (ii)   the order on H2 is the extension order over H1 and the scale
//          meets level one;
//   (iii)  the H2 scale is generating, hereditary, upward directed and
//          has no largest element;
//   (iv)   (H3, cone, scale) = (Z, N, {0,1});
//   (v)    eta1 an order isomorphism;
//   (vi)   G2 fully ordered;
//   (vii)  G3 finitely generated and fully ordered;
//   (viii) F1 = 0;
//   (ix)   F3 free with rank F3 <= rank G3.
// Items outside the decidable certificate classes come back
// Inconclusive, never guessed.
Verdict check_hypotheses(const AugmentedInvariant& a, int cap = kDefaultCap);

}  // namespace gck
