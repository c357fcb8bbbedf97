#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gck/abelian.hpp"
#include "gck/graph.hpp"
#include "gck/ktheory.hpp"

namespace gck {

// The cyclic exact invariant of an algebra with exactly one ideal: six
// groups, six maps, and the order and scale data carried at the k0
// positions.  Maps run
//
//   k0i --iota0--> k0a --pi0--> k0q --del0--> k1i --iota1--> k1a
//       --pi1--> k1q --del1--> k0i.
//
// unital_case: 0 = neither the algebra nor its quotient is unital,
// 1 = only the quotient is, 2 = both are.
struct SixTermInvariant {
    FgAbelianGroup k0i, k0a, k0q;
    FgAbelianGroup k1i, k1a, k1q;
    GroupHom iota0, pi0, del0, iota1, pi1, del1;

    ConeCert cone_i, cone_a, cone_q;
    ScaleCert scale_i, scale_q;

    std::optional<Vec> unit_i, unit_a, unit_q;  // ambient unit classes where unital
    int unital_case = 2;

    ScaledGroup ideal_scaled() const { return ScaledGroup{k0i, cone_i, scale_i}; }
    ScaledGroup quotient_scaled() const { return ScaledGroup{k0q, cone_q, scale_q}; }
};

struct ExactnessReport {
    bool ok = true;
    std::vector<std::string> failures;  // names of nodes where im != ker
};

// Builds the invariant of the one-ideal decomposition of e along the
// hereditary saturated subset.  Both pieces must be simple (this is
// what makes the ideal unique); exactness is verified before returning.
SixTermInvariant ksix_from_graph(const Graph& e, const std::vector<std::size_t>& subset);

ExactnessReport verify_exactness(const SixTermInvariant& inv);

// The invariant extended upward by the unitization row: scaled ordered
// groups h1 -> h2 -> h3 over the k0 row, with the distinguished class
// of the lifted unit.  h2 presents h1 plus one free coordinate (the
// base point), h3 is (Z, N, {0,1}).
struct AugmentedInvariant {
    ScaledGroup h1, h2, h3;
    GroupHom eps_tilde;    // h1 -> h2
    GroupHom gamma_tilde;  // h2 -> h3
    GroupHom eta1, eta2, eta3;  // vertical maps into the six-term k0 row
    SixTermInvariant six;
    Vec h2_elem;  // base point in h2's ambient coordinates
    Vec g2_elem;  // its image in k0a
    Vec g3_elem;  // unit class in k0q
};

AugmentedInvariant augmented_from_graph(const Graph& e, const std::vector<std::size_t>& subset);

// The same augmentation built from a bare six-term invariant and a
// prescribed class of the lifted unit in k0a.  h1 is the ideal row as
// scaled by the invariant itself; the base point of h2 maps to the
// given class.  Throws InconsistentData when the pieces do not cohere.
AugmentedInvariant standard_augmentation(const SixTermInvariant& six, const Vec& g2_elem);

// One invertible component of an invariant isomorphism.
struct IsoPair {
    GroupHom fwd;
    GroupHom inv;
};

// Component isomorphisms of an invariant isomorphism.  a1..a3 act on
// the k0 row (order- and unit-respecting), b1..b3 on the k1 row
// (unrestricted), a1t..a3t on the h-row of an augmented invariant
// (scale-preserving).  Verification uses whichever components the
// compared shape requires.
struct IsoCertificate {
    std::optional<IsoPair> a1, a2, a3;
    std::optional<IsoPair> b1, b2, b3;
    std::optional<IsoPair> a1t, a2t, a3t;
};

struct IsoReport {
    bool ok = true;
    bool inconclusive = false;  // a decidable failure was not found, but some probe ran dry
    std::vector<std::string> failures;
    std::vector<std::string> notes;  // skipped aspects (absent unit data and the like)
};

IsoReport iso_verify(const SixTermInvariant& a, const SixTermInvariant& b,
                     const IsoCertificate& cert, int cap = kDefaultCap);
IsoReport iso_verify(const AugmentedInvariant& a, const AugmentedInvariant& b,
                     const IsoCertificate& cert, int cap = kDefaultCap);

// Identity certificate (shape taken from the invariant itself).
IsoCertificate identity_certificate(const SixTermInvariant& a);
IsoCertificate identity_certificate(const AugmentedInvariant& a);

struct IsoSearchResult {
    std::optional<IsoCertificate> certificate;  // verified when present
    bool refuted = false;  // canonical forms differ: definitely not isomorphic
    std::string detail;
};

// Bounded search for an invariant isomorphism.  Free-part matrix
// entries range over [-bound, bound]; torsion images are exhausted.
// An empty result without refutation means only "none found within the
// bound" - never "not isomorphic".
IsoSearchResult iso_search(const SixTermInvariant& a, const SixTermInvariant& b,
                           long long bound = 2);
IsoSearchResult iso_search(const AugmentedInvariant& a, const AugmentedInvariant& b,
                           long long bound = 2);

} // namespace gck
