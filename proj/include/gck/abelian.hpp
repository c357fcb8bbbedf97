#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gck/smith.hpp"

namespace gck {

// Finitely generated abelian group presented as Z^n modulo the column
// span of a relations matrix (n rows).  Elements are ambient vectors in
// Z^n; two vectors represent the same element when their difference
// lies in the column span.
class FgAbelianGroup {
public:
    explicit FgAbelianGroup(IntMatrix relations);

    static FgAbelianGroup free_group(std::size_t rank);
    static FgAbelianGroup trivial();
    // Direct sum of cyclic groups: Z/d for each order (>= 2), plus Z^free_rank.
    static FgAbelianGroup from_orders(const Vec& torsion, std::size_t free_rank);

    std::size_t ambient_rank() const { return rel_.rows(); }
    const IntMatrix& relations() const { return rel_; }

    // Invariant-factor data: torsion orders (each >= 2, each dividing the
    // next) and the free rank.  Two groups are isomorphic iff these match.
    const Vec& torsion() const { return torsion_; }
    std::size_t free_rank() const { return free_rows_.size(); }
    bool is_trivial() const { return torsion_.empty() && free_rows_.empty(); }
    bool same_canonical_form(const FgAbelianGroup& o) const;

    // Canonical coordinates: one per torsion factor (reduced into [0, d))
    // followed by one per free factor.  Zero iff the element is zero.
    std::size_t canonical_rank() const { return torsion_.size() + free_rows_.size(); }
    Vec reduce(const Vec& x) const;
    // Ambient representative of the i-th canonical generator.
    Vec canonical_generator(std::size_t i) const;
    // Ambient vector with the given canonical coordinates.
    Vec lift(const Vec& coords) const;

    bool is_zero_class(const Vec& x) const;
    bool equal(const Vec& x, const Vec& y) const;
    // Order of the class of x; 0 means infinite order.
    Int order_of(const Vec& x) const;

    // Subgroup spans are given by generator columns (ambient coordinates).
    bool member_of_subgroup(const Vec& x, const IntMatrix& gens) const;
    bool subgroup_contains(const IntMatrix& sup, const IntMatrix& sub) const;
    bool subgroup_equal(const IntMatrix& a, const IntMatrix& b) const;
    bool subgroup_full(const IntMatrix& gens) const;

    std::string to_string() const;  // e.g. "Z^2 + Z/2 + Z/6", "0"

private:
    IntMatrix rel_;
    SmithDecomposition s_;
    IntMatrix uinv_;
    std::vector<std::size_t> tor_rows_;   // rows of u*x giving torsion coords
    std::vector<std::size_t> free_rows_;  // rows of u*x giving free coords
    Vec torsion_;
};

FgAbelianGroup direct_sum(const FgAbelianGroup& a, const FgAbelianGroup& b);

// Homomorphism between presented groups, stored as an ambient matrix
// (tgt.ambient_rank x src.ambient_rank) acting on representatives.
struct GroupHom {
    FgAbelianGroup src;
    FgAbelianGroup tgt;
    IntMatrix h;

    Vec apply(const Vec& x) const { return h.apply(x); }
    bool well_defined() const;
    bool is_zero_map() const;
    bool equals(const GroupHom& o) const;
};

// Builds the hom and verifies well-definedness (throws InconsistentData).
GroupHom induced_hom(const FgAbelianGroup& src, const FgAbelianGroup& tgt, IntMatrix h);
GroupHom identity_hom(const FgAbelianGroup& g);
GroupHom zero_hom(const FgAbelianGroup& src, const FgAbelianGroup& tgt);
GroupHom compose(const GroupHom& g, const GroupHom& f);  // g after f

// Generators (ambient columns) of ker f and im f inside the relevant group.
IntMatrix kernel_generators(const GroupHom& f);
IntMatrix image_generators(const GroupHom& f);

bool is_injective(const GroupHom& f);
bool is_surjective(const GroupHom& f);
bool is_isomorphism(const GroupHom& f);
GroupHom inverse_of(const GroupHom& f);  // throws InconsistentData if not iso

// Some x with f(x) == y in the target, if any.
std::optional<Vec> preimage(const GroupHom& f, const Vec& y);

// im f == ker g inside f.tgt (which must equal g.src structurally).
bool exact_at(const GroupHom& f, const GroupHom& g);

} // namespace gck
