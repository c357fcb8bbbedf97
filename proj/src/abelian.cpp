#include "gck/abelian.hpp"

#include <sstream>

namespace gck {

FgAbelianGroup::FgAbelianGroup(IntMatrix relations)
    : rel_(std::move(relations)), s_(smith(rel_)), uinv_(inverse_unimodular(s_.u)) {
    std::size_t n = rel_.rows();
    std::size_t chain = std::min(n, rel_.cols());
    for (std::size_t i = 0; i < n; ++i) {
        Int d = i < chain ? s_.d.at(i, i) : Int(0);
        if (d == 0) {
            free_rows_.push_back(i);
        } else if (d >= 2) {
            tor_rows_.push_back(i);
            torsion_.push_back(d);
        }
        // d == 1: the coordinate is killed entirely
    }
}

FgAbelianGroup FgAbelianGroup::free_group(std::size_t rank) {
    return FgAbelianGroup(IntMatrix(rank, 0));
}

FgAbelianGroup FgAbelianGroup::trivial() { return free_group(0); }

FgAbelianGroup FgAbelianGroup::from_orders(const Vec& torsion, std::size_t free_rank) {
    std::size_t t = torsion.size();
    IntMatrix rel(t + free_rank, t);
    for (std::size_t i = 0; i < t; ++i) {
        if (torsion[i] < 1) throw InconsistentData("cyclic order must be positive");
        rel.at(i, i) = torsion[i];
    }
    return FgAbelianGroup(rel);
}

bool FgAbelianGroup::same_canonical_form(const FgAbelianGroup& o) const {
    return torsion_ == o.torsion_ && free_rows_.size() == o.free_rows_.size();
}

Vec FgAbelianGroup::reduce(const Vec& x) const {
    if (x.size() != ambient_rank()) throw NonConformable("reduce");
    Vec y = s_.u.apply(x);
    Vec c(canonical_rank());
    for (std::size_t i = 0; i < tor_rows_.size(); ++i) {
        Int r = y[tor_rows_[i]] % torsion_[i];
        if (r < 0) r += torsion_[i];
        c[i] = r;
    }
    for (std::size_t i = 0; i < free_rows_.size(); ++i)
        c[tor_rows_.size() + i] = y[free_rows_[i]];
    return c;
}

Vec FgAbelianGroup::canonical_generator(std::size_t i) const {
    std::size_t row = i < tor_rows_.size() ? tor_rows_[i]
                                           : free_rows_[i - tor_rows_.size()];
    return uinv_.col(row);
}

Vec FgAbelianGroup::lift(const Vec& coords) const {
    if (coords.size() != canonical_rank()) throw NonConformable("lift");
    Vec x(ambient_rank());
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (coords[i] != 0)
            x = x + scale(coords[i], canonical_generator(i));
    return x;
}

bool FgAbelianGroup::is_zero_class(const Vec& x) const { return gck::is_zero(reduce(x)); }

bool FgAbelianGroup::equal(const Vec& x, const Vec& y) const { return is_zero_class(x - y); }

Int FgAbelianGroup::order_of(const Vec& x) const {
    Vec c = reduce(x);
    for (std::size_t i = tor_rows_.size(); i < c.size(); ++i)
        if (c[i] != 0) return 0;
    Int ord = 1;
    for (std::size_t i = 0; i < tor_rows_.size(); ++i) {
        if (c[i] == 0) continue;
        Int d = torsion_[i] / boost::multiprecision::gcd(torsion_[i], c[i]);
        ord = boost::multiprecision::lcm(ord, d);
    }
    return ord;
}

bool FgAbelianGroup::member_of_subgroup(const Vec& x, const IntMatrix& gens) const {
    if (gens.rows() != ambient_rank()) throw NonConformable("member_of_subgroup");
    return solve(hcat(gens, rel_), x).has_value();
}

bool FgAbelianGroup::subgroup_contains(const IntMatrix& sup, const IntMatrix& sub) const {
    for (std::size_t j = 0; j < sub.cols(); ++j)
        if (!member_of_subgroup(sub.col(j), sup)) return false;
    return true;
}

bool FgAbelianGroup::subgroup_equal(const IntMatrix& a, const IntMatrix& b) const {
    return subgroup_contains(a, b) && subgroup_contains(b, a);
}

bool FgAbelianGroup::subgroup_full(const IntMatrix& gens) const {
    for (std::size_t i = 0; i < canonical_rank(); ++i)
        if (!member_of_subgroup(canonical_generator(i), gens)) return false;
    return true;
}

std::string FgAbelianGroup::to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank() == 1) {
        os << "Z";
        first = false;
    } else if (free_rank() > 1) {
        os << "Z^" << free_rank();
        first = false;
    }
    for (const Int& d : torsion_) {
        if (!first) os << " + ";
        os << "Z/" << d;
        first = false;
    }
    return os.str();
}

FgAbelianGroup direct_sum(const FgAbelianGroup& a, const FgAbelianGroup& b) {
    const IntMatrix& ra = a.relations();
    const IntMatrix& rb = b.relations();
    IntMatrix top = hcat(ra, IntMatrix(ra.rows(), rb.cols()));
    IntMatrix bot = hcat(IntMatrix(rb.rows(), ra.cols()), rb);
    return FgAbelianGroup(vcat(top, bot));
}

bool GroupHom::well_defined() const {
    if (h.rows() != tgt.ambient_rank() || h.cols() != src.ambient_rank()) return false;
    IntMatrix hr = h * src.relations();
    for (std::size_t j = 0; j < hr.cols(); ++j)
        if (!tgt.is_zero_class(hr.col(j))) return false;
    return true;
}

bool GroupHom::is_zero_map() const {
    for (std::size_t j = 0; j < h.cols(); ++j)
        if (!tgt.is_zero_class(h.col(j))) return false;
    return true;
}

bool GroupHom::equals(const GroupHom& o) const {
    if (h.rows() != o.h.rows() || h.cols() != o.h.cols()) return false;
    IntMatrix diff = h - o.h;
    for (std::size_t j = 0; j < diff.cols(); ++j)
        if (!tgt.is_zero_class(diff.col(j))) return false;
    return true;
}

GroupHom induced_hom(const FgAbelianGroup& src, const FgAbelianGroup& tgt, IntMatrix h) {
    GroupHom f{src, tgt, std::move(h)};
    if (!f.well_defined())
        throw InconsistentData("matrix does not descend to a homomorphism");
    return f;
}

GroupHom identity_hom(const FgAbelianGroup& g) {
    return GroupHom{g, g, IntMatrix::identity(g.ambient_rank())};
}

GroupHom zero_hom(const FgAbelianGroup& src, const FgAbelianGroup& tgt) {
    return GroupHom{src, tgt, IntMatrix(tgt.ambient_rank(), src.ambient_rank())};
}

GroupHom compose(const GroupHom& g, const GroupHom& f) {
    if (f.tgt.ambient_rank() != g.src.ambient_rank() ||
        f.tgt.relations() != g.src.relations())
        throw NonConformable("compose: middle groups differ");
    return GroupHom{f.src, g.tgt, g.h * f.h};
}

IntMatrix kernel_generators(const GroupHom& f) {
    IntMatrix k = kernel_basis(hcat(f.h, f.tgt.relations()));
    std::vector<std::size_t> rows(f.src.ambient_rank());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<std::size_t> cols(k.cols());
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
    return k.select(rows, cols);
}

IntMatrix image_generators(const GroupHom& f) { return f.h; }

bool is_injective(const GroupHom& f) {
    IntMatrix k = kernel_generators(f);
    for (std::size_t j = 0; j < k.cols(); ++j)
        if (!f.src.is_zero_class(k.col(j))) return false;
    return true;
}

bool is_surjective(const GroupHom& f) { return f.tgt.subgroup_full(f.h); }

bool is_isomorphism(const GroupHom& f) {
    // between finitely generated groups of the same canonical form,
    // surjectivity already forces injectivity
    return f.src.same_canonical_form(f.tgt) && is_surjective(f);
}

GroupHom inverse_of(const GroupHom& f) {
    if (!is_isomorphism(f)) throw InconsistentData("inverse of a non-isomorphism");
    std::size_t n = f.tgt.ambient_rank();
    std::size_t m = f.src.ambient_rank();
    IntMatrix sys = hcat(f.h, f.tgt.relations());
    IntMatrix hinv(m, n);
    for (std::size_t k = 0; k < n; ++k) {
        Vec e(n);
        e[k] = 1;
        auto sol = solve(sys, e);
        if (!sol) throw InconsistentData("inverse: surjectivity check lied");
        Vec x(sol->begin(), sol->begin() + m);
        hinv.set_col(k, x);
    }
    GroupHom inv{f.tgt, f.src, hinv};
    if (!inv.well_defined()) throw InconsistentData("inverse not well defined");
    return inv;
}

std::optional<Vec> preimage(const GroupHom& f, const Vec& y) {
    auto sol = solve(hcat(f.h, f.tgt.relations()), y);
    if (!sol) return std::nullopt;
    return Vec(sol->begin(), sol->begin() + f.src.ambient_rank());
}

bool exact_at(const GroupHom& f, const GroupHom& g) {
    if (f.tgt.ambient_rank() != g.src.ambient_rank() ||
        f.tgt.relations() != g.src.relations())
        throw NonConformable("exact_at: middle groups differ");
    // im f inside ker g
    if (!compose(g, f).is_zero_map()) return false;
    // ker g inside im f
    IntMatrix ker = kernel_generators(g);
    for (std::size_t j = 0; j < ker.cols(); ++j)
        if (!f.tgt.member_of_subgroup(ker.col(j), f.h)) return false;
    return true;
}

} // namespace gck
