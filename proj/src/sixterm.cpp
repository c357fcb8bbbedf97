#include "gck/sixterm.hpp"

#include <omp.h>

#include <atomic>
#include <cstdint>
#include <sstream>

#include "gck/error.hpp"
#include "gck/smith.hpp"

namespace gck {

namespace {

IntMatrix padded_identity(std::size_t rows, std::size_t cols) {
    IntMatrix m = IntMatrix::zero(rows, cols);
    for (std::size_t i = 0; i < cols && i < rows; ++i) m.at(i, i) = 1;
    return m;
}

// Coordinates of each column of vecs over the columns of basis; the
// basis is saturated, so failure to solve means a logic error upstream.
IntMatrix rewrite_columns(const IntMatrix& basis, const IntMatrix& vecs, const char* what) {
    IntMatrix m = IntMatrix::zero(basis.cols(), vecs.cols());
    for (std::size_t j = 0; j < vecs.cols(); ++j) {
        auto sol = solve(basis, vecs.col(j));
        if (!sol) throw InconsistentData(std::string(what) + ": vector escapes the kernel basis");
        for (std::size_t i = 0; i < sol->size(); ++i) m.at(i, j) = (*sol)[i];
    }
    return m;
}

} // namespace

SixTermInvariant ksix_from_graph(const Graph& e, const std::vector<std::size_t>& subset) {
    if (subset.empty() || subset.size() >= e.size())
        throw NotOneIdeal("the ideal subset must be nonempty and proper");
    IdealQuotient sp = split_by_ideal(e, subset);
    Classification ci = classify_simple(sp.ideal);
    if (ci.cls == SimpleClass::NotSimple)
        throw NotOneIdeal("ideal piece is not simple: " + ci.reason);
    Classification cq = classify_simple(sp.quotient);
    if (cq.cls == SimpleClass::NotSimple)
        throw NotOneIdeal("quotient piece is not simple: " + cq.reason);

    // uniqueness of the ideal: every vertex must generate either the
    // subset itself or the whole graph (simple pieces alone do not rule
    // out a third invariant subset hiding on the quotient side)
    {
        std::vector<bool> in_h(e.size(), false);
        for (std::size_t v : sp.ideal_vertices) in_h[v] = true;
        for (std::size_t v = 0; v < e.size(); ++v) {
            auto cl = hereditary_saturated_closure(e, {v});
            if (cl.size() == e.size()) continue;
            bool is_h = cl.size() == sp.ideal_vertices.size();
            if (is_h)
                for (std::size_t u : cl)
                    if (!in_h[u]) {
                        is_h = false;
                        break;
                    }
            if (!is_h)
                throw NotOneIdeal("vertex " + e.name(v) +
                                  " generates an invariant subset other than the given one");
        }
    }

    KPair pi = k_groups(sp.ideal);
    KPair pq = k_groups(sp.quotient);
    std::size_t ni = sp.ideal_vertices.size();
    std::size_t nq = sp.quotient_vertices.size();

    IntMatrix mi = kmap_matrix(sp.ideal);
    IntMatrix mq = kmap_matrix(sp.quotient);
    // edges from quotient-side regular vertices down into the ideal
    IntMatrix y = IntMatrix::zero(ni, mq.cols());
    for (std::size_t c = 0; c < mq.cols(); ++c) {
        std::size_t w = sp.quotient_vertices[pq.column_vertex[c]];
        for (std::size_t i = 0; i < ni; ++i) y.at(i, c) = e.mult(w, sp.ideal_vertices[i]).count;
    }
    IntMatrix m = vcat(hcat(mi, y), hcat(IntMatrix::zero(nq, mi.cols()), mq));

    FgAbelianGroup k0a(m);
    IntMatrix ka = kernel_basis(m);
    FgAbelianGroup k1a = FgAbelianGroup::free_group(ka.cols());

    // the glued matrix is the whole graph's relation matrix up to
    // permutation; if the forms disagree something above is wrong
    KPair whole = k_groups(e);
    if (!k0a.same_canonical_form(whole.k0) || ka.cols() != whole.k1_basis.cols())
        throw InconsistentData("glued relation matrix disagrees with the whole graph");

    SixTermInvariant inv{
        pi.k0,
        k0a,
        pq.k0,
        pi.k1,
        k1a,
        pq.k1,
        induced_hom(pi.k0, k0a, padded_identity(ni + nq, ni)),
        induced_hom(k0a, pq.k0, hcat(IntMatrix::zero(nq, ni), IntMatrix::identity(nq))),
        zero_hom(pq.k0, pi.k1),
        GroupHom{pi.k1, k1a,
                 rewrite_columns(ka, vcat(pi.k1_basis, IntMatrix::zero(mq.cols(), pi.k1_basis.cols())),
                                 "ideal kernel inclusion")},
        GroupHom{k1a, pq.k1, [&] {
                     std::vector<std::size_t> rows(mq.cols());
                     for (std::size_t r = 0; r < mq.cols(); ++r) rows[r] = mi.cols() + r;
                     std::vector<std::size_t> cols(ka.cols());
                     for (std::size_t c = 0; c < ka.cols(); ++c) cols[c] = c;
                     return rewrite_columns(pq.k1_basis, ka.select(rows, cols),
                                            "kernel projection");
                 }()},
        GroupHom{pq.k1, pi.k0, [&] {
                     IntMatrix d = IntMatrix::zero(ni, pq.k1_basis.cols());
                     for (std::size_t j = 0; j < pq.k1_basis.cols(); ++j) {
                         Vec img = y.apply(pq.k1_basis.col(j));
                         for (std::size_t i = 0; i < ni; ++i) d.at(i, j) = img[i];
                     }
                     return d;
                 }()},
        cone_certificate(sp.ideal),
        ConeCert{DeclaredCone{false}},
        cone_certificate(sp.quotient),
        ScaleCert{FullScale{}},
        ScaleCert{UnitScale{unit_class(sp.quotient)}},
        std::nullopt,
        Vec(ni + nq, Int(1)),
        unit_class(sp.quotient),
        2};

    if (!e.has_cycle()) {
        // acyclic algebra: its positive cone is simplicial on the
        // singular-vertex classes, in glued coordinates
        std::vector<std::size_t> pos(e.size());
        for (std::size_t i = 0; i < ni; ++i) pos[sp.ideal_vertices[i]] = i;
        for (std::size_t j = 0; j < nq; ++j) pos[sp.quotient_vertices[j]] = ni + j;
        std::vector<Vec> gens;
        for (std::size_t v : e.singular_vertices()) {
            Vec g(ni + nq, Int(0));
            g[pos[v]] = 1;
            gens.push_back(std::move(g));
        }
        inv.cone_a = ConeCert{SimplicialCone{std::move(gens)}};
    } else if (cq.cls == SimpleClass::SimplePurelyInfinite) {
        // traceless: adding ideal relations to a full quotient cone
        // keeps the middle cone full
        inv.cone_a = ConeCert{FullCone{}};
    }

    ExactnessReport ex = verify_exactness(inv);
    if (!ex.ok) {
        std::string nodes;
        for (const auto& f : ex.failures) nodes += " " + f;
        throw InconsistentData("six-term construction lost exactness at" + nodes);
    }
    return inv;
}

ExactnessReport verify_exactness(const SixTermInvariant& inv) {
    ExactnessReport r;
    auto node = [&](const char* name, const GroupHom& in, const GroupHom& out) {
        if (!exact_at(in, out)) {
            r.ok = false;
            r.failures.emplace_back(name);
        }
    };
    node("k0i", inv.del1, inv.iota0);
    node("k0a", inv.iota0, inv.pi0);
    node("k0q", inv.pi0, inv.del0);
    node("k1i", inv.del0, inv.iota1);
    node("k1a", inv.iota1, inv.pi1);
    node("k1q", inv.pi1, inv.del1);
    return r;
}

AugmentedInvariant augmented_from_graph(const Graph& e, const std::vector<std::size_t>& subset) {
    SixTermInvariant six = ksix_from_graph(e, subset);
    std::size_t n = six.k0i.ambient_rank();
    std::size_t nq = six.k0q.ambient_rank();

    FgAbelianGroup g2(vcat(six.k0i.relations(), IntMatrix::zero(1, six.k0i.relations().cols())));
    auto h1 = std::make_shared<ScaledGroup>(six.ideal_scaled());
    ScaledGroup h2{g2, ConeCert{ExtensionCone{std::make_shared<ConeCert>(six.cone_i)}},
                   ScaleCert{HullScale{h1}}};
    ScaledGroup h3{FgAbelianGroup::free_group(1), ConeCert{SimplicialCone{{Vec{Int(1)}}}},
                   ScaleCert{UnitScale{Vec{Int(1)}}}};

    GroupHom eps = induced_hom(h1->group, g2, padded_identity(n + 1, n));
    IntMatrix last_row = IntMatrix::zero(1, n + 1);
    last_row.at(0, n) = 1;
    GroupHom gam = induced_hom(g2, h3.group, last_row);

    // base-point column: the sum of the quotient-vertex projections
    IntMatrix eta2m = IntMatrix::zero(six.k0a.ambient_rank(), n + 1);
    for (std::size_t i = 0; i < six.k0a.ambient_rank(); ++i)
        for (std::size_t j = 0; j < n; ++j) eta2m.at(i, j) = six.iota0.h.at(i, j);
    for (std::size_t q = 0; q < nq; ++q) eta2m.at(n + q, n) = 1;

    AugmentedInvariant av{*h1,
                          h2,
                          h3,
                          eps,
                          gam,
                          identity_hom(six.k0i),
                          induced_hom(g2, six.k0a, eta2m),
                          induced_hom(h3.group, six.k0q, IntMatrix::column(Vec(nq, Int(1)))),
                          six,
                          Vec(n + 1, Int(0)),
                          {},
                          {}};
    av.h2_elem[n] = 1;
    av.g2_elem = av.eta2.apply(av.h2_elem);
    av.g3_elem = av.six.pi0.apply(av.g2_elem);

    if (!is_injective(av.eps_tilde) || !is_surjective(av.gamma_tilde) ||
        !exact_at(av.eps_tilde, av.gamma_tilde))
        throw InconsistentData("augmented top row is not short exact");
    if (!compose(av.eta2, av.eps_tilde).equals(compose(av.six.iota0, av.eta1)) ||
        !compose(av.eta3, av.gamma_tilde).equals(compose(av.six.pi0, av.eta2)))
        throw InconsistentData("augmented squares fail to commute");
    if (!av.h3.group.equal(av.gamma_tilde.apply(av.h2_elem), Vec{Int(1)}))
        throw InconsistentData("base point does not map to 1 at the top");
    return av;
}

AugmentedInvariant standard_augmentation(const SixTermInvariant& six, const Vec& g2_elem) {
    std::size_t n = six.k0i.ambient_rank();
    if (g2_elem.size() != six.k0a.ambient_rank())
        throw InconsistentData("marked class must live in the middle k0 ambient");

    FgAbelianGroup hg(vcat(six.k0i.relations(), IntMatrix::zero(1, six.k0i.relations().cols())));
    auto h1 = std::make_shared<ScaledGroup>(six.ideal_scaled());
    ScaledGroup h2{hg, ConeCert{ExtensionCone{std::make_shared<ConeCert>(six.cone_i)}},
                   ScaleCert{HullScale{h1}}};
    ScaledGroup h3{FgAbelianGroup::free_group(1), ConeCert{SimplicialCone{{Vec{Int(1)}}}},
                   ScaleCert{UnitScale{Vec{Int(1)}}}};

    GroupHom eps = induced_hom(h1->group, hg, padded_identity(n + 1, n));
    IntMatrix last_row = IntMatrix::zero(1, n + 1);
    last_row.at(0, n) = 1;
    GroupHom gam = induced_hom(hg, h3.group, last_row);

    AugmentedInvariant av{*h1,
                          h2,
                          h3,
                          eps,
                          gam,
                          identity_hom(six.k0i),
                          induced_hom(hg, six.k0a, hcat(six.iota0.h, IntMatrix::column(g2_elem))),
                          induced_hom(h3.group, six.k0q, IntMatrix::column(six.pi0.apply(g2_elem))),
                          six,
                          Vec(n + 1, Int(0)),
                          g2_elem,
                          six.pi0.apply(g2_elem)};
    av.h2_elem[n] = 1;

    if (!is_injective(av.eps_tilde) || !is_surjective(av.gamma_tilde) ||
        !exact_at(av.eps_tilde, av.gamma_tilde))
        throw InconsistentData("augmented top row is not short exact");
    if (!compose(av.eta2, av.eps_tilde).equals(compose(av.six.iota0, av.eta1)) ||
        !compose(av.eta3, av.gamma_tilde).equals(compose(av.six.pi0, av.eta2)))
        throw InconsistentData("augmented squares fail to commute");
    return av;
}

// ------------------------------------------------------------- iso

namespace {

void fail(IsoReport& r, std::string msg) {
    r.ok = false;
    r.failures.push_back(std::move(msg));
}

bool same_presentation(const FgAbelianGroup& a, const FgAbelianGroup& b) {
    return a.ambient_rank() == b.ambient_rank() && a.relations() == b.relations();
}

// Component sanity: endpoints, well-definedness, two-sided inverse.
void check_component(IsoReport& r, const char* name, const IsoPair& p, const FgAbelianGroup& ga,
                     const FgAbelianGroup& gb) {
    if (!same_presentation(p.fwd.src, ga) || !same_presentation(p.fwd.tgt, gb) ||
        !same_presentation(p.inv.src, gb) || !same_presentation(p.inv.tgt, ga)) {
        fail(r, std::string(name) + ": endpoints do not match the compared invariants");
        return;
    }
    if (!p.fwd.well_defined() || !p.inv.well_defined()) {
        fail(r, std::string(name) + ": not well defined on the presentations");
        return;
    }
    if (!compose(p.inv, p.fwd).equals(identity_hom(ga)) ||
        !compose(p.fwd, p.inv).equals(identity_hom(gb)))
        fail(r, std::string(name) + ": the declared inverse is not two-sided");
}

std::vector<Vec> order_probes(const FgAbelianGroup& g) {
    std::vector<Vec> out;
    Vec sum(g.ambient_rank(), Int(0));
    for (std::size_t j = 0; j < g.canonical_rank(); ++j) {
        Vec gen = g.canonical_generator(j);
        sum = sum + gen;
        out.push_back(gen);
        out.push_back(scale(Int(-1), gen));
    }
    if (g.canonical_rank() > 1) {
        out.push_back(sum);
        out.push_back(scale(Int(-1), sum));
    }
    return out;
}

void probe_order_one_way(IsoReport& r, const char* name, const GroupHom& f, const ConeCert& ca,
                         const ConeCert& cb, int cap) {
    // fullness is itself invariant; declared-only pairs carry no more information
    if (ca.is_full_for(f.src) != cb.is_full_for(f.tgt)) {
        fail(r, std::string(name) + ": one side is fully ordered and the other is not");
        return;
    }
    if (std::holds_alternative<DeclaredCone>(ca.data) &&
        std::holds_alternative<DeclaredCone>(cb.data))
        return;
    bool dry = false;
    for (const Vec& x : order_probes(f.src)) {
        Tri ta = cone_member(ca, f.src, x, cap);
        Tri tb = cone_member(cb, f.tgt, f.apply(x), cap);
        if (ta != Tri::Inconclusive && tb != Tri::Inconclusive && ta != tb) {
            fail(r, std::string(name) + ": positivity is not preserved");
            return;
        }
        if (ta == Tri::Inconclusive || tb == Tri::Inconclusive) dry = true;
    }
    if (dry) r.inconclusive = true;
}

void probe_order(IsoReport& r, const char* name, const IsoPair& p, const ConeCert& ca,
                 const ConeCert& cb, int cap) {
    probe_order_one_way(r, name, p.fwd, ca, cb, cap);
    probe_order_one_way(r, name, p.inv, cb, ca, cap);
}

void probe_scale_one_way(IsoReport& r, const char* name, const GroupHom& f, const ScaledGroup& sa,
                         const ScaledGroup& sb, std::vector<Vec> extra, int cap) {
    bool dry = false;
    std::vector<Vec> probes = order_probes(f.src);
    for (Vec& x : extra) probes.push_back(std::move(x));
    for (const Vec& x : probes) {
        Tri ta = scale_member(sa, x, cap);
        Tri tb = scale_member(sb, f.apply(x), cap);
        if (ta != Tri::Inconclusive && tb != Tri::Inconclusive && ta != tb) {
            fail(r, std::string(name) + ": scale membership is not preserved");
            return;
        }
        if (ta == Tri::Inconclusive || tb == Tri::Inconclusive) dry = true;
    }
    if (dry) r.inconclusive = true;
}

void probe_scale(IsoReport& r, const char* name, const IsoPair& p, const ScaledGroup& sa,
                 const ScaledGroup& sb, const std::vector<Vec>& extra_fwd,
                 const std::vector<Vec>& extra_inv, int cap) {
    probe_scale_one_way(r, name, p.fwd, sa, sb, extra_fwd, cap);
    probe_scale_one_way(r, name, p.inv, sb, sa, extra_inv, cap);
}

void check_unit(IsoReport& r, const char* name, const IsoPair& p, const std::optional<Vec>& ua,
                const std::optional<Vec>& ub, const FgAbelianGroup& gb) {
    if (ua && ub) {
        if (!gb.equal(p.fwd.apply(*ua), *ub))
            fail(r, std::string(name) + ": the unit class is not preserved");
    } else if (ua || ub) {
        r.notes.push_back(std::string(name) +
                          ": unit data present on one side only; preservation skipped");
    }
}

void check_square(IsoReport& r, const char* name, const GroupHom& left, const GroupHom& right) {
    if (!left.equals(right)) fail(r, std::string(name) + " square does not commute");
}

} // namespace

IsoCertificate identity_certificate(const SixTermInvariant& a) {
    auto idp = [](const FgAbelianGroup& g) {
        return IsoPair{identity_hom(g), identity_hom(g)};
    };
    IsoCertificate c;
    c.a1 = idp(a.k0i);
    c.a2 = idp(a.k0a);
    c.a3 = idp(a.k0q);
    c.b1 = idp(a.k1i);
    c.b2 = idp(a.k1a);
    c.b3 = idp(a.k1q);
    return c;
}

IsoCertificate identity_certificate(const AugmentedInvariant& a) {
    auto idp = [](const FgAbelianGroup& g) {
        return IsoPair{identity_hom(g), identity_hom(g)};
    };
    IsoCertificate c = identity_certificate(a.six);
    c.a1t = idp(a.h1.group);
    c.a2t = idp(a.h2.group);
    c.a3t = idp(a.h3.group);
    return c;
}

IsoReport iso_verify(const SixTermInvariant& a, const SixTermInvariant& b,
                     const IsoCertificate& cert, int cap) {
    IsoReport r;
    if (a.unital_case != b.unital_case) fail(r, "unitality case differs");
    if (!cert.a1 || !cert.a2 || !cert.a3 || !cert.b1 || !cert.b2 || !cert.b3) {
        fail(r, "certificate is missing six-term components");
        return r;
    }
    check_component(r, "k0i", *cert.a1, a.k0i, b.k0i);
    check_component(r, "k0a", *cert.a2, a.k0a, b.k0a);
    check_component(r, "k0q", *cert.a3, a.k0q, b.k0q);
    check_component(r, "k1i", *cert.b1, a.k1i, b.k1i);
    check_component(r, "k1a", *cert.b2, a.k1a, b.k1a);
    check_component(r, "k1q", *cert.b3, a.k1q, b.k1q);
    if (!r.ok) return r;

    check_square(r, "iota0", compose(cert.a2->fwd, a.iota0), compose(b.iota0, cert.a1->fwd));
    check_square(r, "pi0", compose(cert.a3->fwd, a.pi0), compose(b.pi0, cert.a2->fwd));
    check_square(r, "del0", compose(cert.b1->fwd, a.del0), compose(b.del0, cert.a3->fwd));
    check_square(r, "iota1", compose(cert.b2->fwd, a.iota1), compose(b.iota1, cert.b1->fwd));
    check_square(r, "pi1", compose(cert.b3->fwd, a.pi1), compose(b.pi1, cert.b2->fwd));
    check_square(r, "del1", compose(cert.a1->fwd, a.del1), compose(b.del1, cert.b3->fwd));

    probe_order(r, "k0i order", *cert.a1, a.cone_i, b.cone_i, cap);
    probe_order(r, "k0a order", *cert.a2, a.cone_a, b.cone_a, cap);
    probe_order(r, "k0q order", *cert.a3, a.cone_q, b.cone_q, cap);
    probe_scale(r, "ideal scale", *cert.a1, a.ideal_scaled(), b.ideal_scaled(), {}, {}, cap);
    probe_scale(r, "quotient scale", *cert.a3, a.quotient_scaled(), b.quotient_scaled(), {}, {},
                cap);

    check_unit(r, "k0i unit", *cert.a1, a.unit_i, b.unit_i, b.k0i);
    check_unit(r, "k0a unit", *cert.a2, a.unit_a, b.unit_a, b.k0a);
    check_unit(r, "k0q unit", *cert.a3, a.unit_q, b.unit_q, b.k0q);
    return r;
}

IsoReport iso_verify(const AugmentedInvariant& a, const AugmentedInvariant& b,
                     const IsoCertificate& cert, int cap) {
    IsoReport r = iso_verify(a.six, b.six, cert, cap);
    if (!cert.a1t || !cert.a2t || !cert.a3t) {
        fail(r, "certificate is missing top-level components");
        return r;
    }
    check_component(r, "h1", *cert.a1t, a.h1.group, b.h1.group);
    check_component(r, "h2", *cert.a2t, a.h2.group, b.h2.group);
    check_component(r, "h3", *cert.a3t, a.h3.group, b.h3.group);
    if (!r.ok) return r;

    check_square(r, "top inclusion", compose(cert.a2t->fwd, a.eps_tilde),
                 compose(b.eps_tilde, cert.a1t->fwd));
    check_square(r, "top quotient", compose(cert.a3t->fwd, a.gamma_tilde),
                 compose(b.gamma_tilde, cert.a2t->fwd));
    check_square(r, "eta1", compose(cert.a1->fwd, a.eta1), compose(b.eta1, cert.a1t->fwd));
    check_square(r, "eta2", compose(cert.a2->fwd, a.eta2), compose(b.eta2, cert.a2t->fwd));
    check_square(r, "eta3", compose(cert.a3->fwd, a.eta3), compose(b.eta3, cert.a3t->fwd));

    if (!b.h2.group.equal(cert.a2t->fwd.apply(a.h2_elem), b.h2_elem))
        fail(r, "base point is not preserved");

    probe_order(r, "h1 order", *cert.a1t, a.h1.cone, b.h1.cone, cap);
    probe_order(r, "h2 order", *cert.a2t, a.h2.cone, b.h2.cone, cap);
    probe_order(r, "h3 order", *cert.a3t, a.h3.cone, b.h3.cone, cap);
    probe_scale(r, "h1 scale", *cert.a1t, a.h1, b.h1, {}, {}, cap);
    probe_scale(r, "h2 scale", *cert.a2t, a.h2, b.h2, {a.h2_elem}, {b.h2_elem}, cap);
    probe_scale(r, "h3 scale", *cert.a3t, a.h3, b.h3, {}, {}, cap);
    return r;
}

// ------------------------------------------------------- iso search

namespace {

// Isomorphism candidates a -> b as homs, from canonical-coordinate
// matrices: torsion images exhausted (respecting orders), free-block
// entries in [-bound, bound].  Bounded in count, so incomplete.
std::vector<GroupHom> iso_candidates(const FgAbelianGroup& a, const FgAbelianGroup& b,
                                     long long bound, std::size_t max_count) {
    std::vector<GroupHom> out;
    if (!a.same_canonical_form(b)) return out;
    const Vec& tor = a.torsion();
    std::size_t t = tor.size();
    std::size_t c = a.canonical_rank();
    if (c == 0) {
        out.push_back(zero_hom(a, b));
        return out;
    }

    std::vector<std::vector<Int>> choices(c * c);
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            auto& ch = choices[i * c + j];
            if (i < t && j < t) {
                Int step = tor[i] / gcd(tor[i], tor[j]);
                for (Int v = 0; v < tor[i]; v += step) ch.push_back(v);
            } else if (i < t) {
                for (Int v = 0; v < tor[i]; ++v) ch.push_back(v);
            } else if (j < t) {
                ch.push_back(Int(0));
            } else {
                for (long long v = -bound; v <= bound; ++v) ch.push_back(Int(v));
            }
        }

    // precompute canonical coordinates of a's ambient basis
    std::vector<Vec> acoords(a.ambient_rank());
    for (std::size_t k = 0; k < a.ambient_rank(); ++k) {
        Vec e(a.ambient_rank(), Int(0));
        e[k] = 1;
        acoords[k] = a.reduce(e);
    }

    std::vector<std::size_t> idx(c * c, 0);
    std::size_t iterations = 0;
    const std::size_t max_iterations = 500000;
    while (iterations++ < max_iterations) {
        IntMatrix cm(c, c);
        for (std::size_t s = 0; s < c * c; ++s) cm.at(s / c, s % c) = choices[s][idx[s]];
        IntMatrix h = IntMatrix::zero(b.ambient_rank(), a.ambient_rank());
        for (std::size_t k = 0; k < a.ambient_rank(); ++k) {
            Vec img = cm.apply(acoords[k]);
            img = b.lift(img);
            for (std::size_t i = 0; i < img.size(); ++i) h.at(i, k) = img[i];
        }
        GroupHom cand{a, b, std::move(h)};
        if (cand.well_defined() && is_isomorphism(cand)) {
            out.push_back(std::move(cand));
            if (out.size() >= max_count) break;
        }
        std::size_t s = 0;
        while (s < c * c && ++idx[s] == choices[s].size()) idx[s++] = 0;
        if (s == c * c) break;
    }
    return out;
}

bool squares_ok(const GroupHom& la, const GroupHom& f, const GroupHom& lb, const GroupHom& g) {
    // g after la == lb after f
    return compose(g, la).equals(compose(lb, f));
}

} // namespace

IsoSearchResult iso_search(const SixTermInvariant& a, const SixTermInvariant& b,
                           long long bound) {
    IsoSearchResult res;
    if (bound < 1) bound = 1;
    struct Pos {
        const char* name;
        const FgAbelianGroup* ga;
        const FgAbelianGroup* gb;
    };
    const Pos pos[6] = {{"k0i", &a.k0i, &b.k0i}, {"k0a", &a.k0a, &b.k0a},
                        {"k0q", &a.k0q, &b.k0q}, {"k1i", &a.k1i, &b.k1i},
                        {"k1a", &a.k1a, &b.k1a}, {"k1q", &a.k1q, &b.k1q}};
    for (const Pos& p : pos)
        if (!p.ga->same_canonical_form(*p.gb)) {
            res.refuted = true;
            res.detail = std::string("canonical forms differ at ") + p.name;
            return res;
        }
    if (a.unital_case != b.unital_case) {
        res.refuted = true;
        res.detail = "unitality cases differ";
        return res;
    }

    const std::size_t per_position = 20000;
    std::vector<std::vector<GroupHom>> cand(6);
    for (std::size_t i = 0; i < 6; ++i) {
        cand[i] = iso_candidates(*pos[i].ga, *pos[i].gb, bound, per_position);
        if (cand[i].empty()) {
            res.detail = std::string("no component candidates at ") + pos[i].name +
                         " within bound " + std::to_string(bound);
            return res;
        }
    }

    // nested search, square-pruned; parallel over the k0i candidate and
    // resolved to the smallest index for a deterministic result
    std::atomic<std::size_t> best{cand[0].size()};
    IsoCertificate best_cert;
    bool budget_hit = false;

#pragma omp parallel
    {
        std::size_t local_checks = 0;
        const std::size_t budget = 2000000;
#pragma omp for schedule(dynamic)
        for (std::size_t i0 = 0; i0 < cand[0].size(); ++i0) {
            if (i0 >= best.load(std::memory_order_relaxed)) continue;
            if (local_checks >= budget) continue;
            const GroupHom& a1 = cand[0][i0];
            for (const GroupHom& a2 : cand[1]) {
                if (++local_checks >= budget) break;
                if (!squares_ok(a.iota0, a1, b.iota0, a2)) continue;
                for (const GroupHom& a3 : cand[2]) {
                    if (++local_checks >= budget) break;
                    if (!squares_ok(a.pi0, a2, b.pi0, a3)) continue;
                    for (const GroupHom& b1 : cand[3]) {
                        if (++local_checks >= budget) break;
                        if (!squares_ok(a.del0, a3, b.del0, b1)) continue;
                        for (const GroupHom& b2 : cand[4]) {
                            if (++local_checks >= budget) break;
                            if (!squares_ok(a.iota1, b1, b.iota1, b2)) continue;
                            for (const GroupHom& b3 : cand[5]) {
                                if (++local_checks >= budget) break;
                                if (!squares_ok(a.pi1, b2, b.pi1, b3)) continue;
                                if (!squares_ok(a.del1, b3, b.del1, a1)) continue;
                                IsoCertificate c;
                                c.a1 = IsoPair{a1, inverse_of(a1)};
                                c.a2 = IsoPair{a2, inverse_of(a2)};
                                c.a3 = IsoPair{a3, inverse_of(a3)};
                                c.b1 = IsoPair{b1, inverse_of(b1)};
                                c.b2 = IsoPair{b2, inverse_of(b2)};
                                c.b3 = IsoPair{b3, inverse_of(b3)};
                                IsoReport rep = iso_verify(a, b, c);
                                if (!rep.ok) continue;
#pragma omp critical
                                {
                                    if (i0 < best.load()) {
                                        best.store(i0);
                                        best_cert = c;
                                    }
                                }
                                goto next_i0;
                            }
                        }
                    }
                }
            }
        next_i0:;
        }
        if (local_checks >= budget) {
#pragma omp critical
            budget_hit = true;
        }
    }

    if (best.load() < cand[0].size()) {
        res.certificate = std::move(best_cert);
        res.detail = "verified certificate found";
        return res;
    }
    res.detail = budget_hit ? "search budget exhausted before the bound was covered"
                            : "no certificate within the bound";
    return res;
}

IsoSearchResult iso_search(const AugmentedInvariant& a, const AugmentedInvariant& b,
                           long long bound) {
    IsoSearchResult res;
    const FgAbelianGroup* ha[3] = {&a.h1.group, &a.h2.group, &a.h3.group};
    const FgAbelianGroup* hb[3] = {&b.h1.group, &b.h2.group, &b.h3.group};
    const char* hn[3] = {"h1", "h2", "h3"};
    for (int i = 0; i < 3; ++i)
        if (!ha[i]->same_canonical_form(*hb[i])) {
            res.refuted = true;
            res.detail = std::string("canonical forms differ at ") + hn[i];
            return res;
        }

    IsoSearchResult base = iso_search(a.six, b.six, bound);
    if (!base.certificate) return base;

    // The top level is rigid when eta1 identifies h1 with k0i and the
    // h2 presentations carry their split last coordinate; both hold
    // for every invariant this library constructs.
    bool split_shape = a.h2.group.ambient_rank() == a.h1.group.ambient_rank() + 1 &&
                       b.h2.group.ambient_rank() == b.h1.group.ambient_rank() + 1 &&
                       a.h1.group.ambient_rank() == b.h1.group.ambient_rank();
    if (!split_shape || !is_isomorphism(a.eta1) || !is_isomorphism(b.eta1)) {
        res.detail = "lower certificate found, but the top level is not derivable here";
        return res;
    }
    GroupHom a1t = compose(inverse_of(b.eta1), compose(base.certificate->a1->fwd, a.eta1));
    std::size_t n = a.h1.group.ambient_rank();
    IntMatrix m2 = IntMatrix::zero(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m2.at(i, j) = a1t.h.at(i, j);
    m2.at(n, n) = 1;
    GroupHom a2t{a.h2.group, b.h2.group, std::move(m2)};
    GroupHom a3t = identity_hom(a.h3.group);
    if (!a2t.well_defined()) {
        res.detail = "derived top-level map is not well defined";
        return res;
    }

    IsoCertificate cert = *base.certificate;
    cert.a1t = IsoPair{a1t, inverse_of(a1t)};
    cert.a2t = IsoPair{a2t, inverse_of(a2t)};
    cert.a3t = IsoPair{a3t, a3t};
    IsoReport rep = iso_verify(a, b, cert);
    if (!rep.ok) {
        res.detail = "derived top-level certificate failed verification";
        return res;
    }
    res.certificate = std::move(cert);
    res.detail = "verified certificate found";
    return res;
}

} // namespace gck
