#include "gck/extension.hpp"

#include <sstream>

#include "gck/error.hpp"

namespace gck {

const char* to_string(PieceKind k) {
    return k == PieceKind::AF ? "AF" : "Kirchberg";
}

const char* to_string(CondStatus s) {
    switch (s) {
        case CondStatus::Pass: return "pass";
        case CondStatus::Fail: return "fail";
        case CondStatus::Inconclusive: return "inconclusive";
        case CondStatus::Vacuous: return "vacuous";
    }
    return "?";
}

const ConditionResult* Verdict::find(const std::string& name) const {
    for (const auto& it : items)
        if (it.name == name) return &it;
    return nullptr;
}

std::string Verdict::to_string() const {
    std::ostringstream os;
    for (const auto& it : items) {
        os << it.name << ": " << gck::to_string(it.status);
        if (!it.note.empty()) os << "  (" << it.note << ")";
        os << "\n";
    }
    os << "overall: " << gck::to_string(overall) << "\n";
    return os.str();
}

namespace {

Tri fold_overall(const std::vector<ConditionResult>& items) {
    bool undecided = false;
    for (const auto& it : items) {
        if (it.status == CondStatus::Fail) return Tri::Fail;
        if (it.status == CondStatus::Inconclusive) undecided = true;
    }
    return undecided ? Tri::Inconclusive : Tri::Pass;
}

CondStatus from_tri(Tri t) {
    switch (t) {
        case Tri::Pass: return CondStatus::Pass;
        case Tri::Fail: return CondStatus::Fail;
        default: return CondStatus::Inconclusive;
    }
}

// Fullness of a cone certificate, honouring a declared-shape override:
// for a group given only by declaration, certificates that would read
// the placeholder presentation are not trusted.
Tri cone_fullness(const ConeCert& c, const FgAbelianGroup& g, const GroupMeta& meta) {
    if (meta.not_finitely_generated) {
        if (std::holds_alternative<FullCone>(c.data)) return Tri::Pass;
        if (const auto* d = std::get_if<DeclaredCone>(&c.data))
            return d->full ? Tri::Pass : Tri::Fail;
        return Tri::Inconclusive;
    }
    return c.is_full_for(g) ? Tri::Pass : Tri::Fail;
}

struct RankValue {
    bool infinite = false;
    std::optional<Int> value;  // unset and not infinite: declared but unknown
};

RankValue slot_rank(const FgAbelianGroup& g, const GroupMeta& meta) {
    if (meta.not_finitely_generated) {
        if (meta.rank_infinite) return {true, std::nullopt};
        if (meta.rank) return {false, meta.rank};
        return {false, std::nullopt};
    }
    return {false, Int(g.free_rank())};
}

std::string rank_str(const RankValue& r) {
    if (r.infinite) return "infinite";
    if (!r.value) return "unknown";
    return r.value->str();
}

void validate(const ExtensionData& d) {
    const SixTermInvariant& v = d.inv;
    if (v.unital_case < 0 || v.unital_case > 2)
        throw InconsistentData("unitality case must be 0, 1 or 2");
    if (v.unit_i.has_value())
        throw InconsistentData("the ideal of a one-ideal extension is never unital");
    bool want_a = v.unital_case == 2;
    bool want_q = v.unital_case >= 1;
    if (v.unit_a.has_value() != want_a || v.unit_q.has_value() != want_q)
        throw InconsistentData("unit classes do not match the declared unitality case");
    if (d.ideal_kind == PieceKind::Kirchberg &&
        cone_fullness(v.cone_i, v.k0i, d.meta_k0i) == Tri::Fail)
        throw InconsistentData("a purely infinite ideal needs a full k0 cone");
    if (d.quotient_kind == PieceKind::Kirchberg &&
        cone_fullness(v.cone_q, v.k0q, d.meta_k0q) == Tri::Fail)
        throw InconsistentData("a purely infinite quotient needs a full k0 cone");
}

ConditionResult exp_map_condition(const ExtensionData& d) {
    ConditionResult r{"(1)", CondStatus::Inconclusive, ""};
    if (d.del0_declared_zero.has_value()) {
        r.status = *d.del0_declared_zero ? CondStatus::Pass : CondStatus::Fail;
        r.note = *d.del0_declared_zero ? "exponential map declared zero"
                                       : "exponential map declared nonzero";
        return r;
    }
    if (d.meta_k0q.not_finitely_generated || d.meta_k1i.not_finitely_generated) {
        r.note = "exponential map endpoints only declared; no explicit flag given";
        return r;
    }
    bool zero = d.inv.del0.is_zero_map();
    r.status = zero ? CondStatus::Pass : CondStatus::Fail;
    r.note = zero ? "exponential map is zero" : "exponential map is nonzero";
    return r;
}

ConditionResult order_fullness_condition(const ExtensionData& d) {
    ConditionResult r{"(2)", CondStatus::Inconclusive, ""};
    Tri qf = cone_fullness(d.inv.cone_q, d.inv.k0q, d.meta_k0q);
    if (qf == Tri::Fail) {
        r.status = CondStatus::Vacuous;
        r.note = "quotient order not full, nothing to check";
        return r;
    }
    if (qf == Tri::Inconclusive) {
        r.note = "quotient order fullness undecided";
        return r;
    }
    Tri mf = cone_fullness(d.inv.cone_a, d.inv.k0a, d.meta_k0a);
    r.status = from_tri(mf);
    if (mf == Tri::Pass) r.note = "quotient and middle orders both full";
    else if (mf == Tri::Fail) r.note = "quotient order full but middle order is not";
    else r.note = "middle order fullness undecided";
    return r;
}

}  // namespace

Verdict check_extension(const ExtensionData& d) {
    validate(d);
    Verdict v;
    v.items.push_back(exp_map_condition(d));
    v.items.push_back(order_fullness_condition(d));

    if (d.inv.unital_case != 2) {
        for (const char* name : {"(3)(a)", "(3)(b)", "(3)(c)"})
            v.items.push_back(
                {name, CondStatus::Vacuous, "middle algebra not unital"});
        v.overall = fold_overall(v.items);
        return v;
    }

    {
        ConditionResult r{"(3)(a)", CondStatus::Pass, "ideal k0 finitely generated"};
        if (d.meta_k0i.not_finitely_generated) {
            r.status = CondStatus::Fail;
            r.note = "ideal k0 declared not finitely generated";
        }
        v.items.push_back(r);
    }
    {
        ConditionResult r{"(3)(b)", CondStatus::Inconclusive, ""};
        RankValue r1 = slot_rank(d.inv.k1i, d.meta_k1i);
        RankValue r0 = slot_rank(d.inv.k0i, d.meta_k0i);
        r.note = "ideal ranks: k1 " + rank_str(r1) + ", k0 " + rank_str(r0);
        if (r0.infinite)
            r.status = CondStatus::Pass;
        else if (r1.infinite)
            r.status = r0.value ? CondStatus::Fail : CondStatus::Inconclusive;
        else if (r0.value && r1.value)
            r.status = *r1.value <= *r0.value ? CondStatus::Pass : CondStatus::Fail;
        v.items.push_back(r);
    }
    {
        ConditionResult r{"(3)(c)", CondStatus::Inconclusive, ""};
        Tri full = cone_fullness(d.inv.cone_i, d.inv.k0i, d.meta_k0i);
        if (full == Tri::Pass) {
            r.status = CondStatus::Vacuous;
            r.note = "ideal order already full";
        } else if (full == Tri::Inconclusive) {
            r.note = "ideal order fullness undecided";
        } else if (d.meta_k0i.not_finitely_generated) {
            r.status = CondStatus::Fail;
            r.note = "proper ideal order but ideal k0 is not even finitely generated";
        } else {
            bool is_z = d.inv.k0i.torsion().empty() && d.inv.k0i.free_rank() == 1;
            r.status = is_z ? CondStatus::Pass : CondStatus::Fail;
            r.note = is_z ? "proper ideal order and ideal k0 = Z"
                          : "proper ideal order but ideal k0 is not Z";
        }
        v.items.push_back(r);
    }
    v.overall = fold_overall(v.items);
    return v;
}

Verdict check_corollary(const ExtensionData& d) {
    validate(d);
    if (d.inv.unital_case != 2)
        throw HypothesesNotMet("needs a unital extension with a unital quotient");
    if (!d.ideal_stabilized)
        throw HypothesesNotMet("needs the ideal given as a stabilized unital algebra");
    for (const GroupMeta* m : {&d.meta_k0i, &d.meta_k0a, &d.meta_k0q, &d.meta_k1i,
                               &d.meta_k1a, &d.meta_k1q})
        if (m->not_finitely_generated)
            throw HypothesesNotMet(
                "unital graph-algebra pieces have finitely generated K-theory");
    if (!std::holds_alternative<FullScale>(d.inv.scale_i.data))
        throw HypothesesNotMet("a stabilized ideal carries the full scale");
    if (d.inv.k1i.free_rank() > d.inv.k0i.free_rank() ||
        d.inv.k1q.free_rank() > d.inv.k0q.free_rank())
        throw HypothesesNotMet(
            "rank k1 <= rank k0 fails, so a piece is not a unital graph algebra");

    bool zero = d.inv.del0.is_zero_map();
    CondStatus st = zero ? CondStatus::Pass : CondStatus::Fail;
    Verdict v;
    v.items.push_back({"(a)", st,
                       "middle algebra is a graph algebra: equivalent to (c) for a "
                       "unital extension by a stabilized unital simple ideal"});
    v.items.push_back({"(b)", st, "middle algebra has real rank zero: equivalent to (c)"});
    v.items.push_back({"(c)", st,
                       zero ? "exponential map is zero" : "exponential map is nonzero"});
    v.overall = fold_overall(v.items);
    return v;
}

// ------------------------------------------------- realizability hypotheses

namespace {

// Scale-shape facts a certificate can promise without a membership oracle.
struct ScaleShape {
    CondStatus generating = CondStatus::Inconclusive;
    CondStatus hereditary = CondStatus::Inconclusive;
    CondStatus upward = CondStatus::Inconclusive;
    CondStatus no_largest = CondStatus::Inconclusive;
};

CondStatus both(CondStatus a, CondStatus b) {
    if (a == CondStatus::Fail || b == CondStatus::Fail) return CondStatus::Fail;
    if (a == CondStatus::Inconclusive || b == CondStatus::Inconclusive)
        return CondStatus::Inconclusive;
    return CondStatus::Pass;
}

ScaleShape scale_shape(const ScaleCert& s, const FgAbelianGroup& g,
                       const ConeCert& cone) {
    ScaleShape r;
    if (std::holds_alternative<FullScale>(s.data)) {
        // the scale is the whole cone
        r.hereditary = CondStatus::Pass;
        r.upward = CondStatus::Pass;
        bool opaque = false;
        if (const auto* d = std::get_if<DeclaredCone>(&cone.data)) opaque = !d->full;
        r.generating = opaque ? CondStatus::Inconclusive : CondStatus::Pass;
        r.no_largest = g.is_trivial() ? CondStatus::Fail : CondStatus::Pass;
        return r;
    }
    if (const auto* u = std::get_if<UnitScale>(&s.data)) {
        r.hereditary = CondStatus::Pass;
        r.upward = CondStatus::Pass;
        r.generating = CondStatus::Inconclusive;
        // the unit itself is the largest element
        r.no_largest = g.is_zero_class(u->u) ? CondStatus::Inconclusive : CondStatus::Fail;
        return r;
    }
    if (const auto* b = std::get_if<BoundedByScale>(&s.data)) {
        r.hereditary = CondStatus::Pass;
        r.no_largest = b->bounds.size() == 1 ? CondStatus::Fail : CondStatus::Inconclusive;
        return r;
    }
    if (const auto* o = std::get_if<OrbitScale>(&s.data)) {
        r.hereditary = CondStatus::Pass;
        r.upward = CondStatus::Pass;       // the orbit is a chain of bounds
        r.no_largest = CondStatus::Pass;   // certificate class promises a growing orbit
        // the orbit spans the group iff the first ambient-rank iterates do
        std::size_t n = g.ambient_rank();
        if (o->block.rows() == n && o->block.cols() == n && o->seed.size() == n) {
            IntMatrix span(n, 0);
            Vec v = o->seed;
            for (std::size_t k = 0; k <= n; ++k) {
                span = hcat(span, IntMatrix::column(v));
                v = o->block.apply(v);
            }
            r.generating = g.subgroup_full(span) ? CondStatus::Pass : CondStatus::Fail;
        }
        return r;
    }
    if (const auto* h = std::get_if<HullScale>(&s.data)) {
        ScaleShape inner =
            scale_shape(h->inner->scale, h->inner->group, h->inner->cone);
        r.hereditary = CondStatus::Pass;  // hereditary hull by construction
        r.generating = inner.generating;  // level-one base point plus the inner scale
        r.upward = inner.upward;
        r.no_largest = inner.no_largest;
        return r;
    }
    return r;  // induced scales: membership oracle only
}

// Order comparison of two cones through a group isomorphism, probing
// canonical generators in both directions.
CondStatus probe_order_iso(const FgAbelianGroup& ga, const ConeCert& ca,
                           const FgAbelianGroup& gb, const ConeCert& cb,
                           const GroupHom& fwd, int cap, std::string& note) {
    Tri fa = cone_fullness(ca, ga, GroupMeta{});
    Tri fb = cone_fullness(cb, gb, GroupMeta{});
    if (fa == Tri::Pass && fb == Tri::Pass) return CondStatus::Pass;
    if (fa != fb && fa != Tri::Inconclusive && fb != Tri::Inconclusive) {
        note = "one side fully ordered, the other not";
        return CondStatus::Fail;
    }
    GroupHom inv = inverse_of(fwd);
    bool undecided = false;
    auto probe = [&](const FgAbelianGroup& src, const ConeCert& cs,
                     const FgAbelianGroup& tgt, const ConeCert& ct,
                     const GroupHom& f) {
        for (std::size_t i = 0; i < src.canonical_rank(); ++i) {
            for (int sign : {1, -1}) {
                Vec x = src.canonical_generator(i);
                if (sign < 0) x = scale(Int(-1), x);
                Tri lhs = cone_member(cs, src, x, cap);
                Tri rhs = cone_member(ct, tgt, f.apply(x), cap);
                if (lhs == Tri::Inconclusive || rhs == Tri::Inconclusive) {
                    undecided = true;
                    continue;
                }
                if (lhs != rhs) {
                    note = "a generator changes positivity across the map";
                    return false;
                }
            }
        }
        return true;
    };
    if (!probe(ga, ca, gb, cb, fwd)) return CondStatus::Fail;
    if (!probe(gb, cb, ga, ca, inv)) return CondStatus::Fail;
    if (undecided) {
        note = "some generator positivity undecided";
        return CondStatus::Inconclusive;
    }
    return CondStatus::Pass;
}

}  // namespace

Verdict check_hypotheses(const AugmentedInvariant& a, int cap) {
    Verdict v;

    // (i) f1 a simple dimension group with scale = cone
    {
        ConditionResult r{"(i)", CondStatus::Inconclusive, ""};
        CondStatus dg = CondStatus::Inconclusive;
        std::string dgnote = "order certificate class not decidable here";
        if (const auto* sc = std::get_if<SimplicialCone>(&a.h1.cone.data)) {
            bool torsion_free = a.h1.group.torsion().empty();
            bool rank_one = a.h1.group.free_rank() == 1;
            bool spans = false;
            if (!sc->generators.empty()) {
                IntMatrix gens(a.h1.group.ambient_rank(), 0);
                for (const Vec& c : sc->generators) gens = hcat(gens, IntMatrix::column(c));
                spans = a.h1.group.subgroup_full(gens);
            }
            dg = (torsion_free && rank_one && spans) ? CondStatus::Pass : CondStatus::Fail;
            dgnote = dg == CondStatus::Pass
                         ? "simplicial of rank one"
                         : "simplicial certificate is not a simple dimension group";
        } else if (const auto* st = std::get_if<StationaryCone>(&a.h1.cone.data)) {
            if (!a.h1.group.torsion().empty()) {
                dg = CondStatus::Fail;
                dgnote = "dimension groups are torsion free";
            } else if (is_primitive(st->block)) {
                dg = CondStatus::Pass;
                dgnote = "stationary with a primitive block";
            } else {
                dgnote = "stationary block not primitive; undecided";
            }
        }
        CondStatus sc_eq = CondStatus::Inconclusive;
        std::string scnote = "scale certificate class undecided";
        if (std::holds_alternative<FullScale>(a.h1.scale.data)) {
            sc_eq = CondStatus::Pass;
            scnote = "scale equals the cone";
        } else if (std::holds_alternative<UnitScale>(a.h1.scale.data) ||
                   std::holds_alternative<BoundedByScale>(a.h1.scale.data)) {
            sc_eq = a.h1.group.is_trivial() ? CondStatus::Inconclusive : CondStatus::Fail;
            scnote = "bounded scale on an unbounded cone";
        }
        r.status = both(dg, sc_eq);
        r.note = dgnote + "; " + scnote;
        v.items.push_back(r);
    }

    // (ii) extension order over h1, and the scale meets level one
    {
        ConditionResult r{"(ii)", CondStatus::Inconclusive, ""};
        if (!a.h3.group.torsion().empty() || a.h3.group.free_rank() != 1) {
            r.status = CondStatus::Fail;
            r.note = "level map does not land in Z";
        } else {
            CondStatus ord = CondStatus::Pass;
            bool undecided = false;
            std::vector<Vec> probes;
            for (std::size_t i = 0; i < a.h2.group.canonical_rank(); ++i) {
                probes.push_back(a.h2.group.canonical_generator(i));
                probes.push_back(scale(Int(-1), a.h2.group.canonical_generator(i)));
            }
            probes.push_back(a.h2_elem);
            for (const Vec& x : probes) {
                Tri lhs = cone_member(a.h2.cone, a.h2.group, x, cap);
                Int level = a.h3.group.reduce(a.gamma_tilde.apply(x))[0];
                Tri rhs;
                if (level >= 1) {
                    rhs = Tri::Pass;
                } else if (level <= -1) {
                    rhs = Tri::Fail;  // epsilon images all sit at level zero
                } else {
                    auto pre = preimage(a.eps_tilde, x);
                    if (!pre) {
                        r.status = CondStatus::Fail;
                        r.note = "level-zero class outside the image of the inclusion";
                        ord = CondStatus::Fail;
                        break;
                    }
                    rhs = cone_member(a.h1.cone, a.h1.group, *pre, cap);
                }
                if (ord == CondStatus::Fail) break;
                if (lhs == Tri::Inconclusive || rhs == Tri::Inconclusive) {
                    undecided = true;
                    continue;
                }
                if (lhs != rhs) {
                    ord = CondStatus::Fail;
                    r.note = "order on h2 is not the extension order over h1";
                    break;
                }
            }
            if (ord != CondStatus::Fail) {
                CondStatus witness;
                Int lvl = a.h3.group.reduce(a.gamma_tilde.apply(a.h2_elem))[0];
                if (lvl != 1) {
                    witness = CondStatus::Fail;
                    r.note = "base point does not sit at level one";
                } else {
                    Tri m = scale_member(a.h2, a.h2_elem, cap);
                    witness = from_tri(m);
                    if (m == Tri::Fail) r.note = "base point not in the scale";
                }
                r.status = both(undecided ? CondStatus::Inconclusive : CondStatus::Pass,
                                witness);
                if (r.status == CondStatus::Pass)
                    r.note = "extension order confirmed on generators; base point in "
                             "the scale at level one";
            } else {
                r.status = CondStatus::Fail;
            }
        }
        v.items.push_back(r);
    }

    // (iii) scale shape on h2
    {
        ConditionResult r{"(iii)", CondStatus::Inconclusive, ""};
        ScaleShape s = scale_shape(a.h2.scale, a.h2.group, a.h2.cone);
        r.status = both(both(s.generating, s.hereditary), both(s.upward, s.no_largest));
        std::ostringstream os;
        os << "generating " << gck::to_string(s.generating) << ", hereditary "
           << gck::to_string(s.hereditary) << ", upward " << gck::to_string(s.upward)
           << ", no largest " << gck::to_string(s.no_largest);
        r.note = os.str();
        v.items.push_back(r);
    }

    // (iv) (h3, cone, scale) = (Z, N, {0,1})
    {
        ConditionResult r{"(iv)", CondStatus::Inconclusive, ""};
        if (!a.h3.group.torsion().empty() || a.h3.group.free_rank() != 1) {
            r.status = CondStatus::Fail;
            r.note = "h3 is not Z";
        } else {
            Vec one = a.h3.group.lift({Int(1)});
            Vec minus = a.h3.group.lift({Int(-1)});
            Vec two = a.h3.group.lift({Int(2)});
            auto expect = [](Tri got, Tri want) {
                if (got == Tri::Inconclusive) return Tri::Inconclusive;
                return got == want ? Tri::Pass : Tri::Fail;
            };
            Tri all = Tri::Pass;
            all = tri_all(all, expect(cone_member(a.h3.cone, a.h3.group, one, cap),
                                      Tri::Pass));
            all = tri_all(all, expect(cone_member(a.h3.cone, a.h3.group, minus, cap),
                                      Tri::Fail));
            all = tri_all(all, expect(scale_member(a.h3, one, cap), Tri::Pass));
            all = tri_all(all, expect(scale_member(a.h3, two, cap), Tri::Fail));
            all = tri_all(all, expect(scale_member(a.h3, minus, cap), Tri::Fail));
            r.status = from_tri(all);
            r.note = r.status == CondStatus::Pass
                         ? "integers with the usual order and scale {0,1}"
                         : "order or scale probes off the integer pattern";
        }
        v.items.push_back(r);
    }

    // (v) eta1 an order isomorphism
    {
        ConditionResult r{"(v)", CondStatus::Inconclusive, ""};
        if (!is_isomorphism(a.eta1)) {
            r.status = CondStatus::Fail;
            r.note = "eta1 is not a group isomorphism";
        } else {
            std::string note = "order isomorphism confirmed on generators";
            r.status = probe_order_iso(a.h1.group, a.h1.cone, a.six.k0i,
                                       a.six.cone_i, a.eta1, cap, note);
            r.note = note;
        }
        v.items.push_back(r);
    }

    // (vi) g2 fully ordered
    {
        Tri full = a.six.cone_a.is_full_for(a.six.k0a) ? Tri::Pass : Tri::Fail;
        v.items.push_back({"(vi)", from_tri(full),
                           full == Tri::Pass ? "middle k0 order full"
                                             : "middle k0 order not full"});
    }

    // (vii) g3 finitely generated and fully ordered
    {
        Tri full = a.six.cone_q.is_full_for(a.six.k0q) ? Tri::Pass : Tri::Fail;
        v.items.push_back({"(vii)", from_tri(full),
                           full == Tri::Pass
                               ? "quotient k0 finitely generated with full order"
                               : "quotient k0 order not full"});
    }

    // (viii) f1 = 0
    v.items.push_back({"(viii)",
                       a.six.k1i.is_trivial() ? CondStatus::Pass : CondStatus::Fail,
                       a.six.k1i.is_trivial() ? "ideal k1 trivial"
                                              : "ideal k1 nonzero"});

    // (ix) f3 free with rank f3 <= rank g3
    {
        bool free = a.six.k1q.torsion().empty();
        bool bound = a.six.k1q.free_rank() <= a.six.k0q.free_rank();
        CondStatus st = (free && bound) ? CondStatus::Pass : CondStatus::Fail;
        std::string note = !free ? "quotient k1 has torsion"
                           : !bound ? "quotient k1 rank exceeds k0 rank"
                                    : "quotient k1 free within the rank bound";
        v.items.push_back({"(ix)", st, note});
    }

    v.overall = fold_overall(v.items);
    return v;
}

}  // namespace gck
