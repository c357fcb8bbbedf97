#include "gck/synth.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>

#include "gck/error.hpp"
#include "gck/extension.hpp"
#include "gck/smith.hpp"

namespace gck {

namespace {

Vec ones_vec(std::size_t n) { return Vec(n, Int(1)); }

Vec unit_vec(std::size_t n, std::size_t i) {
    Vec e(n, Int(0));
    e[i] = 1;
    return e;
}

// ceil(a / b) for b > 0; cpp_int division truncates toward zero.
Int ceil_div(const Int& a, const Int& b) {
    Int q = a / b;
    if (a > 0 && q * b != a) ++q;
    return q;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

bool same_presentation(const FgAbelianGroup& a, const FgAbelianGroup& b) {
    return a.ambient_rank() == b.ambient_rank() && a.relations() == b.relations();
}

IsoPair iso_pair(GroupHom fwd) {
    GroupHom inv = inverse_of(fwd);
    return IsoPair{std::move(fwd), std::move(inv)};
}

} // namespace

// ------------------------------------------------------------- glue

IntMatrix glued_matrix(const IntMatrix& a, const IntMatrix& y, const IntMatrix& b) {
    if (a.rows() != y.rows() || b.cols() != y.cols())
        throw NonConformable("glued blocks disagree in shape");
    return vcat(hcat(a, y), hcat(IntMatrix::zero(b.rows(), a.cols()), b));
}

GlueResult glue(const GlueProblem& p) {
    const std::size_t n1 = p.a.rows(), n3 = p.b.rows(), n3p = p.b.cols();
    if (p.y.rows() != n1 || p.y.cols() != n3p || p.z.rows() != n1 || p.z.cols() != n3p)
        throw NonConformable("off-diagonal blocks disagree in shape");
    if (p.x.size() != n1) throw NonConformable("distinguished ideal part has the wrong length");
    if (n3 == 0) throw Infeasible("no quotient rows to carry the adjustment");
    if (p.dom_low >= n3 || p.dom_high >= n3 || p.dom_low == p.dom_high)
        throw NoDominance("dominating row pair out of range");
    for (std::size_t c = 0; c < n3p; ++c)
        if (!(p.b.at(p.dom_low, c) < p.b.at(p.dom_high, c)))
            throw NoDominance("row " + std::to_string(p.dom_high) +
                              " does not strictly dominate row " + std::to_string(p.dom_low));

    IntMatrix glued = glued_matrix(p.a, p.y, p.b);
    if (p.alpha1.src.relations() != p.a)
        throw InconsistentData("alpha1 is not presented on the ideal block");
    if (p.alpha2.src.relations() != glued)
        throw InconsistentData("alpha2 is not presented on the glued matrix");
    if (p.g2.size() != p.alpha2.tgt.ambient_rank())
        throw NonConformable("target class has the wrong ambient length");
    {
        // alpha2 restricted to the ideal coordinates must be eps after alpha1
        IntMatrix incl = IntMatrix::zero(n1 + n3, n1);
        for (std::size_t i = 0; i < n1; ++i) incl.at(i, i) = 1;
        GroupHom li = induced_hom(p.alpha1.src, p.alpha2.src, std::move(incl));
        if (!compose(p.alpha2, li).equals(compose(p.eps, p.alpha1)))
            throw InconsistentData("the identifications do not commute over the ideal block");
    }

    Vec yv = concat(p.x, ones_vec(n3));
    Vec g2p = p.alpha2.apply(yv) - p.g2;
    // z with eps(alpha1([z])) equal to the overshoot
    IntMatrix e = p.eps.h * p.alpha1.h;
    auto zsol = solve(hcat(e, p.alpha2.tgt.relations()), g2p);
    if (!zsol)
        throw UnsolvableZ("the distinguished class misses its target by something "
                          "outside the image of the ideal");
    Vec z(zsol->begin(), zsol->begin() + static_cast<std::ptrdiff_t>(n1));

    // q' carries z in its first column; q'' pairs the dominating rows so
    // that every row of q''*b is strictly positive and q''*1 = 0
    IntMatrix qp = IntMatrix::zero(n1, n3);
    for (std::size_t i = 0; i < n1; ++i) qp.at(i, 0) = z[i];
    IntMatrix qpp = IntMatrix::zero(n1, n3);
    for (std::size_t i = 0; i < n1; ++i) {
        qpp.at(i, p.dom_high) = 1;
        qpp.at(i, p.dom_low) = -1;
    }
    IntMatrix d = qpp * p.b;
    IntMatrix rest = p.z - p.y - qp * p.b;
    Int c = 1;
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n3p; ++j)
            if (rest.at(i, j) > 0) c = std::max(c, ceil_div(rest.at(i, j), d.at(i, j)));
    IntMatrix q = qp;
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n3; ++j) q.at(i, j) += c * qpp.at(i, j);
    IntMatrix yprime = p.y + q * p.b;

    // machine-checked postconditions
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n3p; ++j)
            if (yprime.at(i, j) < p.z.at(i, j))
                throw VerificationFailed("adjusted block fell below its floor");
    {
        Vec rs = q.apply(ones_vec(n3));
        if (rs != z) throw VerificationFailed("row sums of q drifted from the solved column");
    }
    IntMatrix t = IntMatrix::identity(n1 + n3);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n3; ++j) t.at(i, n1 + j) = -q.at(i, j);
    if (!is_unimodular(t)) throw VerificationFailed("transition matrix is not unimodular");
    IntMatrix glued2 = glued_matrix(p.a, yprime, p.b);
    FgAbelianGroup src2(glued2);
    if (!src2.same_canonical_form(p.alpha2.src))
        throw VerificationFailed("cokernel changed under the adjustment");
    if (kernel_basis(glued2).cols() != kernel_basis(glued).cols())
        throw VerificationFailed("kernel rank changed under the adjustment");
    GroupHom adj{std::move(src2), p.alpha2.tgt, p.alpha2.h * t};
    if (!adj.well_defined() || !is_isomorphism(adj))
        throw VerificationFailed("adjusted identification is not an isomorphism");
    if (!p.alpha2.tgt.equal(adj.apply(yv), p.g2))
        throw VerificationFailed("distinguished class still off target");

    std::ostringstream log;
    log << "glue: z = " << gck::to_string(z) << ", count c = " << c
        << "; floors met and the marked class points at its target";
    return GlueResult{std::move(yprime), std::move(q), std::move(c), std::move(z),
                      std::move(adj), log.str()};
}

// --------------------------------------- simple purely infinite piece

PiRealization realize_pi_simple_cert(const FgAbelianGroup& g, const Vec& elem,
                                     std::size_t k1_rank) {
    const std::size_t t = g.torsion().size();
    const std::size_t f = g.free_rank();
    const std::size_t k = k1_rank;
    if (k > f) throw Infeasible("kernel rank exceeds the free rank of the cokernel");
    if (elem.size() != g.ambient_rank())
        throw NonConformable("class vector has the wrong ambient length");
    Vec gamma = g.reduce(elem);

    // vertices: one per torsion factor, one per free generator, and a
    // dominating pair s, s2 at the end
    const std::size_t n = t + f + 2;
    const std::size_t s1 = t + f, s2 = t + f + 1;
    Vec zc(n, Int(0));
    std::vector<Int> sigma(f, Int(1));
    for (std::size_t i = 0; i < t; ++i) {
        const Int& d = g.torsion()[i];
        zc[i] = ((-gamma[i]) % d + d) % d;
    }
    for (std::size_t j = 0; j < f; ++j) {
        const Int& gv = gamma[t + j];
        if (gv > 0) {
            sigma[j] = -1;
            zc[t + j] = gv;
        } else {
            zc[t + j] = -gv;
        }
    }
    Vec pc(n), cc(n);
    for (std::size_t v = 0; v < n; ++v) pc[v] = 1 + zc[v];
    cc = pc;
    cc[s2] += 1;

    // columns: torsion diagonals, k zero columns, then p and c; the class
    // of the all-ones vector is -[zc] thanks to the p relation
    const std::size_t mcols = t + k + 2;
    IntMatrix m(n, mcols);
    for (std::size_t i = 0; i < t; ++i) m.at(i, i) = g.torsion()[i];
    for (std::size_t v = 0; v < n; ++v) {
        m.at(v, t + k) = pc[v];
        m.at(v, t + k + 1) = cc[v];
    }
    // column operations only: they move neither the cokernel classes nor
    // the kernel, and the unit class stays put
    for (std::size_t col = 0; col < t + k + 1; ++col)
        for (std::size_t v = 0; v < n; ++v) m.at(v, col) += 2 * cc[v];
    for (std::size_t v = 0; v < n; ++v) m.at(v, t + k) += cc[v];

    // column -> vertex: torsion and kernel columns sit on their vertices,
    // p on s1, c on s2; free vertices beyond the kernel ones are made
    // singular with infinite emissions everywhere
    std::vector<std::size_t> col_vertex(mcols);
    for (std::size_t i = 0; i < t; ++i) col_vertex[i] = i;
    for (std::size_t j = 0; j < k; ++j) col_vertex[t + j] = t + j;
    col_vertex[t + k] = s1;
    col_vertex[t + k + 1] = s2;

    Graph graph;
    for (std::size_t v = 0; v < n; ++v) graph.add_vertex("v" + std::to_string(v));
    for (std::size_t col = 0; col < mcols; ++col) {
        std::size_t w = col_vertex[col];
        for (std::size_t v = 0; v < n; ++v) {
            Int cnt = m.at(v, col) + (v == w ? 1 : 0);
            if (cnt > 0) graph.add_edge(w, v, Mult::fin(cnt));
        }
    }
    for (std::size_t j = k; j < f; ++j)
        for (std::size_t v = 0; v < n; ++v) graph.add_edge(t + j, v, Mult::inf());

    // identification of the cokernel with g
    IntMatrix hm(g.ambient_rank(), n);
    auto set_col = [&](std::size_t v, const Vec& val) {
        for (std::size_t r = 0; r < val.size(); ++r) hm.at(r, v) = val[r];
    };
    for (std::size_t i = 0; i < t; ++i)
        set_col(i, g.lift(unit_vec(t + f, i)));
    for (std::size_t j = 0; j < f; ++j)
        set_col(t + j, scale(sigma[j], g.lift(unit_vec(t + f, t + j))));
    {
        Vec cs(g.ambient_rank(), Int(0));
        for (std::size_t v = 0; v < n; ++v) {
            if (v == s1) continue;
            cs = cs - scale(pc[v], hm.col(v));
        }
        set_col(s1, cs);
    }

    // recompute and verify before handing anything out
    KPair kp = k_groups(graph);
    if (kp.k0.relations() != m)
        throw ConstructionFailed("vertex matrix of the built graph is off the design");
    if (kp.k1_basis.cols() != k)
        throw VerificationFailed("kernel rank of the built matrix is off");
    if (classify_simple(graph).cls != SimpleClass::SimplePurelyInfinite)
        throw VerificationFailed("built graph is not simple purely infinite");
    for (std::size_t c = 0; c < mcols; ++c)
        if (!(m.at(s1, c) < m.at(s2, c)))
            throw VerificationFailed("dominating row pair is not strict");
    for (std::size_t v = 0; v < n; ++v) {
        if (!(m.at(v, t + k + 1) < m.at(v, t + k)))
            throw VerificationFailed("dominating column pair is not strict");
        for (std::size_t c = 0; c < mcols; ++c)
            if (m.at(v, c) < 1) throw VerificationFailed("built matrix is not positive");
    }
    GroupHom phi{kp.k0, g, std::move(hm)};
    if (!phi.well_defined() || !is_isomorphism(phi))
        throw VerificationFailed("identification with the prescribed group failed");
    if (!g.equal(phi.apply(ones_vec(n)), elem))
        throw VerificationFailed("unit class missed the prescribed element");

    return PiRealization{std::move(graph), std::move(phi), s1, s2};
}

Graph realize_pi_simple(const FgAbelianGroup& g, const Vec& elem, std::size_t k1_rank) {
    return realize_pi_simple_cert(g, elem, k1_rank).graph;
}

// ------------------------------------------------------ induced scale

InducedScale induced_scale(const ScaledGroup& host, const Vec& h2_elem,
                           const GroupHom& eps, const GroupHom& gamma) {
    if (h2_elem.size() != host.group.ambient_rank())
        throw NonConformable("base point has the wrong ambient length");
    if (eps.tgt.ambient_rank() != host.group.ambient_rank())
        throw NonConformable("embedding does not land in the host presentation");
    if (gamma.h.cols() != host.group.ambient_rank())
        throw NonConformable("level map is not defined on the host presentation");
    if (!gamma.tgt.torsion().empty() || gamma.tgt.free_rank() != 1)
        throw InconsistentData("level map does not land in the integers");
    Vec lvl = gamma.tgt.reduce(gamma.apply(h2_elem));
    if (lvl[0] != 1)
        throw BadBasePoint("base point sits at level " + lvl[0].str() + ", not one");
    Tri mem = scale_member(host, h2_elem);
    if (mem == Tri::Fail) throw BadBasePoint("base point is not in the host scale");

    InducedScale out;
    if (mem == Tri::Inconclusive)
        out.notes.push_back("host scale membership of the base point ran dry; "
                            "continuing on the declared data");
    if (std::holds_alternative<FullScale>(host.scale.data)) {
        out.cert = ScaleCert{FullScale{}};
        out.notes.push_back("full host scale induces the full scale");
        return out;
    }
    if (const auto* h = std::get_if<HullScale>(&host.scale.data)) {
        const ScaledGroup& inner = *h->inner;
        bool std_emb = eps.src.ambient_rank() == inner.group.ambient_rank() &&
                       host.group.ambient_rank() == inner.group.ambient_rank() + 1 &&
                       same_presentation(eps.src, inner.group);
        if (std_emb) {
            IntMatrix pad = IntMatrix::zero(host.group.ambient_rank(),
                                            inner.group.ambient_rank());
            for (std::size_t i = 0; i < inner.group.ambient_rank(); ++i) pad.at(i, i) = 1;
            std_emb = eps.h == pad;
        }
        if (std_emb) {
            Vec base(host.group.ambient_rank(), Int(0));
            base.back() = 1;
            if (host.group.equal(h2_elem, base)) {
                out.cert = inner.scale;
                out.notes.push_back(
                    "hull based at its own base point restricts to the inner scale");
                return out;
            }
        }
    }
    out.cert = ScaleCert{
        InducedScaleCert{std::make_shared<ScaledGroup>(host), h2_elem, eps.h}};
    out.notes.push_back("membership decided through the host: positive h with "
                        "base + eps(h) in the host scale");
    return out;
}

// ----------------------------------------------------- scaled AF piece

StagedGraph realize_af_scaled(const ScaledGroup& h1) {
    // the scale has to exhaust the cone
    if (!std::holds_alternative<FullScale>(h1.scale.data)) {
        const auto* o = std::get_if<OrbitScale>(&h1.scale.data);
        bool grows = o && h1.group.ambient_rank() == 1 && o->block.rows() == 1 &&
                     o->block.cols() == 1 && o->block.at(0, 0) >= 2 &&
                     !h1.group.is_zero_class(o->seed) &&
                     cone_member(h1.cone, h1.group, o->seed) == Tri::Pass;
        if (!grows)
            throw UnsupportedCertificate("scale certificate (" + h1.scale.to_string() +
                                         ") does not visibly equal the cone; only "
                                         "cone-sized scales are realized here");
    }
    if (const auto* sc = std::get_if<SimplicialCone>(&h1.cone.data)) {
        bool shape = h1.group.torsion().empty() && h1.group.free_rank() == 1 &&
                     !sc->generators.empty();
        if (shape) {
            IntMatrix gens(h1.group.ambient_rank(), 0);
            for (const Vec& gv : sc->generators) gens = hcat(gens, IntMatrix::column(gv));
            shape = h1.group.subgroup_full(gens);
        }
        if (!shape)
            throw UnsupportedCertificate(
                "simplicial certificate is not a rank-one dimension group");
        StagedGraph s;
        s.core.add_vertex("a");
        s.tails.push_back(StagedTail{"a", true, "t"});
        StagedKReport rep = staged_k_groups(s);
        if (!rep.stable.k0.same_canonical_form(h1.group) || !rep.stable.k1.is_trivial() ||
            !rep.cone || !std::holds_alternative<SimplicialCone>(rep.cone->data))
            throw VerificationFailed("tail graph misses the prescribed invariant");
        return s;
    }
    if (const auto* st = std::get_if<StationaryCone>(&h1.cone.data)) {
        if (!is_primitive(st->block))
            throw UnsupportedCertificate("stationary block is not primitive");
        StagedGraph s;
        std::vector<std::string> names;
        for (std::size_t i = 0; i < st->block.rows(); ++i) {
            names.push_back("b" + std::to_string(i));
            s.core.add_vertex(names.back());
        }
        s.block = StagedBlock{std::move(names), st->block};
        StagedKReport rep = staged_k_groups(s);
        const auto* got = rep.cone ? std::get_if<StationaryCone>(&rep.cone->data) : nullptr;
        if (!rep.stable.k0.same_canonical_form(h1.group) || !rep.stable.k1.is_trivial() ||
            !got || got->block != st->block)
            throw VerificationFailed("stationary block misses the prescribed invariant");
        return s;
    }
    throw UnsupportedCertificate("order certificate (" + h1.cone.to_string() +
                                 ") outside the realized classes");
}

// --------------------------------------------------------- synthesize

namespace {

// One class constraint on an unknown integer matrix X: post * X * u must
// equal v modulo the column span of *lattice.  post defaults to the
// identity.
struct ClassConstraint {
    std::optional<IntMatrix> post;
    Vec u;
    Vec v;
    const IntMatrix* lattice;
};

std::optional<IntMatrix> solve_matrix_constraints(std::size_t rows, std::size_t cols,
                                                  const std::vector<ClassConstraint>& cs) {
    std::size_t nx = rows * cols, extra = 0, neq = 0;
    for (const auto& c : cs) {
        neq += c.post ? c.post->rows() : rows;
        extra += c.lattice->cols();
    }
    IntMatrix m(neq, nx + extra);
    Vec rhs(neq, Int(0));
    std::size_t eq = 0, tcol = nx;
    for (const auto& c : cs) {
        const std::size_t h = c.post ? c.post->rows() : rows;
        for (std::size_t i = 0; i < h; ++i) {
            for (std::size_t r = 0; r < rows; ++r) {
                Int pv = c.post ? c.post->at(i, r) : Int(r == i ? 1 : 0);
                if (pv == 0) continue;
                for (std::size_t uc = 0; uc < cols; ++uc) {
                    if (c.u[uc] == 0) continue;
                    m.at(eq + i, r * cols + uc) += pv * c.u[uc];
                }
            }
            for (std::size_t j = 0; j < c.lattice->cols(); ++j)
                m.at(eq + i, tcol + j) = c.lattice->at(i, j);
            rhs[eq + i] = c.v[i];
        }
        eq += h;
        tcol += c.lattice->cols();
    }
    auto sol = solve(m, rhs);
    if (!sol) return std::nullopt;
    IntMatrix x(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t uc = 0; uc < cols; ++uc) x.at(r, uc) = (*sol)[r * cols + uc];
    return x;
}

void validate_request(const AugmentedInvariant& a) {
    ExactnessReport ex = verify_exactness(a.six);
    if (!ex.ok)
        throw InconsistentData("requested six-term data is not exact at " +
                               join(ex.failures, ", "));
    if (!is_injective(a.eps_tilde) || !is_surjective(a.gamma_tilde) ||
        !exact_at(a.eps_tilde, a.gamma_tilde))
        throw InconsistentData("requested top row is not a short exact sequence");
    if (!compose(a.eta2, a.eps_tilde).equals(compose(a.six.iota0, a.eta1)))
        throw InconsistentData("requested inclusion square does not commute");
    if (!compose(a.six.pi0, a.eta2).equals(compose(a.eta3, a.gamma_tilde)))
        throw InconsistentData("requested projection square does not commute");
    if (!a.six.k0a.equal(a.g2_elem, a.eta2.apply(a.h2_elem)))
        throw InconsistentData("marked middle class is not the image of the base point");
    if (!a.six.k0q.equal(a.g3_elem, a.six.pi0.apply(a.g2_elem)))
        throw InconsistentData("marked quotient class is not the projected base point");
}

// boundary targets: b3 sends the j-th recomputed kernel generator to the
// j-th canonical generator of the requested quotient kernel
std::vector<Vec> boundary_targets(const AugmentedInvariant& req, std::size_t k) {
    if (!req.six.k1q.torsion().empty() || req.six.k1q.free_rank() != k)
        throw ConstructionFailed("quotient kernel is not free of the realized rank");
    std::vector<Vec> out;
    for (std::size_t j = 0; j < k; ++j)
        out.push_back(req.six.del1.apply(req.six.k1q.lift(unit_vec(k, j))));
    return out;
}

// y with y * (j-th kernel basis column of b) = targets[j] exactly, zero
// on a complement of the kernel; the smith basis of the column space
// contains the kernel basis, so y is read off by inverting it.
IntMatrix align_rows(const IntMatrix& b, const std::vector<Vec>& targets,
                     std::size_t rows) {
    SmithDecomposition sd = smith(b);
    std::size_t nd = std::min(b.rows(), b.cols());
    IntMatrix w(rows, b.cols());
    std::size_t j = 0;
    for (std::size_t col = 0; col < b.cols(); ++col) {
        if (col < nd && sd.d.at(col, col) != 0) continue;  // not a kernel column
        if (j >= targets.size()) throw ConstructionFailed("kernel rank drifted");
        for (std::size_t r = 0; r < rows; ++r) w.at(r, col) = targets[j][r];
        ++j;
    }
    if (j != targets.size()) throw ConstructionFailed("kernel rank drifted");
    return w * inverse_unimodular(sd.v);
}

// Row twists that keep every boundary value: representatives of
// { rows orthogonal to ker b } modulo integer row combinations of b,
// one generator per torsion invariant factor of coker(b).  Twisting
// the off-diagonal block by these walks through the inequivalent
// extensions sharing one boundary map.
struct ExtTwist {
    std::vector<Vec> gens;  // rows, length cols(b)
    Vec orders;             // matching orders, each >= 2
};

ExtTwist ext_twists(const IntMatrix& b) {
    SmithDecomposition sd = smith(b);
    IntMatrix vinv = inverse_unimodular(sd.v);
    ExtTwist t;
    const std::size_t nd = std::min(b.rows(), b.cols());
    for (std::size_t i = 0; i < nd; ++i)
        if (sd.d.at(i, i) >= 2) {
            t.gens.push_back(vinv.row(i));
            t.orders.push_back(sd.d.at(i, i));
        }
    return t;
}

// One identification attempt: coker(glued(a, y, b)) -> requested middle
// group, commuting with the requested inclusion on ideal generators and
// with the requested projection on quotient generators.
std::optional<GroupHom> solve_middle_ident(const IntMatrix& a, const IntMatrix& y,
                                           const IntMatrix& b, const AugmentedInvariant& req,
                                           const GroupHom& alpha1, const GroupHom& alpha3) {
    const std::size_t n1 = a.rows(), n3 = b.rows();
    const FgAbelianGroup& g2 = req.six.k0a;
    IntMatrix glued = glued_matrix(a, y, b);
    FgAbelianGroup k0a(glued);
    const IntMatrix& r2 = g2.relations();
    const IntMatrix& r3 = req.six.k0q.relations();
    std::vector<ClassConstraint> cs;
    for (std::size_t j = 0; j < glued.cols(); ++j)
        cs.push_back({std::nullopt, glued.col(j), Vec(g2.ambient_rank(), Int(0)), &r2});
    for (std::size_t r = 0; r < n1; ++r)
        cs.push_back({std::nullopt, unit_vec(n1 + n3, r),
                      req.six.iota0.apply(alpha1.h.col(r)), &r2});
    for (std::size_t q = 0; q < n3; ++q)
        cs.push_back({req.six.pi0.h, unit_vec(n1 + n3, n1 + q), alpha3.h.col(q), &r3});
    auto xm = solve_matrix_constraints(g2.ambient_rank(), n1 + n3, cs);
    if (!xm) return std::nullopt;
    GroupHom out{std::move(k0a), g2, std::move(*xm)};
    if (!out.well_defined() || !is_isomorphism(out)) return std::nullopt;
    return out;
}

struct MiddleIdent {
    IntMatrix y;
    GroupHom alpha2;
    bool twisted = false;
};

// Walks the extension twists of the off-diagonal block, untwisted block
// first, until one admits an identification with the requested middle
// group.  The search space is a product of cyclic groups, one factor
// per (row, torsion generator) pair; it is budgeted, not truncated.
MiddleIdent identify_middle(const IntMatrix& a, const IntMatrix& y0, const IntMatrix& b,
                            const AugmentedInvariant& req, const GroupHom& alpha1,
                            const GroupHom& alpha3) {
    if (auto direct = solve_middle_ident(a, y0, b, req, alpha1, alpha3))
        return MiddleIdent{y0, std::move(*direct), false};
    const std::size_t n1 = a.rows();
    ExtTwist tw = ext_twists(b);
    const std::size_t ng = tw.gens.size();
    Int total = 1;
    for (std::size_t r = 0; r < n1; ++r)
        for (std::size_t g = 0; g < ng; ++g) {
            total *= tw.orders[g];
            if (total > 20000)
                throw ConstructionFailed("extension class search space too large");
        }
    std::vector<Int> digit(n1 * ng, Int(0));
    auto bump = [&]() -> bool {
        for (std::size_t i = 0; i < digit.size(); ++i) {
            digit[i] += 1;
            if (digit[i] < tw.orders[i % ng]) return true;
            digit[i] = 0;
        }
        return false;
    };
    while (bump()) {
        IntMatrix y = y0;
        for (std::size_t r = 0; r < n1; ++r)
            for (std::size_t g = 0; g < ng; ++g) {
                const Int& c = digit[r * ng + g];
                if (c == 0) continue;
                for (std::size_t j = 0; j < y.cols(); ++j)
                    y.at(r, j) += c * tw.gens[g][j];
            }
        if (auto sol = solve_middle_ident(a, y, b, req, alpha1, alpha3))
            return MiddleIdent{std::move(y), std::move(*sol), true};
    }
    throw ConstructionFailed("no identification of the glued presentation is consistent "
                             "with the requested maps, over every extension twist");
}

IsoCertificate build_certificate(const AugmentedInvariant& rec, const AugmentedInvariant& req,
                                 GroupHom a1, GroupHom a2, GroupHom a3) {
    try {
        IsoCertificate c;
        GroupHom a1copy = a1;
        c.a1 = iso_pair(std::move(a1));
        c.a2 = iso_pair(std::move(a2));
        c.a3 = iso_pair(std::move(a3));

        // ideal kernels are trivial on both sides
        c.b1 = iso_pair(GroupHom{rec.six.k1i, req.six.k1i,
                                 IntMatrix::zero(req.six.k1i.ambient_rank(),
                                                 rec.six.k1i.ambient_rank())});
        // quotient kernels: recomputed basis onto the canonical generators
        const std::size_t k = rec.six.k1q.ambient_rank();
        IntMatrix b3m(req.six.k1q.ambient_rank(), k);
        for (std::size_t j = 0; j < k; ++j) {
            Vec col = req.six.k1q.lift(unit_vec(k, j));
            for (std::size_t r = 0; r < col.size(); ++r) b3m.at(r, j) = col[r];
        }
        GroupHom b3{rec.six.k1q, req.six.k1q, std::move(b3m)};
        // middle kernels: project, map, and lift back through the
        // requested projection (unique since the ideal kernels vanish)
        const std::size_t ka = rec.six.k1a.ambient_rank();
        IntMatrix b2m(req.six.k1a.ambient_rank(), ka);
        for (std::size_t j = 0; j < ka; ++j) {
            Vec tv = b3.apply(rec.six.pi1.h.col(j));
            auto pre = preimage(req.six.pi1, tv);
            if (!pre)
                throw ConstructionFailed(
                    "middle kernel class fails to lift through the requested projection");
            for (std::size_t r = 0; r < pre->size(); ++r) b2m.at(r, j) = (*pre)[r];
        }
        c.b2 = iso_pair(GroupHom{rec.six.k1a, req.six.k1a, std::move(b2m)});
        c.b3 = iso_pair(std::move(b3));

        // top row: recomputed eta1 is the identity, so a1 transports
        // directly; the base point column pins the middle component
        GroupHom a1t = compose(inverse_of(req.eta1),
                               GroupHom{a1copy.src, req.eta1.tgt, a1copy.h});
        const std::size_t nrec = rec.h2.group.ambient_rank();
        if (nrec != a1copy.src.ambient_rank() + 1)
            throw ConstructionFailed("unexpected shape of the recomputed base-point group");
        IntMatrix epsa1t = req.eps_tilde.h * a1t.h;
        IntMatrix a2tm(req.h2.group.ambient_rank(), nrec);
        for (std::size_t r = 0; r < epsa1t.rows(); ++r)
            for (std::size_t cc = 0; cc + 1 < nrec; ++cc) a2tm.at(r, cc) = epsa1t.at(r, cc);
        for (std::size_t r = 0; r < req.h2_elem.size(); ++r)
            a2tm.at(r, nrec - 1) = req.h2_elem[r];
        GroupHom a2t{rec.h2.group, req.h2.group, std::move(a2tm)};
        if (req.h3.group.ambient_rank() != 1 || rec.h3.group.ambient_rank() != 1)
            throw ConstructionFailed("the level group must be presented on one generator");
        GroupHom a3t{rec.h3.group, req.h3.group, IntMatrix::identity(1)};
        c.a1t = iso_pair(std::move(a1t));
        c.a2t = iso_pair(std::move(a2t));
        c.a3t = iso_pair(std::move(a3t));
        return c;
    } catch (const InconsistentData& e) {
        throw VerificationFailed(std::string("certificate component not invertible: ") +
                                 e.what());
    }
}

// sign making the requested ideal generator positive
Int orient_ideal(const AugmentedInvariant& req) {
    const FgAbelianGroup& g1 = req.six.k0i;
    if (!g1.torsion().empty() || g1.free_rank() != 1)
        throw ConstructionFailed("staged ideals need an infinite cyclic k0");
    Vec plus = g1.lift({Int(1)});
    if (cone_member(req.six.cone_i, g1, plus) == Tri::Pass) return 1;
    if (cone_member(req.six.cone_i, g1, scale(Int(-1), plus)) == Tri::Pass) return -1;
    throw ConstructionFailed("cannot orient the ideal generator from its order certificate");
}

struct AfAttempt {
    AugmentedInvariant rec;
    IsoCertificate cert;
    bool inconclusive = false;
    std::vector<std::string> notes;
};

AfAttempt af_attempt(const StagedGraph& mid, const AugmentedInvariant& req,
                     const PiRealization& e3, std::size_t depth, bool k_case,
                     const std::optional<GroupHom>& a2core, const Int& sgn) {
    const FgAbelianGroup& g1 = req.six.k0i;
    const FgAbelianGroup& g2 = req.six.k0a;
    const FgAbelianGroup& g3 = req.six.k0q;
    const std::size_t n3 = e3.alpha.src.relations().rows();

    Graph tr = mid.truncate(depth);
    std::vector<std::size_t> idl{0};
    for (std::size_t v = 1 + n3; v < tr.size(); ++v) idl.push_back(v);
    AugmentedInvariant rec = augmented_from_graph(tr, idl);
    // the limit object is unital only on the quotient; the truncation's
    // unit is a depth artifact and is dropped before comparing
    rec.six.unital_case = 1;
    rec.six.unit_a.reset();

    if (rec.six.k0q.relations() != e3.alpha.src.relations())
        throw ConstructionFailed("quotient presentation drifted in the truncation");

    // collapse the ideal piece through canonical coordinates, oriented so
    // the sink class lands on the positive requested generator
    const FgAbelianGroup& pk = rec.six.k0i;
    if (pk.canonical_rank() != 1 || !pk.torsion().empty())
        throw VerificationFailed("ideal piece of the truncation is not infinite cyclic");
    Graph piece = induced_subgraph(tr, idl);
    std::size_t sink = piece.size();
    for (std::size_t v = 0; v < piece.size(); ++v)
        if (piece.is_sink(v)) {
            sink = v;
            break;
        }
    if (sink == piece.size()) throw ConstructionFailed("staged ideal piece has no sink");
    Int c0 = pk.reduce(unit_vec(pk.ambient_rank(), sink))[0];
    if (c0 * c0 != 1) throw ConstructionFailed("sink class is not a generator");
    IntMatrix a1m(g1.ambient_rank(), pk.ambient_rank());
    for (std::size_t r = 0; r < pk.ambient_rank(); ++r) {
        Vec col = g1.lift({sgn * c0 * pk.reduce(unit_vec(pk.ambient_rank(), r))[0]});
        for (std::size_t i = 0; i < col.size(); ++i) a1m.at(i, r) = col[i];
    }
    GroupHom a1{pk, g1, std::move(a1m)};
    if (!a1.well_defined() || !is_isomorphism(a1))
        throw VerificationFailed("ideal collapse is not an isomorphism");

    if (!k_case && mid.block) {
        // the truncation's lifted unit exceeds the limit's along the attach
        // class by the stage factor ([attach] = m^depth [sink]), a depth
        // artifact of cutting the block.  Renormalizing the base column
        // makes the comparison depth independent.
        Int m = mid.block->block.at(0, 0);
        Int shift = 1;
        for (std::size_t j = 0; j < depth; ++j) shift = shift * m;
        shift = shift - 1;
        if (shift != 0) {
            rec.g2_elem[sink] = rec.g2_elem[sink] + shift;
            IntMatrix em = rec.eta2.h;
            em.at(sink, em.cols() - 1) = em.at(sink, em.cols() - 1) + shift;
            rec.eta2 = GroupHom{rec.eta2.src, rec.eta2.tgt, std::move(em)};
        }
    }

    GroupHom a2 = [&]() -> GroupHom {
        const std::size_t namb = rec.six.k0a.ambient_rank();
        const std::size_t pamb = pk.ambient_rank();
        if (k_case) {
            // matrix-unit case: every ideal class equals the attach class,
            // so the truncation collapses onto the core presentation
            IntMatrix tm(1 + n3, namb);
            for (std::size_t r = 0; r < pamb; ++r) tm.at(0, r) = 1;
            for (std::size_t q = 0; q < n3; ++q) tm.at(1 + q, pamb + q) = 1;
            GroupHom collapse{rec.six.k0a, a2core->src, std::move(tm)};
            if (!collapse.well_defined() || !is_isomorphism(collapse))
                throw VerificationFailed("chain collapse is not an isomorphism");
            GroupHom out = compose(*a2core, collapse);
            return out;
        }
        // stationary case: solve for the identification on the truncated
        // presentation directly, with the base point pinned
        const IntMatrix& r2 = g2.relations();
        const IntMatrix& r3 = g3.relations();
        std::vector<ClassConstraint> cs;
        const IntMatrix& rel = rec.six.k0a.relations();
        for (std::size_t j = 0; j < rel.cols(); ++j)
            cs.push_back({std::nullopt, rel.col(j), Vec(g2.ambient_rank(), Int(0)), &r2});
        for (std::size_t r = 0; r < pamb; ++r)
            cs.push_back({std::nullopt, unit_vec(namb, r),
                          req.six.iota0.apply(a1.h.col(r)), &r2});
        for (std::size_t q = 0; q < n3; ++q)
            cs.push_back({req.six.pi0.h, unit_vec(namb, pamb + q), e3.alpha.h.col(q), &r3});
        cs.push_back({std::nullopt, rec.g2_elem, req.g2_elem, &r2});
        auto xm = solve_matrix_constraints(g2.ambient_rank(), namb, cs);
        if (!xm)
            throw VerificationFailed("no identification of the truncated middle group "
                                     "meets the requested maps at this depth");
        GroupHom out{rec.six.k0a, g2, std::move(*xm)};
        if (!out.well_defined() || !is_isomorphism(out))
            throw VerificationFailed("solved identification is not an isomorphism");
        return out;
    }();

    GroupHom a3{rec.six.k0q, g3, e3.alpha.h};
    IsoCertificate cert = build_certificate(rec, req, std::move(a1), std::move(a2),
                                            std::move(a3));
    IsoReport rep = iso_verify(rec, req, cert);
    if (!rep.ok)
        throw VerificationFailed("verification at depth " + std::to_string(depth) +
                                 ": " + join(rep.failures, "; "));
    return AfAttempt{std::move(rec), std::move(cert), rep.inconclusive, rep.notes};
}

SynthesisResult synthesize_pi(const AugmentedInvariant& req, std::vector<std::string> log) {
    const FgAbelianGroup& g1 = req.six.k0i;
    const FgAbelianGroup& g2 = req.six.k0a;
    const FgAbelianGroup& g3 = req.six.k0q;
    if (req.six.unital_case != 2)
        throw UnsupportedCertificate("a finite realization is unital on both levels; "
                                     "requested case " + std::to_string(req.six.unital_case));
    if (!req.six.unit_a || !g2.equal(*req.six.unit_a, req.g2_elem))
        throw InconsistentData("the middle unit class must be the marked base-point image");
    if (!req.six.unit_q || !g3.equal(*req.six.unit_q, req.g3_elem))
        throw InconsistentData("the quotient unit class must be the marked class");

    const std::size_t k = req.six.k1q.free_rank();
    PiRealization e3 = realize_pi_simple_cert(g3, req.g3_elem, k);
    PiRealization e1 = realize_pi_simple_cert(g1, Vec(g1.ambient_rank(), Int(0)), 0);
    const IntMatrix& a = e1.alpha.src.relations();
    const IntMatrix& b = e3.alpha.src.relations();
    const std::size_t n1 = a.rows(), n3 = b.rows(), n3p = b.cols();
    log.push_back("ideal piece on " + std::to_string(n1) + " vertices, quotient piece on " +
                  std::to_string(n3));

    // off-diagonal block aligned with the requested boundary map
    std::vector<Vec> targets;
    {
        GroupHom a1inv = inverse_of(e1.alpha);
        for (const Vec& tv : boundary_targets(req, k)) targets.push_back(a1inv.apply(tv));
    }
    IntMatrix y0 = align_rows(b, targets, n1);
    MiddleIdent mi = identify_middle(a, y0, b, req, e1.alpha, e3.alpha);
    if (mi.twisted)
        log.push_back("off-diagonal block twisted to match the requested extension class");

    // point the marked class and push every entry to at least one
    IntMatrix floor(n1, n3p);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n3p; ++j) floor.at(i, j) = 1;
    GlueProblem gp{a,
                   b,
                   std::move(mi.y),
                   std::move(floor),
                   Vec(n1, Int(0)),
                   e3.dom_low,
                   e3.dom_high,
                   e1.alpha,
                   req.six.iota0,
                   std::move(mi.alpha2),
                   req.g2_elem};
    GlueResult gr = glue(gp);
    log.push_back(gr.log);
    const IntMatrix& yp = gr.y_prime;

    // assemble: ideal vertices first, then the quotient; the off-diagonal
    // entries are edges from quotient columns down into the ideal
    Graph e2;
    for (std::size_t v = 0; v < n1; ++v) e2.add_vertex("i" + std::to_string(v));
    for (std::size_t v = 0; v < n3; ++v) e2.add_vertex("q" + std::to_string(v));
    for (const auto& ed : e1.graph.edges()) e2.add_edge(ed.src, ed.dst, ed.m);
    for (const auto& ed : e3.graph.edges()) e2.add_edge(n1 + ed.src, n1 + ed.dst, ed.m);
    std::vector<std::size_t> regs = e3.graph.regular_vertices();
    for (std::size_t c = 0; c < n3p; ++c)
        for (std::size_t i = 0; i < n1; ++i)
            e2.add_edge(n1 + regs[c], i, Mult::fin(yp.at(i, c)));
    std::vector<std::size_t> ideal(n1);
    for (std::size_t i = 0; i < n1; ++i) ideal[i] = i;

    AugmentedInvariant rec = augmented_from_graph(e2, ideal);
    if (rec.six.k0a.relations() != glued_matrix(a, yp, b))
        throw ConstructionFailed("glued presentation drifted during assembly");
    GroupHom a1{rec.six.k0i, g1, e1.alpha.h};
    GroupHom a2{rec.six.k0a, g2, gr.adjusted_alpha2.h};
    GroupHom a3{rec.six.k0q, g3, e3.alpha.h};
    IsoCertificate cert = build_certificate(rec, req, std::move(a1), std::move(a2),
                                            std::move(a3));
    IsoReport rep = iso_verify(rec, req, cert);
    if (!rep.ok) throw VerificationFailed(join(rep.failures, "; "));
    if (rep.inconclusive)
        log.push_back("some verification probes ran dry at the default cap");
    for (const std::string& nt : rep.notes) log.push_back(nt);
    log.push_back("verified: recomputed invariant matches the request");
    return SynthesisResult{std::move(e2), std::move(ideal), 0,         std::move(cert),
                           std::move(rec), std::move(log)};
}

SynthesisResult synthesize_af(const AugmentedInvariant& req, std::vector<std::string> log) {
    const FgAbelianGroup& g1 = req.six.k0i;
    const FgAbelianGroup& g3 = req.six.k0q;
    if (req.six.unital_case != 1)
        throw UnsupportedCertificate("a staged realization is unital only on the "
                                     "quotient; requested case " +
                                     std::to_string(req.six.unital_case));
    if (req.six.unit_a || req.six.unit_i)
        throw InconsistentData("a nonunital level carries no unit class");
    if (!req.six.unit_q || !g3.equal(*req.six.unit_q, req.g3_elem))
        throw InconsistentData("the quotient unit class must be the marked class");

    const std::size_t k = req.six.k1q.free_rank();
    PiRealization e3 = realize_pi_simple_cert(g3, req.g3_elem, k);
    const IntMatrix& b = e3.alpha.src.relations();
    const std::size_t n3 = b.rows(), n3p = b.cols();

    InducedScale ind = induced_scale(req.h2, req.h2_elem, req.eps_tilde, req.gamma_tilde);
    for (const std::string& nt : ind.notes) log.push_back(nt);
    StagedGraph piece = realize_af_scaled(ScaledGroup{req.h1.group, req.h1.cone, ind.cert});
    const bool stationary = std::holds_alternative<StationaryCone>(req.h1.cone.data);
    if (piece.core.size() != 1)
        throw UnsupportedCertificate(
            "stationary ideals with more than one stage coordinate give truncations "
            "with several sinks, whose pieces are not simple; not synthesized here");

    const Int sgn = orient_ideal(req);
    std::vector<Vec> targets = boundary_targets(req, k);
    IntMatrix yrow(1, n3p);
    std::optional<GroupHom> a2core;
    if (!stationary) {
        // matrix-unit ideal: align the boundary on the core presentation,
        // then point and positivize with the dominating pair
        IntMatrix a0(1, 0);
        FgAbelianGroup ck(a0);
        IntMatrix a1cm(g1.ambient_rank(), 1);
        {
            Vec col = g1.lift({sgn});
            for (std::size_t r = 0; r < col.size(); ++r) a1cm.at(r, 0) = col[r];
        }
        GroupHom alpha1core{ck, g1, std::move(a1cm)};
        std::vector<Vec> itargets;
        for (const Vec& tv : targets) itargets.push_back({sgn * g1.reduce(tv)[0]});
        IntMatrix y0 = align_rows(b, itargets, 1);
        MiddleIdent mi = identify_middle(a0, y0, b, req, alpha1core, e3.alpha);
        if (mi.twisted)
            log.push_back("off-diagonal row twisted to match the requested extension class");
        IntMatrix floor(1, n3p);
        for (std::size_t j = 0; j < n3p; ++j) floor.at(0, j) = 1;
        GlueProblem gp{a0,
                       b,
                       std::move(mi.y),
                       std::move(floor),
                       Vec(1, Int(0)),
                       e3.dom_low,
                       e3.dom_high,
                       std::move(alpha1core),
                       req.six.iota0,
                       std::move(mi.alpha2),
                       req.g2_elem};
        GlueResult gr = glue(gp);
        log.push_back(gr.log);
        yrow = gr.y_prime;
        a2core = std::move(gr.adjusted_alpha2);
    } else {
        // stationary ideal: the attach class scales with depth, so only a
        // vanishing boundary is realized; a row of the quotient matrix is
        // positive and kills the kernel
        for (const Vec& tv : targets)
            if (!g1.is_zero_class(tv))
                throw UnsupportedCertificate("a stationary staged ideal needs a vanishing "
                                             "boundary map");
        yrow = IntMatrix(1, n3p);
        for (std::size_t j = 0; j < n3p; ++j) yrow.at(0, j) = b.at(e3.dom_high, j);
        log.push_back("off-diagonal row copied from the quotient matrix: positive and "
                      "orthogonal to its kernel");
    }

    // staged middle graph: the attach vertex, the quotient piece, and the
    // carried tail or block
    StagedGraph mid;
    mid.core.add_vertex(piece.core.name(0));
    for (std::size_t v = 0; v < n3; ++v) mid.core.add_vertex("q" + std::to_string(v));
    for (const auto& ed : e3.graph.edges()) mid.core.add_edge(1 + ed.src, 1 + ed.dst, ed.m);
    std::vector<std::size_t> regs = e3.graph.regular_vertices();
    for (std::size_t c = 0; c < n3p; ++c)
        if (yrow.at(0, c) > 0) mid.core.add_edge(1 + regs[c], 0, Mult::fin(yrow.at(0, c)));
    mid.tails = piece.tails;
    mid.block = piece.block;

    std::string last_err = "no depth attempted";
    for (std::size_t d = 3; d + 1 <= 8; ++d) {
        try {
            AfAttempt first = af_attempt(mid, req, e3, d, !stationary, a2core, sgn);
            AfAttempt second = af_attempt(mid, req, e3, d + 1, !stationary, a2core, sgn);
            log.push_back("verified at depths " + std::to_string(d) + " and " +
                          std::to_string(d + 1));
            if (first.inconclusive || second.inconclusive)
                log.push_back("some verification probes ran dry at the default cap");
            for (const std::string& nt : first.notes) log.push_back(nt);
            return SynthesisResult{std::move(mid),           {0}, d, std::move(first.cert),
                                   std::move(first.rec), std::move(log)};
        } catch (const Error& e) {
            last_err = e.what();
        }
    }
    throw VerificationFailed("no truncation depth through 8 verified; last failure: " +
                             last_err);
}

} // namespace

SynthesisResult synthesize(const AugmentedInvariant& request) {
    std::vector<std::string> log;
    validate_request(request);
    Verdict hv = check_hypotheses(request);
    std::vector<std::string> failed;
    for (const ConditionResult& item : hv.items) {
        if (item.status == CondStatus::Fail)
            failed.push_back(item.name + ": " + item.note);
        else if (item.status == CondStatus::Inconclusive)
            log.push_back("assumed " + item.name + ": " + item.note);
    }
    if (!failed.empty()) throw HypothesesNotMet(join(failed, "; "));

    const ConeCert& ic = request.h1.cone;
    const auto* dc = std::get_if<DeclaredCone>(&ic.data);
    if (std::holds_alternative<FullCone>(ic.data) || (dc && dc->full))
        return synthesize_pi(request, std::move(log));
    if (std::holds_alternative<SimplicialCone>(ic.data) ||
        std::holds_alternative<StationaryCone>(ic.data))
        return synthesize_af(request, std::move(log));
    throw UnsupportedCertificate("ideal order certificate (" + ic.to_string() +
                                 ") outside the synthesizable classes");
}

} // namespace gck
