#include "doctest.h"

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "aug_builder.hpp"
#include "gck/error.hpp"
#include "gck/synth.hpp"

// request specs below spell out only the fields that differ from a plain
// pullback; the rest keep their defaults
#if defined(__GNUC__)
#pragma GCC diagnostic ignored "-Wmissing-field-initializers"
#endif

using namespace gck;
using gcktest::RequestSpec;
using gcktest::build_request;

namespace {

bool log_contains(const std::vector<std::string>& log, const char* needle) {
    for (const std::string& line : log)
        if (line.find(needle) != std::string::npos) return true;
    return false;
}

// Shared assertions for a successful synthesis: the shipped certificate
// verifies against the request from the outside, and the recomputed
// invariant is exact.
SynthesisResult round_trip(const AugmentedInvariant& req) {
    SynthesisResult r = synthesize(req);
    IsoReport rep = iso_verify(r.recomputed, req, r.certificate);
    CHECK(rep.ok);
    CHECK(rep.failures.empty());
    CHECK(verify_exactness(r.recomputed.six).ok);
    return r;
}

} // namespace

// ------------------------------------------------------------- glue

TEST_CASE("glue: the worked one-row example lands exactly") {
    IntMatrix a = IntMatrix::of({{1}});
    IntMatrix b = IntMatrix::of({{1, 1}, {2, 2}});
    IntMatrix y(1, 2);
    FgAbelianGroup ga(a);  // trivial group on one coordinate
    FgAbelianGroup gg(glued_matrix(a, y, b));
    GroupHom alpha1{ga, FgAbelianGroup::trivial(), IntMatrix(0, 1)};
    GroupHom eps = induced_hom(FgAbelianGroup::trivial(), gg, IntMatrix(3, 0));
    Vec g2{Int(0), Int(1), Int(1)};

    GlueProblem p{a, b, y, IntMatrix::of({{3, 3}}), Vec{Int(0)}, 0, 1,
                  alpha1, eps, identity_hom(gg), g2};
    GlueResult r = glue(p);
    CHECK(r.c == 3);
    CHECK(r.y_prime == IntMatrix::of({{3, 3}}));
    CHECK(r.q == IntMatrix::of({{-3, 3}}));
    CHECK(r.z_lift == Vec{Int(0)});

    // with nothing to dominate, the count stays at one
    p.z = IntMatrix(1, 2);
    GlueResult r2 = glue(p);
    CHECK(r2.c == 1);
    CHECK(r2.y_prime == IntMatrix::of({{1, 1}}));
}

TEST_CASE("glue: missing strict dominance and empty quotients are rejected") {
    IntMatrix a = IntMatrix::of({{1}});
    FgAbelianGroup ga(a);
    GroupHom alpha1{ga, FgAbelianGroup::trivial(), IntMatrix(0, 1)};
    {
        IntMatrix b = IntMatrix::of({{1, 1}, {1, 1}});
        IntMatrix y(1, 2);
        FgAbelianGroup gg(glued_matrix(a, y, b));
        GroupHom eps = induced_hom(FgAbelianGroup::trivial(), gg, IntMatrix(3, 0));
        GlueProblem p{a, b, y, IntMatrix(1, 2), Vec{Int(0)}, 0, 1,
                      alpha1, eps, identity_hom(gg), Vec{Int(0), Int(1), Int(1)}};
        CHECK_THROWS_AS(glue(p), NoDominance);
    }
    {
        IntMatrix b(0, 0);
        GroupHom eps = induced_hom(FgAbelianGroup::trivial(), FgAbelianGroup::trivial(),
                                   IntMatrix(0, 0));
        GlueProblem p{a, b, IntMatrix(1, 0), IntMatrix(1, 0), Vec{Int(0)}, 0, 0,
                      alpha1, eps, identity_hom(ga), Vec{Int(0)}};
        CHECK_THROWS_AS(glue(p), Infeasible);
    }
}

TEST_CASE("glue: random problems meet their floors without moving the invariant") {
    std::mt19937 rng(20240817u);
    auto ri = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n1 = static_cast<std::size_t>(ri(1, 3));
        const std::size_t c1 = static_cast<std::size_t>(ri(0, 3));
        const std::size_t n3 = static_cast<std::size_t>(ri(2, 4));
        const std::size_t n3p = static_cast<std::size_t>(ri(1, 4));
        IntMatrix a(n1, c1), b(n3, n3p), y(n1, n3p), z(n1, n3p);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < c1; ++j) a.at(i, j) = ri(-3, 3);
        for (std::size_t i = 0; i < n3; ++i)
            for (std::size_t j = 0; j < n3p; ++j) b.at(i, j) = ri(0, 4);
        std::size_t dl = static_cast<std::size_t>(ri(0, static_cast<int>(n3) - 1));
        std::size_t dh = dl;
        while (dh == dl) dh = static_cast<std::size_t>(ri(0, static_cast<int>(n3) - 1));
        for (std::size_t j = 0; j < n3p; ++j) b.at(dh, j) = b.at(dl, j) + ri(1, 3);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n3p; ++j) {
                y.at(i, j) = ri(-3, 3);
                z.at(i, j) = ri(-2, 5);
            }
        Vec x(n1), z0(n1);
        for (std::size_t i = 0; i < n1; ++i) {
            x[i] = ri(-2, 2);
            z0[i] = ri(-2, 2);
        }

        FgAbelianGroup ga(a);
        IntMatrix glued = glued_matrix(a, y, b);
        FgAbelianGroup gg(glued);
        IntMatrix incl = IntMatrix::zero(n1 + n3, n1);
        for (std::size_t i = 0; i < n1; ++i) incl.at(i, i) = 1;
        GroupHom eps = induced_hom(ga, gg, std::move(incl));
        Vec yv(n1 + n3, Int(1));
        for (std::size_t i = 0; i < n1; ++i) yv[i] = x[i];
        Vec g2 = yv;
        for (std::size_t i = 0; i < n1; ++i) g2[i] -= z0[i];

        GlueProblem p{a,  b,  y,  z, x, dl, dh, identity_hom(ga), std::move(eps),
                      identity_hom(gg), std::move(g2)};
        GlueResult r = glue(p);

        bool floors = true, ydiff = true;
        IntMatrix qb = r.q * b;
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n3p; ++j) {
                if (r.y_prime.at(i, j) < z.at(i, j)) floors = false;
                if (r.y_prime.at(i, j) - y.at(i, j) != qb.at(i, j)) ydiff = false;
            }
        CHECK(floors);
        CHECK(ydiff);
        CHECK(r.q.apply(Vec(n3, Int(1))) == r.z_lift);
        CHECK(FgAbelianGroup(glued_matrix(a, r.y_prime, b)).same_canonical_form(gg));
        CHECK(gg.equal(r.adjusted_alpha2.apply(yv), p.g2));
    }
}

// --------------------------------------- simple purely infinite piece

TEST_CASE("infinite simple realization: frozen small presentations") {
    {
        PiRealization r = realize_pi_simple_cert(FgAbelianGroup::trivial(), {}, 0);
        CHECK(r.alpha.src.relations() == IntMatrix::of({{4, 1}, {7, 2}}));
        CHECK(r.dom_low == 0);
        CHECK(r.dom_high == 1);
        CHECK(classify_simple(r.graph).cls == SimpleClass::SimplePurelyInfinite);
    }
    {
        PiRealization r = realize_pi_simple_cert(FgAbelianGroup::from_orders({Int(2)}, 0),
                                                 Vec{Int(1)}, 0);
        CHECK(r.alpha.src.relations() ==
              IntMatrix::of({{6, 8, 2}, {2, 4, 1}, {4, 7, 2}}));
        CHECK(r.dom_low == 1);
        CHECK(r.dom_high == 2);
    }
    {
        PiRealization r =
            realize_pi_simple_cert(FgAbelianGroup::free_group(1), Vec{Int(0)}, 1);
        CHECK(r.alpha.src.relations() ==
              IntMatrix::of({{2, 4, 1}, {2, 4, 1}, {4, 7, 2}}));
        KPair kp = k_groups(r.graph);
        CHECK(kp.k1.free_rank() == 1);
    }
    CHECK_THROWS_AS(realize_pi_simple(FgAbelianGroup::free_group(1), Vec{Int(0)}, 2),
                    Infeasible);
}

TEST_CASE("infinite simple realization: random invariants round-trip") {
    std::mt19937 rng(911u);
    auto ri = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    const int pool[4] = {2, 3, 4, 6};
    for (int iter = 0; iter < 30; ++iter) {
        const std::size_t t = static_cast<std::size_t>(ri(0, 2));
        const std::size_t f = static_cast<std::size_t>(ri(0, 2));
        Vec orders;
        for (std::size_t i = 0; i < t; ++i) orders.push_back(pool[ri(0, 3)]);
        FgAbelianGroup g = FgAbelianGroup::from_orders(orders, f);
        Vec elem(g.ambient_rank());
        for (std::size_t i = 0; i < elem.size(); ++i) elem[i] = ri(-3, 3);
        const std::size_t k = f == 0 ? 0 : static_cast<std::size_t>(ri(0, static_cast<int>(f)));

        PiRealization r = realize_pi_simple_cert(g, elem, k);
        KPair kp = k_groups(r.graph);
        CHECK(kp.k0.same_canonical_form(g));
        CHECK(kp.k1.torsion().empty());
        CHECK(kp.k1.free_rank() == k);
        CHECK(r.alpha.well_defined());
        CHECK(is_isomorphism(r.alpha));
        CHECK(g.equal(r.alpha.apply(Vec(r.graph.size(), Int(1))), elem));
        CHECK(classify_simple(r.graph).cls == SimpleClass::SimplePurelyInfinite);
    }
}

// ------------------------------------------------------ induced scale

TEST_CASE("induced scale: simplified hosts hand back their certificates") {
    FgAbelianGroup z1 = FgAbelianGroup::free_group(1);
    {
        FgAbelianGroup g2 = FgAbelianGroup::free_group(2);
        ScaledGroup host{g2, ConeCert{FullCone{}}, ScaleCert{FullScale{}}};
        GroupHom eps = induced_hom(z1, g2, IntMatrix::of({{1}, {0}}));
        GroupHom gam = induced_hom(g2, z1, IntMatrix::of({{0, 1}}));
        InducedScale out = induced_scale(host, Vec{Int(0), Int(1)}, eps, gam);
        CHECK(std::holds_alternative<FullScale>(out.cert.data));
    }
    {
        auto inner = std::make_shared<ScaledGroup>(ScaledGroup{
            z1, ConeCert{StationaryCone{IntMatrix::of({{2}}), {Vec{Int(1)}}}},
            ScaleCert{OrbitScale{Vec{Int(1)}, IntMatrix::of({{2}})}}});
        FgAbelianGroup hg(IntMatrix(2, 0));
        ScaledGroup host{hg,
                         ConeCert{ExtensionCone{std::make_shared<ConeCert>(inner->cone)}},
                         ScaleCert{HullScale{inner}}};
        GroupHom eps = induced_hom(z1, hg, IntMatrix::of({{1}, {0}}));
        GroupHom gam = induced_hom(hg, z1, IntMatrix::of({{0, 1}}));
        InducedScale out = induced_scale(host, Vec{Int(0), Int(1)}, eps, gam);
        const auto* o = std::get_if<OrbitScale>(&out.cert.data);
        REQUIRE(o != nullptr);
        CHECK(o->seed == Vec{Int(1)});
        CHECK(o->block == IntMatrix::of({{2}}));
    }
}

TEST_CASE("induced scale: the generic wrap decides through the host") {
    FgAbelianGroup z1 = FgAbelianGroup::free_group(1);
    FgAbelianGroup g2 = FgAbelianGroup::free_group(2);
    ConeCert axes{SimplicialCone{{Vec{Int(1), Int(0)}, Vec{Int(0), Int(1)}}}};
    GroupHom eps = induced_hom(z1, g2, IntMatrix::of({{1}, {0}}));
    GroupHom gam = induced_hom(g2, z1, IntMatrix::of({{0, 1}}));
    Vec base{Int(0), Int(1)};

    ScaledGroup host{g2, axes, ScaleCert{UnitScale{Vec{Int(5), Int(1)}}}};
    InducedScale out = induced_scale(host, base, eps, gam);
    REQUIRE(std::holds_alternative<InducedScaleCert>(out.cert.data));
    ScaledGroup wrapped{z1, ConeCert{SimplicialCone{{Vec{Int(1)}}}}, out.cert};
    CHECK(scale_member(wrapped, Vec{Int(0)}) == Tri::Pass);
    CHECK(scale_member(wrapped, Vec{Int(1)}) == Tri::Pass);
    CHECK(scale_member(wrapped, Vec{Int(5)}) == Tri::Pass);
    CHECK(scale_member(wrapped, Vec{Int(6)}) == Tri::Fail);
    CHECK(scale_member(wrapped, Vec{Int(-1)}) == Tri::Fail);

    CHECK_THROWS_AS(induced_scale(host, Vec{Int(0), Int(2)}, eps, gam), BadBasePoint);
    ScaledGroup tight{g2, axes, ScaleCert{UnitScale{Vec{Int(3), Int(0)}}}};
    CHECK_THROWS_AS(induced_scale(tight, base, eps, gam), BadBasePoint);
    GroupHom badgam =
        induced_hom(g2, FgAbelianGroup::from_orders({Int(2)}, 0), IntMatrix::of({{0, 1}}));
    CHECK_THROWS_AS(induced_scale(host, base, eps, badgam), InconsistentData);
}

// ----------------------------------------------------- scaled AF piece

TEST_CASE("scaled limit pieces: tails for simplicial, blocks for stationary") {
    FgAbelianGroup z1 = FgAbelianGroup::free_group(1);
    {
        StagedGraph s = realize_af_scaled(
            {z1, ConeCert{SimplicialCone{{Vec{Int(1)}}}}, ScaleCert{FullScale{}}});
        CHECK(s.core.size() == 1);
        REQUIRE(s.tails.size() == 1);
        CHECK(s.tails[0].inward);
        CHECK_FALSE(s.block.has_value());
    }
    {
        StagedGraph s = realize_af_scaled(
            {z1, ConeCert{StationaryCone{IntMatrix::of({{2}}), {Vec{Int(1)}}}},
             ScaleCert{OrbitScale{Vec{Int(1)}, IntMatrix::of({{2}})}}});
        CHECK(s.core.size() == 1);
        CHECK(s.tails.empty());
        REQUIRE(s.block.has_value());
        CHECK(s.block->block == IntMatrix::of({{2}}));
    }
    {
        IntMatrix fib = IntMatrix::of({{1, 1}, {1, 0}});
        StagedGraph s = realize_af_scaled(
            {FgAbelianGroup::free_group(2),
             ConeCert{StationaryCone{fib, {Vec{Int(1), Int(0)}, Vec{Int(0), Int(1)}}}},
             ScaleCert{FullScale{}}});
        CHECK(s.core.size() == 2);
        REQUIRE(s.block.has_value());
        CHECK(s.block->block == fib);
    }
    CHECK_THROWS_AS(
        realize_af_scaled({z1, ConeCert{SimplicialCone{{Vec{Int(1)}}}},
                           ScaleCert{UnitScale{Vec{Int(5)}}}}),
        UnsupportedCertificate);
    CHECK_THROWS_AS(
        realize_af_scaled({z1, ConeCert{SimplicialCone{{Vec{Int(1)}}}},
                           ScaleCert{BoundedByScale{{Vec{Int(3)}}}}}),
        UnsupportedCertificate);
    CHECK_THROWS_AS(
        realize_af_scaled(
            {FgAbelianGroup::free_group(2),
             ConeCert{SimplicialCone{{Vec{Int(1), Int(0)}, Vec{Int(0), Int(1)}}}},
             ScaleCert{FullScale{}}}),
        UnsupportedCertificate);
}

// --------------------------------------------------------- synthesize

TEST_CASE("synthesize: finite graphs for fully ordered ideals") {
    FgAbelianGroup z1 = FgAbelianGroup::free_group(1);

    // trivial quotient
    {
        RequestSpec s{.g1 = z1,
                      .g2 = z1,
                      .g3 = FgAbelianGroup::trivial(),
                      .iota0 = IntMatrix::of({{1}}),
                      .pi0 = IntMatrix(0, 1),
                      .g2_elem = Vec{Int(1)}};
        SynthesisResult r = round_trip(build_request(s));
        REQUIRE(std::holds_alternative<Graph>(r.graph));
        CHECK(r.depth == 0);
        CHECK(r.ideal_vertices == std::vector<std::size_t>{0, 1, 2});
        AugmentedInvariant again =
            augmented_from_graph(std::get<Graph>(r.graph), r.ideal_vertices);
        CHECK(iso_verify(again, build_request(s), r.certificate).ok);
    }

    // split torsion quotient
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup(IntMatrix::of({{0}, {2}})),
                      .g3 = FgAbelianGroup::from_orders({Int(2)}, 0),
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(0), Int(1)}};
        SynthesisResult r = round_trip(build_request(s));
        CHECK_FALSE(log_contains(r.log, "twisted"));
        AugmentedInvariant again =
            augmented_from_graph(std::get<Graph>(r.graph), r.ideal_vertices);
        CHECK(iso_verify(again, build_request(s), r.certificate).ok);
    }

    // nonsplit extension of Z/2 by Z: the block needs a twist
    {
        RequestSpec s{.g1 = z1,
                      .g2 = z1,
                      .g3 = FgAbelianGroup::from_orders({Int(2)}, 0),
                      .iota0 = IntMatrix::of({{2}}),
                      .pi0 = IntMatrix::of({{1}}),
                      .g2_elem = Vec{Int(1)}};
        SynthesisResult r = round_trip(build_request(s));
        CHECK(log_contains(r.log, "twisted"));
        CHECK(r.recomputed.six.k0a.same_canonical_form(z1));
    }

    // two torsion factors at once
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup(IntMatrix::of({{0, 0}, {2, 0}, {0, 4}})),
                      .g3 = FgAbelianGroup::from_orders({Int(2), Int(4)}, 0),
                      .iota0 = IntMatrix::of({{1}, {0}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1, 0}, {0, 0, 1}}),
                      .g2_elem = Vec{Int(0), Int(1), Int(1)}};
        round_trip(build_request(s));
    }

    // torsion ideal group
    {
        RequestSpec s{.g1 = FgAbelianGroup::from_orders({Int(3)}, 0),
                      .g2 = FgAbelianGroup(IntMatrix::of({{3, 0}, {0, 2}})),
                      .g3 = FgAbelianGroup::from_orders({Int(2)}, 0),
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(1), Int(1)}};
        SynthesisResult r = round_trip(build_request(s));
        CHECK(r.ideal_vertices == std::vector<std::size_t>{0, 1, 2});
    }
}

TEST_CASE("synthesize: quotient kernels ride along, absorbed or kept") {
    FgAbelianGroup z1 = FgAbelianGroup::free_group(1);

    // nonzero boundary: the middle kernel dies into the ideal
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup(IntMatrix::of({{2}, {0}})),
                      .g3 = z1,
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(0), Int(1)},
                      .k1q = z1,
                      .del1 = IntMatrix::of({{2}})};
        SynthesisResult r = round_trip(build_request(s));
        CHECK(r.recomputed.six.k1a.is_trivial());
        CHECK(r.recomputed.six.k1q.free_rank() == 1);
    }

    // zero boundary: the kernel passes through the middle
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup::free_group(2),
                      .g3 = z1,
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(0), Int(1)},
                      .k1a = z1,
                      .k1q = z1,
                      .pi1 = IntMatrix::of({{1}})};
        SynthesisResult r = round_trip(build_request(s));
        CHECK(r.recomputed.six.k1a.free_rank() == 1);
    }
}

TEST_CASE("synthesize: staged graphs for matrix-unit limit ideals") {
    FgAbelianGroup z1 = FgAbelianGroup::free_group(1);
    ConeCert ray{SimplicialCone{{Vec{Int(1)}}}};

    // split
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup(IntMatrix::of({{0}, {2}})),
                      .g3 = FgAbelianGroup::from_orders({Int(2)}, 0),
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(0), Int(1)},
                      .cone_i = ray,
                      .unital_case = 1};
        SynthesisResult r = round_trip(build_request(s));
        REQUIRE(std::holds_alternative<StagedGraph>(r.graph));
        CHECK(r.depth >= 3);
        CHECK(r.ideal_vertices == std::vector<std::size_t>{0});
        CHECK(r.recomputed.six.unital_case == 1);
        CHECK(log_contains(r.log, "verified at depths"));
    }

    // nonsplit
    {
        RequestSpec s{.g1 = z1,
                      .g2 = z1,
                      .g3 = FgAbelianGroup::from_orders({Int(2)}, 0),
                      .iota0 = IntMatrix::of({{2}}),
                      .pi0 = IntMatrix::of({{1}}),
                      .g2_elem = Vec{Int(1)},
                      .cone_i = ray,
                      .unital_case = 1};
        SynthesisResult r = round_trip(build_request(s));
        CHECK(log_contains(r.log, "twisted"));
    }

    // nonzero boundary into the limit ideal
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup(IntMatrix::of({{2}, {0}})),
                      .g3 = z1,
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(1), Int(1)},
                      .k1q = z1,
                      .del1 = IntMatrix::of({{2}}),
                      .cone_i = ray,
                      .unital_case = 1};
        SynthesisResult r = round_trip(build_request(s));
        CHECK(r.recomputed.six.k1a.is_trivial());
    }
}

TEST_CASE("synthesize: staged graphs for stationary limit ideals") {
    FgAbelianGroup z1 = FgAbelianGroup::free_group(1);
    ConeCert doubling{StationaryCone{IntMatrix::of({{2}}), {Vec{Int(1)}}}};
    ScaleCert orbit{OrbitScale{Vec{Int(1)}, IntMatrix::of({{2}})}};

    // trivial quotient
    {
        RequestSpec s{.g1 = z1,
                      .g2 = z1,
                      .g3 = FgAbelianGroup::trivial(),
                      .iota0 = IntMatrix::of({{1}}),
                      .pi0 = IntMatrix(0, 1),
                      .g2_elem = Vec{Int(-1)},
                      .cone_i = doubling,
                      .h1_scale = orbit,
                      .unital_case = 1};
        SynthesisResult r = round_trip(build_request(s));
        REQUIRE(std::holds_alternative<StagedGraph>(r.graph));
        CHECK(r.depth >= 3);
        CHECK(r.ideal_vertices == std::vector<std::size_t>{0});
        const StagedGraph& sg = std::get<StagedGraph>(r.graph);
        REQUIRE(sg.block.has_value());
        CHECK(sg.block->block == IntMatrix::of({{2}}));
    }

    // torsion quotient
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup(IntMatrix::of({{0}, {2}})),
                      .g3 = FgAbelianGroup::from_orders({Int(2)}, 0),
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(-1), Int(1)},
                      .cone_i = doubling,
                      .h1_scale = orbit,
                      .unital_case = 1};
        SynthesisResult r = round_trip(build_request(s));
        CHECK(log_contains(r.log, "verified at depths"));
    }

    // two torsion factors
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup(IntMatrix::of({{0, 0}, {2, 0}, {0, 4}})),
                      .g3 = FgAbelianGroup::from_orders({Int(2), Int(4)}, 0),
                      .iota0 = IntMatrix::of({{1}, {0}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1, 0}, {0, 0, 1}}),
                      .g2_elem = Vec{Int(-1), Int(1), Int(1)},
                      .cone_i = doubling,
                      .h1_scale = orbit,
                      .unital_case = 1};
        round_trip(build_request(s));
    }

    // free quotient
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup::free_group(2),
                      .g3 = z1,
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(-1), Int(1)},
                      .cone_i = doubling,
                      .h1_scale = orbit,
                      .unital_case = 1};
        SynthesisResult r = round_trip(build_request(s));
        CHECK(r.recomputed.six.k1q.is_trivial());
    }
}

TEST_CASE("synthesize: contract violations are rejected before construction") {
    FgAbelianGroup z1 = FgAbelianGroup::free_group(1);

    // nontrivial ideal kernel: hypothesis (viii) names the failure
    {
        RequestSpec s{.g1 = z1,
                      .g2 = FgAbelianGroup(IntMatrix::of({{0}, {2}})),
                      .g3 = FgAbelianGroup::from_orders({Int(2)}, 0),
                      .iota0 = IntMatrix::of({{1}, {0}}),
                      .pi0 = IntMatrix::of({{0, 1}}),
                      .g2_elem = Vec{Int(0), Int(1)},
                      .k1a = z1,
                      .k1i = z1,
                      .iota1 = IntMatrix::of({{1}})};
        bool threw = false;
        try {
            synthesize(build_request(s));
        } catch (const HypothesesNotMet& e) {
            threw = true;
            CHECK(std::string(e.what()).find("(viii)") != std::string::npos);
        }
        CHECK(threw);
    }

    RequestSpec base{.g1 = z1,
                     .g2 = z1,
                     .g3 = FgAbelianGroup::trivial(),
                     .iota0 = IntMatrix::of({{1}}),
                     .pi0 = IntMatrix(0, 1),
                     .g2_elem = Vec{Int(1)}};

    // an opaque order certificate picks no construction
    {
        RequestSpec s = base;
        s.cone_i = ConeCert{DeclaredCone{false}};
        CHECK_THROWS_AS(synthesize(build_request(s)), UnsupportedCertificate);
    }

    // unital case against the ideal certificate
    {
        RequestSpec s = base;
        s.unital_case = 1;
        CHECK_THROWS_AS(synthesize(build_request(s)), UnsupportedCertificate);
    }
    {
        RequestSpec s = base;
        s.cone_i = ConeCert{SimplicialCone{{Vec{Int(1)}}}};
        CHECK_THROWS_AS(synthesize(build_request(s)), UnsupportedCertificate);
    }

    // the marked middle class must be the unit where a unit is declared
    {
        AugmentedInvariant req = build_request(base);
        req.six.unit_a = Vec{Int(5)};
        CHECK_THROWS_AS(synthesize(req), InconsistentData);
    }
}
