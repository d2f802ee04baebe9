#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "remodel/hypergeo.hpp"
#include "remodel/json_io.hpp"

using namespace remodel;

namespace {

struct Setup {
    StackyFan3 fan;
    DivisorLattice lat;
    EquivWeights w;
};

Setup setup(const std::string& name) {
    Setup s;
    s.fan = canonicalize(load_fan("data/fans/" + name + ".json"));
    s.lat = nef_basis(s.fan);
    s.w = equiv_weights(s.fan, s.lat);
    return s;
}

double reldiff(cplx a, cplx b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

} // namespace

TEST_CASE("laurent expansion in 1/z") {
    // c = U1/(1 + U2): [z^-1] = u1, [z^-2] = -u1 u2, ...
    RatFun2 c = RatFun2::from_aff(AffForm{LinForm{rat(1), rat(0)}, Rat(0)});
    c = c.div_aff(AffForm{LinForm{rat(0), rat(1)}, Rat(1)});
    auto lz = laurent_in_invz(c, 2);
    CHECK(lz[1].num.c.at({1, 0}) == 1);
    CHECK(lz[2].num.c.at({1, 1}) == -1);
    // pure 1/U1 contributes z^{+1}/u1
    RatFun2 d = RatFun2::inv_aff(AffForm{LinForm{rat(1), rat(0)}, Rat(0)});
    auto lz2 = laurent_in_invz(d, 2);
    CHECK(lz2.count(-1));
}

TEST_CASE("C3: I is identically 1") {
    auto s = setup("c3");
    auto box = box_elements(s.fan, s.fan.cones[0]);
    auto I = i_component(s.fan, s.lat, s.w, s.fan.cones[0], box[0], 9);
    auto one = LogSeries::one(0, rat(9));
    CHECK((I - one).is_zero());
}

TEST_CASE("conifold: I series and its leading structure") {
    auto s = setup("conifold");
    for (auto& sigma : s.fan.cones) {
        auto box = box_elements(s.fan, sigma);
        auto I = i_component(s.fan, s.lat, s.w, sigma, box[0], 5);
        // leading term 1
        QExp zero;
        zero.e.assign(1, Rat(0));
        CHECK(I.terms.at(zero).at(LogMask(1, 0)) == RatFun2(Rat(1)));
        // order-1 coefficient is a ratio of affine forms (hand-checked shape: nonzero)
        QExp one;
        one.e.assign(1, Rat(1));
        CHECK(I.terms.count(one));
    }
}

TEST_CASE("[C3/Z3]: twisted leading terms") {
    auto s = setup("c3z3");
    auto sigma = s.fan.cones[0];
    auto box = box_elements(s.fan, sigma);
    auto I1 = i_component(s.fan, s.lat, s.w, sigma, box[1], 7); // age 1
    QExp e1;
    e1.e.assign(1, Rat(1));
    CHECK(I1.terms.at(e1).at(LogMask(1, 0)) == RatFun2(Rat(1))); // q^v with coefficient 1
    auto I2 = i_component(s.fan, s.lat, s.w, sigma, box[2], 7); // age 2
    QExp e2;
    e2.e.assign(1, Rat(2));
    CHECK(I2.terms.at(e2).at(LogMask(1, 0)) == RatFun2(Rat(1, 2))); // 1/(2!) from the extra direction
}

TEST_CASE("GKZ annihilation on the example library") {
    for (auto name : {"conifold", "c3z3", "c2z2xc", "kp2"}) {
        auto s = setup(name);
        auto betas = gkz_test_set(s.lat);
        REQUIRE(!betas.empty());
        for (auto& sigma : s.fan.cones)
            for (auto& v : box_elements(s.fan, sigma)) {
                auto I = i_component(s.fan, s.lat, s.w, sigma, v, 8);
                for (auto& beta : betas) {
                    auto r = gkz_apply(s.fan, s.lat, beta, I);
                    INFO(name, " beta0=", beta[0], " order=", rat_str(r.order));
                    CHECK(r.is_zero());
                }
            }
    }
}

TEST_CASE("GKZ annihilation fails for a corrupted series") {
    auto s = setup("conifold");
    auto box = box_elements(s.fan, s.fan.cones[0]);
    auto I = i_component(s.fan, s.lat, s.w, s.fan.cones[0], box[0], 6);
    QExp e1;
    e1.e.assign(1, Rat(1));
    I.terms[e1][LogMask(1, 0)] = I.terms[e1][LogMask(1, 0)] * Rat(3, 2);
    auto betas = gkz_test_set(s.lat);
    bool some_nonzero = false;
    for (auto& beta : betas) some_nonzero |= !gkz_apply(s.fan, s.lat, beta, I).is_zero();
    CHECK(some_nonzero);
}

TEST_CASE("homogeneity operator annihilates every component exactly") {
    for (auto name : {"c3", "conifold", "c3z3"}) {
        auto s = setup(name);
        for (auto& sigma : s.fan.cones)
            for (auto& v : box_elements(s.fan, sigma)) {
                auto I = i_component(s.fan, s.lat, s.w, sigma, v, 6);
                CHECK(euler_apply(I).is_zero());
            }
    }
}

TEST_CASE("series evaluation matches a by-hand sum (conifold)") {
    auto s = setup("conifold");
    auto box = box_elements(s.fan, s.fan.cones[0]);
    auto I = i_component(s.fan, s.lat, s.w, s.fan.cones[0], box[0], 8);
    cplx u1(0.43, 0.1), u2(0.27, -0.04), z(0.9, 0.03);
    std::vector<cplx> q{cplx(3e-3, 1e-3)};
    cplx got = I.eval(u1, u2, z, q);
    // direct sum from the restriction formula
    int ci = cone_index(s.fan, s.fan.cones[0]);
    auto eff = effective_classes(s.fan, s.lat, s.fan.cones[0], 8);
    cplx pref = std::exp(-s.w.w_nef[ci][0].eval(u1 / z, u2 / z) * std::log(q[0]));
    cplx sum = 0;
    for (auto& e : eff) {
        cplx t = 1;
        for (int i = 1; i <= s.fan.num_points(); ++i) {
            double d = to_double(e.beta[i - 1]);
            if (s.fan.has_ray(s.fan.cones[0], i)) {
                cplx X = 1.0 - s.w.w(ci, i).eval(u1 / z, u2 / z);
                long k = to_long(Rat(e.beta[i - 1]));
                if (k > 0)
                    for (long m = 0; m < k; ++m) t /= X + double(m);
                else
                    for (long m = 1; m <= -k; ++m) t *= X - double(m);
            } else {
                t /= to_double(Rat(factorial(to_long(Rat(e.beta[i - 1])))));
            }
            (void)d;
        }
        sum += t * std::pow(q[0], (double)e.total_deg);
    }
    CHECK(reldiff(got, pref * sum) < 1e-12);
}

TEST_CASE("mirror map: C3 is trivial") {
    auto s = setup("c3");
    auto mm = mirror_map(s.fan, s.lat, s.w, 6);
    CHECK(mm.kaehler.empty());
    CHECK(mm.orbifold.empty());
}

TEST_CASE("mirror map: resolved conifold is log q exactly") {
    auto s = setup("conifold");
    auto mm = mirror_map(s.fan, s.lat, s.w, 6);
    REQUIRE(mm.kaehler.size() == 1);
    CHECK(mm.kaehler[0].has_log);
    CHECK(mm.kaehler[0].c.empty()); // no corrections for O(-1)+O(-1)
}

TEST_CASE("mirror map: K_P2 corrections against the large-z extraction oracle") {
    auto s = setup("kp2");
    auto mm = mirror_map(s.fan, s.lat, s.w, 4);
    REQUIRE(mm.kaehler.size() == 1);
    CHECK(mm.kaehler[0].has_log);
    REQUIRE(!mm.kaehler[0].c.empty());
    QExp e1;
    e1.e.assign(1, Rat(1));
    CHECK(mm.kaehler[0].c.count(e1));
    std::vector<cplx> q{cplx(1e-2, 0)};
    cplx u1(0.31, 0), u2(0.17, 0);
    cplx tau_val = mm.kaehler[0].eval(q, 0);
    // z * (I_untwisted(+z) - 1) -> tau_1 * w_{1,sigma} + mu(q)(u) as z grows, per cone
    cplx mu = 0;
    for (auto& [e, f] : mm.character) {
        cplx t = f.eval(u1, u2);
        for (size_t a = 0; a < e.e.size(); ++a) t *= std::pow(q[a], to_double(e.e[a]));
        mu += t;
    }
    for (size_t k = 0; k < s.fan.cones.size(); ++k) {
        auto box = box_elements(s.fan, s.fan.cones[k]);
        auto Ip = i_component(s.fan, s.lat, s.w, s.fan.cones[k], box[0], 4).flip_z();
        cplx w1 = s.w.w_nef[k][0].eval(u1, u2);
        cplx z(8e3, 0);
        cplx lhs = z * (Ip.eval(u1, u2, z, q) - 1.0);
        CHECK(std::abs(lhs - (tau_val * w1 + mu)) < 2e-3 * std::abs(tau_val) + 1e-9);
    }
    // known first correction of the local-P2 mirror map in the <H, generator> = 1 normalization
    CHECK(mm.kaehler[0].c.at(e1) == -6);
}

TEST_CASE("mirror map: [C3/Z3] orbifold direction is log-free with leading q") {
    auto s = setup("c3z3");
    auto mm = mirror_map(s.fan, s.lat, s.w, 7);
    CHECK(mm.kaehler.empty());
    REQUIRE(mm.orbifold.size() == 1);
    auto& t = mm.orbifold[0].second;
    CHECK(!t.has_log);
    QExp e1;
    e1.e.assign(1, Rat(1));
    REQUIRE(t.c.count(e1));
    CHECK(t.c.at(e1) == 1);
    // next correction sits at q^4 with the factorial normalization of the components
    QExp e4;
    e4.e.assign(1, Rat(4));
    REQUIRE(t.c.count(e4));
    CHECK(t.c.at(e4) == Rat(-1, 648));
    // oracle: tau_v = lim_{z->inf} I^+_{sigma,v} evaluated directly
    auto box = box_elements(s.fan, s.fan.cones[0]);
    auto Ip = i_component(s.fan, s.lat, s.w, s.fan.cones[0], box[1], 7).flip_z();
    std::vector<cplx> q{cplx(0.05, 0.01)};
    cplx got = Ip.eval(cplx(0.4, 0), cplx(0.23, 0), cplx(9e3, 0), q);
    cplx want = t.eval(q, -1);
    CHECK(std::abs(got - want) < 1e-6 * std::abs(want));
}

TEST_CASE("appendix-B identities hold and the negative control fails") {
    for (auto name : {"c3", "conifold", "c3z3", "kp2", "c2z2xc"}) {
        auto s = setup(name);
        auto rep = appendixB_identities(s.fan, s.lat);
        for (auto& [row, ok] : rep.rows) {
            INFO(name, ": ", row);
            CHECK(ok);
        }
    }
    auto s = setup("conifold");
    auto bad = s.lat.m_coeff;
    bad[0][0] += 1;
    auto rep = appendixB_identities(s.fan, s.lat, &bad);
    CHECK(!rep.ok());
}

TEST_CASE("exponent shifts and leading exponents separate the components") {
    for (auto name : {"conifold", "c3z3", "kp2"}) {
        auto s = setup(name);
        std::vector<std::pair<std::vector<LinForm>, QExp>> seen;
        for (auto& sigma : s.fan.cones)
            for (auto& v : box_elements(s.fan, sigma)) {
                auto I = i_component(s.fan, s.lat, s.w, sigma, v, 6);
                REQUIRE(!I.terms.empty());
                QExp lead = I.terms.begin()->first;
                for (auto& prev : seen)
                    CHECK(!(prev.first == I.shift && prev.second == lead));
                seen.push_back({I.shift, lead});
            }
    }
}
