#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "remodel/ktheory.hpp"
#include "remodel/sheafspec.hpp"
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

} // namespace

TEST_CASE("support classification on C3") {
    auto s = setup("c3");
    auto cl = classify_support(s.fan, s.w, Cocharacter{1, 1});
    // minimal plus cone = the ray at the origin point of P (weights u1,u2 positive)
    auto mp = cl.minimal(Support::plus);
    REQUIRE(mp.size() == 1);
    REQUIRE(mp[0].size() == 1);
    CHECK(s.w.w(0, mp[0][0]) == LinForm{rat(-1), rat(-1)});
    auto mm = cl.minimal(Support::minus);
    REQUIRE(mm.size() == 1);
    CHECK(mm[0].size() == 2);
    auto mc = cl.minimal(Support::compact);
    REQUIRE(mc.size() == 1);
    CHECK(mc[0].size() == 3); // the unique 3-cone: affine case
}

TEST_CASE("support classification: K_P2 compact part is the divisor star") {
    auto s = setup("kp2");
    auto cl = classify_support(s.fan, s.w, Cocharacter{3, 1});
    auto mc = cl.minimal(Support::compact);
    REQUIRE(mc.size() == 1);
    REQUIRE(mc[0].size() == 1); // the interior ray (compact divisor)
    auto st = polytope_stats(s.fan);
    CHECK(st.interior == 1);
    // sanity: the compact set contains the three interior walls
    int walls = 0;
    for (auto& c : cl.compact)
        if (c.size() == 2) ++walls;
    CHECK(walls == 3);
}

TEST_CASE("non-generic cocharacter is rejected with the offending flag") {
    auto s = setup("conifold");
    CHECK_THROWS_WITH_AS(classify_support(s.fan, s.w, Cocharacter{1, 0}),
                         doctest::Contains("not generic"), ktheory_error);
    CHECK_THROWS_AS(classify_support(s.fan, s.w, Cocharacter{1, -1}), ktheory_error); // a+b = 0 wall
    CHECK_NOTHROW(classify_support(s.fan, s.w, Cocharacter{2, 1}));
}

TEST_CASE("generators: conifold compact support is the interior curve") {
    auto s = setup("conifold");
    auto cl = classify_support(s.fan, s.w, Cocharacter{2, 1});
    auto gens = kgroup_generators(s.fan, cl, Support::compact);
    REQUIRE(gens.size() == 1);
    REQUIRE(gens[0].word.size() == 1);
    CHECK(gens[0].word[0].I.size() == 2);
    CHECK(is_interior(s.fan, Cone2{gens[0].word[0].I[0], gens[0].word[0].I[1]}));
}

TEST_CASE("generator relation: (1 - R_i^{-1}) G_I matches G_{I+i} or dies") {
    auto s = setup("conifold");
    auto check_relation = [&](const KClass& base, int i) {
        // (1 - R_i^{-1}) * base as a two-term word
        KClass lhs = base;
        std::vector<long> r(s.fan.num_rays(), 0);
        r[i - 1] = -1;
        KClass shifted = base.twisted(r);
        lhs = lhs + shifted * (-1);
        // union cone
        ConeKey I2 = base.word[0].I;
        if (std::find(I2.begin(), I2.end(), i) == I2.end()) I2.push_back(i);
        std::sort(I2.begin(), I2.end());
        bool is_cone = false;
        for (auto& c : s.fan.cones) {
            bool all = true;
            for (int j : I2) all = all && s.fan.has_ray(c, j);
            if (all) is_cone = true;
        }
        KClass rhs;
        rhs.word.push_back(GenWord{I2, base.word[0].twist, base.word[0].mult});
        for (size_t kc = 0; kc < s.fan.cones.size(); ++kc) {
            auto box = box_elements(s.fan, s.fan.cones[kc]);
            for (size_t kb = 0; kb < box.size(); ++kb) {
                SVKey key{(int)kc, (int)kb};
                CoeffExpr l = localization(s.fan, s.w, lhs, key);
                CoeffExpr r2 = is_cone ? localization(s.fan, s.w, rhs, key) : CoeffExpr::zero();
                CHECK(l == r2);
            }
        }
    };
    check_relation(divisor_class(s.fan, 2), 3);  // {2,3} is a cone
    check_relation(divisor_class(s.fan, 1), 4);  // {1,4} is not a cone
    check_relation(curve_class(s.fan, Cone2{2, 3}), 4);
}

TEST_CASE("frame: C3 divisor matches the closed-form coefficient") {
    auto s = setup("c3");
    // ray with weight -u1-u2 plays the role of D_3
    int d3 = 0;
    for (int i = 1; i <= 3; ++i)
        if (s.w.w(0, i) == LinForm{rat(-1), rat(-1)}) d3 = i;
    auto fr = frame(s.fan, s.w, divisor_class(s.fan, d3));
    REQUIRE(fr.a.size() == 1);
    const CoeffExpr& a = fr.a.begin()->second;
    LinForm w1{rat(1), rat(0)}, w2{rat(0), rat(1)}, w3{rat(-1), rat(-1)};
    CoeffExpr expect = CoeffExpr::minus_two_pi_i(1) * CoeffExpr::exp_pi(AffForm{w3, Rat(0)}) *
                       CoeffExpr::gamma(AffForm{w1, Rat(0)}) * CoeffExpr::gamma(AffForm{w2, Rat(0)}) *
                       CoeffExpr::gamma(AffForm{-w3, Rat(1)}, -1);
    CHECK(a == expect);
}

TEST_CASE("frame: point class localizes to its own cone only") {
    auto s = setup("conifold");
    auto fr = frame(s.fan, s.w, point_class(s.fan, s.fan.cones[0]));
    for (auto& [key, a] : fr.a) CHECK(key.cone == 0);
    REQUIRE(fr.a.size() == 1);
}

TEST_CASE("frame: twisting multiplies by the exponential factor") {
    auto s = setup("c3z3");
    auto base = curve_class(s.fan, s.fan.preferred_tau);
    std::vector<long> r(s.fan.num_rays(), 0);
    r[0] = 1; // twist by O(D_1)
    auto frt = frame(s.fan, s.w, base.twisted(r));
    auto fr = frame(s.fan, s.w, base);
    for (auto& [key, a] : fr.a) {
        auto box = box_elements(s.fan, s.fan.cones[key.cone]);
        AffForm arg{s.w.w(key.cone, 1), box[key.box].c(1)};
        CoeffExpr expect = a * CoeffExpr::exp_pi(arg * Rat(-2));
        CHECK(frt.a.at(key) == expect);
    }
}

TEST_CASE("frame is additive and M'-equivariant") {
    auto s = setup("conifold");
    auto e1 = divisor_class(s.fan, 1);
    auto e2 = curve_class(s.fan, Cone2{2, 3});
    auto fr_sum = frame(s.fan, s.w, e1 + e2);
    auto fr1 = frame(s.fan, s.w, e1);
    auto fr2 = frame(s.fan, s.w, e2);
    for (auto& [key, a] : fr_sum.a) {
        CoeffExpr want = CoeffExpr::zero();
        if (fr1.a.count(key)) want = want + fr1.a.at(key);
        if (fr2.a.count(key)) want = want + fr2.a.at(key);
        CHECK(a == want);
    }
    // character twist: r_s = <u, b_s> with u = (1,0,0) in M
    std::vector<long> r(s.fan.num_rays());
    for (int i = 1; i <= s.fan.num_rays(); ++i) r[i - 1] = s.fan.b(i)[0];
    auto frt = frame(s.fan, s.w, e2.twisted(r));
    CoeffExpr factor = CoeffExpr::exp_pi(AffForm{LinForm{rat(-2), rat(0)}, Rat(0)});
    for (auto& [key, a] : fr2.a) CHECK(frt.a.at(key) == a * factor);
}

TEST_CASE("euler characteristics on the conifold curve") {
    auto s = setup("conifold");
    auto curve = curve_class(s.fan, Cone2{2, 3}); // the compact curve
    CHECK(euler_characteristic(s.fan, s.w, curve) == 1);
    std::vector<long> r(s.fan.num_rays(), 0);
    r[0] = 1; // O(D_1) restricts with degree <D_1, beta> = 1
    CHECK(euler_characteristic(s.fan, s.w, curve.twisted(r)) == 2);
    r[0] = 0;
    r[1] = 1; // O(D_2), degree -1
    CHECK(euler_characteristic(s.fan, s.w, curve.twisted(r)) == 0);
    r[1] = 2; // O(2 D_2), degree -2: chi = -1
    CHECK(euler_characteristic(s.fan, s.w, curve.twisted(r)) == -1);
}

TEST_CASE("chi(O_X, O_pt) = 1 on a smooth chart") {
    auto s = setup("c3");
    auto cl = classify_support(s.fan, s.w, Cocharacter{1, 1});
    KClass ox;
    ox.support = Support::full;
    ox.word.push_back(GenWord{ConeKey{}, std::vector<long>(3, 0), 1});
    auto pt = point_class(s.fan, s.fan.cones[0]);
    CHECK(euler_pairing(s.fan, s.w, cl, ox, pt) == 1);
}

TEST_CASE("euler pairing against a Koszul-expansion oracle on the C3 chart") {
    auto s = setup("c3");
    auto cl = classify_support(s.fan, s.w, Cocharacter{1, 1});
    // chi(O_{D}, O_{D}(-D)-type pair) with D the minimal plus divisor {3}:
    // oracle by expanding [O_D] = 1 - R^{-1} and pairing against the point basis:
    // on the affine chart, Ext groups against O_D(-D) give chi = 0 here because the
    // supports meet in the non-proper divisor itself -> expect an error; use the
    // honest opposite pair instead
    auto mp = cl.minimal(Support::plus);
    auto mm = cl.minimal(Support::minus);
    KClass dplus;
    dplus.support = Support::plus;
    dplus.word.push_back(GenWord{mp[0], std::vector<long>(3, 0), 1});
    KClass lminus;
    lminus.support = Support::minus;
    lminus.word.push_back(GenWord{mm[0], std::vector<long>(3, 0), 1});
    Int chi = euler_pairing(s.fan, s.w, cl, dplus, lminus);
    // Koszul oracle: chi = (-1)^{|I+|} sum_S (-1)^{|S|} chi^c(O_pt tensor L_{I+} - S)
    // computed independently below
    ConeKey uni{1, 2, 3};
    Int oracle = 0;
    {
        std::vector<long> base(s.fan.num_rays(), 0);
        base[mp[0][0] - 1] += 1;
        KClass red;
        red.word.push_back(GenWord{uni, base, 1});
        oracle += -euler_characteristic(s.fan, s.w, red); // (-1)^{|I+|} = -1, S = {}
    }
    CHECK(chi == oracle);
}

TEST_CASE("euler pairing rejects mismatched supports") {
    auto s = setup("c3");
    auto cl = classify_support(s.fan, s.w, Cocharacter{1, 1});
    auto d = divisor_class(s.fan, 3);
    CHECK_THROWS_AS(euler_pairing(s.fan, s.w, cl, d, d), ktheory_error);
}

TEST_CASE("pairing matrix is upper-triangular with nonzero diagonal") {
    for (auto name : {"conifold", "kp2"}) {
        auto s = setup(name);
        auto cl = classify_support(s.fan, s.w, Cocharacter{3, 1});
        auto bp = pairing_basis(s.fan, s.w, cl, Support::plus);
        auto bm = pairing_basis(s.fan, s.w, cl, Support::minus);
        REQUIRE(bp.elements.size() == bm.elements.size());
        size_t n = bp.elements.size();
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Int chi = euler_pairing(s.fan, s.w, cl, bp.elements[i], bm.elements[j]);
                INFO(name, " entry ", i, ",", j, " = ", chi.get_str());
                if (i == j) CHECK(chi != 0);
                if (i > j) CHECK(chi == 0);
            }
    }
}

TEST_CASE("pairing against the summed point class is independent of sigma") {
    auto s = setup("conifold");
    auto cl = classify_support(s.fan, s.w, Cocharacter{2, 1});
    KClass ox;
    ox.support = Support::full;
    ox.word.push_back(GenWord{ConeKey{}, std::vector<long>(4, 0), 1});
    auto f1 = point_class_summed(s.fan, s.fan.cones[0]);
    auto f2 = point_class_summed(s.fan, s.fan.cones[1]);
    CHECK(euler_pairing(s.fan, s.w, cl, ox, f1) == euler_pairing(s.fan, s.w, cl, ox, f2));
}

TEST_CASE("non-equivariant limit of the summed point class is (-2 pi i)^3") {
    for (auto name : {"c3", "conifold", "c3z3"}) {
        auto s = setup(name);
        for (auto& sigma : s.fan.cones) {
            auto fr = frame(s.fan, s.w, point_class_summed(s.fan, sigma));
            auto lim = nonequiv_limit(s.fan, fr);
            REQUIRE(lim.a.size() == 1); // twisted sectors cancel in the character sum
            auto& [key, val] = *lim.a.begin();
            auto box = box_elements(s.fan, s.fan.cones[key.cone]);
            CHECK(box[key.box].age == 0);
            CHECK(val == CoeffExpr::minus_two_pi_i(3));
        }
    }
}

TEST_CASE("single point class on [C3/Z3] has a limit different from (-2 pi i)^3") {
    auto s = setup("c3z3");
    auto fr = frame(s.fan, s.w, point_class(s.fan, s.fan.cones[0]));
    auto lim = nonequiv_limit(s.fan, fr);
    CHECK(lim.a.size() == 3); // all three sectors survive
    for (auto& [key, val] : lim.a) {
        auto box = box_elements(s.fan, s.fan.cones[key.cone]);
        if (box[key.box].age == 0) CHECK(!(val == CoeffExpr::minus_two_pi_i(3)));
    }
}

TEST_CASE("non-equivariant limit of a non-compact divisor diverges") {
    auto s = setup("c3");
    auto fr = frame(s.fan, s.w, divisor_class(s.fan, 3));
    CHECK_THROWS_AS(nonequiv_limit(s.fan, fr), ktheory_error);
}

TEST_CASE("sheaf spec grammar") {
    auto s = setup("conifold");
    auto sp = parse_sheaf("  O( V :  d3 )");
    CHECK(sp.kind == SheafSpec::divisor);
    CHECK(sp.indices[0] == 3);
    auto sp2 = parse_sheaf("O(V: l{2,3}) * tw(1, 0, -2)");
    CHECK(sp2.kind == SheafSpec::curve);
    CHECK(sp2.twist == std::vector<long>{1, 0, -2});
    auto k = sp2.realize(s.fan);
    CHECK(k.word[0].I == ConeKey{2, 3});
    CHECK(k.word[0].twist[2] == -2);
    auto sp3 = parse_sheaf("O(V:p{1,2,3})");
    CHECK(sp3.kind == SheafSpec::point);
    CHECK_THROWS_AS(parse_sheaf("O(V: x3)"), sheaf_parse_error);
    try {
        parse_sheaf("O(V: l{2 3})");
        CHECK(false);
    } catch (const sheaf_parse_error& e) {
        CHECK(e.position > 0); // explicit error position
    }
}
