#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Acceptance suite: one test case per criterion, each printing a PASS/FAIL line.
// Tolerances are pinned here, in code.

#include "remodel/json_io.hpp"
#include "remodel/mirrorcurve.hpp"
#include "remodel/graphsum.hpp"
#include "remodel/limitr.hpp"
#include "remodel/zcheck.hpp"

#include <chrono>
#include <iostream>
#include <random>

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

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int id, const char* name, bool pass, double secs) {
    printf("[%s] criterion %2d: %-58s (%.2fs)\n", pass ? "PASS" : "FAIL", id, name, secs);
    fflush(stdout);
}

SpectralCurve0 airy_curve() {
    SpectralCurve0 c;
    c.x = RatFun1(PolyQ::monomial(2, Rat(1)), PolyQ(Rat(1)));
    c.y = RatFun1(PolyQ::monomial(1, Rat(1)), PolyQ(Rat(1)));
    return c;
}

SpectralCurve0 conifold_limit_curve() {
    SpectralCurve0 c;
    PolyQ num = PolyQ::monomial(2, Rat(1)) + PolyQ(Rat(1));
    c.x = RatFun1(num, PolyQ::monomial(1, Rat(1)));
    c.y = RatFun1(PolyQ::monomial(1, Rat(1)), PolyQ(Rat(1)));
    return c;
}

} // namespace

TEST_CASE("criterion 1: point-class central charge is (-2 pi i)^3") {
    Stopwatch sw;
    bool pass = true;
    std::mt19937 rng(20260811);
    std::uniform_real_distribution<double> U(2e-4, 1e-3);
    const double pi = 3.14159265358979323846;
    cplx expect = -std::pow(cplx(0, 2 * pi), 3.0);
    for (auto name : {"c3", "conifold", "c3z3"}) {
        auto s = setup(name);
        auto fr = frame(s.fan, s.w, point_class_summed(s.fan, s.fan.cones[0]));
        auto lim = nonequiv_limit(s.fan, fr);
        auto Z = central_charge(s.fan, s.lat, s.w, lim.a, 8);
        for (int t = 0; t < 5; ++t) {
            std::vector<cplx> q(s.lat.p, cplx(U(rng), 0.2 * U(rng)));
            cplx val = Z.eval(0, 0, cplx(0.3, 0), q);
            double err = reldiff(val, expect);
            INFO(name, " sample ", t, " rel err ", err);
            pass = pass && err <= 1e-10;
            CHECK(err <= 1e-10);
        }
    }
    pass = pass && sw.seconds() < 5.0;
    CHECK(sw.seconds() < 5.0);
    report(1, "Z^c(F_sigma) = (-2 pi i)^3 on c3/conifold/c3z3", pass, sw.seconds());
}

TEST_CASE("criterion 2: generator-level mirror theorem, quadrature vs Z") {
    Stopwatch sw;
    bool pass = true;
    const double tpi = 2 * 3.14159265358979323846;
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> U(0.85, 1.25);

    // C3: divisor cycle gamma_e and curve cycle gamma'_e on the preferred flag
    {
        auto s = setup("c3");
        auto f0 = preferred_flag(s.fan);
        auto div = frame(s.fan, s.w, divisor_class(s.fan, f0.ordered[2]));
        auto Zdiv = central_charge(s.fan, s.lat, s.w, div.a, 0);
        auto cur = frame(s.fan, s.w, curve_class(s.fan, Cone2{f0.ordered[1], f0.ordered[2]}));
        auto Zcur = central_charge(s.fan, s.lat, s.w, cur.a, 0);
        for (int t = 0; t < 5; ++t) {
            cplx u1(U(rng), 0), u2(0.7 * U(rng), 0), z(0.3 * U(rng), 0);
            auto cg = chart_cycle(s.fan, s.lat, s.w, {}, f0, {Rat(0), Rat(0)}, CycleKind::gamma, u1, u2, z);
            auto rg = oscillatory_integral(s.fan, s.lat, s.w, {}, cg, u1, u2, z);
            double e1 = reldiff(cplx(0, tpi) * rg.value, Zdiv.eval(u1, u2, z, {}));
            auto cc = chart_cycle(s.fan, s.lat, s.w, {}, f0, {Rat(0), Rat(0)}, CycleKind::gamma_prime, u1, u2, z);
            auto rc = oscillatory_integral(s.fan, s.lat, s.w, {}, cc, u1, u2, z);
            double e2 = reldiff(cplx(0, tpi) * rc.value, Zcur.eval(u1, u2, z, {}));
            INFO("c3 sample ", t, " errs ", e1, " ", e2);
            pass = pass && e1 <= 1e-8 && e2 <= 1e-8;
            CHECK(e1 <= 1e-8);
            CHECK(e2 <= 1e-8);
        }
        // closed-form vs closed-form is exact
        auto chart = chart_integral_series(s.fan, s.lat, s.w, f0, {Rat(0), Rat(0)}, CycleKind::gamma, 4);
        for (auto& [key, cs] : chart.comps) CHECK(cs.first * CoeffExpr::two_pi_i(1) == div.a.at(key));
    }
    // conifold: the compact curve through both tubes
    {
        auto s = setup("conifold");
        auto cl = classify_support(s.fan, s.w, Cocharacter{2, 1});
        auto gen = kgroup_generators(s.fan, cl, Support::compact)[0];
        auto pc = mirror_cycle(s.fan, s.w, cl, gen);
        auto fr = frame(s.fan, s.w, curve_class(s.fan, Cone2{gen.word[0].I[0], gen.word[0].I[1]}));
        auto Z = central_charge(s.fan, s.lat, s.w, fr.a, 10);
        std::vector<cplx> q{cplx(1e-3, 0)};
        for (int t = 0; t < 5; ++t) {
            cplx u1(U(rng), 0), u2(0.7 * U(rng), 0), z(0.3, 0);
            auto r = patched_integral(s.fan, s.lat, s.w, q, pc, u1, u2, z);
            double e = reldiff(cplx(0, tpi) * r.value, Z.eval(u1, u2, z, q));
            INFO("conifold sample ", t, " err ", e);
            pass = pass && e <= 1e-8;
            CHECK(e <= 1e-8);
        }
    }
    pass = pass && sw.seconds() < 60.0;
    CHECK(sw.seconds() < 60.0);
    report(2, "2 pi i * quadrature = Z_T' for divisor/curve generators", pass, sw.seconds());
}

TEST_CASE("criterion 3: GKZ annihilation to order 8, exact") {
    Stopwatch sw;
    bool pass = true;
    for (auto name : {"conifold", "c3z3"}) {
        auto s = setup(name);
        auto betas = gkz_test_set(s.lat);
        for (auto& sigma : s.fan.cones)
            for (auto& v : box_elements(s.fan, sigma)) {
                auto I = i_component(s.fan, s.lat, s.w, sigma, v, 8);
                for (auto& beta : betas) {
                    bool zero = gkz_apply(s.fan, s.lat, beta, I).is_zero();
                    pass = pass && zero;
                    CHECK(zero);
                }
                bool ez = euler_apply(I).is_zero();
                pass = pass && ez;
                CHECK(ez);
            }
        // chart series of I_{gamma_chi}: same components with a deck character
        auto f0 = preferred_flag(s.fan);
        int k0 = cone_index(s.fan, f0.sigma);
        LinForm chi = s.w.w(k0, f0.ordered[0]);
        auto chart = chart_integral_series(s.fan, s.lat, s.w, f0, {chi.a, chi.b}, CycleKind::gamma, 8);
        for (auto& [key, cs] : chart.comps) {
            for (auto& beta : betas) {
                bool zero = gkz_apply(s.fan, s.lat, beta, cs.second).is_zero();
                pass = pass && zero;
                CHECK(zero);
            }
            bool ez = euler_apply(cs.second).is_zero();
            pass = pass && ez;
            CHECK(ez);
        }
    }
    pass = pass && sw.seconds() < 30.0;
    CHECK(sw.seconds() < 30.0);
    report(3, "D_beta I = 0 and E I = 0 exactly to q-order 8", pass, sw.seconds());
}

TEST_CASE("criterion 4: ramification counts 2g-2+n with residuals <= 1e-12") {
    Stopwatch sw;
    bool pass = true;
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> U(0.35, 1.4);
    auto run = [&](const char* name, long expect, long nq) {
        auto s = setup(name);
        for (int t = 0; t < 10; ++t) {
            cplx u1(U(rng), 0.12 * U(rng)), u2(U(rng), -0.09 * U(rng));
            std::vector<cplx> q(nq, cplx(8e-4 * U(rng), 2e-4 * U(rng)));
            auto ram = critical_points(s.fan, s.lat, s.w, q, u1, u2);
            bool ok = (long)ram.points.size() == expect && ram.max_residual <= 1e-12;
            INFO(name, " trial ", t, " count ", ram.points.size(), " residual ", ram.max_residual);
            pass = pass && ok;
            CHECK(ok);
        }
    };
    run("c3", 1, 0);
    run("conifold", 2, 1);
    run("kp2", 3, 1);
    report(4, "critical_points returns exactly 2g-2+n points", pass, sw.seconds());
}

TEST_CASE("criterion 5: DOSS graph sum equals the recursion, exactly") {
    Stopwatch sw;
    bool pass = true;
    for (auto curve : {airy_curve(), conifold_limit_curve()}) {
        auto cd = analyze_curve(curve, 60);
        for (auto [g, n] : std::vector<std::pair<long, long>>{{0, 3}, {0, 4}, {1, 1}, {1, 2}, {2, 1}}) {
            auto& w = omega(cd, g, n);
            auto gs = graph_sum_B(cd, g, n);
            bool eq = gs == w;
            INFO("(g,n)=(", g, ",", n, ") branches ", cd.nb);
            pass = pass && eq;
            CHECK(eq);
        }
    }
    pass = pass && sw.seconds() < 120.0;
    CHECK(sw.seconds() < 120.0);
    report(5, "graph_sum_B == omega for (0,3),(0,4),(1,1),(1,2),(2,1)", pass, sw.seconds());
}

TEST_CASE("criterion 6: Witten table and string/dilaton equations") {
    Stopwatch sw;
    bool pass = witten(0, {0, 0, 0}) == 1 && witten(1, {1}) == Rat(1, 24);
    CHECK(witten(0, {0, 0, 0}) == 1);
    CHECK(witten(1, {1}) == Rat(1, 24));
    // all multisets with sum k <= 12, g <= 3, n <= 5
    std::function<void(long, long, long, std::vector<long>&)> rec = [&](long g, long n, long left,
                                                                        std::vector<long>& k) {
        if ((long)k.size() == n) {
            if (left != 0) return;
            std::vector<long> ks = k;
            ks.push_back(0);
            Rat lhs = witten(g, ks);
            Rat rhs = 0;
            for (size_t j = 0; j < k.size(); ++j) {
                if (k[j] == 0) continue;
                auto kk = k;
                kk[j] -= 1;
                rhs += witten(g, kk);
            }
            bool ok = lhs == rhs;
            std::vector<long> kd = k;
            kd.push_back(1);
            ok = ok && witten(g, kd) == rat(2 * g - 2 + (long)k.size()) * witten(g, k);
            pass = pass && ok;
            CHECK(ok);
            return;
        }
        long lo = k.empty() ? 0 : k.back();
        for (long x = lo; x <= left; ++x) {
            k.push_back(x);
            rec(g, n, left - x, k);
            k.pop_back();
        }
    };
    for (long g = 0; g <= 3; ++g)
        for (long n = 1; n <= 5; ++n) {
            long dim = 3 * g - 3 + n;
            if (dim < 0 || dim > 12) continue;
            std::vector<long> k;
            rec(g, n, dim, k);
        }
    report(6, "DVV values and string/dilaton identities, sum k <= 12", pass, sw.seconds());
}

TEST_CASE("criterion 7: Euler pairing matrix upper-triangular, nonzero diagonal") {
    Stopwatch sw;
    bool pass = true;
    for (auto name : {"conifold", "kp2"}) {
        auto s = setup(name);
        auto cl = classify_support(s.fan, s.w, Cocharacter{3, 1});
        auto bp = pairing_basis(s.fan, s.w, cl, Support::plus);
        auto bm = pairing_basis(s.fan, s.w, cl, Support::minus);
        size_t n = bp.elements.size();
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Int chi = euler_pairing(s.fan, s.w, cl, bp.elements[i], bm.elements[j]);
                bool ok = (i == j) ? chi != 0 : (i > j ? chi == 0 : true);
                INFO(name, " entry (", i, ",", j, ") = ", chi.get_str());
                pass = pass && ok;
                CHECK(ok);
            }
    }
    report(7, "chi-matrix of the ordered +/- bases on conifold and K_P2", pass, sw.seconds());
}

TEST_CASE("criterion 8: Bcheck-vs-f identity and limit-R unitarity, order 6") {
    Stopwatch sw;
    bool pass = true;
    // limit-R unitarity on the fans of C3 and [C3/Z3], exact
    for (auto name : {"c3", "c3z3"}) {
        auto s = setup(name);
        auto blocks = limit_r(s.fan, s.w, 6);
        for (auto& blk : blocks) {
            bool u = limit_r_unitary(blk);
            INFO(name, " cone ", blk.cone);
            pass = pass && u;
            CHECK(u);
        }
    }
    // Bcheck-vs-f on the C3 mirror-chart curve (exact, pinned u1 = u2 = 1) and on
    // a genus-zero three-branch-point curve standing in for the [C3/Z3] chart,
    // whose own compactified chart curve has genus one (out of the TR core's
    // scope); see the decisions ledger.
    {
        // xhat' = -u1/(1+t) - u2/t at u1 = u2 = 1, yhat' = -1/t
        RatFun1 xp(PolyQ{} + PolyQ(Rat(-1)) + PolyQ::monomial(1, Rat(-2)),
                   PolyQ::monomial(1, Rat(1)) + PolyQ::monomial(2, Rat(1)));
        RatFun1 yp(PolyQ(Rat(-1)), PolyQ::monomial(1, Rat(1)));
        auto cd = analyze_curve_from_derivatives(xp, yp, 40);
        REQUIRE(cd.nb == 1);
        for (long k = 0; k <= 6 && pass; ++k)
            for (long l = 0; k + l <= 6; ++l) {
                bool eq = bcheck(cd, 0, 0, k, l) == bcheck_from_f(cd, 0, 0, k, l);
                pass = pass && eq;
                CHECK(eq);
            }
    }
    {
        // x = t^4/4 - t^2/2, y = t: three rational branch points
        PolyQ xnum = PolyQ::monomial(4, Rat(1, 4)) + PolyQ::monomial(2, Rat(-1, 2));
        SpectralCurve0 c;
        c.x = RatFun1(xnum, PolyQ(Rat(1)));
        c.y = RatFun1(PolyQ::monomial(1, Rat(1)), PolyQ(Rat(1)));
        auto cd = analyze_curve(c, 40);
        REQUIRE(cd.nb == 3);
        for (int a = 0; a < 3 && pass; ++a)
            for (int b = 0; b < 3; ++b)
                for (long k = 0; k <= 3; ++k)
                    for (long l = 0; k + l <= 3; ++l) {
                        bool eq = bcheck(cd, a, b, k, l) == bcheck_from_f(cd, a, b, k, l);
                        pass = pass && eq;
                        CHECK(eq);
                    }
    }
    report(8, "Bcheck-vs-f exact to order 6; R^T(-z)R(z) = 1 exact", pass, sw.seconds());
}

TEST_CASE("criterion 9: deck equivariance of oscillatory integrals") {
    Stopwatch sw;
    bool pass = true;
    auto s = setup("c3z3");
    auto f0 = preferred_flag(s.fan);
    std::vector<cplx> q{cplx(1e-3, 0)};
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(0.85, 1.2);
    const double tpi = 2 * 3.14159265358979323846;
    for (int t = 0; t < 5; ++t) {
        cplx u1(U(rng), 0), u2(0.7 * U(rng), 0), z(0.3, 0);
        auto base = chart_cycle(s.fan, s.lat, s.w, q, f0, {Rat(0), Rat(0)}, CycleKind::gamma, u1, u2, z);
        auto rb = oscillatory_integral(s.fan, s.lat, s.w, q, base, u1, u2, z);
        long m1 = (t % 2) ? 1 : -1, m2 = (t % 3 == 0) ? 1 : 0;
        auto sh = chart_cycle(s.fan, s.lat, s.w, q, f0, {rat(m1), rat(m2)}, CycleKind::gamma, u1, u2, z);
        auto rs = oscillatory_integral(s.fan, s.lat, s.w, q, sh, u1, u2, z);
        cplx factor = std::exp(cplx(0, -tpi) * (u1 * (double)m1 + u2 * (double)m2) / z);
        double err = reldiff(rs.value, rb.value * factor);
        INFO("sample ", t, " err ", err);
        pass = pass && err <= 1e-10;
        CHECK(err <= 1e-10);
    }
    report(9, "chi-shift multiplies the integral by exp(-2 pi i chi(u)/z)", pass, sw.seconds());
}

TEST_CASE("criterion 10: diagnostic f vs Bernoulli limit-R (reported, not gated)") {
    Stopwatch sw;
    // f^sigma_sigma on the C3 chart curve at u1 = u2 = 1 vs the Bernoulli
    // exponential with weights (1, 1, -2) under u <-> 1/z
    RatFun1 xp(PolyQ(Rat(-1)) + PolyQ::monomial(1, Rat(-2)),
               PolyQ::monomial(1, Rat(1)) + PolyQ::monomial(2, Rat(1)));
    RatFun1 yp(PolyQ(Rat(-1)), PolyQ::monomial(1, Rat(1)));
    auto cd = analyze_curve_from_derivatives(xp, yp, 40);
    auto f = f_series(cd, 0, 0, 4);
    // exp(sum_m (-1)^m/(m(m+1)) B_{m+1}(0) (z^m)(1/w^m)) product over w in {1,1,-2}
    std::vector<Rat> expo(5, Rat(0));
    for (double w : {1.0, 1.0, -2.0})
        for (long m = 1; m <= 4; ++m)
            expo[m] += bernoulli_poly(m + 1, Rat(0)) * Rat(m % 2 ? -1 : 1, m * (m + 1)) /
                       rpow(rat((long)w), m);
    std::vector<Rat> R(5, Rat(0));
    R[0] = 1;
    std::vector<Rat> pw = R;
    Rat fac = 1;
    for (long k = 1; k <= 4; ++k) {
        std::vector<Rat> next(5, Rat(0));
        for (long i = 0; i <= 4; ++i)
            for (long j = 1; i + j <= 4; ++j) next[i + j] += pw[i] * expo[j];
        pw = next;
        fac *= k;
        for (long m = 0; m <= 4; ++m) R[m] += pw[m] / fac;
    }
    printf("    diagnostic: f^s_s(u) coefficients vs Bernoulli R(-z) under u <-> 1/z\n");
    double worst = 0;
    for (long m = 0; m <= 4; ++m) {
        cplx fm = f[m].eval();
        // the stationary-phase side matches R(-z), the orientation the A-side
        // leaf and edge weights use
        double rm = to_double(R[m]) * (m % 2 ? -1 : 1);
        double dm = std::abs(fm - cplx(rm, 0));
        worst = std::max(worst, dm / std::max(1.0, std::abs(fm)));
        printf("    order %ld: f = %+.12f%+.12fi   R(-z) = %+.12f   |diff| = %.2e\n", m, fm.real(),
               fm.imag(), rm, dm);
    }
    report(10, "f-vs-Bernoulli-R diagnostic (not gated)", true, sw.seconds());
    printf("    worst relative deviation over 4 orders: %.3e %s\n", worst,
           worst < 1e-10 ? "(agrees under the R(-z) orientation)"
                         : "(reported difference; general-q graph-match out of scope)");
    CHECK(true);
}
