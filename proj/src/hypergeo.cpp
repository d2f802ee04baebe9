#include "remodel/hypergeo.hpp"
#include <algorithm>
#include <functional>

namespace remodel {

LogSeries i_component(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                      const Cone3& sigma, const BoxElement& v, long order) {
    if (order < 0) throw series_error("i_component: order must be >= 0");
    int ci = cone_index(fan, sigma);
    LogSeries s((int)lat.p, rat(order));
    for (long a = 0; a < lat.p; ++a) s.shift[a] = w.w_nef[ci][a];

    auto eff = effective_classes(fan, lat, sigma, order);
    for (auto& e : eff) {
        if (!(e.v.v == v.v)) continue;
        RatFun2 c(Rat(1));
        for (int i = 1; i <= fan.num_points(); ++i) {
            if (fan.has_ray(sigma, i)) {
                // Gamma(1 - w_i/z - c_i(v)) / Gamma(1 - w_i/z + <D_i,beta>), integer offset
                Rat k = e.beta[i - 1] + v.c(i);
                if (!is_integer(k)) throw series_error("i_component: non-integral gamma offset");
                long kk = to_long(k);
                AffForm base{-w.w(ci, i), 1 - v.c(i)};
                // base + m has constant part 1 - c_i(v) + m
                if (kk > 0)
                    for (long m = 0; m < kk; ++m) c = c.div_aff(base + rat(m));
                else
                    for (long m = 1; m <= -kk; ++m) c = c * RatFun2::from_aff(base - rat(m));
            } else {
                long d = to_long(e.beta[i - 1]);
                if (d < 0) throw series_error("i_component: negative degree off the cone");
                c = c * Rat(1, factorial(d));
            }
        }
        QExp qe;
        for (long a = 0; a < lat.p; ++a) qe.e.push_back(rat(e.qexp[a]));
        s.add(qe, LogMask(lat.p, 0), c);
    }
    s.prune();
    return s;
}

std::vector<LinForm> gkz_weights(const StackyFan3& fan) {
    auto f0 = preferred_flag(fan);
    auto wf = flag_weights(fan, f0);
    std::vector<LinForm> w(fan.num_points());
    for (int j = 0; j < 3; ++j) w[f0.ordered[j] - 1] = wf[j];
    return w;
}

// (theta_i - m - w^i/z) s  with  theta_i = sum_a m_i^(a) q_a d/dq_a
static LogSeries gkz_factor(const DivisorLattice& lat, const std::vector<LinForm>& wv, int i,
                            long m, const LogSeries& s) {
    LogSeries out = s.scale(RatFun2::from_aff(AffForm{wv[i - 1], rat(m)})).scale(Rat(-1));
    for (long a = 0; a < lat.p; ++a) {
        if (lat.m_coeff[i - 1][a] == 0) continue;
        out = out + s.theta((int)a).scale(lat.m_coeff[i - 1][a]);
    }
    return out;
}

LogSeries gkz_apply(const StackyFan3& fan, const DivisorLattice& lat,
                    const std::vector<long>& beta, const LogSeries& s) {
    auto wv = gkz_weights(fan);
    LogSeries neg = s, pos = s;
    for (int i = 1; i <= fan.num_points(); ++i) {
        long d = beta[i - 1];
        if (d < 0)
            for (long m = 0; m < -d; ++m) neg = gkz_factor(lat, wv, i, m, neg);
        else if (d > 0)
            for (long m = 0; m < d; ++m) pos = gkz_factor(lat, wv, i, m, pos);
    }
    std::vector<Rat> delta(lat.p);
    for (long a = 0; a < lat.p; ++a) {
        long x = 0;
        for (int i = 0; i < fan.num_points(); ++i) x += lat.nef[a][i] * beta[i];
        delta[a] = rat(x);
    }
    return neg.mul_q(delta) - pos;
}

LogSeries euler_apply(const LogSeries& s) {
    // z d/dz part
    LogSeries zpart(s.nvars, s.order);
    zpart.shift = s.shift;
    for (auto& [e, ms] : s.terms)
        for (auto& [m, c] : ms) {
            // on the coefficient: -U1 dU1 - U2 dU2
            RatFun2 dc = c.deriv(0) * RatFun2::from_aff(AffForm{LinForm{rat(-1), rat(0)}, Rat(0)}) +
                         c.deriv(1) * RatFun2::from_aff(AffForm{LinForm{rat(0), rat(-1)}, Rat(0)});
            zpart.add(e, m, dc);
            // on the prefactor: z d/dz q_a^{-shift_a/..} = +shift_a log q_a
            for (int a = 0; a < s.nvars; ++a) {
                if (s.shift[a].is_zero()) continue;
                if (m[a] >= 1) throw series_error("euler_apply: repeated log would arise");
                LogMask m2 = m;
                m2[a] += 1;
                zpart.add(e, m2, c * RatFun2::from_aff(AffForm{s.shift[a], Rat(0)}));
            }
        }
    // u1 d/du1 + u2 d/du2 part
    LogSeries upart(s.nvars, s.order);
    upart.shift = s.shift;
    for (auto& [e, ms] : s.terms)
        for (auto& [m, c] : ms) {
            RatFun2 dc = c.deriv(0) * RatFun2::from_aff(AffForm{LinForm{rat(1), rat(0)}, Rat(0)}) +
                         c.deriv(1) * RatFun2::from_aff(AffForm{LinForm{rat(0), rat(1)}, Rat(0)});
            upart.add(e, m, dc);
            for (int a = 0; a < s.nvars; ++a) {
                if (s.shift[a].is_zero()) continue;
                LogMask m2 = m;
                m2[a] += 1;
                upart.add(e, m2, c * RatFun2::from_aff(AffForm{-s.shift[a], Rat(0)}));
            }
        }
    zpart.prune();
    upart.prune();
    return zpart + upart;
}

std::vector<std::vector<long>> gkz_test_set(const DivisorLattice& lat) {
    std::vector<std::vector<long>> out;
    long p = lat.p;
    if (p == 0) return out;
    size_t n = lat.kernel.empty() ? 0 : lat.kernel[0].size();
    std::vector<long> lambda(p, -1);
    while (true) {
        bool all_zero = std::all_of(lambda.begin(), lambda.end(), [](long x) { return x == 0; });
        if (!all_zero) {
            std::vector<long> beta(n, 0);
            for (long j = 0; j < p; ++j)
                for (size_t i = 0; i < n; ++i) beta[i] += lambda[j] * lat.kernel[j][i];
            out.push_back(beta);
        }
        long k = p - 1;
        while (k >= 0 && lambda[k] == 1) lambda[k--] = -1;
        if (k < 0) break;
        lambda[k] += 1;
    }
    return out;
}

cplx ScalarSeries::eval(const std::vector<cplx>& q, int log_var) const {
    cplx s = has_log ? std::log(q[log_var]) : cplx(0);
    for (auto& [e, k] : c) {
        cplx t = to_double(k);
        for (size_t a = 0; a < e.e.size(); ++a) t *= std::pow(q[a], to_double(e.e[a]));
        s += t;
    }
    return s;
}

// solve an overdetermined exact linear system rows*x = rhs; throws if inconsistent
static std::vector<Rat> solve_exact(std::vector<std::vector<Rat>> rows, std::vector<Rat> rhs, size_t nvar) {
    size_t nr = rows.size();
    size_t r = 0;
    std::vector<long> piv(nvar, -1);
    for (size_t c = 0; c < nvar && r < nr; ++c) {
        size_t p = r;
        while (p < nr && rows[p][c] == 0) ++p;
        if (p == nr) continue;
        std::swap(rows[r], rows[p]);
        std::swap(rhs[r], rhs[p]);
        Rat inv = 1 / rows[r][c];
        for (size_t j = 0; j < nvar; ++j) rows[r][j] *= inv;
        rhs[r] *= inv;
        for (size_t i = 0; i < nr; ++i)
            if (i != r && rows[i][c] != 0) {
                Rat f = rows[i][c];
                for (size_t j = 0; j < nvar; ++j) rows[i][j] -= f * rows[r][j];
                rhs[i] -= f * rhs[r];
            }
        piv[c] = (long)r;
        ++r;
    }
    for (size_t i = r; i < nr; ++i)
        if (rhs[i] != 0) throw series_error("mirror map extraction: inconsistent system");
    std::vector<Rat> x(nvar, Rat(0));
    for (size_t c = 0; c < nvar; ++c)
        if (piv[c] >= 0) x[c] = rhs[piv[c]];
        else throw series_error("mirror map extraction: underdetermined system");
    return x;
}

MirrorMap mirror_map(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w, long order) {
    if (order < 1) throw series_error("mirror_map: order must be >= 1");
    MirrorMap mm;
    long pp = lat.p_prime;

    // Kaehler directions from untwisted sectors across all cones:
    // [z^{-1}] I^+_{sigma,0} = sum_a tau_a-coefficients * w_{a,sigma}
    std::map<QExp, std::vector<std::pair<int, RatFun2>>> lin_terms; // per q-monomial: (cone, u-linear form)
    for (size_t k = 0; k < fan.cones.size(); ++k) {
        auto box = box_elements(fan, fan.cones[k]);
        auto s = i_component(fan, lat, w, fan.cones[k], box[0], order).flip_z();
        for (auto& [e, ms] : s.terms)
            for (auto& [m, c] : ms) {
                auto lz = laurent_in_invz(c, 1);
                if (e.total() != 0 && lz.count(0) && !lz[0].is_zero())
                    throw series_error("mirror map: unexpected z^0 term in untwisted sector");
                if (lz.count(1)) lin_terms[e].push_back({(int)k, lz[1]});
            }
    }
    mm.kaehler.assign(pp, ScalarSeries{});
    for (long a = 0; a < pp; ++a) mm.kaehler[a].has_log = true;
    for (auto& [e, items] : lin_terms) {
        // match sum_a kappa_a w_{a,sigma} = L^(sigma) for all cones present
        // unknowns: kappa_a (nef directions) plus a global character mu in M'_Q
        std::vector<std::vector<Rat>> rows;
        std::vector<Rat> rhs;
        for (auto& [k, L] : items) {
            // L must be a linear polynomial in (u1,u2)
            if (!L.den.empty()) throw series_error("mirror map: non-polynomial z-coefficient");
            Rat cu1 = 0, cu2 = 0;
            for (auto& [ex, kk] : L.num.c) {
                if (ex == std::array<int, 2>{1, 0}) cu1 = kk;
                else if (ex == std::array<int, 2>{0, 1}) cu2 = kk;
                else if (kk != 0) throw series_error("mirror map: z^{-1} coefficient not linear in u");
            }
            std::vector<Rat> r1(pp + 2, Rat(0)), r2(pp + 2, Rat(0));
            for (long a = 0; a < pp; ++a) {
                r1[a] = w.w_nef[k][a].a;
                r2[a] = w.w_nef[k][a].b;
            }
            r1[pp] = 1;
            r2[pp + 1] = 1;
            rows.push_back(r1);
            rhs.push_back(cu1);
            rows.push_back(r2);
            rhs.push_back(cu2);
        }
        auto sol = solve_exact(rows, rhs, pp + 2);
        for (long a = 0; a < pp; ++a)
            if (sol[a] != 0) mm.kaehler[a].c[e] += sol[a];
        if (sol[pp] != 0 || sol[pp + 1] != 0) mm.character[e] = LinForm{sol[pp], sol[pp + 1]};
    }

    // orbifold directions: age-1 box elements, tau_v = [z^0] I^+_{sigma,v}
    std::map<std::array<long, 3>, ScalarSeries> orb;
    for (size_t k = 0; k < fan.cones.size(); ++k) {
        for (auto& v : box_elements(fan, fan.cones[k])) {
            if (v.age != 1) continue;
            auto s = i_component(fan, lat, w, fan.cones[k], v, order).flip_z();
            ScalarSeries t;
            for (auto& [e, ms] : s.terms)
                for (auto& [m, c] : ms) {
                    auto lz = laurent_in_invz(c, 0);
                    if (!lz.count(0) || lz[0].is_zero()) continue;
                    RatFun2 c0 = lz[0];
                    if (!c0.den.empty() || c0.num.c.size() != 1 ||
                        c0.num.c.begin()->first != std::array<int, 2>{0, 0})
                        throw series_error("mirror map: twisted z^0 coefficient not constant");
                    t.c[e] += c0.num.c.begin()->second;
                }
            std::array<long, 3> key{v.v[0], v.v[1], v.v[2]};
            auto it = orb.find(key);
            if (it == orb.end()) orb[key] = t;
            else if (!(it->second.c == t.c))
                throw series_error("mirror map: twisted sector disagrees between cones");
        }
    }
    for (auto& [key, t] : orb) mm.orbifold.push_back({Vec3l(key[0], key[1], key[2]), t});
    return mm;
}

cplx CentralChargeSeries::eval(cplx u1, cplx u2, cplx z, const std::vector<cplx>& q) const {
    cplx s = 0;
    for (auto& [key, av] : comps) s += av.first.eval(u1, u2, z) * av.second.eval(u1, u2, z, q);
    return s;
}

CentralChargeSeries central_charge(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                                   const std::map<SVKey, CoeffExpr>& coeffs, long order) {
    CentralChargeSeries out;
    for (auto& [key, a] : coeffs) {
        if (a.is_zero()) continue;
        auto box = box_elements(fan, fan.cones[key.cone]);
        out.comps[key] = {a, i_component(fan, lat, w, fan.cones[key.cone], box[key.box], order)};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Appendix-B identities: exact Laurent polynomials in (X,Y) over Q[q]

namespace {

struct XYPoly {
    // (x-exponent, y-exponent) -> q-polynomial
    std::map<std::pair<long, long>, std::map<QExp, Rat>> c;

    void add(long ex, long ey, const QExp& qe, const Rat& k) {
        if (k == 0) return;
        auto& slot = c[{ex, ey}][qe];
        slot += k;
    }
    void trim() {
        for (auto it = c.begin(); it != c.end();) {
            for (auto jt = it->second.begin(); jt != it->second.end();)
                jt = jt->second == 0 ? it->second.erase(jt) : std::next(jt);
            it = it->second.empty() ? c.erase(it) : std::next(it);
        }
    }
    XYPoly operator+(const XYPoly& o) const {
        XYPoly r = *this;
        for (auto& [e, qs] : o.c)
            for (auto& [qe, k] : qs) r.add(e.first, e.second, qe, k);
        r.trim();
        return r;
    }
    XYPoly operator*(const Rat& k) const {
        XYPoly r = *this;
        for (auto& [e, qs] : r.c)
            for (auto& [qe, v] : qs) v *= k;
        r.trim();
        return r;
    }
    XYPoly operator-(const XYPoly& o) const { return *this + o * Rat(-1); }
    bool is_zero() const {
        for (auto& [e, qs] : c)
            for (auto& [qe, k] : qs)
                if (k != 0) return false;
        return true;
    }
};

} // namespace

IdentityReport appendixB_identities(const StackyFan3& fan, const DivisorLattice& lat,
                                    const std::vector<std::vector<Rat>>* m_override) {
    const auto& mco = m_override ? *m_override : lat.m_coeff;
    auto f0 = preferred_flag(fan);
    int k0 = cone_index(fan, fan.preferred_sigma);
    long p = lat.p;

    // a_i(q) exponent vectors: 0 for the preferred cone's rays, s-columns otherwise
    auto aexp = [&](int i) {
        QExp qe;
        qe.e.assign(p, Rat(0));
        if (!fan.has_ray(fan.preferred_sigma, i)) {
            auto& col = lat.s_coeff[k0].at(i);
            for (long a = 0; a < p; ++a) qe.e[a] = rat(col[a]);
        }
        return qe;
    };

    XYPoly H, HX, HY;
    for (int i = 1; i <= fan.num_points(); ++i) {
        Vec2l pt = fan.point(i);
        H.add(pt[0], pt[1], aexp(i), Rat(1));
        HX.add(pt[0], pt[1], aexp(i), rat(pt[0]));
        HY.add(pt[0], pt[1], aexp(i), rat(pt[1]));
    }

    // theta_i H = sum_a m_i^(a) q_a d/dq_a H
    auto partial = [&](int i) {
        XYPoly r;
        for (int j = 1; j <= fan.num_points(); ++j) {
            Vec2l pt = fan.point(j);
            QExp qe = aexp(j);
            Rat coef = 0;
            for (long a = 0; a < p; ++a) coef += mco[i - 1][a] * qe.e[a];
            r.add(pt[0], pt[1], qe, coef);
        }
        r.trim();
        return r;
    };

    IdentityReport rep;
    Rat r = rat(f0.r), s = rat(f0.s), m = rat(f0.m);
    int i1 = f0.ordered[0], i2 = f0.ordered[1], i3 = f0.ordered[2];

    {
        XYPoly lhs = partial(i1);
        XYPoly rhs;
        rhs.add(f0.r, -f0.s, aexp(i1), Rat(1));
        rhs = rhs - HX * (1 / r);
        rep.rows.push_back({"dH_1 = X^r Y^{-s} - H_X/r", (lhs - rhs).is_zero()});
    }
    {
        XYPoly lhs = partial(i2);
        XYPoly rhs;
        rhs.add(0, f0.m, aexp(i2), Rat(1));
        rhs = rhs - HX * (s / (r * m)) - HY * (1 / m);
        rep.rows.push_back({"dH_2 = Y^m - s/(rm) H_X - H_Y/m", (lhs - rhs).is_zero()});
    }
    {
        XYPoly lhs = partial(i3);
        XYPoly one;
        one.add(0, 0, aexp(i3), Rat(1));
        XYPoly rhs = one - H + HX * ((s + m) / (r * m)) + HY * (1 / m);
        rep.rows.push_back({"dH_3 = 1 - H + (s+m)/(rm) H_X + H_Y/m", (lhs - rhs).is_zero()});
    }
    {
        bool ok = true;
        for (int i = 1; i <= fan.num_points(); ++i) {
            if (fan.has_ray(fan.preferred_sigma, i)) continue;
            XYPoly lhs = partial(i);
            XYPoly rhs;
            Vec2l pt = fan.point(i);
            rhs.add(pt[0], pt[1], aexp(i), Rat(1));
            ok = ok && (lhs - rhs).is_zero();
        }
        rep.rows.push_back({"dH_i = a_i X^{m_i} Y^{n_i} for i >= 4", ok});
    }
    {
        // Lemma LinearAlgebra rational identities
        bool ok = true;
        for (auto& [j, col] : lat.s_coeff[k0]) {
            Rat mj = rat(fan.point(j)[0]), nj = rat(fan.point(j)[1]);
            auto dot = [&](int i) {
                Rat acc = 0;
                for (long a = 0; a < p; ++a) acc += mco[i - 1][a] * rat(col[a]);
                return acc;
            };
            ok = ok && dot(i1) == -mj / r;
            ok = ok && dot(i2) == -s / (r * m) * mj - nj / m;
            ok = ok && dot(i3) == -1 + (s + m) / (r * m) * mj + nj / m;
            for (auto& [jj, col2] : lat.s_coeff[k0]) {
                (void)col2;
                ok = ok && dot(jj) == (jj == j ? 1 : 0);
            }
        }
        rep.rows.push_back({"linear-algebra identities sum_a m_i^(a) s_aj", ok});
    }
    return rep;
}

} // namespace remodel
