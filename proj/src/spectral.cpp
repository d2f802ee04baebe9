#include "remodel/spectral.hpp"
#include <json.hpp>
#include <fstream>
#include <numeric>
#include <sstream>

namespace remodel {

using nlohmann::json;

SpectralCurve0 parse_spectral(const std::string& text) {
    json j = json::parse(text);
    auto poly = [&](const char* key) {
        PolyQ p;
        if (!j.contains(key)) throw spectral_error(std::string("spectral curve file: missing ") + key);
        for (auto& v : j[key]) p.c.push_back(v.is_string() ? parse_rat(v.get<std::string>()) : rat(v.get<long>()));
        p.trim();
        return p;
    };
    SpectralCurve0 c;
    c.x = RatFun1(poly("x_num"), poly("x_den"));
    c.y = RatFun1(poly("y_num"), poly("y_den"));
    return c;
}

SpectralCurve0 load_spectral(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spectral_error("cannot open spectral curve file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spectral(ss.str());
}

// ---------------------------------------------------------------------------
// series helpers (dense power series, index = exponent)

namespace {

using SerQ = std::vector<Rat>;

SerQ ser_trunc(SerQ a, long M) {
    if ((long)a.size() > M + 1) a.resize(M + 1);
    return a;
}

SerQ ser_add(const SerQ& a, const SerQ& b) {
    SerQ r = a;
    if (r.size() < b.size()) r.resize(b.size(), Rat(0));
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

SerQ ser_mul(const SerQ& a, const SerQ& b, long M) {
    SerQ r(std::min<long>(M + 1, a.size() + b.size() - 1), Rat(0));
    for (size_t i = 0; i < a.size() && (long)i <= M; ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size() && (long)(i + j) <= M; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

SerQ ser_scale(SerQ a, const Rat& k) {
    for (auto& x : a) x *= k;
    return a;
}

// inverse of a unit series
SerQ ser_inv(const SerQ& a, long M) {
    if (a.empty() || a[0] == 0) throw spectral_error("series inverse of non-unit");
    SerQ r(M + 1, Rat(0));
    r[0] = 1 / a[0];
    for (long k = 1; k <= M; ++k) {
        Rat s = 0;
        for (long j = 1; j <= k && j < (long)a.size(); ++j) s += a[j] * r[k - j];
        r[k] = -s / a[0];
    }
    return r;
}

// sqrt of a series with leading coefficient 1
SerQ ser_sqrt_unit(const SerQ& a, long M) {
    if (a.empty() || a[0] != 1) throw spectral_error("series sqrt needs leading 1");
    SerQ r(M + 1, Rat(0));
    r[0] = 1;
    for (long k = 1; k <= M; ++k) {
        Rat s = k < (long)a.size() ? a[k] : Rat(0);
        for (long j = 1; j < k; ++j) s -= r[j] * r[k - j];
        r[k] = s / 2;
    }
    return r;
}

// composition a(b(s)) with b(0) = 0
SerQ ser_compose(const SerQ& a, const SerQ& b, long M) {
    SerQ r(1, a.empty() ? Rat(0) : a[0]);
    SerQ bp{Rat(1)};
    for (size_t i = 1; i < a.size(); ++i) {
        bp = ser_mul(bp, b, M);
        if (a[i] != 0) r = ser_add(r, ser_scale(bp, a[i]));
    }
    return ser_trunc(r, M);
}

SerQ ser_deriv(const SerQ& a) {
    SerQ r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * rat((long)i));
    return r;
}

// series of a rational function around t0: f(t0 + s)
SerQ ratfun_series(const RatFun1& f, const Rat& t0, long M) {
    PolyQ n = f.num.shift(t0), d = f.den.shift(t0);
    SerQ ns(n.c.begin(), n.c.end()), ds(d.c.begin(), d.c.end());
    if (ds.empty() || ds[0] == 0) throw spectral_error("series expansion at a pole");
    ns.resize(M + 1, Rat(0));
    ds.resize(M + 1, Rat(0));
    return ser_mul(ns, ser_inv(ds, M), M);
}

// Laurent series with rational coefficients
struct Laur {
    long lead = 0;
    SerQ c;
    long top() const { return lead + (long)c.size() - 1; }
    Rat at(long k) const {
        if (k < lead || k > top()) return Rat(0);
        return c[k - lead];
    }
};

Laur laur_mul(const Laur& a, const Laur& b, long top) {
    Laur r;
    r.lead = a.lead + b.lead;
    long len = top - r.lead + 1;
    if (len <= 0 || a.c.empty() || b.c.empty()) return Laur{0, {}};
    r.c.assign(len, Rat(0));
    for (size_t i = 0; i < a.c.size() && (long)i < len; ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size() && (long)(i + j) < len; ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
}

Laur laur_add(const Laur& a, const Laur& b) {
    if (a.c.empty()) return b;
    if (b.c.empty()) return a;
    Laur r;
    r.lead = std::min(a.lead, b.lead);
    long top = std::max(a.lead + (long)a.c.size(), b.lead + (long)b.c.size()) - 1;
    r.c.assign(top - r.lead + 1, Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[a.lead + i - r.lead] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[b.lead + i - r.lead] += b.c[i];
    return r;
}

Laur laur_from(const SerQ& s) { return Laur{0, s}; }

// positive and negative integer powers of a Laurent series with unit leading part
Laur laur_pow(const Laur& a, long e, long top) {
    if (e == 0) return Laur{0, {Rat(1)}};
    Laur base = a;
    if (e < 0) {
        // invert: a = s^lead * unit
        SerQ unit = base.c;
        base.lead = -base.lead;
        base.c = ser_inv(unit, top - base.lead + 8);
        e = -e;
    }
    Laur r{0, {Rat(1)}};
    for (long i = 0; i < e; ++i) r = laur_mul(r, base, top + 8);
    return r;
}

} // namespace

// ---------------------------------------------------------------------------

Cyclo sqrt_rational(const Rat& r) {
    if (r == 0) return Cyclo(1, Rat(0));
    Int num = r.get_num(), den = r.get_den();
    bool neg = num < 0;
    if (neg) num = -num;
    // split square parts
    Int sq = 1, sf = 1;
    Int m = num * den; // sqrt(num/den) = sqrt(num*den)/den
    for (Int p = 2; p * p <= m; ++p) {
        while (m % (p * p) == 0) {
            m /= p * p;
            sq *= p;
        }
        if (m % p == 0) {
            m /= p;
            sf *= p;
        }
    }
    if (m > 1) sf *= m;
    // sqrt(r) = (sq / den) * sqrt(sf) * (i if negative)
    Rat rat_part = Rat(sq, den);
    rat_part.canonicalize();
    Cyclo out(1, rat_part);
    // sqrt of the squarefree integer via Gauss sums
    Int rem = sf;
    if (rem % 2 == 0) {
        // sqrt(2) = zeta8 + zeta8^-1
        out = out * (Cyclo::root(8, 1) + Cyclo::root(8, 7));
        rem /= 2;
    }
    for (Int p = 3; p * p <= rem; p += 2)
        while (rem % p == 0) {
            long pl = to_long(p);
            Cyclo gauss(pl);
            for (long k = 1; k < pl; ++k) {
                // Legendre symbol via Euler's criterion (small p)
                long e = 1;
                long kk = k % pl;
                long pow = (pl - 1) / 2;
                long acc = 1, bb = kk;
                while (pow) {
                    if (pow & 1) acc = acc * bb % pl;
                    bb = bb * bb % pl;
                    pow >>= 1;
                }
                e = acc == 1 ? 1 : -1;
                gauss = gauss + Cyclo::root(pl, k) * rat(e);
            }
            if (pl % 4 == 3) gauss = gauss * Cyclo::root(4, 3); // divide by i
            out = out * gauss;
            rem /= p;
        }
    if (rem > 1) {
        long pl = to_long(rem);
        Cyclo gauss(pl);
        for (long k = 1; k < pl; ++k) {
            long pow = (pl - 1) / 2;
            long acc = 1, bb = k % pl;
            while (pow) {
                if (pow & 1) acc = acc * bb % pl;
                bb = bb * bb % pl;
                pow >>= 1;
            }
            gauss = gauss + Cyclo::root(pl, k) * rat(acc == 1 ? 1 : -1);
        }
        if (pl % 4 == 3) gauss = gauss * Cyclo::root(4, 3);
        out = out * gauss;
    }
    if (neg) out = out * Cyclo::root(4, 1);
    // principal branch: nonnegative real part, then nonnegative imaginary part
    cplx v = out.eval();
    if (v.real() < -1e-12 || (std::abs(v.real()) < 1e-12 && v.imag() < 0)) out = out * Rat(-1);
    return out;
}

static void analyze_branch(CurveData& cd, SerQ xs, SerQ ys, long M);

CurveData analyze_curve(const SpectralCurve0& c, long order) {
    CurveData cd;
    cd.curve = c;
    cd.order = order;
    RatFun1 xp = c.x.deriv();
    PolyQ residual;
    auto roots = rational_roots(xp.num, &residual);
    if (!residual.is_zero() && residual.deg() > 0)
        throw spectral_error("unsupported geometry: irrational ramification points");
    for (auto& [t0, mult] : roots) {
        if (c.x.den.eval(t0) == 0) continue; // pole of x, not a critical point
        if (xp.den.eval(t0) == 0) continue;
        if (mult != 1) throw spectral_error("unsupported geometry: non-simple ramification");
        cd.tb.push_back(t0);
    }
    cd.nb = (int)cd.tb.size();
    if (cd.nb == 0) throw spectral_error("curve has no ramification points");
    long M = order;
    for (int a = 0; a < cd.nb; ++a) {
        Rat t0 = cd.tb[a];
        SerQ xs = ratfun_series(c.x, t0, M + 2);
        SerQ ys = ratfun_series(c.y, t0, M + 2);
        cd.xb.push_back(xs[0]);
        cd.yb.push_back(ys[0]);
        xs[0] = 0;
        ys[0] = 0;
        analyze_branch(cd, std::move(xs), std::move(ys), M);
    }
    return cd;
}

CurveData analyze_curve_from_derivatives(const RatFun1& xprime, const RatFun1& yprime, long order) {
    CurveData cd;
    cd.order = order;
    PolyQ residual;
    auto roots = rational_roots(xprime.num, &residual);
    if (!residual.is_zero() && residual.deg() > 0)
        throw spectral_error("unsupported geometry: irrational ramification points");
    for (auto& [t0, mult] : roots) {
        if (xprime.den.eval(t0) == 0) continue;
        if (mult != 1) throw spectral_error("unsupported geometry: non-simple ramification");
        cd.tb.push_back(t0);
    }
    cd.nb = (int)cd.tb.size();
    if (cd.nb == 0) throw spectral_error("curve has no ramification points");
    long M = order;
    for (int a = 0; a < cd.nb; ++a) {
        Rat t0 = cd.tb[a];
        SerQ xps = ratfun_series(xprime, t0, M + 2);
        SerQ yps = ratfun_series(yprime, t0, M + 2);
        SerQ xs(M + 3, Rat(0)), ys(M + 3, Rat(0));
        for (size_t j = 0; j < xps.size() && j + 1 < xs.size(); ++j) xs[j + 1] = xps[j] / rat((long)j + 1);
        for (size_t j = 0; j < yps.size() && j + 1 < ys.size(); ++j) ys[j + 1] = yps[j] / rat((long)j + 1);
        cd.xb.push_back(Rat(0));
        cd.yb.push_back(Rat(0));
        analyze_branch(cd, std::move(xs), std::move(ys), M);
    }
    return cd;
}

static void analyze_branch(CurveData& cd, SerQ xs, SerQ ys, long M) {
        if (xs.size() < 3 || xs[1] != 0 || xs[2] == 0)
            throw spectral_error("ramification point is not a simple quadratic critical point");
        cd.g0.push_back(xs[2]);
        cd.xser.push_back(xs);
        cd.yser.push_back(ys);
        // involution: write tbar = -s u(s) with u a unit and solve
        // u^2 g(-su) = g(s), where x - x_a = s^2 g(s); Newton in u is regular
        SerQ g(M + 1, Rat(0));
        for (size_t j = 2; j < xs.size() && j - 2 <= (size_t)M; ++j) g[j - 2] = xs[j];
        SerQ gp = ser_deriv(g);
        SerQ u(M + 1, Rat(0));
        u[0] = 1;
        for (int it = 0; it < 40; ++it) {
            // -s u(s)
            SerQ msu(M + 1, Rat(0));
            for (long j = 0; j + 1 <= M; ++j) msu[j + 1] = -u[j];
            SerQ gc = ser_compose(g, msu, M);
            SerQ H = ser_add(ser_mul(ser_mul(u, u, M), gc, M), ser_scale(g, Rat(-1)));
            bool zero = true;
            for (auto& v : H) zero = zero && v == 0;
            if (zero) break;
            SerQ gpc = ser_compose(gp, msu, M);
            // H' = 2u gc - s u^2 gpc
            SerQ term2(M + 1, Rat(0));
            SerQ u2gpc = ser_mul(ser_mul(u, u, M), gpc, M);
            for (long j = 0; j + 1 <= M; ++j) term2[j + 1] = -u2gpc[j];
            SerQ Hp = ser_add(ser_scale(ser_mul(u, gc, M), Rat(2)), term2);
            u = ser_add(u, ser_scale(ser_mul(H, ser_inv(Hp, M), M), Rat(-1)));
        }
        SerQ ib(M + 1, Rat(0));
        for (long j = 0; j + 1 <= M; ++j) ib[j + 1] = -u[j];
        cd.invol.push_back(ib);
        // zeta = ca * s * squnit(s), squnit = sqrt(g/g0)
        SerQ gnorm(M + 1, Rat(0));
        for (size_t j = 2; j < xs.size() && j - 2 <= (size_t)M; ++j) gnorm[j - 2] = xs[j] / xs[2];
        cd.squnit.push_back(ser_sqrt_unit(gnorm, M));
        cd.ca.push_back(sqrt_rational(xs[2]));
        if (ys.size() < 2 || ys[1] == 0)
            throw spectral_error("degenerate curve: y has no linear term at a ramification point");
        cd.h1.push_back(cd.ca.back().inverse() * ys[1]);
}


// ---------------------------------------------------------------------------
// the recursion

bool OmegaTensor::is_symmetric() const {
    // group entries by the sorted key and require all permutations to agree
    std::map<std::vector<PP>, std::vector<Rat>> groups;
    for (auto& [key, val] : T) {
        auto sorted = key;
        std::sort(sorted.begin(), sorted.end());
        groups[sorted].push_back(val);
    }
    for (auto& [key, vals] : groups)
        for (auto& v : vals)
            if (v != vals[0]) return false;
    return true;
}

long OmegaTensor::max_order(int a) const {
    long m = 0;
    for (auto& [key, val] : T)
        for (auto& p : key)
            if (p.a == a) m = std::max(m, p.k);
    return m;
}

cplx OmegaTensor::eval(const CurveData& cd, const std::vector<cplx>& t) const {
    cplx s = 0;
    for (auto& [key, val] : T) {
        cplx term = to_double(val);
        for (size_t i = 0; i < key.size(); ++i)
            term /= std::pow(t[i] - to_double(cd.tb[key[i].a]), (double)key[i].k);
        s += term;
    }
    return s;
}

bool OmegaTensor::operator==(const OmegaTensor& o) const {
    for (auto& [k, v] : T) {
        auto it = o.T.find(k);
        if (it == o.T.end()) {
            if (v != 0) return false;
        } else if (it->second != v)
            return false;
    }
    for (auto& [k, v] : o.T)
        if (!T.count(k) && v != 0) return false;
    return true;
}

namespace {

// W(s): map from spectator profile assignment to a Laurent series in s
using Bracket = std::map<std::vector<PP>, Laur>;

void bracket_add(Bracket& W, const std::vector<PP>& key, const Laur& ser) {
    auto it = W.find(key);
    if (it == W.end()) W[key] = ser;
    else it->second = laur_add(it->second, ser);
}

// profile basis form evaluated along t' = ta + s: series of 1/(t' - t_b)^k
Laur profile_at(const CurveData& cd, int a, const PP& p, long M) {
    if (p.a == a) {
        Laur r;
        r.lead = -p.k;
        r.c.assign(M + p.k + 1, Rat(0));
        r.c[0] = 1;
        return r;
    }
    Rat d = cd.tb[a] - cd.tb[p.a];
    // 1/(d + s)^k
    SerQ base(M + 1, Rat(0));
    base[0] = d;
    if (M >= 1) base[1] = 1;
    SerQ inv = ser_inv(base, M);
    Laur r = laur_from(inv);
    Laur out{0, {Rat(1)}};
    for (long i = 0; i < p.k; ++i) out = laur_mul(out, r, M);
    return out;
}

// same along tbar' = ta + ib(s), including the dtbar/ds factor if with_measure
Laur profile_at_bar(const CurveData& cd, int a, const PP& p, long M, bool with_measure) {
    const SerQ& ib = cd.invol[a];
    Laur val;
    if (p.a == a) {
        // 1/ib(s)^k
        Laur base{1, SerQ(ib.begin() + 1, ib.end())};
        val = laur_pow(base, -p.k, M);
    } else {
        Rat d = cd.tb[a] - cd.tb[p.a];
        SerQ shifted = ib;
        shifted[0] += d;
        Laur base = laur_from(shifted);
        val = laur_pow(base, -p.k, M);
    }
    if (with_measure) val = laur_mul(val, laur_from(ser_deriv(cd.invol[a])), M);
    return val;
}

// B(t', t_j)-column: series coefficients s^k attach spectator profile (a, k+2)
// with weight (k+1); at tbar' composes with the involution
std::vector<std::pair<PP, Laur>> b_column(const CurveData& cd, int a, long M, bool bar) {
    std::vector<std::pair<PP, Laur>> out;
    for (long k = 0; k + 2 <= M + 4; ++k) {
        Laur ser;
        if (!bar) {
            ser.lead = k;
            ser.c.assign(1, rat(k + 1));
        } else {
            // (k+1) * ib(s)^k * ib'(s)
            Laur base{1, SerQ(cd.invol[a].begin() + 1, cd.invol[a].end())};
            ser = laur_pow(base, k, M);
            ser = laur_mul(ser, laur_from(ser_deriv(cd.invol[a])), M);
            for (auto& c : ser.c) c *= rat(k + 1);
        }
        out.push_back({PP{a, k + 2}, ser});
    }
    return out;
}

} // namespace

const OmegaTensor& omega(CurveData& cd, long g, long n) {
    auto key = std::make_pair(g, n);
    auto it = cd.memo.find(key);
    if (it != cd.memo.end()) return it->second;
    if (2 * g - 2 + n <= 0) throw spectral_error("omega: unstable (g,n)");
    long M = 6 * g + 2 * n + 10;
    if (cd.order < M) throw spectral_error("omega: curve analyzed to insufficient order");

    OmegaTensor R;
    R.g = g;
    R.n = n;

    for (int a = 0; a < cd.nb; ++a) {
        // denominator 2 x'(s) (y(s) - y(ib(s)))
        SerQ xp = ser_deriv(cd.xser[a]);
        SerQ ydiff = ser_add(cd.yser[a], ser_scale(ser_compose(cd.yser[a], cd.invol[a], M), Rat(-1)));
        SerQ den = ser_mul(xp, ydiff, M + 4);
        Laur dlaur = laur_from(den);
        // strip leading zeros into the Laurent exponent
        long v = 0;
        while (v < (long)dlaur.c.size() && dlaur.c[v] == 0) ++v;
        if (v == (long)dlaur.c.size()) throw spectral_error("omega: degenerate recursion kernel");
        dlaur.lead = v;
        dlaur.c.erase(dlaur.c.begin(), dlaur.c.begin() + v);
        Laur dinv = laur_pow(dlaur, -1, M);
        for (auto& c0 : dinv.c) c0 /= 2;

        // assemble the bracket W(s)
        Bracket W;
        // (1) omega_{g-1, n+1}(t', tbar', spectators)
        if (g >= 1) {
            if (2 * (g - 1) - 2 + (n + 1) > 0) {
                const OmegaTensor& prev = omega(cd, g - 1, n + 1);
                for (auto& [pkey, pval] : prev.T) {
                    Laur ser = laur_mul(profile_at(cd, a, pkey[n - 1], M),
                                        profile_at_bar(cd, a, pkey[n], M, true), M);
                    std::vector<PP> spect(pkey.begin(), pkey.begin() + (n - 1));
                    Laur scaled = ser;
                    for (auto& c0 : scaled.c) c0 *= pval;
                    bracket_add(W, spect, scaled);
                }
            } else if (g - 1 == 0 && n + 1 == 2) {
                // B(t', tbar') = ib'(s) / (s - ib(s))^2
                SerQ diff = ser_add(SerQ{Rat(0), Rat(1)}, ser_scale(cd.invol[a], Rat(-1)));
                Laur base = laur_from(diff);
                long vv = 0;
                while (vv < (long)base.c.size() && base.c[vv] == 0) ++vv;
                base.lead = vv;
                base.c.erase(base.c.begin(), base.c.begin() + vv);
                Laur ser = laur_pow(base, -2, M);
                ser = laur_mul(ser, laur_from(ser_deriv(cd.invol[a])), M);
                bracket_add(W, std::vector<PP>{}, ser);
            }
        }
        // (2) products over splittings
        long nsp = n - 1;
        for (long g1 = 0; g1 <= g; ++g1) {
            long g2 = g - g1;
            for (long mask = 0; mask < (1l << nsp); ++mask) {
                std::vector<long> I, J;
                for (long j = 0; j < nsp; ++j) (mask & (1l << j) ? I : J).push_back(j);
                long n1 = (long)I.size() + 1, n2 = (long)J.size() + 1;
                if (g1 == 0 && n1 == 1) continue; // excluded terms
                if (g2 == 0 && n2 == 1) continue;
                bool stable1 = 2 * g1 - 2 + n1 > 0, stable2 = 2 * g2 - 2 + n2 > 0;
                if (!stable1 && !(g1 == 0 && n1 == 2)) continue;
                if (!stable2 && !(g2 == 0 && n2 == 2)) continue;

                // factor 1 carries t', factor 2 carries tbar'
                std::vector<std::pair<std::vector<PP>, Laur>> f1, f2;
                if (stable1) {
                    const OmegaTensor& w1 = omega(cd, g1, n1);
                    for (auto& [k1, v1] : w1.T) {
                        Laur ser = profile_at(cd, a, k1[n1 - 1], M);
                        for (auto& c0 : ser.c) c0 *= v1;
                        f1.push_back({std::vector<PP>(k1.begin(), k1.begin() + (n1 - 1)), ser});
                    }
                } else {
                    for (auto& [pp, ser] : b_column(cd, a, M, false)) f1.push_back({{pp}, ser});
                }
                if (stable2) {
                    const OmegaTensor& w2 = omega(cd, g2, n2);
                    for (auto& [k2, v2] : w2.T) {
                        Laur ser = profile_at_bar(cd, a, k2[n2 - 1], M, true);
                        for (auto& c0 : ser.c) c0 *= v2;
                        f2.push_back({std::vector<PP>(k2.begin(), k2.begin() + (n2 - 1)), ser});
                    }
                } else {
                    for (auto& [pp, ser] : b_column(cd, a, M, true)) f2.push_back({{pp}, ser});
                }
                for (auto& [ka, sa] : f1)
                    for (auto& [kb, sb] : f2) {
                        // interleave spectator profiles back into positions I, J
                        std::vector<PP> spect(nsp);
                        for (size_t ii = 0; ii < I.size(); ++ii) spect[I[ii]] = ka[ii];
                        for (size_t jj = 0; jj < J.size(); ++jj) spect[J[jj]] = kb[jj];
                        bracket_add(W, spect, laur_mul(sa, sb, M));
                    }
            }
        }

        // kernel numerator terms (s^k - ib(s)^k) -> active profile (a, k+1), k >= 1
        long kmax = 0;
        for (auto& [spect, ser] : W) kmax = std::max(kmax, -std::min(ser.lead + dinv.lead, 0l) + 2);
        for (auto& [spect, ser] : W) {
            Laur WD = laur_mul(ser, dinv, kmax + 2);
            for (long k = 1; k <= kmax; ++k) {
                // coefficient of s^{-1} in (s^k - ib^k) * WD
                Laur ibk = laur_pow(Laur{1, SerQ(cd.invol[a].begin() + 1, cd.invol[a].end())}, k, kmax + 2);
                Rat coeff = WD.at(-1 - k);
                for (long j = ibk.lead; j <= ibk.top(); ++j) coeff -= ibk.at(j) * WD.at(-1 - j);
                if (coeff == 0) continue;
                std::vector<PP> full = spect;
                full.push_back(PP{a, k + 1});
                auto slot = R.T.find(full);
                if (slot == R.T.end()) R.T[full] = coeff;
                else {
                    slot->second += coeff;
                    if (slot->second == 0) R.T.erase(slot);
                }
            }
        }
    }
    // prune residue-order-1 sanity: k+1 >= 2 by construction
    auto [pos, ok] = cd.memo.emplace(key, std::move(R));
    (void)ok;
    return pos->second;
}

// ---------------------------------------------------------------------------
// theta forms and check functions

namespace {

using SerC = std::vector<Cyclo>;

SerC serc_mul(const SerC& a, const SerC& b, long M) {
    SerC r(std::min<long>(M + 1, (long)(a.size() + b.size()) - 1));
    for (size_t i = 0; i < a.size() && (long)i <= M; ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size() && (long)(i + j) <= M; ++j) r[i + j] = r[i + j] + a[i] * b[j];
    }
    return r;
}

SerC serc_from_q(const SerQ& a) {
    SerC r;
    for (auto& x : a) r.push_back(Cyclo(1, x));
    return r;
}

SerC serc_inv(const SerC& a, long M) {
    if (a.empty() || a[0].is_zero()) throw spectral_error("cyclotomic series inverse of non-unit");
    SerC r(M + 1);
    Cyclo inv0 = a[0].inverse();
    r[0] = inv0;
    for (long k = 1; k <= M; ++k) {
        Cyclo s;
        for (long j = 1; j <= k && j < (long)a.size(); ++j) s = s + a[j] * r[k - j];
        r[k] = (s * Rat(-1)) * inv0;
    }
    return r;
}

SerC serc_compose(const SerC& a, const SerC& b, long M) {
    SerC r(1);
    r[0] = a.empty() ? Cyclo() : a[0];
    SerC bp{Cyclo(1, Rat(1))};
    for (size_t i = 1; i < a.size(); ++i) {
        bp = serc_mul(bp, b, M);
        if (!a[i].is_zero()) {
            if (r.size() < bp.size()) r.resize(bp.size());
            for (size_t j = 0; j < bp.size(); ++j) r[j] = r[j] + bp[j] * a[i];
        }
    }
    if ((long)r.size() > M + 1) r.resize(M + 1);
    return r;
}

// s as a series in zeta at branch a: s = zeta/ca * (1 + ...)
SerC s_of_zeta(const CurveData& cd, int a, long M) {
    // zeta = ca * s * u(s): invert
    SerC zs(M + 2);
    for (long j = 0; j < (long)cd.squnit[a].size() && j + 1 <= M + 1; ++j)
        zs[j + 1] = cd.ca[a] * cd.squnit[a][j];
    // Lagrange-style iteration: s_{k+1} = zeta-series composed
    // solve zeta = f(s) for s(zeta) by Newton on series
    SerC s(M + 1);
    s[1] = cd.ca[a].inverse();
    for (int it = 0; it < 24; ++it) {
        SerC F = serc_compose(zs, s, M); // f(s(zeta)) should equal zeta
        // diff = F - zeta
        SerC diff = F;
        if (diff.size() < 2) diff.resize(2);
        diff[1] = diff[1] - Cyclo(1, Rat(1));
        bool zero = true;
        for (auto& v : diff) zero = zero && v.is_zero();
        if (zero) break;
        // derivative f'(s(zeta))
        SerC fp(M + 1);
        for (long j = 1; j < (long)zs.size(); ++j)
            if (!zs[j].is_zero() && j - 1 <= M) fp[j - 1] = zs[j] * rat(j);
        SerC fpc = serc_compose(fp, s, M);
        SerC corr = serc_mul(diff, serc_inv(fpc, M), M);
        for (size_t j = 0; j < s.size() && j < corr.size(); ++j) s[j] = s[j] - corr[j];
    }
    return s;
}

} // namespace

std::map<long, Cyclo> theta_pp(const CurveData& cd, int a, long d) {
    // theta_a^d = -(2d-1)!! 2^{-d} Res_{t'->t_a} B(t,t') zeta(t')^{-2d-1}
    // B-column gives s^k |-> (k+1) * dt/(t-t_a)^{k+2}; zeta^{-2d-1} =
    // (ca s)^{-2d-1} u(s)^{-2d-1}
    long M = 2 * d + 6;
    SerC unit = serc_from_q(cd.squnit[a]);
    SerC upow{Cyclo(1, Rat(1))};
    for (long i = 0; i < 2 * d + 1; ++i) upow = serc_mul(upow, unit, M);
    SerC uinv = serc_inv(upow, M);
    Cyclo capow = Cyclo(1, Rat(1));
    for (long i = 0; i < 2 * d + 1; ++i) capow = capow * cd.ca[a];
    Cyclo pref = capow.inverse() * (Rat(-1) * Rat(double_factorial_odd(d)) / rpow(Rat(2), d));
    std::map<long, Cyclo> out;
    // Res_s sum_k (k+1) s^k pi_{a,k+2} * s^{-2d-1} uinv(s): pick k = 2d - j
    for (long j = 0; j < (long)uinv.size(); ++j) {
        long k = 2 * d - j;
        if (k < 0) break;
        Cyclo c0 = uinv[j] * rat(k + 1) * pref;
        if (!c0.is_zero()) out[k + 2] = out.count(k + 2) ? out[k + 2] + c0 : c0;
    }
    return out;
}

std::vector<Cyclo> f_series(const CurveData& cd, int a, int b, long order) {
    // expansion coefficients of theta_b^0 / d zeta_a near t_a
    long M = 2 * order + 6;
    auto th = theta_pp(cd, b, 0); // poles at t_b: orders {2}
    SerC s_z = s_of_zeta(cd, a, M);
    // theta^0_b(t)/dt = sum_k coeff / (t - t_b)^k: expand at t = ta + s(zeta),
    // then multiply by ds/dzeta
    SerC total(M + 1);
    for (auto& [k, c0] : th) {
        SerC base(M + 1);
        if (b == a) {
            // 1/s^k: handle separately via Laurent in zeta
            continue;
        }
        // base = (ta - tb) + s(zeta)
        Rat dd = cd.tb[a] - cd.tb[b];
        base[0] = Cyclo(1, dd);
        for (size_t j = 1; j < s_z.size() && j < base.size(); ++j) base[j] = s_z[j];
        SerC binv = serc_inv(base, M);
        SerC pw{Cyclo(1, Rat(1))};
        for (long i = 0; i < k; ++i) pw = serc_mul(pw, binv, M);
        for (size_t j = 0; j < pw.size(); ++j) total[j] = total[j] + pw[j] * c0;
    }
    // ds/dzeta
    SerC dsdz(M + 1);
    for (size_t j = 1; j < s_z.size(); ++j) dsdz[j - 1] = s_z[j] * rat((long)j);
    total = serc_mul(total, dsdz, M);

    // Laurent part for b == a: theta_a^0/dzeta = -1/zeta^2 + analytic
    // compute analytic part: theta_a^0/dt = c2/s^2 with c2 from theta_pp (k=2):
    // full expansion: c2 * s(zeta)^{-2} * ds/dzeta; its zeta^{-2} part is -1
    std::map<long, Cyclo> laurent; // zeta-exponent -> coeff, exponents >= -2
    if (b == a) {
        Cyclo c2 = th.at(2);
        // s(zeta)^{-2} = (zeta/ca)^{-2} * unit(zeta)^{-2}
        SerC unit(M + 1);
        // s = s1 zeta (1 + e(zeta)): extract unit = s/zeta/s1
        Cyclo s1 = s_z[1];
        for (size_t j = 1; j < s_z.size(); ++j) unit[j - 1] = s_z[j] * s1.inverse();
        SerC uinv2 = serc_inv(serc_mul(unit, unit, M), M);
        // c2 * s1^{-2} zeta^{-2} uinv2(zeta) * dsdz(zeta)
        SerC piece = serc_mul(uinv2, dsdz, M);
        Cyclo pref = c2 * (s1 * s1).inverse();
        for (size_t j = 0; j < piece.size(); ++j) {
            Cyclo v = piece[j] * pref;
            if (!v.is_zero()) laurent[(long)j - 2] = laurent.count((long)j - 2) ? laurent[(long)j - 2] + v : v;
        }
    }
    for (size_t j = 0; j < total.size(); ++j)
        if (!total[j].is_zero()) laurent[(long)j] = laurent.count((long)j) ? laurent[(long)j] + total[j] : total[j];

    // f(u) = -c_{-2} + sum_{j>=0} c_{2j} (2j-1)!! 2^{-j-1} u^{-j-1}
    std::vector<Cyclo> f(order + 1);
    auto cat = [&](long k) { return laurent.count(k) ? laurent[k] : Cyclo(); };
    f[0] = cat(-2) * Rat(-1);
    for (long j = 0; j + 1 <= order; ++j)
        f[j + 1] = cat(2 * j) * (Rat(double_factorial_odd(j)) / rpow(Rat(2), j + 1));
    return f;
}

std::vector<Cyclo> hcheck_series(const CurveData& cd, int a, long kmax) {
    long M = 2 * kmax + 4;
    SerC s_z = s_of_zeta(cd, a, M);
    SerC y_in_zeta = serc_compose(serc_from_q(cd.yser[a]), s_z, M);
    std::vector<Cyclo> out(kmax + 1);
    for (long k = 1; k <= kmax; ++k) {
        Cyclo h = 2 * k - 1 < (long)y_in_zeta.size() ? y_in_zeta[2 * k - 1] : Cyclo();
        out[k] = h * (Rat(double_factorial_odd(k)) / rpow(Rat(2), k - 1));
    }
    return out;
}

Cyclo bcheck(const CurveData& cd, int a, int b, long k, long l) {
    long K = 2 * k, L = 2 * l;
    long M = K + L + 4;
    SerC sa = s_of_zeta(cd, a, M), sb = s_of_zeta(cd, b, M);
    // bivariate arrays indexed [i][j] = coeff of zeta1^i zeta2^j
    auto bimul = [&](const std::vector<SerC>& A, const std::vector<SerC>& B) {
        std::vector<SerC> R(M + 1, SerC(M + 1));
        for (long i1 = 0; i1 <= M; ++i1)
            for (long j1 = 0; i1 + j1 <= M; ++j1) {
                if (i1 < (long)A.size() && j1 < (long)A[i1].size() && !A[i1][j1].is_zero()) {
                    for (long i2 = 0; i1 + i2 <= M; ++i2)
                        for (long j2 = 0; j1 + j2 <= M && i2 < (long)B.size(); ++j2) {
                            if (j2 < (long)B[i2].size() && !B[i2][j2].is_zero())
                                R[i1 + i2][j1 + j2] = R[i1 + i2][j1 + j2] + A[i1][j1] * B[i2][j2];
                        }
                }
            }
        return R;
    };
    (void)bimul;
    // direct: delta = (t1 - t2) as bivariate: for a != b: (ta - tb) + s(z1) - s(z2)
    std::vector<SerC> diff(M + 1, SerC(M + 1));
    if (a != b) diff[0][0] = Cyclo(1, cd.tb[a] - cd.tb[b]);
    for (long i = 1; i < (long)sa.size(); ++i) diff[i][0] = diff[i][0] + sa[i];
    for (long j = 1; j < (long)sb.size(); ++j) diff[0][j] = diff[0][j] - sb[j];

    // derivative factors
    SerC dsa(M + 1), dsb(M + 1);
    for (long i = 1; i < (long)sa.size(); ++i) dsa[i - 1] = sa[i] * rat(i);
    for (long j = 1; j < (long)sb.size(); ++j) dsb[j - 1] = sb[j] * rat(j);

    std::vector<SerC> result(M + 1, SerC(M + 1));
    if (a != b) {
        // 1/diff^2 * dsa(z1) dsb(z2)
        // invert diff as a bivariate unit
        std::vector<SerC> inv(M + 1, SerC(M + 1));
        Cyclo c00 = diff[0][0];
        inv[0][0] = c00.inverse();
        // Newton-free: solve diff * inv = 1 by triangular recursion over total degree
        for (long d = 1; d <= M; ++d)
            for (long i = 0; i <= d; ++i) {
                long j = d - i;
                Cyclo s;
                for (long p = 0; p <= i; ++p)
                    for (long qq = 0; qq <= j; ++qq) {
                        if (p == 0 && qq == 0) continue;
                        if (p < (long)diff.size() && qq < (long)diff[p].size() && !diff[p][qq].is_zero())
                            s = s + diff[p][qq] * inv[i - p][j - qq];
                    }
                inv[i][j] = (s * Rat(-1)) * c00.inverse();
            }
        auto inv2 = bimul(inv, inv);
        // multiply by dsa(z1) dsb(z2)
        std::vector<SerC> meas(M + 1, SerC(M + 1));
        for (long i = 0; i < (long)dsa.size(); ++i)
            for (long j = 0; j < (long)dsb.size(); ++j)
                if (i <= M && j <= M) meas[i][j] = dsa[i] * dsb[j];
        result = bimul(inv2, meas);
    } else {
        // [dsa(z1) dsb(z2) / E^2 - 1] / (z1 - z2)^2 with diff = (z1 - z2) E
        // compute E: diff / (z1 - z2): diff[i][0] = s_i z1^i, diff[0][j] = -s_j z2^j
        // E[i][j] = s_{i+j+1} (symmetrized): since s(z1)-s(z2) = (z1-z2) sum_{i,j} s_{i+j+1} z1^i z2^j
        std::vector<SerC> E(M + 1, SerC(M + 1));
        for (long i = 0; i <= M; ++i)
            for (long j = 0; i + j <= M; ++j)
                if (i + j + 1 < (long)sa.size()) E[i][j] = sa[i + j + 1];
        // E squared, inverted
        auto E2 = bimul(E, E);
        std::vector<SerC> inv(M + 1, SerC(M + 1));
        Cyclo c00 = E2[0][0];
        inv[0][0] = c00.inverse();
        for (long d = 1; d <= M; ++d)
            for (long i = 0; i <= d; ++i) {
                long j = d - i;
                Cyclo s;
                for (long p = 0; p <= i; ++p)
                    for (long qq = 0; qq <= j; ++qq) {
                        if (p == 0 && qq == 0) continue;
                        if (!E2[p][qq].is_zero()) s = s + E2[p][qq] * inv[i - p][j - qq];
                    }
                inv[i][j] = (s * Rat(-1)) * c00.inverse();
            }
        std::vector<SerC> meas(M + 1, SerC(M + 1));
        for (long i = 0; i < (long)dsa.size() && i <= M; ++i)
            for (long j = 0; j < (long)dsb.size() && j <= M; ++j) meas[i][j] = dsa[i] * dsb[j];
        auto num = bimul(meas, inv);
        num[0][0] = num[0][0] - Cyclo(1, Rat(1));
        // divide twice by (z1 - z2)
        auto divz = [&](std::vector<SerC> A) {
            // Q with A = (z1 - z2) Q: Q[i][j] = A[i+1][j] + Q[i][j-1]... solve by
            // scanning: A[i][j] = Q[i-1][j] - Q[i][j-1]
            std::vector<SerC> Q(M + 1, SerC(M + 1));
            for (long i = M; i >= 0; --i)
                for (long j = 0; j <= M; ++j) {
                    // Q[i][j] determined from A[i+1][j] and Q[i+1][j-1]... use
                    // A[i+1][j] = Q[i][j] - Q[i+1][j-1]
                    if (i + 1 <= M) {
                        Cyclo rhs = (i + 1 < (long)A.size() && j < (long)A[i + 1].size()) ? A[i + 1][j] : Cyclo();
                        Cyclo prev = (j >= 1) ? Q[i + 1][j - 1] : Cyclo();
                        Q[i][j] = rhs + prev;
                    }
                }
            return Q;
        };
        result = divz(divz(num));
    }
    return (K < (long)result.size() && L < (long)result[K].size() ? result[K][L] : Cyclo()) *
           (Rat(double_factorial_odd(k) * double_factorial_odd(l)) / rpow(Rat(2), k + l + 1));
}

Cyclo bcheck_from_f(const CurveData& cd, int a, int b, long k, long l) {
    long ord = k + l + 2;
    std::vector<std::vector<Cyclo>> fa, fb;
    for (int c = 0; c < cd.nb; ++c) {
        fa.push_back(f_series(cd, a, c, ord));
        fb.push_back(f_series(cd, b, c, ord));
    }
    // P(z,w) = delta_ab - sum_c fa_c(z) fb_c(w), with f(1/u -> z) power series
    std::vector<std::vector<Cyclo>> P(ord + 1, std::vector<Cyclo>(ord + 1));
    if (a == b) P[0][0] = Cyclo(1, Rat(1));
    for (int c = 0; c < cd.nb; ++c)
        for (long i = 0; i <= ord; ++i)
            for (long j = 0; i + j <= ord; ++j) P[i][j] = P[i][j] - fa[c][i] * fb[c][j];
    // divide by (z + w): P = (z+w) Q, i.e. P[i][j] = Q[i-1][j] + Q[i][j-1]
    std::vector<std::vector<Cyclo>> Q(ord + 1, std::vector<Cyclo>(ord + 1));
    for (long d = 1; d <= ord; ++d) {
        Q[d - 1][0] = P[d][0];
        for (long j = 1; j <= d - 1; ++j) {
            long i = d - j;
            Q[i - 1][j] = P[i][j] - Q[i][j - 1];
        }
        // consistency at i = 0: P[0][d] must equal Q[0][d-1]
        if (!(P[0][d] == Q[0][d - 1]))
            throw spectral_error("f-product identity: numerator not divisible by z+w");
    }
    return (k < (long)Q.size() && l < (long)Q[k].size()) ? Q[k][l] : Cyclo();
}

} // namespace remodel
