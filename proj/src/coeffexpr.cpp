#include "remodel/coeffexpr.hpp"
#include "remodel/cgamma.hpp"
#include <algorithm>
#include <sstream>
#include <numeric>

namespace remodel {

std::string to_string(const AffForm& f) {
    std::ostringstream os;
    bool lead = true;
    auto piece = [&](const Rat& c, const char* sym) {
        if (c == 0) return;
        if (!lead && c > 0) os << "+";
        if (c == -1 && *sym) os << "-";
        else if (c != 1 || !*sym) os << rat_str(c);
        if (*sym && (c != 1 && c != -1)) os << "*";
        os << sym;
        lead = false;
    };
    piece(f.lin.a, "U1");
    piece(f.lin.b, "U2");
    piece(f.cst, "");
    if (lead) os << "0";
    return os.str();
}

Poly2 Poly2::from_aff(const AffForm& f) {
    Poly2 p;
    if (f.lin.a != 0) p.c[{1, 0}] = f.lin.a;
    if (f.lin.b != 0) p.c[{0, 1}] = f.lin.b;
    if (f.cst != 0) p.c[{0, 0}] = f.cst;
    return p;
}

void Poly2::trim() {
    for (auto it = c.begin(); it != c.end();)
        it = it->second == 0 ? c.erase(it) : std::next(it);
}

Poly2 Poly2::operator+(const Poly2& o) const {
    Poly2 r = *this;
    for (auto& [e, k] : o.c) r.c[e] += k;
    r.trim();
    return r;
}

Poly2 Poly2::operator-(const Poly2& o) const {
    Poly2 r = *this;
    for (auto& [e, k] : o.c) r.c[e] -= k;
    r.trim();
    return r;
}

Poly2 Poly2::operator*(const Poly2& o) const {
    Poly2 r;
    for (auto& [e1, k1] : c)
        for (auto& [e2, k2] : o.c) r.c[{e1[0] + e2[0], e1[1] + e2[1]}] += k1 * k2;
    r.trim();
    return r;
}

Poly2 Poly2::operator*(const Rat& k) const {
    if (k == 0) return Poly2();
    Poly2 r = *this;
    for (auto& [e, v] : r.c) v *= k;
    return r;
}

Poly2 Poly2::deriv(int var) const {
    Poly2 r;
    for (auto& [e, k] : c)
        if (e[var] > 0) {
            auto e2 = e;
            e2[var] -= 1;
            r.c[e2] += k * e[var];
        }
    r.trim();
    return r;
}

cplx Poly2::eval(cplx U1, cplx U2) const {
    cplx s = 0;
    for (auto& [e, k] : c) {
        cplx t = to_double(k);
        for (int i = 0; i < e[0]; ++i) t *= U1;
        for (int i = 0; i < e[1]; ++i) t *= U2;
        s += t;
    }
    return s;
}

bool Poly2::divide_by_aff(const AffForm& f, Poly2& quotient) const {
    int var = f.lin.a != 0 ? 0 : (f.lin.b != 0 ? 1 : -1);
    if (var == -1) {
        if (f.cst == 0) return false;
        quotient = *this * (1 / f.cst);
        return true;
    }
    Rat lead = var == 0 ? f.lin.a : f.lin.b;
    Poly2 rest = Poly2::from_aff(f);
    std::array<int, 2> le{var == 0 ? 1 : 0, var == 0 ? 0 : 1};
    rest.c.erase(le);
    Poly2 p = *this;
    Poly2 q;
    while (!p.is_zero()) {
        // lex-largest exponent in the pivot variable first
        auto it = std::max_element(p.c.begin(), p.c.end(), [&](auto& x, auto& y) {
            if (x.first[var] != y.first[var]) return x.first[var] < y.first[var];
            return x.first[1 - var] < y.first[1 - var];
        });
        auto e = it->first;
        if (e[var] == 0) return false;
        std::array<int, 2> qe = e;
        qe[var] -= 1;
        Rat qc = it->second / lead;
        Poly2 mono;
        mono.c[qe] = qc;
        q = q + mono;
        p = p - mono * Poly2::from_aff(f);
    }
    quotient = std::move(q);
    return true;
}

std::string Poly2::str() const {
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        auto& [e, k] = *it;
        if (!first) os << (k > 0 ? " + " : " - ");
        else if (k < 0) os << "-";
        Rat a = abs(k);
        bool unit = a == 1 && (e[0] || e[1]);
        if (!unit) os << rat_str(a);
        if (e[0]) { os << (unit ? "" : "*") << "U1"; if (e[0] > 1) os << "^" << e[0]; unit = false; }
        if (e[1]) { os << (unit && !e[0] ? "" : "*") << "U2"; if (e[1] > 1) os << "^" << e[1]; }
        first = false;
    }
    return os.str();
}

// canonical scaling of an affine factor: first nonzero coefficient becomes 1;
// returns the scale s with f = s * canonical
static Rat canonical_aff(AffForm& f) {
    Rat s = f.lin.a != 0 ? f.lin.a : (f.lin.b != 0 ? f.lin.b : f.cst);
    if (s == 0) throw std::domain_error("zero affine factor");
    f = f * (1 / s);
    return s;
}

RatFun2 RatFun2::inv_aff(const AffForm& f_in) {
    AffForm f = f_in;
    Rat s = canonical_aff(f);
    RatFun2 r;
    r.num = Poly2(1 / s);
    r.den[f] = 1;
    return r;
}

void RatFun2::reduce() {
    if (num.is_zero()) { den.clear(); return; }
    for (auto it = den.begin(); it != den.end();) {
        Poly2 q;
        while (it->second > 0 && num.divide_by_aff(it->first, q)) {
            num = q;
            it->second -= 1;
        }
        it = it->second == 0 ? den.erase(it) : std::next(it);
    }
}

RatFun2 RatFun2::operator+(const RatFun2& o) const {
    RatFun2 r;
    // common denominator: max multiplicities
    std::map<AffForm, int> common = den;
    for (auto& [f, m] : o.den) common[f] = std::max(common[f], m);
    Poly2 a = num, b = o.num;
    for (auto& [f, m] : common) {
        auto ita = den.find(f);
        int ma = ita == den.end() ? 0 : ita->second;
        auto itb = o.den.find(f);
        int mb = itb == o.den.end() ? 0 : itb->second;
        Poly2 fp = Poly2::from_aff(f);
        for (int k = ma; k < m; ++k) a = a * fp;
        for (int k = mb; k < m; ++k) b = b * fp;
    }
    r.num = a + b;
    r.den = std::move(common);
    r.reduce();
    return r;
}

RatFun2 RatFun2::operator-(const RatFun2& o) const { return *this + o * Rat(-1); }

RatFun2 RatFun2::operator*(const RatFun2& o) const {
    RatFun2 r;
    r.num = num * o.num;
    r.den = den;
    for (auto& [f, m] : o.den) r.den[f] += m;
    r.reduce();
    return r;
}

RatFun2 RatFun2::operator*(const Rat& k) const {
    RatFun2 r = *this;
    r.num = r.num * k;
    if (r.num.is_zero()) r.den.clear();
    return r;
}

RatFun2 RatFun2::div_aff(const AffForm& f_in) const {
    AffForm f = f_in;
    Rat s = canonical_aff(f);
    RatFun2 r = *this;
    r.num = r.num * (1 / s);
    r.den[f] += 1;
    r.reduce();
    return r;
}

RatFun2 RatFun2::deriv(int var) const {
    RatFun2 r;
    r.num = num.deriv(var);
    r.den = den;
    r.reduce();
    for (auto& [f, m] : den) {
        Rat fc = var == 0 ? f.lin.a : f.lin.b;
        if (fc == 0) continue;
        RatFun2 t;
        t.num = num * (fc * Rat(-m));
        t.den = den;
        t.den[f] += 1;
        t.reduce();
        r = r + t;
    }
    return r;
}

cplx RatFun2::eval(cplx U1, cplx U2) const {
    cplx v = num.eval(U1, U2);
    for (auto& [f, m] : den) {
        cplx fv = f.lin.eval(U1, U2) + to_double(f.cst);
        for (int k = 0; k < m; ++k) v /= fv;
    }
    return v;
}

bool RatFun2::operator==(const RatFun2& o) const { return (*this - o).is_zero(); }

std::string RatFun2::str() const {
    std::string s = "(" + num.str() + ")";
    for (auto& [f, m] : den) {
        s += "/(" + to_string(f) + ")";
        if (m > 1) s += "^" + std::to_string(m);
    }
    return s;
}

// ---------------------------------------------------------------------------

bool CoeffExpr::Key::operator<(const Key& o) const {
    if (two_pi != o.two_pi) return two_pi < o.two_pi;
    if (!(expi_lin == o.expi_lin)) return expi_lin < o.expi_lin;
    if (phase != o.phase) return phase < o.phase;
    return gammas < o.gammas;
}

bool CoeffExpr::Key::operator==(const Key& o) const {
    return two_pi == o.two_pi && expi_lin == o.expi_lin && phase == o.phase && gammas == o.gammas;
}

void CoeffExpr::add_term(Key k, RatFun2 r) {
    if (r.is_zero()) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) terms_.emplace(std::move(k), std::move(r));
    else {
        it->second = it->second + r;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

CoeffExpr CoeffExpr::scalar(const Rat& k) {
    CoeffExpr e;
    if (k != 0) e.terms_[Key{}] = RatFun2(k);
    return e;
}

CoeffExpr CoeffExpr::from_ratfun(RatFun2 r) {
    CoeffExpr e;
    if (!r.is_zero()) e.terms_[Key{}] = std::move(r);
    return e;
}

CoeffExpr CoeffExpr::exp_pi(const AffForm& arg) {
    // split the constant: e^{pi i (lin + c)} with c reduced mod 2, sign folded in
    Rat c = arg.cst;
    Rat twofloor = Rat(rfloor(c / 2)) * 2;
    c -= twofloor; // in [0,2)
    Rat sign = 1;
    if (c >= 1) { c -= 1; sign = -1; }
    CoeffExpr e;
    Key k;
    k.expi_lin = arg.lin;
    k.phase = c;
    e.terms_[k] = RatFun2(sign);
    return e;
}

CoeffExpr CoeffExpr::gamma(const AffForm& arg, int exponent) {
    if (exponent == 0) return one();
    if (arg.is_const() && is_integer(arg.cst) && arg.cst <= 0)
        throw std::domain_error("gamma at a non-positive integer");
    // shift the constant part into (0,1]
    long t = to_long(Int(rfloor(arg.cst)));
    if (rfrac(arg.cst) == 0) t -= 1; // integers: land on 1
    AffForm base = arg - rat(t);
    RatFun2 shift(Rat(1));
    for (long j = 1; j <= t; ++j) shift = shift * RatFun2::from_aff(arg - rat(j));
    for (long j = 0; j < -t; ++j) shift = shift.div_aff(arg + rat(j));
    CoeffExpr e;
    Key k;
    if (!(base.is_const() && base.cst == 1)) // Gamma(1) = 1 drops the atom
        k.gammas[base] = exponent;
    RatFun2 r(Rat(1));
    for (int i = 0; i < std::abs(exponent); ++i) r = r * shift;
    if (exponent < 0) {
        // invert the shift product: numerator/denominator swap is only valid
        // factor-by-factor, so rebuild
        RatFun2 inv(Rat(1));
        for (long j = 1; j <= t; ++j) inv = inv.div_aff(arg - rat(j));
        for (long j = 0; j < -t; ++j) inv = inv * RatFun2::from_aff(arg + rat(j));
        r = RatFun2(Rat(1));
        for (int i = 0; i < -exponent; ++i) r = r * inv;
    }
    e.terms_[k] = r;
    return e;
}

CoeffExpr CoeffExpr::two_pi_i(int k) {
    CoeffExpr e;
    Key key;
    key.two_pi = k;
    Rat ph = Rat(k, 2);
    Rat twofloor = Rat(rfloor(ph / 2)) * 2;
    ph -= twofloor;
    Rat sign = 1;
    if (ph >= 1) { ph -= 1; sign = -1; }
    key.phase = ph;
    e.terms_[key] = RatFun2(sign);
    return e;
}

CoeffExpr CoeffExpr::minus_two_pi_i(int k) {
    CoeffExpr e = two_pi_i(k);
    return (k % 2 == 0) ? e : e * Rat(-1);
}

CoeffExpr CoeffExpr::operator+(const CoeffExpr& o) const {
    CoeffExpr r = *this;
    for (auto& [k, v] : o.terms_) r.add_term(k, v);
    return r;
}

CoeffExpr CoeffExpr::operator-(const CoeffExpr& o) const { return *this + o * Rat(-1); }

CoeffExpr CoeffExpr::operator*(const Rat& k) const {
    CoeffExpr r;
    if (k == 0) return r;
    for (auto& [key, v] : terms_) r.terms_[key] = v * k;
    return r;
}

CoeffExpr CoeffExpr::operator*(const CoeffExpr& o) const {
    CoeffExpr r;
    for (auto& [k1, v1] : terms_)
        for (auto& [k2, v2] : o.terms_) {
            Key k;
            k.two_pi = k1.two_pi + k2.two_pi;
            k.expi_lin = k1.expi_lin + k2.expi_lin;
            Rat ph = k1.phase + k2.phase;
            Rat sign = 1;
            if (ph >= 1) { ph -= 1; sign = -1; }
            k.phase = ph;
            k.gammas = k1.gammas;
            for (auto& [g, e] : k2.gammas) {
                k.gammas[g] += e;
                if (k.gammas[g] == 0) k.gammas.erase(g);
            }
            r.add_term(std::move(k), v1 * v2 * sign);
        }
    return r;
}

std::vector<Rat> cyclotomic_poly(long n) {
    // divide x^n - 1 by Phi_d for proper divisors d
    static std::map<long, std::vector<Rat>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<Rat> p(n + 1, Rat(0));
    p[0] = -1;
    p[n] = 1;
    for (long d = 1; d < n; ++d)
        if (n % d == 0) {
            auto phi = cyclotomic_poly(d);
            // exact polynomial division p / phi
            std::vector<Rat> q(p.size() - phi.size() + 1, Rat(0));
            std::vector<Rat> r = p;
            for (long i = (long)q.size() - 1; i >= 0; --i) {
                Rat c = r[i + phi.size() - 1] / phi.back();
                q[i] = c;
                if (c != 0)
                    for (size_t j = 0; j < phi.size(); ++j) r[i + j] -= c * phi[j];
            }
            p = q;
        }
    cache[n] = p;
    return p;
}

bool CoeffExpr::is_zero() const {
    if (terms_.empty()) return true;
    // group by everything but the rational phase, then collapse phases
    std::map<Key, std::vector<std::pair<Rat, const RatFun2*>>> groups;
    for (auto& [k, v] : terms_) {
        Key base = k;
        base.phase = 0;
        groups[base].push_back({k.phase, &v});
    }
    for (auto& [base, items] : groups) {
        long q = 1;
        for (auto& [ph, v] : items) q = std::lcm(q, to_long(Int(ph.get_den())));
        long n = 2 * q; // phases are p/q in units of pi: 2q-th roots of unity
        std::vector<RatFun2> poly(n, RatFun2(Rat(0)));
        for (auto& [ph, v] : items) {
            long a = to_long(Rat(ph * q)); // exponent of zeta_{2q}
            poly[a] = poly[a] + *v;
        }
        auto phi = cyclotomic_poly(n);
        long dphi = (long)phi.size() - 1;
        for (long i = n - 1; i >= dphi; --i) {
            if (poly[i].is_zero()) continue;
            RatFun2 lead = poly[i];
            for (long j = 0; j <= dphi; ++j) poly[i - dphi + j] = poly[i - dphi + j] - lead * phi[j];
        }
        for (long i = 0; i < dphi; ++i)
            if (!poly[i].is_zero()) return false;
    }
    return true;
}

cplx CoeffExpr::eval(cplx u1, cplx u2, cplx z) const {
    const double pi = 3.14159265358979323846;
    cplx U1 = u1 / z, U2 = u2 / z;
    cplx s = 0;
    for (auto& [k, v] : terms_) {
        cplx t = v.eval(U1, U2);
        cplx phase = k.expi_lin.eval(U1, U2) + to_double(k.phase);
        t *= std::exp(cplx(0, pi) * phase);
        t *= std::pow(2 * pi, k.two_pi);
        for (auto& [g, e] : k.gammas) {
            cplx gv = cgamma(g.eval(u1, u2, z));
            t *= std::pow(gv, e);
        }
        s += t;
    }
    return s;
}

std::string CoeffExpr::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << v.str();
        if (k.two_pi) os << "*(2pi)^" << k.two_pi;
        if (!k.expi_lin.is_zero() || k.phase != 0)
            os << "*expi(" << to_string(AffForm{k.expi_lin, k.phase}) << ")";
        for (auto& [g, e] : k.gammas) {
            os << "*Gamma(" << to_string(g) << ")";
            if (e != 1) os << "^" << e;
        }
    }
    return os.str();
}

} // namespace remodel
