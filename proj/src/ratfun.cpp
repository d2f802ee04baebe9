#include "remodel/ratfun.hpp"
#include <sstream>

namespace remodel {

PolyQ PolyQ::monomial(long deg, Rat k) {
    PolyQ p;
    if (k == 0) return p;
    p.c.assign(deg + 1, Rat(0));
    p.c[deg] = std::move(k);
    return p;
}

void PolyQ::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

PolyQ PolyQ::operator+(const PolyQ& o) const {
    PolyQ r = *this;
    if (r.c.size() < o.c.size()) r.c.resize(o.c.size(), Rat(0));
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
    r.trim();
    return r;
}

PolyQ PolyQ::operator-(const PolyQ& o) const { return *this + o * Rat(-1); }

PolyQ PolyQ::operator*(const PolyQ& o) const {
    PolyQ r;
    if (is_zero() || o.is_zero()) return r;
    r.c.assign(c.size() + o.c.size() - 1, Rat(0));
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    }
    r.trim();
    return r;
}

PolyQ PolyQ::operator*(const Rat& k) const {
    if (k == 0) return PolyQ();
    PolyQ r = *this;
    for (auto& x : r.c) x *= k;
    return r;
}

PolyQ PolyQ::deriv() const {
    PolyQ r;
    for (size_t i = 1; i < c.size(); ++i) r.c.push_back(c[i] * rat((long)i));
    r.trim();
    return r;
}

Rat PolyQ::eval(const Rat& x) const {
    Rat s = 0;
    for (size_t i = c.size(); i-- > 0;) s = s * x + c[i];
    return s;
}

cplx PolyQ::eval(cplx x) const {
    cplx s = 0;
    for (size_t i = c.size(); i-- > 0;) s = s * x + to_double(c[i]);
    return s;
}

PolyQ PolyQ::shift(const Rat& a) const {
    // Horner evaluated at (x + a)
    PolyQ xa = PolyQ::monomial(1, Rat(1)) + PolyQ(a);
    PolyQ out;
    for (size_t i = c.size(); i-- > 0;) out = out * xa + PolyQ(c[i]);
    return out;
}

std::string PolyQ::str() const {
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = c.size(); i-- > 0;) {
        if (c[i] == 0) continue;
        if (!first) os << " + ";
        os << rat_str(c[i]);
        if (i) os << "*t^" << i;
        first = false;
    }
    return os.str();
}

std::pair<PolyQ, PolyQ> poly_divmod(const PolyQ& a, const PolyQ& b) {
    if (b.is_zero()) throw std::domain_error("poly division by zero");
    PolyQ q, r = a;
    while (!r.is_zero() && r.deg() >= b.deg()) {
        long d = r.deg() - b.deg();
        Rat f = r.c.back() / b.c.back();
        PolyQ m = PolyQ::monomial(d, f);
        q = q + m;
        r = r - m * b;
    }
    return {q, r};
}

PolyQ poly_gcd(PolyQ a, PolyQ b) {
    a.trim();
    b.trim();
    while (!b.is_zero()) {
        auto [q, r] = poly_divmod(a, b);
        a = b;
        b = r;
    }
    if (!a.is_zero()) {
        Rat lead = a.c.back();
        for (auto& x : a.c) x /= lead;
    }
    return a;
}

std::map<Rat, long> rational_roots(PolyQ p, PolyQ* residual) {
    std::map<Rat, long> roots;
    p.trim();
    if (p.is_zero()) throw std::domain_error("rational_roots of zero polynomial");
    // strip powers of t
    while (!p.c.empty() && p.c.front() == 0) {
        roots[Rat(0)] += 1;
        p.c.erase(p.c.begin());
    }
    // clear denominators to integers
    Int lcm_den = 1;
    for (auto& x : p.c) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den_mpz_t());
    std::vector<Int> ic;
    for (auto& x : p.c) ic.push_back(Int(x.get_num()) * (lcm_den / Int(x.get_den())));
    // candidate roots p/q with p | ic[0], q | ic.back()
    auto divisors = [](Int n) {
        std::vector<Int> out;
        n = abs(n);
        if (n == 0) return out;
        for (Int d = 1; d * d <= n; ++d)
            if (n % d == 0) {
                out.push_back(d);
                out.push_back(n / d);
            }
        return out;
    };
    if (!p.is_zero() && p.deg() >= 1) {
        auto ps = divisors(ic.front());
        auto qs = divisors(ic.back());
        std::vector<Rat> cands;
        for (auto& pn : ps)
            for (auto& qd : qs) {
                Rat r1(pn, qd);
                r1.canonicalize();
                cands.push_back(r1);
                cands.push_back(-r1);
            }
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        for (auto& r0 : cands) {
            PolyQ lin = PolyQ::monomial(1, Rat(1)) + PolyQ(-r0);
            while (!p.is_zero() && p.deg() >= 1 && p.eval(r0) == 0) {
                roots[r0] += 1;
                auto dm = poly_divmod(p, lin);
                if (!dm.second.is_zero()) throw std::logic_error("root division left a remainder");
                p = dm.first;
            }
        }
    }
    if (residual) *residual = p;
    return roots;
}

RatFun1::RatFun1(PolyQ n, PolyQ d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
    PolyQ g = poly_gcd(num, den);
    if (!g.is_zero() && g.deg() >= 1) {
        num = poly_divmod(num, g).first;
        den = poly_divmod(den, g).first;
    }
    if (!den.is_zero() && !den.c.empty()) {
        Rat lead = den.c.back();
        for (auto& x : num.c) x /= lead;
        for (auto& x : den.c) x /= lead;
    }
}

RatFun1 RatFun1::operator+(const RatFun1& o) const { return RatFun1(num * o.den + o.num * den, den * o.den); }
RatFun1 RatFun1::operator-(const RatFun1& o) const { return RatFun1(num * o.den - o.num * den, den * o.den); }
RatFun1 RatFun1::operator*(const RatFun1& o) const { return RatFun1(num * o.num, den * o.den); }
RatFun1 RatFun1::operator/(const RatFun1& o) const {
    if (o.is_zero()) throw std::domain_error("rational function division by zero");
    return RatFun1(num * o.den, den * o.num);
}
RatFun1 RatFun1::deriv() const { return RatFun1(num.deriv() * den - num * den.deriv(), den * den); }
Rat RatFun1::eval(const Rat& x) const {
    Rat d = den.eval(x);
    if (d == 0) throw std::domain_error("rational function pole");
    return num.eval(x) / d;
}
cplx RatFun1::eval(cplx x) const { return num.eval(x) / den.eval(x); }

std::string RatFun1::str() const { return "(" + num.str() + ")/(" + den.str() + ")"; }

} // namespace remodel
