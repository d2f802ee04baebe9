#include "remodel/cyclo.hpp"
#include "remodel/coeffexpr.hpp" // cyclotomic_poly
#include <numeric>
#include <sstream>
#include <cmath>

namespace remodel {

long Cyclo::phi(long n) {
    long r = n;
    for (long p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            r -= r / p;
        }
    if (n > 1) r -= r / n;
    return r;
}

Cyclo::Cyclo(long n, Rat k) : n_(n), c_(phi(n), Rat(0)) {
    if (!c_.empty()) c_[0] = std::move(k);
    else c_.push_back(std::move(k)); // n = 1: phi(1) = 1 anyway
}

std::vector<Rat> Cyclo::reduce(std::vector<Rat> poly, long n) {
    auto Phi = cyclotomic_poly(n);
    long d = (long)Phi.size() - 1;
    for (long i = (long)poly.size() - 1; i >= d; --i) {
        if (poly[i] == 0) continue;
        Rat lead = poly[i];
        for (long j = 0; j <= d; ++j) poly[i - d + j] -= lead * Phi[j];
    }
    poly.resize(d);
    return poly;
}

Cyclo Cyclo::root(long n, long power) {
    power %= n;
    if (power < 0) power += n;
    long g = std::gcd(n, power == 0 ? n : power);
    // put the root in its minimal field to keep n small, then callers lift as needed
    long n2 = power == 0 ? 1 : n / g;
    long p2 = power == 0 ? 0 : power / g;
    Cyclo x(n2);
    std::vector<Rat> poly(p2 + 1, Rat(0));
    poly[p2] = 1;
    x.c_ = reduce(std::move(poly), n2);
    x.c_.resize(phi(n2), Rat(0));
    return x;
}

Cyclo Cyclo::lift(const Cyclo& x, long n) {
    if (x.n_ == n) return x;
    if (n % x.n_ != 0) throw std::domain_error("cyclotomic lift: order does not divide");
    long k = n / x.n_;
    Cyclo y(n);
    std::vector<Rat> poly;
    for (size_t i = 0; i < x.c_.size(); ++i) {
        size_t e = i * k;
        if (poly.size() <= e) poly.resize(e + 1, Rat(0));
        poly[e] += x.c_[i];
    }
    y.c_ = reduce(std::move(poly), n);
    y.c_.resize(phi(n), Rat(0));
    return y;
}

bool Cyclo::is_zero() const {
    for (auto& k : c_)
        if (k != 0) return false;
    return true;
}

bool Cyclo::is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

Rat Cyclo::rational_part() const {
    if (!is_rational()) throw std::domain_error("cyclotomic element is not rational: " + str());
    return c_.empty() ? Rat(0) : c_[0];
}

Cyclo Cyclo::operator+(const Cyclo& o) const {
    long n = std::lcm(n_, o.n_);
    Cyclo a = lift(*this, n), b = lift(o, n);
    for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
    return a;
}

Cyclo Cyclo::operator-(const Cyclo& o) const { return *this + o * Rat(-1); }

Cyclo Cyclo::operator*(const Rat& k) const {
    Cyclo r = *this;
    for (auto& x : r.c_) x *= k;
    return r;
}

Cyclo Cyclo::operator*(const Cyclo& o) const {
    long n = std::lcm(n_, o.n_);
    Cyclo a = lift(*this, n), b = lift(o, n);
    std::vector<Rat> poly(2 * a.c_.size(), Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0) continue;
        for (size_t j = 0; j < b.c_.size(); ++j) poly[i + j] += a.c_[i] * b.c_[j];
    }
    Cyclo r(n);
    r.c_ = reduce(std::move(poly), n);
    r.c_.resize(phi(n), Rat(0));
    return r;
}

Cyclo Cyclo::inverse() const {
    if (is_zero()) throw std::domain_error("cyclotomic division by zero");
    // extended Euclid in Q[x] against Phi_n
    auto Phi = cyclotomic_poly(n_);
    std::vector<Rat> a = c_;
    while (!a.empty() && a.back() == 0) a.pop_back();
    std::vector<Rat> r0 = Phi, r1 = a;
    std::vector<Rat> s0{}, s1{Rat(1)}; // coefficients of the input polynomial
    auto deg = [](const std::vector<Rat>& p) { return (long)p.size() - 1; };
    auto trim = [](std::vector<Rat>& p) {
        while (!p.empty() && p.back() == 0) p.pop_back();
    };
    while (deg(r1) > 0) {
        // divide r0 by r1
        std::vector<Rat> q(std::max<long>(deg(r0) - deg(r1) + 1, 0), Rat(0));
        std::vector<Rat> rem = r0;
        for (long i = (long)q.size() - 1; i >= 0; --i) {
            if ((long)rem.size() - 1 < deg(r1) + i) continue;
            Rat f = rem[deg(r1) + i] / r1.back();
            q[i] = f;
            if (f != 0)
                for (long j = 0; j <= deg(r1); ++j) rem[i + j] -= f * r1[j];
        }
        trim(rem);
        // s2 = s0 - q*s1
        std::vector<Rat> qs(q.size() + s1.size(), Rat(0));
        for (size_t i = 0; i < q.size(); ++i)
            for (size_t j = 0; j < s1.size(); ++j) qs[i + j] += q[i] * s1[j];
        std::vector<Rat> s2 = s0;
        if (s2.size() < qs.size()) s2.resize(qs.size(), Rat(0));
        for (size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
        trim(s2);
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
        if (r1.empty()) throw std::domain_error("cyclotomic inverse: zero divisor encountered");
    }
    // r1 is a nonzero constant: inverse = s1 / r1
    Cyclo out(n_);
    std::vector<Rat> poly = s1;
    for (auto& x : poly) x /= r1[0];
    out.c_ = reduce(std::move(poly), n_);
    out.c_.resize(phi(n_), Rat(0));
    return out;
}

cplx Cyclo::eval() const {
    const double pi = 3.14159265358979323846;
    cplx z = 0;
    for (size_t i = 0; i < c_.size(); ++i)
        z += to_double(c_[i]) * std::exp(cplx(0, 2 * pi * (double)i / (double)n_));
    return z;
}

std::string Cyclo::str() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < c_.size(); ++i) {
        if (i) os << ", ";
        os << rat_str(c_[i]);
    }
    os << ")_zeta" << n_;
    return os.str();
}

void CycloSeries::trim_lead() {
    while (!c.empty() && c.front().is_zero()) {
        c.erase(c.begin());
        ++lead;
    }
}

CycloSeries CycloSeries::operator+(const CycloSeries& o) const {
    CycloSeries r;
    r.lead = std::min(lead, o.lead);
    long top_exp = std::max(top(), o.top());
    r.c.assign(top_exp - r.lead + 1, Cyclo());
    for (size_t i = 0; i < c.size(); ++i) r.c[lead + i - r.lead] = r.c[lead + i - r.lead] + c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r.c[o.lead + i - r.lead] = r.c[o.lead + i - r.lead] + o.c[i];
    r.trim_lead();
    return r;
}

CycloSeries CycloSeries::operator*(const CycloSeries& o) const {
    CycloSeries r;
    r.lead = lead + o.lead;
    if (c.empty() || o.c.empty()) return r;
    r.c.assign(c.size() + o.c.size() - 1, Cyclo());
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i].is_zero()) continue;
        for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] = r.c[i + j] + c[i] * o.c[j];
    }
    return r;
}

CycloSeries CycloSeries::inverse(long terms) const {
    CycloSeries x = *this;
    x.trim_lead();
    if (x.c.empty()) throw std::domain_error("series inverse of zero");
    Cyclo linv = x.c[0].inverse();
    CycloSeries r;
    r.lead = -x.lead;
    r.c.assign(terms, Cyclo());
    r.c[0] = linv;
    for (long k = 1; k < terms; ++k) {
        // c[k] = -linv * sum_{j=1..k} x_j r_{k-j}
        Cyclo s;
        for (long j = 1; j <= k && j < (long)x.c.size(); ++j) s = s + x.c[j] * r.c[k - j];
        r.c[k] = (s * Rat(-1)) * linv;
    }
    return r;
}

void CycloSeries::truncate(long max_exp) {
    if (top() > max_exp) c.resize(std::max<long>(max_exp - lead + 1, 0));
}

} // namespace remodel
