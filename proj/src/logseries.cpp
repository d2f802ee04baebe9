#include "remodel/logseries.hpp"
#include <sstream>

namespace remodel {

LogSeries LogSeries::one(int nvars, Rat order) {
    LogSeries s(nvars, order);
    QExp e;
    e.e.assign(nvars, Rat(0));
    s.terms[e][LogMask(nvars, 0)] = RatFun2(Rat(1));
    return s;
}

bool LogSeries::is_zero() const {
    for (auto& [e, ms] : terms)
        for (auto& [m, c] : ms)
            if (!c.is_zero()) return false;
    return true;
}

void LogSeries::add(const QExp& e, const LogMask& mask, const RatFun2& c) {
    if (c.is_zero() || e.total() > order) return;
    auto& slot = terms[e][mask];
    slot = slot + c;
}

void LogSeries::prune() {
    for (auto it = terms.begin(); it != terms.end();) {
        for (auto jt = it->second.begin(); jt != it->second.end();)
            jt = jt->second.is_zero() ? it->second.erase(jt) : std::next(jt);
        it = (it->second.empty() || it->first.total() > order) ? terms.erase(it) : std::next(it);
    }
}

LogSeries LogSeries::operator+(const LogSeries& o) const {
    if (nvars != o.nvars) throw series_error("series variable mismatch");
    for (int a = 0; a < nvars; ++a)
        if (!(shift[a] == o.shift[a])) throw series_error("series shift mismatch in addition");
    LogSeries r = *this;
    r.order = std::min(order, o.order);
    for (auto& [e, ms] : o.terms)
        for (auto& [m, c] : ms) r.add(e, m, c);
    r.prune();
    return r;
}

LogSeries LogSeries::operator-(const LogSeries& o) const { return *this + o.scale(Rat(-1)); }

LogSeries LogSeries::scale(const RatFun2& c) const {
    LogSeries r = *this;
    for (auto& [e, ms] : r.terms)
        for (auto& [m, v] : ms) v = v * c;
    r.prune();
    return r;
}

LogSeries LogSeries::scale(const Rat& c) const { return scale(RatFun2(c)); }

LogSeries LogSeries::mul_q(const std::vector<Rat>& delta) const {
    LogSeries r(nvars, order);
    r.shift = shift;
    Rat d = 0;
    for (auto& x : delta) d += x;
    r.order = order + d;
    for (auto& [e, ms] : terms) {
        QExp e2 = e;
        for (int a = 0; a < nvars; ++a) e2.e[a] += delta[a];
        for (auto& [m, c] : ms) r.terms[e2][m] = c;
    }
    return r;
}

// substitute (U1,U2) -> (-U1,-U2)
static RatFun2 flip_u(const RatFun2& c) {
    Poly2 num;
    for (auto& [ex, k] : c.num.c) num.c[ex] = (ex[0] + ex[1]) % 2 ? Rat(-k) : k;
    RatFun2 out(num);
    for (auto& [f, m] : c.den) {
        AffForm g{-f.lin, f.cst};
        for (int i = 0; i < m; ++i) out = out.div_aff(g);
    }
    return out;
}

LogSeries LogSeries::flip_z() const {
    LogSeries r(nvars, order);
    for (int a = 0; a < nvars; ++a) r.shift[a] = -shift[a];
    for (auto& [e, ms] : terms)
        for (auto& [m, c] : ms) r.terms[e][m] = flip_u(c);
    return r;
}

LogSeries LogSeries::theta(int a) const {
    LogSeries r(nvars, order);
    r.shift = shift;
    for (auto& [e, ms] : terms)
        for (auto& [m, c] : ms) {
            // multiplication by (e_a - shift_a)
            AffForm mult{-shift[a], e.e[a]};
            r.add(e, m, c * RatFun2::from_aff(mult));
            // product rule on log q_a
            if (m[a] > 0) {
                LogMask m2 = m;
                m2[a] -= 1;
                r.add(e, m2, c * Rat(m[a]));
            }
        }
    r.prune();
    return r;
}

cplx LogSeries::eval(cplx u1, cplx u2, cplx z, const std::vector<cplx>& q) const {
    if ((int)q.size() != nvars) throw series_error("eval: wrong number of q values");
    cplx U1 = u1 / z, U2 = u2 / z;
    cplx pref = 0;
    std::vector<cplx> logq(nvars);
    for (int a = 0; a < nvars; ++a) {
        logq[a] = std::log(q[a]);
        pref += -shift[a].eval(U1, U2) * logq[a];
    }
    cplx s = 0;
    for (auto& [e, ms] : terms) {
        cplx mono = 1;
        for (int a = 0; a < nvars; ++a) mono *= std::exp(to_double(e.e[a]) * logq[a]);
        for (auto& [m, c] : ms) {
            cplx t = c.eval(U1, U2) * mono;
            for (int a = 0; a < nvars; ++a)
                for (int k = 0; k < m[a]; ++k) t *= logq[a];
            s += t;
        }
    }
    return std::exp(pref) * s;
}

std::string LogSeries::str() const {
    std::ostringstream os;
    bool shift_nonzero = false;
    for (auto& f : shift) shift_nonzero |= !f.is_zero();
    if (shift_nonzero) {
        os << "prod_a q_a^{-(";
        for (int a = 0; a < nvars; ++a) os << (a ? "; " : "") << to_string(shift[a]);
        os << ")} * ";
    }
    os << "[";
    bool first = true;
    for (auto& [e, ms] : terms)
        for (auto& [m, c] : ms) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.str() << ")";
            for (int a = 0; a < nvars; ++a) {
                if (e.e[a] != 0) os << "*q" << a + 1 << "^" << rat_str(e.e[a]);
                if (m[a]) os << "*log(q" << a + 1 << ")";
            }
        }
    if (first) os << "0";
    os << "]  (order " << rat_str(order) << ")";
    return os.str();
}

std::map<long, RatFun2> laurent_in_invz(const RatFun2& c, long k_max) {
    // numerator: group by total degree (each U-monomial of degree d contributes z^{-d})
    std::map<long, RatFun2> num;
    for (auto& [e, k] : c.num.c) {
        Poly2 mono;
        mono.c[e] = k; // read as u1^e0 u2^e1 later
        long d = e[0] + e[1];
        auto it = num.find(d);
        if (it == num.end()) num[d] = RatFun2(mono);
        else it->second = it->second + RatFun2(mono);
    }
    // denominator factors: (alpha U1 + beta U2 + gamma) = gamma + L(u)/z
    // invert each factor as a series in 1/z and multiply
    std::map<long, RatFun2> acc = num;
    for (auto& [f, mult] : c.den) {
        for (int i = 0; i < mult; ++i) {
            std::map<long, RatFun2> inv; // series for 1/f with a z-offset
            Poly2 lin;
            if (f.lin.a != 0) lin.c[{1, 0}] = f.lin.a;
            if (f.lin.b != 0) lin.c[{0, 1}] = f.lin.b;
            long offset;
            if (f.cst != 0) {
                // 1/(g + L/z) = 1/g sum_k (-L/(g z))^k
                offset = 0;
                RatFun2 ginv(1 / f.cst);
                RatFun2 term = ginv;
                for (long k = 0; k <= k_max; ++k) {
                    inv[k] = term;
                    term = term * RatFun2(lin) * (-1 / f.cst);
                }
            } else {
                // 1/(L/z) = z / L
                offset = -1;
                RatFun2 linv(Rat(1));
                linv = linv.div_aff(AffForm{f.lin, Rat(0)}); // reuse RatFun2 in u-variables
                inv[-1] = linv;
            }
            (void)offset;
            std::map<long, RatFun2> next;
            for (auto& [d1, c1] : acc)
                for (auto& [d2, c2] : inv) {
                    if (d1 + d2 > k_max) continue;
                    auto it = next.find(d1 + d2);
                    if (it == next.end()) next[d1 + d2] = c1 * c2;
                    else it->second = it->second + c1 * c2;
                }
            acc = std::move(next);
        }
    }
    for (auto it = acc.begin(); it != acc.end();)
        it = it->second.is_zero() ? acc.erase(it) : std::next(it);
    return acc;
}

} // namespace remodel
