#include "remodel/zcheck.hpp"
#include <algorithm>

namespace remodel {

namespace {
const double PI = 3.14159265358979323846;

// Newton-continue t along x(t) = target from a seed
cplx solve_x(const CurveData& cd, cplx target, cplx seed) {
    cplx t = seed;
    for (int it = 0; it < 100; ++it) {
        cplx h = cd.curve.x.eval(t) - target;
        cplx dx = cd.curve.x.deriv().eval(t);
        if (std::abs(dx) < 1e-18) break;
        cplx step = h / dx;
        if (std::abs(step) > 0.3 * (1.0 + std::abs(t))) step *= 0.3 * (1.0 + std::abs(t)) / std::abs(step);
        t -= step;
        if (std::abs(h) < 1e-13 * (1.0 + std::abs(target)) && std::abs(step) < 1e-12) return t;
    }
    throw spectral_error("thimble: Newton continuation in x failed");
}

} // namespace

Thimble make_thimble(const CurveData& cd, int a, cplx z, double tail_T) {
    Thimble th;
    th.a = a;
    double xa = to_double(cd.xb[a]);
    double g0 = to_double(cd.g0[a]);
    double ta = to_double(cd.tb[a]);
    th.rho = 0.08;
    double send = tail_T * std::abs(z);
    cplx dir = z / std::abs(z); // steepest descent: x - x_a in e^{i arg z} R_+

    auto leg = [&](int sign) {
        std::vector<cplx> nodes;
        double s0 = std::abs(g0) * th.rho * th.rho;
        // initial point from the local model
        cplx dt0 = std::sqrt(s0 * dir / g0);
        cplx t = ta + double(sign) * dt0;
        t = solve_x(cd, xa + s0 * dir, t);
        nodes.push_back(t);
        double s = s0;
        double ds = s0 * 0.5;
        while (s < send) {
            double sn = std::min(s + ds, send * 1.0000001);
            cplx tn;
            try {
                tn = solve_x(cd, xa + sn * dir, t);
            } catch (const spectral_error&) {
                ds *= 0.5;
                if (ds < 1e-14) throw;
                continue;
            }
            if (std::abs(tn - t) > 0.25 * (1.0 + std::abs(t))) {
                ds *= 0.5;
                if (ds < 1e-14) throw spectral_error("thimble: step collapse");
                continue;
            }
            t = tn;
            s = sn;
            nodes.push_back(t);
            ds *= 1.5;
        }
        return nodes;
    };
    th.plus_leg = leg(+1);
    th.minus_leg = leg(-1);
    std::reverse(th.minus_leg.begin(), th.minus_leg.end());
    return th;
}

cplx laplace_form(const CurveData& cd, const Thimble& th, const std::function<cplx(cplx)>& f, cplx z) {
    cplx total = 0;
    auto piece = [&](cplx t0, cplx t1) {
        auto g = [&](double s) {
            cplx t = t0 + s * (t1 - t0);
            return std::exp(-cd.curve.x.eval(t) / z) * f(t) * (t1 - t0);
        };
        auto r = integrate_gk(g, 0.0, 1.0, 1e-12, 1e-10, 14);
        total += r.value;
    };
    // minus leg (ordered toward t_a), arc, plus leg
    for (size_t i = 0; i + 1 < th.minus_leg.size(); ++i) piece(th.minus_leg[i], th.minus_leg[i + 1]);
    // the arc: from the end of minus_leg to the start of plus_leg around t_a
    cplx ta = cplx(to_double(cd.tb[th.a]), 0);
    cplx e0 = th.minus_leg.back() - ta, e1 = th.plus_leg.front() - ta;
    double a0 = std::arg(e0), a1 = std::arg(e1);
    double r0 = std::abs(e0), r1 = std::abs(e1);
    while (a1 <= a0 - PI) a1 += 2 * PI;
    while (a1 > a0 + PI) a1 -= 2 * PI;
    {
        auto g = [&](double s) {
            double ang = a0 + s * (a1 - a0);
            double rr = r0 + s * (r1 - r0);
            cplx t = ta + std::polar(rr, ang);
            cplx dt = std::polar(rr, ang) * cplx(0, a1 - a0) + std::polar(1.0, ang) * (r1 - r0);
            return std::exp(-cd.curve.x.eval(t) / z) * f(t) * dt;
        };
        auto r = integrate_gk(g, 0.0, 1.0, 1e-12, 1e-10, 14);
        total += r.value;
    }
    for (size_t i = 0; i + 1 < th.plus_leg.size(); ++i) piece(th.plus_leg[i], th.plus_leg[i + 1]);
    return total;
}

cplx laplace_pp(const CurveData& cd, const Thimble& th, const PP& p, cplx z) {
    double tb = to_double(cd.tb[p.a]);
    return laplace_form(
        cd, th, [&](cplx t) { return std::pow(t - tb, -(double)p.k); }, z);
}

cplx zcheck_01(const CurveData& cd, const Thimble& th, cplx z) {
    auto xp = cd.curve.x.deriv();
    cplx val = laplace_form(
        cd, th, [&](cplx t) { return cd.curve.y.eval(t) * xp.eval(t); }, z);
    return cplx(0, 2 * PI) * val;
}

namespace {

cplx theta_transform(const CurveData& cd, const Thimble& th, int b, cplx z) {
    auto pp = theta_pp(cd, b, 0);
    cplx total = 0;
    for (auto& [k, c] : pp) total += c.eval() * laplace_pp(cd, th, PP{b, k}, z);
    return total;
}

} // namespace

cplx zcheck_02(const CurveData& cd, const Thimble& t1, const Thimble& t2, cplx z1, cplx z2) {
    cplx sum = 0;
    for (int b = 0; b < cd.nb; ++b)
        sum += theta_transform(cd, t1, b, z1) * theta_transform(cd, t2, b, z2);
    cplx tpi(0, 2 * PI);
    return -(z1 * z2 / (2.0 * (z1 + z2))) * tpi * tpi * sum;
}

cplx zcheck_02_quadrature(const CurveData& cd, const Thimble& t1, const Thimble& t2, cplx z1, cplx z2) {
    // nested quadrature of B over the two thimble polylines (cycles must be
    // geometrically separated by the caller's choice of z phases)
    auto nodes_of = [&](const Thimble& th) {
        std::vector<cplx> nodes = th.minus_leg;
        cplx ta = cplx(to_double(cd.tb[th.a]), 0);
        cplx e0 = th.minus_leg.back() - ta, e1 = th.plus_leg.front() - ta;
        double a0 = std::arg(e0), a1 = std::arg(e1);
        while (a1 <= a0 - PI) a1 += 2 * PI;
        while (a1 > a0 + PI) a1 -= 2 * PI;
        for (int k = 1; k < 8; ++k)
            nodes.push_back(ta + std::polar(std::abs(e0) + (std::abs(e1) - std::abs(e0)) * k / 8.0,
                                            a0 + (a1 - a0) * k / 8.0));
        nodes.insert(nodes.end(), th.plus_leg.begin(), th.plus_leg.end());
        return nodes;
    };
    auto n1 = nodes_of(t1);
    auto n2 = nodes_of(t2);
    cplx total = 0;
    for (size_t i = 0; i + 1 < n1.size(); ++i) {
        auto outer = [&](double s) -> cplx {
            cplx u = n1[i] + s * (n1[i + 1] - n1[i]);
            cplx du = n1[i + 1] - n1[i];
            cplx inner_total = 0;
            for (size_t j = 0; j + 1 < n2.size(); ++j) {
                auto inner = [&](double r) -> cplx {
                    cplx v = n2[j] + r * (n2[j + 1] - n2[j]);
                    cplx dv = n2[j + 1] - n2[j];
                    cplx B = 1.0 / ((u - v) * (u - v));
                    return std::exp(-cd.curve.x.eval(v) / z2) * B * dv;
                };
                inner_total += integrate_gk(inner, 0.0, 1.0, 1e-10, 1e-8, 10).value;
            }
            return std::exp(-cd.curve.x.eval(u) / z1) * inner_total * du;
        };
        total += integrate_gk(outer, 0.0, 1.0, 1e-9, 1e-7, 8).value;
    }
    cplx tpi(0, 2 * PI);
    return tpi * tpi * total;
}

cplx zcheck_stable(CurveData& cd, const std::vector<int>& cycles, long g, long n,
                   const std::vector<cplx>& z) {
    if ((long)cycles.size() != n || (long)z.size() != n)
        throw spectral_error("zcheck_stable: cycle/z slot count mismatch");
    for (auto& zz : z)
        if (zz.real() <= 0) throw spectral_error("zcheck_stable: chamber violation (Re z <= 0)");
    const OmegaTensor& w = omega(cd, g, n);
    // per-slot transforms of every needed profile
    std::map<std::pair<int, std::pair<int, long>>, cplx> cache; // (slot,(a,k)) -> value
    std::vector<Thimble> ths;
    for (long i = 0; i < n; ++i) ths.push_back(make_thimble(cd, cycles[i], z[i]));
    cplx total = 0;
    for (auto& [key, val] : w.T) {
        cplx term = to_double(val);
        for (long i = 0; i < n; ++i) {
            auto ck = std::make_pair((int)i, std::make_pair(key[i].a, key[i].k));
            auto it = cache.find(ck);
            if (it == cache.end()) it = cache.emplace(ck, laplace_pp(cd, ths[i], key[i], z[i])).first;
            term *= it->second;
        }
        total += term;
    }
    cplx tpi(0, 2 * PI);
    cplx pref = 1;
    for (long i = 0; i < n; ++i) pref *= tpi;
    return pref * total;
}

} // namespace remodel
