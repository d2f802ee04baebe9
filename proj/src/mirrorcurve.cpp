#include "remodel/mirrorcurve.hpp"
#include <algorithm>
#include <sstream>
#include <random>
#include <cstdlib>
#include <cstdio>

namespace remodel {

namespace {
const double PI = 3.14159265358979323846;
}

cplx MirrorCurve::H(cplx X, cplx Y) const { return Hmix(0, 0, X, Y); }
cplx MirrorCurve::HX(cplx X, cplx Y) const { return Hmix(1, 0, X, Y); }
cplx MirrorCurve::HY(cplx X, cplx Y) const { return Hmix(0, 1, X, Y); }

cplx MirrorCurve::Hmix(int dx, int dy, cplx X, cplx Y) const {
    cplx s = 0;
    for (size_t i = 0; i < expo.size(); ++i) {
        cplx t = coeff[i];
        for (int k = 0; k < dx; ++k) t *= (double)expo[i][0];
        for (int k = 0; k < dy; ++k) t *= (double)expo[i][1];
        if (t == cplx(0, 0)) continue;
        s += t * std::pow(X, (double)expo[i][0]) * std::pow(Y, (double)expo[i][1]);
    }
    return s;
}

double MirrorCurve::Hscale(cplx X, cplx Y) const {
    double s = 0;
    for (size_t i = 0; i < expo.size(); ++i)
        s += std::abs(coeff[i] * std::pow(X, (double)expo[i][0]) * std::pow(Y, (double)expo[i][1]));
    return std::max(s, 1e-30);
}

MirrorCurve build_curve(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                        const Flag& flag, const std::vector<cplx>& q) {
    (void)w;
    if ((long)q.size() != lat.p) throw curve_error("build_curve: wrong number of q values");
    MirrorCurve c;
    c.fan = &fan;
    c.flag = flag;
    c.q = q;
    int ci = cone_index(fan, flag.sigma);
    Vec2l origin = fan.point(flag.ordered[2]);
    Mat2l M;
    M.col(0) = flag.e1f;
    M.col(1) = flag.e2f;
    for (int i = 1; i <= fan.num_points(); ++i) {
        Vec2l d = fan.point(i) - origin;
        Vec2l e(M(1, 1) * d[0] - M(0, 1) * d[1], -M(1, 0) * d[0] + M(0, 0) * d[1]);
        c.expo.push_back(e);
        if (fan.has_ray(flag.sigma, i)) {
            c.coeff.push_back(1.0);
        } else {
            cplx a = 1.0;
            auto& col = lat.s_coeff[ci].at(i);
            for (long k = 0; k < lat.p; ++k) a *= std::pow(q[k], (double)col[k]);
            c.coeff.push_back(a);
        }
    }
    auto st = polytope_stats(fan);
    c.genus = st.interior;
    c.npunct = st.boundary;
    for (auto& x : q) c.q_small = c.q_small && std::abs(x) <= 1.5e-3;
    return c;
}

// monomial constants of the reparameterization into the chart of `flag`;
// built from the preferred cone's coefficient monomials a_i = a_i^{sigma_0}
static void chart_constants(const StackyFan3& fan, const DivisorLattice& lat, const Flag& flag,
                            const std::vector<cplx>& q, cplx& A, cplx& B) {
    int c0 = cone_index(fan, fan.preferred_sigma);
    auto aof = [&](int i) {
        if (fan.has_ray(fan.preferred_sigma, i)) return cplx(1.0);
        cplx a = 1.0;
        auto& col = lat.s_coeff[c0].at(i);
        for (long k = 0; k < lat.p; ++k) a *= std::pow(q[k], (double)col[k]);
        return a;
    };
    int i1 = flag.ordered[0], i2 = flag.ordered[1], i3 = flag.ordered[2];
    A = std::pow(aof(i1), 1.0 / flag.r) * std::pow(aof(i2), (double)flag.s / (flag.r * flag.m)) *
        std::pow(aof(i3), -((double)flag.m + flag.s) / (flag.r * flag.m));
    B = std::pow(aof(i2) / aof(i3), 1.0 / flag.m);
}

double reparameterization_residual(const StackyFan3& fan, const DivisorLattice& lat,
                                   const EquivWeights& w, const std::vector<cplx>& q,
                                   const Flag& f1, const Flag& f2, int samples) {
    auto c1 = build_curve(fan, lat, w, f1, q);
    auto c2 = build_curve(fan, lat, w, f2, q);
    cplx A, B;
    chart_constants(fan, lat, f2, q, A, B);
    int c0 = cone_index(fan, fan.preferred_sigma);
    auto a2 = [&](int i) {
        if (fan.has_ray(fan.preferred_sigma, i)) return cplx(1.0);
        cplx a = 1.0;
        auto& col = lat.s_coeff[c0].at(i);
        for (long k = 0; k < lat.p; ++k) a *= std::pow(q[k], (double)col[k]);
        return a;
    };
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    double worst = 0;
    int done = 0;
    for (int trial = 0; trial < 300 && done < samples; ++trial) {
        cplx Y(0.7 + U(rng), U(rng));
        cplx X(0.5 + U(rng), U(rng));
        bool okp = false;
        for (int it = 0; it < 80; ++it) {
            cplx h = c1.H(X, Y);
            cplx hx = c1.HX(X, Y);
            if (std::abs(hx) < 1e-14) break;
            X *= std::exp(-h / hx);
            if (std::abs(c1.H(X, Y)) < 1e-13) { okp = true; break; }
        }
        if (!okp || std::abs(X) < 1e-6) continue;
        ++done;
        cplx X2 = std::pow(X, (double)f2.a) * std::pow(Y, (double)f2.bb) * A;
        cplx Y2 = std::pow(X, (double)f2.c) * std::pow(Y, (double)f2.d) * B;
        int orig = f2.ordered[2];
        cplx mono = a2(orig) * std::pow(X, (double)fan.point(orig)[0]) *
                    std::pow(Y, (double)fan.point(orig)[1]);
        worst = std::max(worst, std::abs(c1.H(X, Y) - mono * c2.H(X2, Y2)));
    }
    if (done == 0) throw curve_error("reparameterization check: no curve points found");
    return worst;
}

// -------------------------------------------------------------------------
// critical points

RamificationSet critical_points(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                                const std::vector<cplx>& q, cplx u1, cplx u2) {
    if (u1 == cplx(0, 0)) throw curve_error("critical_points: u1 must be nonzero");
    RamificationSet out;
    auto f0 = preferred_flag(fan);
    auto global = build_curve(fan, lat, w, f0, q);

    for (auto& sigma : fan.cones) {
        Flag fl = flag_frame(fan, Cone2{sigma[1], sigma[2]}, sigma);
        int ci = cone_index(fan, fl.sigma);
        auto wf = flag_weights(fan, fl);
        cplx w1 = wf[0].eval(u1, u2), w2 = wf[1].eval(u1, u2), w3 = wf[2].eval(u1, u2);
        cplx u1f = (double)fl.d * u1 - (double)fl.c * u2;
        cplx u2f = -(double)fl.bb * u1 + (double)fl.a * u2;
        if (std::abs(w3) < 1e-12) throw curve_error("critical_points: degenerate direction (w3 = 0)");
        auto chart = build_curve(fan, lat, w, fl, q);

        cplx Ym = w2 / w3;
        cplx Xr_base = w1 / w3;
        for (long jm = 0; jm < fl.m; ++jm)
            for (long jr = 0; jr < fl.r; ++jr) {
                cplx Y = std::pow(Ym, 1.0 / (double)fl.m) *
                         std::exp(cplx(0, 2 * PI * (double)jm / (double)fl.m));
                cplx X = std::pow(Xr_base * std::pow(Y, (double)fl.s), 1.0 / (double)fl.r) *
                         std::exp(cplx(0, 2 * PI * (double)jr / (double)fl.r));
                cplx lX = std::log(X), lY = std::log(Y);
                bool fail = false;
                for (int step = 16; step >= 0 && !fail; --step) {
                    double scale = step == 16 ? 0.0 : std::pow(0.45, step - 0);
                    if (step == 16) scale = 0.0;
                    std::vector<cplx> qs(q.size());
                    for (size_t a = 0; a < q.size(); ++a) qs[a] = q[a] * scale;
                    auto cs = build_curve(fan, lat, w, fl, qs);
                    for (int it = 0;; ++it) {
                        cplx Xc = std::exp(lX), Yc = std::exp(lY);
                        cplx F1 = cs.H(Xc, Yc);
                        cplx F2 = u1f * cs.HY(Xc, Yc) - u2f * cs.HX(Xc, Yc);
                        double hsc = cs.Hscale(Xc, Yc);
                        if ((std::abs(F1) + std::abs(F2) / (std::abs(u1f) + std::abs(u2f))) < 1e-14 * hsc) break;
                        if (it > 100) { fail = true; break; }
                        cplx J11 = cs.HX(Xc, Yc), J12 = cs.HY(Xc, Yc);
                        cplx J21 = u1f * cs.Hmix(1, 1, Xc, Yc) - u2f * cs.Hmix(2, 0, Xc, Yc);
                        cplx J22 = u1f * cs.Hmix(0, 2, Xc, Yc) - u2f * cs.Hmix(1, 1, Xc, Yc);
                        cplx det = J11 * J22 - J12 * J21;
                        if (std::abs(det) < 1e-18) { fail = true; break; }
                        cplx d1 = (F1 * J22 - F2 * J12) / det;
                        cplx d2 = (J11 * F2 - J21 * F1) / det;
                        double damp = 1.0;
                        while ((std::abs(d1) + std::abs(d2)) * damp > 0.5) damp *= 0.5;
                        lX -= damp * d1;
                        lY -= damp * d2;
                    }
                }
                if (fail) throw curve_error("critical_points: Newton continuation failed");
                CriticalPoint cp;
                cplx Xf = std::exp(lX), Yf = std::exp(lY);
                cplx hx = chart.HX(Xf, Yf), hy = chart.HY(Xf, Yf);
                cplx rat_ = hy / hx;
                cplx dyr = (chart.Hmix(0, 2, Xf, Yf) - rat_ * chart.Hmix(1, 1, Xf, Yf)) / hx -
                           rat_ * (chart.Hmix(1, 1, Xf, Yf) - rat_ * chart.Hmix(2, 0, Xf, Yf)) / hx;
                // d^2 xhat / d y_f^2 = -u1f d(H_Y/H_X)/dy_f along the curve
                cplx d2xdy2 = u1f * dyr;
                cp.d2x_dyhat2 = u1f * u1f * d2xdy2;
                cplx A, B;
                chart_constants(fan, lat, fl, q, A, B);
                cplx Xg = std::pow(Xf / A, (double)fl.d) * std::pow(Yf / B, -(double)fl.bb);
                cplx Yg = std::pow(Xf / A, -(double)fl.c) * std::pow(Yf / B, (double)fl.a);
                cp.X = Xg;
                cp.Y = Yg;
                cplx c_sigma = 0;
                for (long a = 0; a < lat.p; ++a)
                    c_sigma += w.w_nef[ci][a].eval(u1, u2) * std::log(q[a]);
                cp.xhat = u1f * (-lX) + u2f * (-lY) + c_sigma;
                cp.sigma = sigma;
                cp.branch = (int)(jm * fl.r + jr);
                double r1 = std::abs(global.H(Xg, Yg));
                double r2 = std::abs(u2 * global.HX(Xg, Yg) - u1 * global.HY(Xg, Yg));
                double scale = 0;
                for (size_t i = 0; i < global.coeff.size(); ++i)
                    scale = std::max(scale, std::abs(global.coeff[i] *
                                                     std::pow(Xg, (double)global.expo[i][0]) *
                                                     std::pow(Yg, (double)global.expo[i][1])));
                out.max_residual =
                    std::max(out.max_residual,
                             std::max(r1, r2 / (std::abs(u1) + std::abs(u2))) / std::max(scale, 1e-30));
                out.points.push_back(cp);
            }
    }
    auto st = polytope_stats(fan);
    long expect = 2 * st.interior - 2 + st.boundary;
    if ((long)out.points.size() != expect)
        throw curve_error("critical point count mismatch: " + std::to_string(out.points.size()) +
                          " vs 2g-2+n = " + std::to_string(expect) +
                          " (max residual " + std::to_string(out.max_residual) + ")");
    for (size_t i = 0; i < out.points.size(); ++i)
        for (size_t j = i + 1; j < out.points.size(); ++j)
            if (std::abs(out.points[i].X - out.points[j].X) +
                    std::abs(out.points[i].Y - out.points[j].Y) < 1e-9)
                throw curve_error("critical points collide (non-generic parameters?)");
    return out;
}

// -------------------------------------------------------------------------
// chart cycles

namespace {

struct ChartDriver {
    const MirrorCurve& curve;
    CycleKind kind;
    long r, s, m;
    double chi1f, chi2f;

    cplx y(double t) const {
        if (kind == CycleKind::gamma) return cplx(-std::log(t) / m, PI / m + 2 * PI * chi2f);
        return cplx(0, -(PI - t) / m + 2 * PI * chi2f);
    }
    cplx dy(double t) const {
        if (kind == CycleKind::gamma) return cplx(-1.0 / (m * t), 0);
        return cplx(0, 1.0 / m);
    }
    cplx x0(double t) const { // q = 0 closed form, for anchoring
        cplx lg;
        if (kind == CycleKind::gamma) lg = cplx(std::log(1.0 - t), -PI);
        else lg = cplx(std::log(2 * std::sin(t / 2)), -(t + PI) / 2);
        // the deck shift acts on x by exactly 2 pi chi1f; strip the chi2f part
        // that the shifted y-driver would otherwise feed through s*y/r
        cplx y_e = y(t) - cplx(0, 2 * PI * chi2f);
        return (-lg + (double)s * y_e) / (double)r + cplx(0, 2 * PI * chi1f);
    }
    cplx solve(double t, cplx xseed) const {
        cplx Y = std::exp(-y(t));
        cplx x = xseed;
        for (int it = 0; it < 100; ++it) {
            cplx X = std::exp(-x);
            cplx h = curve.H(X, Y);
            cplx hx = curve.HX(X, Y);
            if (std::abs(hx) < 1e-16 * curve.Hscale(X, Y))
                throw curve_error("chart cycle: H_X vanished on the path");
            cplx step = h / hx;
            if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
            x += step;
            if (std::abs(h) < 1e-12 * curve.Hscale(X, Y) && std::abs(step) < 1e-11) return x;
        }
        throw curve_error("chart cycle: Newton did not converge at t=" + std::to_string(t));
    }
};

} // namespace

ChartCycle chart_cycle(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                       const std::vector<cplx>& q, const Flag& flag, std::pair<Rat, Rat> chi,
                       CycleKind kind, cplx u1, cplx u2, cplx z, double tail_T,
                       double trim_begin, double trim_end) {
    ChartCycle cyc;
    cyc.kind = kind;
    cyc.flag = flag;
    cyc.chi = chi;
    auto curve = build_curve(fan, lat, w, flag, q);
    int ci = cone_index(fan, flag.sigma);

    auto wf = flag_weights(fan, flag);
    cplx w1 = wf[0].eval(u1, u2), w2 = wf[1].eval(u1, u2);
    if (kind == CycleKind::gamma) {
        if (trim_end == 0 && w1.real() <= 0)
            throw curve_error("chamber violated at the X->0 end (Re w1 <= 0)");
        if (trim_begin == 0 && w2.real() <= 0)
            throw curve_error("chamber violated at the Y->0 end (Re w2 <= 0)");
    } else {
        if ((trim_begin == 0 || trim_end == 0) && w1.real() <= 0)
            throw curve_error("chamber violated: Re w1 <= 0 for the curve cycle");
    }

    cplx u1f = (double)flag.d * u1 - (double)flag.c * u2;
    cplx u2f = -(double)flag.bb * u1 + (double)flag.a * u2;
    cyc.c_sigma = 0;
    for (long a = 0; a < lat.p; ++a) cyc.c_sigma += w.w_nef[ci][a].eval(u1, u2) * std::log(q[a]);

    Rat chi1f = chi.first * rat(flag.a) + chi.second * rat(flag.bb);
    Rat chi2f = chi.first * rat(flag.c) + chi.second * rat(flag.d);
    ChartDriver drv{curve, kind, flag.r, flag.s, flag.m, to_double(chi1f), to_double(chi2f)};

    double t_anchor = kind == CycleKind::gamma ? 0.5 : PI;
    cplx x = drv.x0(t_anchor);
    {
        auto c0 = build_curve(fan, lat, w, flag, std::vector<cplx>(q.size(), cplx(0, 0)));
        ChartDriver d0{c0, kind, flag.r, flag.s, flag.m, drv.chi1f, drv.chi2f};
        cplx x_check = d0.solve(t_anchor, x);
        if (std::abs(x_check - x) > 1e-8)
            throw curve_error("chart cycle: q=0 anchor drifted from the model branch");
        x = x_check;
        for (int step = 8; step >= 0; --step) {
            std::vector<cplx> qs(q.size());
            for (size_t a = 0; a < q.size(); ++a) qs[a] = q[a] * std::pow(0.4, step);
            auto cs = build_curve(fan, lat, w, flag, qs);
            ChartDriver ds{cs, kind, flag.r, flag.s, flag.m, drv.chi1f, drv.chi2f};
            x = ds.solve(t_anchor, x);
        }
    }

    auto xhat_of = [&](double t, cplx xv) { return u1f * xv + u2f * drv.y(t); };
    double re_min = (xhat_of(t_anchor, x)).real();
    double cutoff = tail_T * z.real();

    // phase A: t-walk from the anchor; phase B: x-driven ray once X collapses
    // (the X->0 punctures are ill-conditioned in t). dir = +1 walks toward the
    // X->0 tube; dir = -1 toward the other end (Y->0 for gamma, X->0 for gamma').
    auto walk = [&](int dir, double trim) {
        std::vector<PathNode> nodes;
        double t = t_anchor;
        cplx xv = x;
        double lo = 1e-14, hi = kind == CycleKind::gamma ? 1.0 - 1e-14 : 2 * PI - 1e-12;
        double dt = 0.02;
        bool to_xtube = dir > 0 || kind == CycleKind::gamma_prime;
        bool want_ray = false;
        for (int guard = 0; guard < 40000; ++guard) {
            double room = dir > 0 ? (kind == CycleKind::gamma ? 1.0 - t : hi - t)
                                  : (kind == CycleKind::gamma ? t : t - lo);
            double tn = t + dir * dt * std::min(room, 1.0);
            tn = std::clamp(tn, lo, hi);
            if (tn == t) break;
            cplx xn;
            try {
                xn = drv.solve(tn, xv);
            } catch (const curve_error&) {
                dt *= 0.5;
                if (dt < 1e-10) throw;
                continue;
            }
            if (std::abs(xn - xv) > 0.3) {
                dt *= 0.5;
                if (dt < 1e-10)
                    throw curve_error("chart cycle: branch tracking failed at t=" + std::to_string(t));
                continue;
            }
            t = tn;
            xv = xn;
            nodes.push_back(PathNode{t, std::exp(-xv), std::exp(-drv.y(t)), xv, drv.y(t)});
            if (dt < 0.06) dt *= 1.4;
            double re = (xhat_of(t, xv)).real();
            re_min = std::min(re_min, re);
            if (trim > 0) {
                double tube_coord = to_xtube ? xv.real() : drv.y(t).real();
                if (tube_coord >= trim) break;
            } else if (re - re_min > cutoff) {
                break;
            }
            if (to_xtube && std::exp(-xv.real()) < 0.05) { want_ray = true; break; }
            if (t <= lo || t >= hi) break;
        }
        return std::pair<std::vector<PathNode>, bool>{nodes, want_ray};
    };

    // x-driven continuation from the last t-walk node into the X->0 puncture
    auto ray_extend = [&](const PathNode& start, double trim) {
        std::vector<PathNode> nodes;
        cplx xv = start.x;
        cplx yv = start.y;
        double step = 0.15;
        for (int guard = 0; guard < 4000; ++guard) {
            cplx xn = xv + step;
            cplx yn = yv;
            bool ok = false;
            for (int it = 0; it < 100; ++it) {
                cplx X = std::exp(-xn), Y = std::exp(-yn);
                cplx h = curve.H(X, Y);
                cplx hy = curve.HY(X, Y);
                if (std::abs(hy) < 1e-16 * curve.Hscale(X, Y)) break;
                cplx d = h / hy;
                if (std::abs(d) > 0.4) d *= 0.4 / std::abs(d);
                yn += d;
                if (std::abs(h) < 1e-12 * curve.Hscale(X, Y) && std::abs(d) < 1e-11) { ok = true; break; }
            }
            if (!ok || std::abs(yn - yv) > 0.3) {
                step *= 0.5;
                if (step < 1e-8) throw curve_error("chart cycle: ray extension failed");
                continue;
            }
            xv = xn;
            yv = yn;
            nodes.push_back(PathNode{0, std::exp(-xv), std::exp(-yv), xv, yv});
            step = std::min(step * 1.3, 1.0);
            double re = (u1f * xv + u2f * yv).real();
            re_min = std::min(re_min, re);
            if (trim > 0 && xv.real() >= trim) break;
            if (trim == 0 && re - re_min > cutoff) break;
        }
        return nodes;
    };

    auto [down, down_ray] = walk(-1, trim_begin);
    auto [up, up_ray] = walk(+1, trim_end);

    std::vector<PathNode> pre_ray, post_ray;
    if (down_ray && !down.empty()) pre_ray = ray_extend(down.back(), trim_begin);
    if (up_ray && !up.empty()) post_ray = ray_extend(up.back(), trim_end);

    // assemble in path order: [reversed pre_ray] [reversed down] anchor [up] [post_ray]
    std::reverse(pre_ray.begin(), pre_ray.end());
    std::reverse(down.begin(), down.end());
    cyc.seg_begin_ray = (long)pre_ray.size();
    cyc.nodes = std::move(pre_ray);
    cyc.nodes.insert(cyc.nodes.end(), down.begin(), down.end());
    cyc.nodes.push_back(PathNode{t_anchor, std::exp(-x), std::exp(-drv.y(t_anchor)), x, drv.y(t_anchor)});
    cyc.nodes.insert(cyc.nodes.end(), up.begin(), up.end());
    cyc.seg_end_ray = (long)post_ray.size();
    cyc.nodes.insert(cyc.nodes.end(), post_ray.begin(), post_ray.end());
    if (cyc.nodes.size() < 8) throw curve_error("chart cycle: too few nodes");
    auto re_first = (u1f * cyc.nodes.front().x + u2f * cyc.nodes.front().y).real();
    auto re_last = (u1f * cyc.nodes.back().x + u2f * cyc.nodes.back().y).real();
    cyc.re_growth_begin = re_first - re_min;
    cyc.re_growth_end = re_last - re_min;
    return cyc;
}

// shared integrand machinery: integrates one chart piece in global normalization.
// deck = 2 pi i (k1, k2) branch correction applied to the global (x, y).
static IntegralResult integrate_chart_piece(const StackyFan3& fan, const DivisorLattice& lat,
                                            const EquivWeights& w, const std::vector<cplx>& q,
                                            const ChartCycle& cyc, cplx u1, cplx u2, cplx z,
                                            cplx deck1 = 0, cplx deck2 = 0) {
    const Flag& flag = cyc.flag;
    auto curve = build_curve(fan, lat, w, flag, q);
    cplx u1f = (double)flag.d * u1 - (double)flag.c * u2;
    cplx u2f = -(double)flag.bb * u1 + (double)flag.a * u2;
    Rat chi1f = cyc.chi.first * rat(flag.a) + cyc.chi.second * rat(flag.bb);
    Rat chi2f = cyc.chi.first * rat(flag.c) + cyc.chi.second * rat(flag.d);
    ChartDriver drv{curve, cyc.kind, flag.r, flag.s, flag.m, to_double(chi1f), to_double(chi2f)};
    cplx A, B;
    chart_constants(fan, lat, flag, q, A, B);
    cplx LA = std::log(A), LB = std::log(B);

    auto to_global = [&](cplx xv, cplx yv) {
        cplx xg = (double)flag.d * (xv + LA) - (double)flag.bb * (yv + LB) + deck1;
        cplx yg = -(double)flag.c * (xv + LA) + (double)flag.a * (yv + LB) + deck2;
        return std::pair<cplx, cplx>{xg, yg};
    };

    IntegralResult out;
    long n = (long)cyc.nodes.size();
    for (long i = 0; i + 1 < n; ++i) {
        const PathNode& a = cyc.nodes[i];
        const PathNode& b = cyc.nodes[i + 1];
        // intervals touching the x-driven tails integrate along straight x
        bool ray = (i < cyc.seg_begin_ray) || (i + 1 >= n - cyc.seg_end_ray);
        auto f_t = [&](double t) -> cplx {
            double lam = (t - a.t) / (b.t - a.t);
            cplx xv = drv.solve(t, a.x + lam * (b.x - a.x));
            cplx yv = drv.y(t);
            cplx X = std::exp(-xv), Y = std::exp(-yv);
            cplx hx = curve.HX(X, Y), hy = curve.HY(X, Y);
            cplx dxhat = (-u1f * (hy / hx) + u2f) * drv.dy(t);
            auto [xg, yg] = to_global(xv, yv);
            cplx xhat = u1 * xg + u2 * yg;
            return std::exp(-xhat / z) * (yg / u1) * dxhat;
        };
        auto f_ray = [&](double s) -> cplx {
            cplx xv = a.x + s * (b.x - a.x);
            cplx yv = a.y + s * (b.y - a.y); // seed
            for (int it = 0; it < 100; ++it) {
                cplx X = std::exp(-xv), Y = std::exp(-yv);
                cplx h = curve.H(X, Y);
                cplx hy = curve.HY(X, Y);
                cplx d = h / hy;
                if (std::abs(d) > 0.4) d *= 0.4 / std::abs(d);
                yv += d;
                if (std::abs(h) < 1e-12 * curve.Hscale(X, Y) && std::abs(d) < 1e-11) break;
            }
            cplx X = std::exp(-xv), Y = std::exp(-yv);
            cplx hx = curve.HX(X, Y), hy = curve.HY(X, Y);
            cplx dxhat = (u1f - u2f * (hx / hy)) * (b.x - a.x);
            auto [xg, yg] = to_global(xv, yv);
            cplx xhat = u1 * xg + u2 * yg;
            return std::exp(-xhat / z) * (yg / u1) * dxhat;
        };
        QuadResult r;
        if (ray) r = integrate_gk(f_ray, 0.0, 1.0, 1e-13, 1e-11, 14);
        else r = integrate_gk(f_t, a.t, b.t, 1e-13, 1e-11, 16);
        out.value += r.value;
        out.abs_error += r.abs_error;
    }
    double re_min = 1e300;
    for (auto& nd : cyc.nodes) re_min = std::min(re_min, (u1f * nd.x + u2f * nd.y).real());
    auto endbound = [&](const PathNode& nd) {
        double re = (u1f * nd.x + u2f * nd.y).real();
        return std::exp(-(re - re_min) / z.real());
    };
    out.tail_bound = endbound(cyc.nodes.front()) + endbound(cyc.nodes.back());
    return out;
}

IntegralResult oscillatory_integral(const StackyFan3& fan, const DivisorLattice& lat,
                                    const EquivWeights& w, const std::vector<cplx>& q,
                                    const ChartCycle& cyc, cplx u1, cplx u2, cplx z) {
    return integrate_chart_piece(fan, lat, w, q, cyc, u1, u2, z);
}

std::string cycle_json(const ChartCycle& c) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        auto& n = c.nodes[i];
        if (i) os << ",";
        os << "{\"t\":" << n.t << ",\"X_re\":" << n.X.real() << ",\"X_im\":" << n.X.imag()
           << ",\"Y_re\":" << n.Y.real() << ",\"Y_im\":" << n.Y.imag()
           << ",\"x_im_branch\":" << n.x.imag() << ",\"y_im_branch\":" << n.y.imag() << "}";
    }
    os << "]";
    return os.str();
}

CentralChargeSeries chart_integral_series(const StackyFan3& fan, const DivisorLattice& lat,
                                          const EquivWeights& w, const Flag& flag,
                                          std::pair<Rat, Rat> chi, CycleKind kind, long order) {
    CentralChargeSeries out;
    int ci = cone_index(fan, flag.sigma);
    auto box = box_elements(fan, flag.sigma);
    long gsz = (long)box.size();
    int i1 = flag.ordered[0], i2 = flag.ordered[1], i3 = flag.ordered[2];
    for (size_t kb = 0; kb < box.size(); ++kb) {
        const BoxElement& v = box[kb];
        AffForm a1{w.w(ci, i1), v.c(i1)};
        AffForm a2{w.w(ci, i2), v.c(i2)};
        AffForm a3{w.w(ci, i3), v.c(i3)};
        Rat chiv = chi.first * Rat(v.v[0]) + chi.second * Rat(v.v[1]);
        CoeffExpr deck = CoeffExpr::exp_pi(AffForm{LinForm{chi.first * -2, chi.second * -2}, chiv * -2});
        Rat sign = rfrac(v.age / 2) == 0 ? Rat(1) : Rat(-1);
        CoeffExpr coeff;
        if (kind == CycleKind::gamma) {
            coeff = deck * Rat(-1) * CoeffExpr::exp_pi(a3) * CoeffExpr::gamma(a1) * CoeffExpr::gamma(a2) *
                    CoeffExpr::gamma(AffForm{-a3.lin, 1 - a3.cst}, -1) * (sign / gsz);
        } else {
            coeff = deck * CoeffExpr::two_pi_i(1) * CoeffExpr::exp_pi(a2 + a3) * CoeffExpr::gamma(a1) *
                    CoeffExpr::gamma(AffForm{-a2.lin, 1 - a2.cst}, -1) *
                    CoeffExpr::gamma(AffForm{-a3.lin, 1 - a3.cst}, -1) * (sign / gsz);
        }
        if (coeff.is_zero()) continue;
        out.comps[SVKey{ci, (int)kb}] = {coeff, i_component(fan, lat, w, flag.sigma, v, order)};
    }
    return out;
}

PatchedCycle mirror_cycle(const StackyFan3& fan, const EquivWeights& w, const SupportClassification& cl,
                          const KClass& generator) {
    if (generator.word.size() != 1) throw curve_error("mirror_cycle: single generator words only");
    const GenWord& g = generator.word[0];
    PatchedCycle pc;
    auto chi_of = [&](const Cone3& sigma) {
        int k = cone_index(fan, sigma);
        LinForm f;
        for (size_t s = 0; s < g.twist.size(); ++s)
            if (g.twist[s] != 0) f = f + w.w(k, (int)s + 1) * rat(g.twist[s]);
        return std::pair<Rat, Rat>{f.a, f.b};
    };
    if (g.I.size() == 1) {
        pc.kind = CycleKind::gamma;
        int j = g.I[0];
        std::vector<int> adj;
        for (auto& [tau, parents] : two_cones(fan))
            if (tau[0] == j || tau[1] == j) adj.push_back(tau[0] == j ? tau[1] : tau[0]);
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        Vec2l pj = fan.point(j);
        std::sort(adj.begin(), adj.end(), [&](int a, int b) {
            Vec2l da = fan.point(a) - pj, db = fan.point(b) - pj;
            auto half = [](const Vec2l& v) { return v[1] > 0 || (v[1] == 0 && v[0] > 0) ? 0 : 1; };
            if (half(da) != half(db)) return half(da) < half(db);
            return det2(da, db) > 0;
        });
        int l = (int)adj.size();
        bool interior = cl.in(Support::compact, ConeKey{j});
        int m = interior ? l : l - 1;
        // rotate the chain so consecutive pairs are cones (exterior case)
        if (!interior) {
            int start = -1;
            for (int o = 0; o < l && start < 0; ++o) {
                bool all = true;
                for (int i = 0; i < m; ++i) {
                    Cone3 sigma{j, adj[(o + i) % l], adj[(o + i + 1) % l]};
                    try {
                        cone_index(fan, sigma);
                    } catch (...) {
                        all = false;
                    }
                }
                if (all) start = o;
            }
            if (start < 0) throw curve_error("mirror_cycle: divisor star is not a chain of cones");
            std::rotate(adj.begin(), adj.begin() + start, adj.end());
        }
        for (int i = 0; i < m; ++i) {
            int ki = adj[i], kn = adj[(i + 1) % l];
            Cone3 sigma{j, ki, kn};
            (void)cone_index(fan, sigma);
            Flag f = flag_frame(fan, Cone2{kn, j}, sigma);
            if (f.ordered != std::array<int, 3>{ki, kn, j})
                throw curve_error("mirror_cycle: flag orientation mismatch in the divisor star");
            pc.charts.push_back({f, chi_of(sigma)});
        }
        pc.closed = interior;
        int seams = pc.closed ? (int)pc.charts.size() : (int)pc.charts.size() - 1;
        for (int i = 0; i < seams; ++i) {
            auto& c1 = pc.charts[i];
            auto& c2 = pc.charts[(i + 1) % pc.charts.size()];
            int kn = adj[(i + 1) % l];
            Vec3l d = fan.b(kn) - fan.b(j);
            Rat p1 = c1.second.first * Rat(d[0]) + c1.second.second * Rat(d[1]);
            Rat p2 = c2.second.first * Rat(d[0]) + c2.second.second * Rat(d[1]);
            if (p1 != p2) throw curve_error("mirror_cycle: twisted polytope condition violated");
        }
    } else if (g.I.size() == 2) {
        pc.kind = CycleKind::gamma_prime;
        Cone2 tau{g.I[0], g.I[1]};
        std::vector<Cone3> parents;
        for (auto& [t2, ps] : two_cones(fan))
            if ((t2[0] == tau[0] && t2[1] == tau[1]) || (t2[0] == tau[1] && t2[1] == tau[0])) parents = ps;
        if (parents.empty()) throw curve_error("mirror_cycle: 2-cone not found");
        for (auto& sigma : parents) pc.charts.push_back({flag_frame(fan, tau, sigma), chi_of(sigma)});
        pc.closed = parents.size() == 2;
        if (pc.closed) {
            Vec3l d = fan.b(tau[0]) - fan.b(tau[1]);
            Rat p1 = pc.charts[0].second.first * Rat(d[0]) + pc.charts[0].second.second * Rat(d[1]);
            Rat p2 = pc.charts[1].second.first * Rat(d[0]) + pc.charts[1].second.second * Rat(d[1]);
            if (p1 != p2) throw curve_error("mirror_cycle: twisted polytope condition violated (curve)");
        }
    } else {
        throw curve_error("mirror_cycle: generator must be a divisor or curve class");
    }
    return pc;
}

// ---------------------------------------------------------------------------
// glued integration

namespace {

// global coordinates of a chart node (before deck correction)
struct GlobalMap {
    Flag flag;
    cplx LA, LB;
    std::pair<cplx, cplx> operator()(const PathNode& n) const {
        cplx xg = (double)flag.d * (n.x + LA) - (double)flag.bb * (n.y + LB);
        cplx yg = -(double)flag.c * (n.x + LA) + (double)flag.a * (n.y + LB);
        return {xg, yg};
    }
};

// connect two points on the global curve by a straight path in the driven
// coordinate (the one that actually moves along the tube); returns the
// integral piece and the tracked free coordinate at the end
struct SeamResult {
    cplx integral;
    cplx x_end, y_end;
    double abs_error = 0;
    bool ok = true;
};

SeamResult seam_integral(const MirrorCurve& global, cplx xa, cplx ya, cplx xb, cplx yb_hint,
                         cplx u1, cplx u2, cplx z) {
    bool drive_x = std::abs(xb - xa) >= std::abs(yb_hint - ya);
    cplx da = drive_x ? xa : ya;
    cplx db = drive_x ? xb : yb_hint;
    auto solve_free = [&](cplx driven, cplx free_seed, bool& ok) {
        cplx v = free_seed;
        ok = false;
        for (int it = 0; it < 120; ++it) {
            cplx X = std::exp(-(drive_x ? driven : v));
            cplx Y = std::exp(-(drive_x ? v : driven));
            cplx h = global.H(X, Y);
            cplx dh = drive_x ? global.HY(X, Y) : global.HX(X, Y);
            if (std::abs(dh) < 1e-16 * global.Hscale(X, Y)) return v;
            cplx step = h / dh;
            if (std::abs(step) > 0.4) step *= 0.4 / std::abs(step);
            v += step;
            if (std::abs(h) < 1e-12 * global.Hscale(X, Y) && std::abs(step) < 1e-11) { ok = true; return v; }
        }
        return v;
    };
    SeamResult out;
    int steps = 48;
    std::vector<cplx> free;
    for (; steps <= 3100; steps *= 4) {
        free.assign(steps + 1, cplx(0, 0));
        free[0] = drive_x ? ya : xa;
        bool tracked = true;
        for (int k = 1; k <= steps; ++k) {
            cplx dk = da + (double)k / steps * (db - da);
            bool ok = false;
            cplx v = solve_free(dk, free[k - 1], ok);
            if (!ok || std::abs(v - free[k - 1]) > 0.5) {
                tracked = false;
                break;
            }
            free[k] = v;
        }
        if (tracked) break;
        if (steps * 4 > 3100) {
            out.ok = false;
            return out;
        }
    }
    auto f = [&](double s) -> cplx {
        cplx dk = da + s * (db - da);
        int k0 = std::clamp((int)(s * steps), 0, steps - 1);
        bool ok = false;
        cplx v = solve_free(dk, free[k0], ok);
        cplx xv = drive_x ? dk : v;
        cplx yv = drive_x ? v : dk;
        cplx X = std::exp(-xv), Y = std::exp(-yv);
        cplx hx = global.HX(X, Y), hy = global.HY(X, Y);
        cplx dxhat;
        if (drive_x) dxhat = (u1 - u2 * (hx / hy)) * (db - da);
        else dxhat = (-u1 * (hy / hx) + u2) * (db - da);
        cplx xhat = u1 * xv + u2 * yv;
        return std::exp(-xhat / z) * (yv / u1) * dxhat;
    };
    auto r = integrate_gk(f, 0.0, 1.0, 1e-13, 1e-11, 14);
    out.integral = r.value;
    out.abs_error = r.abs_error;
    out.x_end = drive_x ? db : free[steps];
    out.y_end = drive_x ? free[steps] : db;
    return out;
}

} // namespace

IntegralResult patched_integral(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                                const std::vector<cplx>& q, const PatchedCycle& pc, cplx u1, cplx u2,
                                cplx z) {
    double gate = 0;
    for (auto& qa : q) gate = std::max(gate, std::abs(std::log(std::abs(qa))) / 5.0);

    if (pc.charts.size() == 1 && !pc.closed) {
        auto cyc = chart_cycle(fan, lat, w, q, pc.charts[0].first, pc.charts[0].second, pc.kind, u1, u2, z);
        return integrate_chart_piece(fan, lat, w, q, cyc, u1, u2, z);
    }

    auto f0 = preferred_flag(fan);
    auto global = build_curve(fan, lat, w, f0, q);

    // build all chart pieces with tube trims on the glued ends
    std::vector<ChartCycle> pieces;
    int nch = (int)pc.charts.size();
    for (int i = 0; i < nch; ++i) {
        double trim_begin = gate, trim_end = gate;
        if (!pc.closed && pc.kind == CycleKind::gamma) {
            if (i == 0) trim_begin = 0;            // open outer end
            if (i == nch - 1) trim_end = 0;        // open outer end
        }
        pieces.push_back(chart_cycle(fan, lat, w, q, pc.charts[i].first, pc.charts[i].second, pc.kind,
                                     u1, u2, z, 40.0, trim_begin, trim_end));
    }

    IntegralResult out;
    std::vector<std::pair<cplx, cplx>> deck(nch, {cplx(0, 0), cplx(0, 0)});
    std::vector<GlobalMap> maps;
    for (int i = 0; i < nch; ++i) {
        cplx A, B;
        chart_constants(fan, lat, pieces[i].flag, q, A, B);
        maps.push_back(GlobalMap{pieces[i].flag, std::log(A), std::log(B)});
    }

    // residual gap between a tracked endpoint and a target modulo the deck lattice;
    // returns the snapped deck shift or fails
    auto snap = [&](cplx gx, cplx gy, cplx tx, cplx ty, cplx& d1, cplx& d2) {
        cplx ex = gx - tx, ey = gy - ty;
        double k1 = ex.imag() / (2 * PI), k2 = ey.imag() / (2 * PI);
        if (std::abs(ex.real()) > 2e-5 || std::abs(ey.real()) > 2e-5) return false;
        if (std::abs(k1 - std::round(k1)) > 2e-5 || std::abs(k2 - std::round(k2)) > 2e-5) return false;
        d1 = cplx(0, 2 * PI * std::round(k1));
        d2 = cplx(0, 2 * PI * std::round(k2));
        return true;
    };

    if (pc.kind == CycleKind::gamma) {
        // chain: piece i's end (t->1) connects to piece i+1's begin (t->0)
        int seams = pc.closed ? nch : nch - 1;
        for (int i = 0; i < seams; ++i) {
            int j = (i + 1) % nch;
            auto [xa, ya] = maps[i](pieces[i].nodes.back());
            xa += deck[i].first;
            ya += deck[i].second;
            auto [xb, yb] = maps[j](pieces[j].nodes.front());
            auto seam = seam_integral(global, xa, ya, xb + deck[j].first, yb + deck[j].second, u1, u2, z);
            if (!seam.ok) throw curve_error("patched integral: seam tracking failed");
            cplx d1, d2;
            if (j != 0 || !pc.closed) {
                if (!snap(seam.x_end, seam.y_end, xb, yb, d1, d2))
                    throw curve_error("patched integral: charts do not glue on the same component");
                deck[j] = {d1, d2};
            } else {
                if (!snap(seam.x_end, seam.y_end, xb + deck[0].first, yb + deck[0].second, d1, d2) ||
                    std::abs(d1) + std::abs(d2) > 1e-9)
                    throw curve_error("patched integral: cycle does not close on the cover");
            }
            out.value += seam.integral;
            out.abs_error += seam.abs_error;
        }
        for (int i = 0; i < nch; ++i) {
            auto r = integrate_chart_piece(fan, lat, w, q, pieces[i], u1, u2, z, deck[i].first,
                                           deck[i].second);
            out.value += r.value;
            out.abs_error += r.abs_error;
            if (!pc.closed && (i == 0 || i == nch - 1)) out.tail_bound += r.tail_bound;
        }
        return out;
    }

    // curve kind, interior: two gamma' arcs glued through the tube region twice
    if (nch != 2) throw curve_error("patched integral: curve cycle expects two charts");
    auto [x0a, y0a] = maps[0](pieces[0].nodes.front());
    auto [x0b, y0b] = maps[0](pieces[0].nodes.back());
    auto [x1a, y1a] = maps[1](pieces[1].nodes.front());
    auto [x1b, y1b] = maps[1](pieces[1].nodes.back());

    // try gluing piece0's end to either end of piece1; the wrong choice fails to
    // close on the cover
    bool dbg = std::getenv("REMODEL_DEBUG_GLUE") != nullptr;
    if (dbg) {
        auto pr = [](const char* n, cplx x, cplx y) {
            fprintf(stderr, "  %s x=(%.6f,%.6f) y=(%.6f,%.6f)\n", n, x.real(), x.imag(), y.real(), y.imag());
        };
        pr("B0", x0b, y0b);
        pr("A0", x0a, y0a);
        pr("A1", x1a, y1a);
        pr("B1", x1b, y1b);
    }
    for (int attempt = 0; attempt < 2; ++attempt) {
        bool forward = attempt == 0; // forward: glue B0 -> A1, traverse piece1 forward
        cplx xs = forward ? x1a : x1b;
        cplx ys = forward ? y1a : y1b;
        auto seam1 = seam_integral(global, x0b, y0b, xs, ys, u1, u2, z);
        if (dbg)
            fprintf(stderr, "  attempt %d seam1 ok=%d end x=(%.6f,%.6f) y=(%.6f,%.6f)\n", attempt,
                    (int)seam1.ok, seam1.x_end.real(), seam1.x_end.imag(), seam1.y_end.real(),
                    seam1.y_end.imag());
        if (!seam1.ok) continue;
        cplx d1, d2;
        if (!snap(seam1.x_end, seam1.y_end, xs, ys, d1, d2)) continue;
        deck[1] = {d1, d2};
        cplx xo = (forward ? x1b : x1a) + d1;
        cplx yo = (forward ? y1b : y1a) + d2;
        auto seam2 = seam_integral(global, xo, yo, x0a, y0a, u1, u2, z);
        if (dbg)
            fprintf(stderr, "  attempt %d seam2 ok=%d end x=(%.6f,%.6f) y=(%.6f,%.6f) want x=(%.6f,%.6f) y=(%.6f,%.6f)\n",
                    attempt, (int)seam2.ok, seam2.x_end.real(), seam2.x_end.imag(), seam2.y_end.real(),
                    seam2.y_end.imag(), x0a.real(), x0a.imag(), y0a.real(), y0a.imag());
        if (!seam2.ok) continue;
        cplx e1, e2;
        if (!snap(seam2.x_end, seam2.y_end, x0a, y0a, e1, e2) || std::abs(e1) + std::abs(e2) > 1e-9)
            continue;
        auto r0 = integrate_chart_piece(fan, lat, w, q, pieces[0], u1, u2, z);
        auto r1 = integrate_chart_piece(fan, lat, w, q, pieces[1], u1, u2, z, deck[1].first, deck[1].second);
        out.value = r0.value + seam1.integral + (forward ? r1.value : -r1.value) + seam2.integral;
        out.abs_error = r0.abs_error + r1.abs_error + seam1.abs_error + seam2.abs_error;
        return out;
    }
    throw curve_error("patched integral: curve cycle does not glue consistently");
}

} // namespace remodel
