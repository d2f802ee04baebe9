#include "remodel/ktheory.hpp"
#include "remodel/cyclo.hpp"
#include <algorithm>
#include <numeric>
#include <sstream>

namespace remodel {

static std::string cone_str(const ConeKey& c) {
    std::string s = "{";
    for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + "}";
}

std::vector<ConeKey> SupportClassification::minimal(Support s) const {
    const std::set<ConeKey>* set = nullptr;
    switch (s) {
        case Support::plus: set = &plus; break;
        case Support::minus: set = &minus; break;
        case Support::compact: set = &compact; break;
        case Support::full: return {ConeKey{}};
    }
    std::vector<ConeKey> out;
    for (auto& c : *set) {
        bool min = true;
        for (auto& d : *set)
            if (d != c && std::includes(c.begin(), c.end(), d.begin(), d.end())) min = false;
        if (min) out.push_back(c);
    }
    return out;
}

SupportClassification classify_support(const StackyFan3& fan, const EquivWeights& w, const Cocharacter& v) {
    if (gcdl(v.a, v.b) != 1) throw ktheory_error("cocharacter must be primitive");
    SupportClassification cl;
    cl.v = v;

    // genericity: every flag's tangent weight pairs nonzero with v
    auto tcs = two_cones(fan);
    for (auto& [tau, parents] : tcs)
        for (auto& sigma : parents) {
            auto f = flag_frame(fan, tau, sigma);
            int k = cone_index(fan, sigma);
            if (v.pair(w.w(k, f.ordered[0])) == 0)
                throw ktheory_error("cocharacter not generic: zero tangent weight at flag tau=" +
                                    cone_str({tau[0], tau[1]}) + " sigma=" +
                                    cone_str({sigma[0], sigma[1], sigma[2]}));
        }

    // all cones of the fan, as sorted ray lists
    std::set<ConeKey> cones;
    cones.insert(ConeKey{});
    for (auto& c : fan.cones) {
        ConeKey k{c[0], c[1], c[2]};
        std::sort(k.begin(), k.end());
        cones.insert(k);
        for (int j = 0; j < 3; ++j) {
            cones.insert(ConeKey{c[j]});
            ConeKey e{c[j], c[(j + 1) % 3]};
            std::sort(e.begin(), e.end());
            cones.insert(e);
        }
    }

    // escape directions: per exterior 2-cone, the tangent weight at its unique 3-cone
    std::vector<std::pair<ConeKey, Rat>> escapes;
    for (auto& [tau, parents] : tcs) {
        if (parents.size() != 1) continue;
        auto f = flag_frame(fan, tau, parents[0]);
        int k = cone_index(fan, parents[0]);
        ConeKey key{tau[0], tau[1]};
        std::sort(key.begin(), key.end());
        escapes.push_back({key, v.pair(w.w(k, f.ordered[0]))});
    }

    for (auto& c : cones) {
        bool below = true, above = true;
        for (auto& [tau, pairing] : escapes) {
            if (!std::includes(tau.begin(), tau.end(), c.begin(), c.end())) continue;
            if (pairing < 0) below = false;
            if (pairing > 0) above = false;
        }
        if (below) cl.plus.insert(c);
        if (above) cl.minus.insert(c);
    }

    // the core: cones whose relative interior lies in the interior of the support
    auto hull = hull_vertices(fan);
    auto interior_point = [&](int i) {
        // strict interior of the polytope
        for (size_t k = 0; k < hull.size(); ++k) {
            Vec2l a = hull[k], b = hull[(k + 1) % hull.size()];
            if (det2(b - a, fan.point(i) - a) <= 0) return false;
        }
        return true;
    };
    for (auto& c : cones) {
        if (c.size() == 3) cl.compact.insert(c);
        else if (c.size() == 2) {
            if (is_interior(fan, Cone2{c[0], c[1]})) cl.compact.insert(c);
        } else if (c.size() == 1) {
            if (interior_point(c[0])) cl.compact.insert(c);
        }
    }

    // consistency: the plus/minus classes must meet exactly in the core
    std::set<ConeKey> meet;
    std::set_intersection(cl.plus.begin(), cl.plus.end(), cl.minus.begin(), cl.minus.end(),
                          std::inserter(meet, meet.begin()));
    if (meet != cl.compact) throw ktheory_error("support classification inconsistent: plus/minus meet != core");

    // attracting/repelling split of each 3-cone
    for (auto& sigma : fan.cones) {
        int k = cone_index(fan, sigma);
        ConeKey key{sigma[0], sigma[1], sigma[2]}, ip, im;
        std::sort(key.begin(), key.end());
        for (int j = 0; j < 3; ++j) {
            Rat p = v.pair(w.w(k, sigma[j]));
            (p < 0 ? ip : im).push_back(sigma[j]);
        }
        std::sort(ip.begin(), ip.end());
        std::sort(im.begin(), im.end());
        if (ip.empty() || im.empty()) throw ktheory_error("tangent weights of one sign only (violates CY)");
        if (!cl.plus.count(ip) || !cl.minus.count(im))
            throw ktheory_error("attracting/repelling cones not in their support classes");
        cl.split[key] = {ip, im};
    }
    return cl;
}

KClass KClass::twisted(const std::vector<long>& r) const {
    KClass out = *this;
    for (auto& t : out.word)
        for (size_t s = 0; s < t.twist.size() && s < r.size(); ++s) t.twist[s] += r[s];
    return out;
}

KClass KClass::operator+(const KClass& o) const {
    KClass out = *this;
    out.word.insert(out.word.end(), o.word.begin(), o.word.end());
    return out;
}

KClass KClass::operator*(long k) const {
    KClass out = *this;
    for (auto& t : out.word) t.mult *= k;
    return out;
}

CoeffExpr localization(const StackyFan3& fan, const EquivWeights& w, const KClass& cls, const SVKey& key) {
    const Cone3& sigma = fan.cones[key.cone];
    auto box = box_elements(fan, sigma);
    const BoxElement& v = box[key.box];
    CoeffExpr out;
    for (auto& t : cls.word) {
        CoeffExpr term = CoeffExpr::scalar(rat(t.mult));
        for (int i : t.I) {
            AffForm a{w.w(key.cone, i), v.c(i)};
            term = term * (CoeffExpr::one() - CoeffExpr::exp_pi(a * Rat(2)));
        }
        AffForm tw{LinForm{}, Rat(0)};
        for (size_t s = 0; s < t.twist.size(); ++s) {
            if (t.twist[s] == 0) continue;
            AffForm a{w.w(key.cone, (int)s + 1), v.c((int)s + 1)};
            tw = tw + a * rat(t.twist[s]);
        }
        term = term * CoeffExpr::exp_pi(tw * Rat(-2));
        out = out + term;
    }
    return out;
}

std::vector<KClass> kgroup_generators(const StackyFan3& fan, const SupportClassification& cl, Support s,
                                      const std::vector<std::vector<long>>& twists) {
    std::vector<KClass> out;
    std::vector<std::vector<long>> tw = twists;
    if (tw.empty()) tw.push_back(std::vector<long>(fan.num_rays(), 0));
    for (auto& c : cl.minimal(s)) {
        if (c.empty()) {
            // structure sheaf of X itself
            for (auto& r : tw) {
                KClass k;
                k.support = s;
                k.word.push_back(GenWord{ConeKey{}, r, 1});
                out.push_back(k);
            }
            continue;
        }
        for (auto& r : tw) {
            KClass k;
            k.support = s;
            k.word.push_back(GenWord{c, r, 1});
            out.push_back(k);
        }
    }
    return out;
}

FramedClass frame(const StackyFan3& fan, const EquivWeights& w, const KClass& cls) {
    FramedClass out;
    for (size_t kc = 0; kc < fan.cones.size(); ++kc) {
        const Cone3& sigma = fan.cones[kc];
        auto box = box_elements(fan, sigma);
        long gsz = (long)box.size();
        for (size_t kb = 0; kb < box.size(); ++kb) {
            const BoxElement& v = box[kb];
            CoeffExpr acc;
            for (auto& t : cls.word) {
                bool inside = true;
                for (int i : t.I) inside = inside && fan.has_ray(sigma, i);
                if (!inside) continue;
                // (-2 pi i)^{|I|} e^{pi i sum_I (w_i/z + c_i)} prod_{I' \ I} Gamma(w_i/z + c_i)
                // / ((-1)^age |G| prod_I Gamma(1 - w_i/z - c_i)), times the twist phase
                CoeffExpr term = CoeffExpr::minus_two_pi_i((int)t.I.size()) * rat(t.mult);
                AffForm esum{LinForm{}, Rat(0)};
                for (int i : t.I) esum = esum + AffForm{w.w(kc, i), v.c(i)};
                term = term * CoeffExpr::exp_pi(esum);
                for (int j = 0; j < 3; ++j) {
                    int i = sigma[j];
                    AffForm a{w.w(kc, i), v.c(i)};
                    bool in_I = std::find(t.I.begin(), t.I.end(), i) != t.I.end();
                    if (in_I) term = term * CoeffExpr::gamma(AffForm{-a.lin, 1 - a.cst}, -1);
                    else term = term * CoeffExpr::gamma(a);
                }
                Rat sign = rfrac(v.age / 2) == 0 ? Rat(1) : Rat(-1);
                term = term * (sign / gsz);
                AffForm tw{LinForm{}, Rat(0)};
                for (size_t s = 0; s < t.twist.size(); ++s) {
                    if (t.twist[s] == 0) continue;
                    tw = tw + AffForm{w.w(kc, (int)s + 1), v.c((int)s + 1)} * rat(t.twist[s]);
                }
                term = term * CoeffExpr::exp_pi(tw * Rat(-2));
                acc = acc + term;
            }
            if (!acc.is_zero()) out.a[SVKey{(int)kc, (int)kb}] = acc;
        }
    }
    return out;
}

FramedClass nonequiv_limit(const StackyFan3& fan, const FramedClass& f) {
    (void)fan;
    FramedClass out;
    for (auto& [key, expr] : f.a) {
        CoeffExpr lim;
        for (auto& [k, v] : expr.terms()) {
            // the rational function at U = 0
            Rat num0 = 0;
            auto it = v.num.c.find({0, 0});
            if (it != v.num.c.end()) num0 = it->second;
            Rat den0 = 1;
            bool pole = false;
            for (auto& [g, m] : v.den) {
                if (g.cst == 0) { pole = true; break; }
                for (int i = 0; i < m; ++i) den0 *= g.cst;
            }
            if (pole) {
                if (num0 == 0)
                    throw ktheory_error("non-equivariant limit is direction-dependent (0/0 coefficient)");
                throw ktheory_error("non-equivariant limit divergent: coefficient has a pole at u=0");
            }
            if (num0 == 0) continue;
            // expi_lin evaluates to 1 at u=0; gammas keep their constant parts
            CoeffExpr term = CoeffExpr::scalar(num0 / den0) * CoeffExpr::exp_pi(AffForm{LinForm{}, k.phase});
            if (k.two_pi != 0)
                term = term * CoeffExpr::two_pi_i(k.two_pi) *
                       CoeffExpr::exp_pi(AffForm{LinForm{}, Rat(-k.two_pi, 2)});
            for (auto& [g, e] : k.gammas)
                term = term * CoeffExpr::gamma(AffForm{LinForm{}, g.cst}, e);
            lim = lim + term;
        }
        if (!lim.is_zero()) out.a[key] = lim;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Euler characteristics via the equivariant Lefschetz sum in the u -> 0 limit

namespace {

struct LefschetzCtx {
    const StackyFan3& fan;
    const EquivWeights& w;
    long N;        // lcm of stabilizer orders
    Rat dir1, dir2; // direction (u1,u2) = t*(dir1,dir2)
    long terms = 9;

    Rat pair(const LinForm& f) const { return f.a * dir1 + f.b * dir2; }

    // series of 1 - zeta * e^{mu t}
    CycloSeries one_minus(const Cyclo& zeta, const Rat& mu) const {
        CycloSeries s;
        s.lead = 0;
        s.c.assign(terms, Cyclo());
        s.c[0] = Cyclo(1, Rat(1)) - zeta;
        Rat f = 1;
        Rat mupow = 1;
        for (long k = 1; k < (long)terms; ++k) {
            mupow *= mu;
            f *= k;
            s.c[k] = (zeta * Rat(-1)) * (mupow / f);
        }
        return s;
    }

    CycloSeries expfac(const Cyclo& zeta, const Rat& mu) const {
        // zeta * e^{mu t}
        CycloSeries s;
        s.lead = 0;
        s.c.assign(terms, Cyclo());
        Rat f = 1, mupow = 1;
        s.c[0] = zeta;
        for (long k = 1; k < (long)terms; ++k) {
            mupow *= mu;
            f *= k;
            s.c[k] = zeta * (mupow / f);
        }
        return s;
    }
};

} // namespace

Int euler_characteristic(const StackyFan3& fan, const EquivWeights& w, const KClass& cls) {
    long N = 1;
    for (auto& sigma : fan.cones) N = std::lcm(N, stabilizer_order(fan, sigma));
    LefschetzCtx ctx{fan, w, N, Rat(1), Rat(0)};
    // choose a generic direction avoiding zero pairings with all cone weights
    for (long d = 3;; d += 2) {
        ctx.dir2 = Rat(1, d);
        bool ok = true;
        for (size_t k = 0; k < fan.cones.size(); ++k)
            for (int j = 0; j < 3; ++j)
                if (ctx.pair(w.w((int)k, fan.cones[(int)k][j])) == 0) ok = false;
        if (ok) break;
        if (d > 99) throw ktheory_error("no generic direction found");
    }

    CycloSeries total;
    total.lead = 0;
    total.c.assign(ctx.terms, Cyclo());
    for (size_t kc = 0; kc < fan.cones.size(); ++kc) {
        const Cone3& sigma = fan.cones[kc];
        auto box = box_elements(fan, sigma);
        long gsz = (long)box.size();
        for (auto& g : box) {
            // denominator prod_i (1 - zeta(-c_i) e^{-w_i t})
            CycloSeries den = CycloSeries::from(Cyclo(1, Rat(1)));
            for (int j = 0; j < 3; ++j) {
                int i = sigma[j];
                Rat ci = g.c(i);
                long zpow = -to_long(Rat(ci * N));
                Cyclo zeta = Cyclo::root(N, zpow);
                den = den * ctx.one_minus(zeta, -ctx.pair(w.w((int)kc, i)));
                den.truncate(ctx.terms + 3);
            }
            CycloSeries deninv = den.inverse(ctx.terms);
            for (auto& t : cls.word) {
                CycloSeries num = CycloSeries::from(Cyclo(1, rat(t.mult)));
                for (int i : t.I) {
                    Rat ci = g.c(i);
                    bool on_cone = fan.has_ray(sigma, i);
                    Rat mu = on_cone ? -ctx.pair(w.w((int)kc, i)) : Rat(0);
                    long zpow = -to_long(Rat(ci * N));
                    num = num * ctx.one_minus(Cyclo::root(N, zpow), mu);
                    num.truncate(ctx.terms + 3);
                }
                // twist: prod_s zeta(r_s c_s) e^{r_s w_s t}
                Rat mu_tw = 0;
                long zpow_tw = 0;
                for (size_t s = 0; s < t.twist.size(); ++s) {
                    if (t.twist[s] == 0) continue;
                    mu_tw += rat(t.twist[s]) * ctx.pair(w.w((int)kc, (int)s + 1));
                    zpow_tw += t.twist[s] * to_long(Rat(g.c((int)s + 1) * N));
                }
                num = num * ctx.expfac(Cyclo::root(N, zpow_tw), mu_tw);
                num.truncate(ctx.terms + 3);
                CycloSeries contrib = num * deninv;
                contrib.truncate(ctx.terms - 1);
                total = total + contrib * CycloSeries::from(Cyclo(1, Rat(1, gsz)));
                total.truncate(ctx.terms - 1);
            }
        }
    }
    // negative powers must cancel; value is the t^0 coefficient
    for (long e = total.lead; e < 0; ++e)
        if (!total.c[e - total.lead].is_zero())
            throw ktheory_error("Lefschetz sum has an uncancelled pole: class not compactly supported?");
    Cyclo val = (0 >= total.lead && 0 <= total.top()) ? total.c[-total.lead] : Cyclo();
    Rat r = val.rational_part();
    if (!is_integer(r)) throw ktheory_error("Euler characteristic not an integer: " + rat_str(r));
    return Int(r.get_num());
}

Int euler_pairing(const StackyFan3& fan, const EquivWeights& w, const SupportClassification& cl,
                  const KClass& eplus, const KClass& eminus) {
    bool ok_pair = (eplus.support == Support::plus && eminus.support == Support::minus) ||
                   (eplus.support == Support::full && eminus.support == Support::compact);
    if (!ok_pair) throw ktheory_error("euler_pairing: supports must be (plus,minus) or (full,compact)");
    Int total = 0;
    for (auto& tp : eplus.word)
        for (auto& tm : eminus.word) {
            ConeKey uni = tp.I;
            for (int i : tm.I)
                if (std::find(uni.begin(), uni.end(), i) == uni.end()) uni.push_back(i);
            std::sort(uni.begin(), uni.end());
            if (uni.size() > 3) continue;
            // the union must span a cone of the fan
            bool is_cone = false;
            for (auto& c : fan.cones) {
                bool all = true;
                for (int i : uni) all = all && fan.has_ray(c, i);
                if (all) is_cone = true;
            }
            if (!is_cone) continue;
            if (!uni.empty() && !cl.in(Support::compact, uni))
                throw ktheory_error("euler_pairing: supports overlap non-properly on cone " + cone_str(uni));
            if (uni.empty())
                throw ktheory_error("euler_pairing: empty support intersection cone is not proper");
            // Koszul reduction to a compactly supported class
            ConeKey common;
            std::set_intersection(tp.I.begin(), tp.I.end(), tm.I.begin(), tm.I.end(),
                                  std::back_inserter(common));
            long nsub = (long)common.size();
            for (long mask = 0; mask < (1l << nsub); ++mask) {
                // L_{I+} (x) L1^vee (x) L2 with a Koszul subset removed
                std::vector<long> r(fan.num_rays(), 0);
                for (size_t s = 0; s < r.size(); ++s)
                    r[s] = (s < tm.twist.size() ? tm.twist[s] : 0) - (s < tp.twist.size() ? tp.twist[s] : 0);
                for (int i : tp.I) r[i - 1] += 1;
                long bits = 0;
                for (long j = 0; j < nsub; ++j)
                    if (mask & (1l << j)) {
                        r[common[j] - 1] -= 1;
                        ++bits;
                    }
                KClass red;
                red.support = Support::compact;
                red.word.push_back(GenWord{uni, r, tp.mult * tm.mult});
                Int chi = euler_characteristic(fan, w, red);
                long sign = ((tp.I.size() + bits) % 2 == 0) ? 1 : -1;
                total += sign * chi;
            }
        }
    return total;
}

PairingBasis pairing_basis(const StackyFan3& fan, const EquivWeights& w, const SupportClassification& cl,
                           Support s) {
    if (s != Support::plus && s != Support::minus) throw ktheory_error("pairing basis: plus or minus only");
    // order 3-cones by the moment value of their fixed point, ascending
    std::vector<std::pair<Rat, ConeKey>> order;
    for (auto& sigma : fan.cones) {
        int k = cone_index(fan, sigma);
        Rat mu = 0;
        for (auto& f : w.w_nef[k]) mu -= cl.v.pair(f);
        ConeKey key{sigma[0], sigma[1], sigma[2]};
        std::sort(key.begin(), key.end());
        order.push_back({mu, key});
    }
    std::sort(order.begin(), order.end(), [](auto& a, auto& b) {
        return a.first != b.first ? a.first < b.first : a.second < b.second;
    });

    PairingBasis basis;
    for (auto& [mu, key] : order) {
        const auto& split = cl.split.at(key);
        ConeKey I = (s == Support::plus) ? split.first : split.second;
        Cone3 sigma{key[0], key[1], key[2]};
        auto box = box_elements(fan, sigma);
        long gsz = (long)box.size();
        // enumerate twists realizing all |G_sigma| characters
        std::vector<std::vector<Rat>> seen;
        std::vector<std::vector<long>> reps;
        for (long radius = 0; (long)reps.size() < gsz && radius <= 3 * gsz; ++radius) {
            std::vector<std::vector<long>> cands;
            if (radius == 0) cands.push_back(std::vector<long>(fan.num_rays(), 0));
            for (int sray = 1; sray <= fan.num_rays() && radius > 0; ++sray)
                for (long val : {radius, -radius}) {
                    std::vector<long> r(fan.num_rays(), 0);
                    r[sray - 1] = val;
                    cands.push_back(r);
                }
            for (auto& r : cands) {
                std::vector<Rat> chars;
                for (auto& v : box) {
                    Rat c = 0;
                    for (size_t sray = 0; sray < r.size(); ++sray) c += rat(r[sray]) * v.c((int)sray + 1);
                    chars.push_back(rfrac(c));
                }
                if (std::find(seen.begin(), seen.end(), chars) == seen.end()) {
                    seen.push_back(chars);
                    reps.push_back(r);
                }
                if ((long)reps.size() == gsz) break;
            }
        }
        if ((long)reps.size() != gsz) throw ktheory_error("pairing basis: could not realize all characters");
        for (size_t j = 0; j < reps.size(); ++j) {
            KClass k;
            k.support = s;
            k.word.push_back(GenWord{I, reps[j], 1});
            basis.elements.push_back(k);
            basis.labels.push_back({key, (int)j});
        }
    }
    return basis;
}

KClass point_class(const StackyFan3& fan, const Cone3& sigma) {
    KClass k;
    k.support = Support::compact;
    ConeKey I{sigma[0], sigma[1], sigma[2]};
    std::sort(I.begin(), I.end());
    k.word.push_back(GenWord{I, std::vector<long>(fan.num_rays(), 0), 1});
    return k;
}

KClass point_class_summed(const StackyFan3& fan, const Cone3& sigma) {
    auto box = box_elements(fan, sigma);
    long gsz = (long)box.size();
    // one twist per character of G_sigma
    std::vector<std::vector<Rat>> seen;
    KClass out;
    out.support = Support::compact;
    ConeKey I{sigma[0], sigma[1], sigma[2]};
    std::sort(I.begin(), I.end());
    for (long radius = 0; (long)seen.size() < gsz && radius <= 3 * gsz; ++radius) {
        std::vector<std::vector<long>> cands;
        if (radius == 0) cands.push_back(std::vector<long>(fan.num_rays(), 0));
        for (int sray = 1; sray <= fan.num_rays() && radius > 0; ++sray)
            for (long val : {radius, -radius}) {
                std::vector<long> r(fan.num_rays(), 0);
                r[sray - 1] = val;
                cands.push_back(r);
            }
        for (auto& r : cands) {
            std::vector<Rat> chars;
            for (auto& v : box) {
                Rat c = 0;
                for (size_t sray = 0; sray < r.size(); ++sray) c += rat(r[sray]) * v.c((int)sray + 1);
                chars.push_back(rfrac(c));
            }
            if (std::find(seen.begin(), seen.end(), chars) == seen.end()) {
                seen.push_back(chars);
                out.word.push_back(GenWord{I, r, 1});
            }
            if ((long)seen.size() == gsz) break;
        }
    }
    if ((long)out.word.size() != gsz) throw ktheory_error("point class: could not realize all characters");
    return out;
}

KClass divisor_class(const StackyFan3& fan, int ray) {
    if (ray < 1 || ray > fan.num_rays()) throw structural_error("divisor ray out of range");
    KClass k;
    k.word.push_back(GenWord{ConeKey{ray}, std::vector<long>(fan.num_rays(), 0), 1});
    return k;
}

KClass curve_class(const StackyFan3& fan, const Cone2& tau) {
    ConeKey I{tau[0], tau[1]};
    std::sort(I.begin(), I.end());
    bool found = false;
    for (auto& c : fan.cones)
        if (cone_contains(c, tau)) found = true;
    if (!found) throw structural_error("curve 2-cone not in the fan");
    KClass k;
    k.word.push_back(GenWord{I, std::vector<long>(fan.num_rays(), 0), 1});
    return k;
}

} // namespace remodel
