#include "remodel/divisor.hpp"
#include <functional>
#include <optional>
#include <algorithm>
#include <sstream>

namespace remodel {

std::vector<int> DivisorLattice::complement(const StackyFan3& fan, const Cone3& sigma) {
    std::vector<int> out;
    for (int i = 1; i <= fan.num_points(); ++i)
        if (!fan.has_ray(sigma, i)) out.push_back(i);
    return out;
}

int cone_index(const StackyFan3& fan, const Cone3& sigma) {
    Cone3 want = sigma;
    std::sort(want.begin(), want.end());
    for (size_t k = 0; k < fan.cones.size(); ++k) {
        Cone3 c = fan.cones[k];
        std::sort(c.begin(), c.end());
        if (c == want) return (int)k;
    }
    throw structural_error("sigma is not a cone of the fan");
}

// rows of the 3 x (3+p) generator matrix [b_1 ... b_{3+p}]
static std::vector<std::vector<long>> generator_rows(const StackyFan3& fan) {
    int n = fan.num_points();
    std::vector<std::vector<long>> m(3, std::vector<long>(n));
    for (int i = 1; i <= n; ++i) {
        Vec3l b = fan.b(i);
        for (int k = 0; k < 3; ++k) m[k][i - 1] = b[k];
    }
    return m;
}

// solve h = sum_{i in I_sigma} s_i e_i + phi^vee(u); returns s per element of I_sigma,
// or nullopt if some s is not a non-negative integer
static std::optional<std::vector<Rat>> cone_coefficients(const StackyFan3& fan, const Cone3& sigma,
                                                         const std::vector<long>& h, bool require_nonneg_int,
                                                         std::string* violation = nullptr) {
    auto comp = DivisorLattice::complement(fan, sigma);
    int n = fan.num_points();
    int p = (int)comp.size();
    std::vector<std::vector<Rat>> A(n, std::vector<Rat>(n, Rat(0)));
    std::vector<Rat> rhs(n);
    for (int c = 0; c < p; ++c) A[comp[c] - 1][c] = 1;
    for (int k = 0; k < 3; ++k) // phi^vee(e_k^vee) has coordinates <e_k, b_i> = b_i[k]
        for (int i = 1; i <= n; ++i) A[i - 1][p + k] = rat(fan.b(i)[k]);
    for (int i = 0; i < n; ++i) rhs[i] = rat(h[i]);
    auto sol = gauss_solve(A, rhs);
    std::vector<Rat> s(sol.begin(), sol.begin() + p);
    if (require_nonneg_int)
        for (int c = 0; c < p; ++c)
            if (!is_integer(s[c]) || s[c] < 0) {
                if (violation) {
                    std::ostringstream os;
                    os << "s-coefficient " << rat_str(s[c]) << " at point " << comp[c] << " of cone {"
                       << sigma[0] << "," << sigma[1] << "," << sigma[2] << "}";
                    *violation = os.str();
                }
                return std::nullopt;
            }
    return s;
}

DivisorLattice nef_basis(const StackyFan3& fan) {
    DivisorLattice lat;
    int n = fan.num_points();
    lat.p_prime = fan.num_rays() - 3;
    lat.p = n - 3;
    lat.kernel = integer_kernel(generator_rows(fan));
    if ((long)lat.kernel.size() != lat.p) throw divisor_error("kernel rank mismatch");

    auto pairing_vec = [&](const std::vector<long>& h) {
        std::vector<Rat> v;
        for (auto& beta : lat.kernel) {
            long s = 0;
            for (int i = 0; i < n; ++i) s += h[i] * beta[i];
            v.push_back(rat(s));
        }
        return v;
    };

    // orbifold directions are pinned: H_a = D_{3+a} for a > p'
    std::vector<std::vector<long>> orb;
    for (int a = (int)lat.p_prime + 1; a <= lat.p; ++a) {
        std::vector<long> h(n, 0);
        h[3 + a - 1] = 1;
        orb.push_back(h);
    }

    // small graded search for the Kaehler directions
    std::vector<std::vector<long>> kae;
    std::string last_violation = "no candidate found";
    if (lat.p_prime > 0) {
        auto comp0 = DivisorLattice::complement(fan, fan.preferred_sigma);
        int pc = (int)comp0.size();
        std::vector<std::vector<Rat>> chosen;
        for (auto& h : orb) chosen.push_back(pairing_vec(h));
        long base_rank = rational_rank(chosen);
        for (long total = 1; total <= 4 * lat.p && (long)kae.size() < lat.p_prime; ++total) {
            std::vector<long> c(pc, 0);
            // enumerate compositions of `total` into pc parts with entries <= 4
            std::function<void(int, long)> rec = [&](int pos, long left) {
                if ((long)kae.size() == lat.p_prime) return;
                if (pos == pc) {
                    if (left != 0) return;
                    std::vector<long> h(n, 0);
                    for (int k = 0; k < pc; ++k) h[comp0[k] - 1] = c[k];
                    bool ok = true;
                    for (auto& sigma : fan.cones)
                        if (!cone_coefficients(fan, sigma, h, true, &last_violation)) { ok = false; break; }
                    if (!ok) return;
                    auto pv = pairing_vec(h);
                    auto trial = chosen;
                    trial.push_back(pv);
                    if (rational_rank(trial) > base_rank + (long)kae.size()) {
                        kae.push_back(h);
                        chosen.push_back(pv);
                    }
                    return;
                }
                for (long v = 0; v <= std::min(left, 4l); ++v) {
                    c[pos] = v;
                    rec(pos + 1, left - v);
                }
                c[pos] = 0;
            };
            rec(0, total);
        }
        if ((long)kae.size() < lat.p_prime)
            throw divisor_error("nef basis search failed; last obstruction: " + last_violation);
    }

    lat.nef = kae;
    for (auto& h : orb) lat.nef.push_back(h);

    // s-coefficients per cone and the inverse expansion D_i = sum m_i^(a) H_a
    lat.s_coeff.resize(fan.cones.size());
    for (size_t k = 0; k < fan.cones.size(); ++k) {
        auto comp = DivisorLattice::complement(fan, fan.cones[k]);
        std::vector<std::vector<long>> cols(comp.size(), std::vector<long>(lat.p));
        for (long a = 0; a < lat.p; ++a) {
            auto s = cone_coefficients(fan, fan.cones[k], lat.nef[a], true, &last_violation);
            if (!s) throw divisor_error("nef class not effective on a cone: " + last_violation);
            for (size_t c = 0; c < comp.size(); ++c) cols[c][a] = to_long((*s)[c]);
        }
        for (size_t c = 0; c < comp.size(); ++c) lat.s_coeff[k][comp[c]] = cols[c];
    }

    // m_i^(a): solve e_i = sum_a m_a H_a + phi^vee(u)
    lat.m_coeff.assign(n, std::vector<Rat>(lat.p, Rat(0)));
    if (lat.p > 0) {
        std::vector<std::vector<Rat>> A(n, std::vector<Rat>(n, Rat(0)));
        for (long a = 0; a < lat.p; ++a)
            for (int i = 0; i < n; ++i) A[i][a] = rat(lat.nef[a][i]);
        for (int k = 0; k < 3; ++k)
            for (int i = 1; i <= n; ++i) A[i - 1][lat.p + k] = rat(fan.b(i)[k]);
        for (int i = 0; i < n; ++i) {
            std::vector<Rat> rhs(n, Rat(0));
            rhs[i] = 1;
            auto sol = gauss_solve(A, rhs);
            for (long a = 0; a < lat.p; ++a) lat.m_coeff[i][a] = sol[a];
        }
    }
    return lat;
}

static bool point_in_cone(const StackyFan3& fan, const Cone3& sigma, const Vec2l& pt) {
    Vec2l a = fan.point(sigma[0]), b = fan.point(sigma[1]), c = fan.point(sigma[2]);
    long s1 = det2(b - a, pt - a), s2 = det2(c - b, pt - b), s3 = det2(a - c, pt - c);
    long orient = det2(b - a, c - a);
    if (orient < 0) { s1 = -s1; s2 = -s2; s3 = -s3; }
    return s1 >= 0 && s2 >= 0 && s3 >= 0;
}

std::vector<EffClass> effective_classes(const StackyFan3& fan, const DivisorLattice& lat,
                                        const Cone3& sigma, long max_deg) {
    if (max_deg < 0) throw divisor_error("effective_classes: max_deg must be >= 0");
    int ci = cone_index(fan, sigma);
    auto comp = DivisorLattice::complement(fan, sigma);
    int pc = (int)comp.size();
    std::vector<long> deg(pc);
    for (int c = 0; c < pc; ++c) {
        long d = 0;
        for (long a = 0; a < lat.p; ++a) d += lat.s_coeff[ci].at(comp[c])[a];
        if (d <= 0) throw divisor_error("effective_classes: zero grading degree");
        deg[c] = d;
    }
    Mat3l B;
    for (int k = 0; k < 3; ++k) B.col(k) = fan.b(sigma[k]);
    auto box = box_elements(fan, sigma);

    std::vector<EffClass> out;
    std::vector<long> d(pc, 0);
    std::function<void(int, long)> rec = [&](int pos, long used) {
        if (pos == pc) {
            EffClass e;
            e.beta.assign(fan.num_points(), Rat(0));
            Vec3l rhs(0, 0, 0);
            for (int c = 0; c < pc; ++c) {
                e.beta[comp[c] - 1] = rat(d[c]);
                rhs -= d[c] * fan.b(comp[c]);
            }
            auto part = solve3(B, rhs);
            for (int k = 0; k < 3; ++k) e.beta[sigma[k] - 1] = part[k];
            e.qexp.assign(lat.p, 0);
            for (int c = 0; c < pc; ++c)
                for (long a = 0; a < lat.p; ++a) e.qexp[a] += lat.s_coeff[ci].at(comp[c])[a] * d[c];
            e.total_deg = 0;
            for (long a = 0; a < lat.p; ++a) e.total_deg += e.qexp[a];
            // v(beta): c_i = {-<D_i,beta>} on the cone rays
            std::array<Rat, 3> cv;
            std::array<Rat, 3> acc{Rat(0), Rat(0), Rat(0)};
            for (int k = 0; k < 3; ++k) {
                cv[k] = rfrac(-part[k]);
                Vec3l bk = fan.b(sigma[k]);
                for (int j = 0; j < 3; ++j) acc[j] += cv[k] * Rat(bk[j]);
            }
            Vec3l v;
            for (int j = 0; j < 3; ++j) v[j] = to_long(acc[j]);
            bool found = false;
            for (auto& el : box)
                if (el.v == v) { e.v = el; found = true; }
            if (!found) throw divisor_error("effective class image not in Box");
            out.push_back(std::move(e));
            return;
        }
        for (long k = 0; used + k * deg[pos] <= max_deg; ++k) {
            d[pos] = k;
            rec(pos + 1, used + k * deg[pos]);
        }
        d[pos] = 0;
    };
    rec(0, 0);

    // distinguished q^v representative per Box element: supported on the orbifold
    // directions inside the cone, of total degree age(v); fall back to minimal degree
    for (auto& box_el : box) {
        long best = -1;
        bool strict = false;
        for (size_t k = 0; k < out.size(); ++k) {
            if (out[k].v.v != box_el.v) continue;
            bool inside = true;
            for (int c = 0; c < pc; ++c)
                if (out[k].beta[comp[c] - 1] != 0 && !point_in_cone(fan, sigma, fan.point(comp[c])))
                    inside = false;
            bool exact = inside && rat(out[k].total_deg) == box_el.age;
            if (exact && !strict) { best = (long)k; strict = true; }
            else if (!strict && (best < 0 || out[k].total_deg < out[best].total_deg)) best = (long)k;
        }
        if (best >= 0) out[best].minimal = true;
    }

    std::sort(out.begin(), out.end(), [](const EffClass& a, const EffClass& b) {
        if (a.total_deg != b.total_deg) return a.total_deg < b.total_deg;
        return std::lexicographical_compare(a.qexp.begin(), a.qexp.end(), b.qexp.begin(), b.qexp.end());
    });
    return out;
}

EquivWeights equiv_weights(const StackyFan3& fan, const DivisorLattice& lat) {
    EquivWeights w;
    int n = fan.num_points();
    w.preferred_cone = cone_index(fan, fan.preferred_sigma);
    w.w_ray.assign(fan.cones.size(), std::vector<LinForm>(n));
    w.w_nef.assign(fan.cones.size(), std::vector<LinForm>(lat.p));
    for (size_t k = 0; k < fan.cones.size(); ++k) {
        const Cone3& sigma = fan.cones[k];
        Mat3l B;
        for (int j = 0; j < 3; ++j) B.col(j) = fan.b(sigma[j]);
        long det = det3(B);
        // rows of B^{-1} restricted to the first two coordinates
        for (int j = 0; j < 3; ++j) {
            // solve row: x * B = e_j  <=>  B^T x^T = e_j
            Mat3l Bt = B.transpose();
            Vec3l e(0, 0, 0);
            e[j] = 1;
            auto x = solve3(Bt, e);
            (void)det;
            w.w_ray[k][sigma[j] - 1] = LinForm(x[0], x[1]);
        }
        // w_{a,sigma} from the preferred-cone lift H_a = sum_{i in I_{sigma_0}} s_{ai} D_i
        auto& s0 = lat.s_coeff[w.preferred_cone];
        for (long a = 0; a < lat.p; ++a) {
            LinForm f;
            for (auto& [i, col] : s0)
                f = f + rat(col[a]) * w.w_ray[k][i - 1];
            w.w_nef[k][a] = f;
        }
    }
    return w;
}

std::array<LinForm, 3> flag_weights(const StackyFan3& fan, const Flag& f) {
    (void)fan;
    LinForm u1f(rat(f.d), rat(-f.c));
    LinForm u2f(rat(-f.bb), rat(f.a));
    LinForm w1 = u1f * Rat(1, f.r);
    LinForm w2 = (u1f * rat(f.s) + u2f * rat(f.r)) * Rat(1, f.r * f.m);
    LinForm w3 = -(w1 + w2);
    return {w1, w2, w3};
}

std::string weights_csv(const StackyFan3& fan, const EquivWeights& w) {
    std::ostringstream os;
    os << "sigma,i,w_coeff_u1,w_coeff_u2\n";
    for (size_t k = 0; k < fan.cones.size(); ++k) {
        const Cone3& c = fan.cones[k];
        for (int i = 1; i <= fan.num_points(); ++i) {
            const LinForm& f = w.w_ray[k][i - 1];
            if (f.is_zero() && !fan.has_ray(c, i)) continue;
            os << c[0] << " " << c[1] << " " << c[2] << "," << i << ","
               << rat_str(f.a) << "," << rat_str(f.b) << "\n";
        }
    }
    return os.str();
}

} // namespace remodel
