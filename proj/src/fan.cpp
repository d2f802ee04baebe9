#include "remodel/fan.hpp"
#include <algorithm>
#include <set>
#include <sstream>

namespace remodel {

Vec2l StackyFan3::point(int i) const {
    if (i < 1 || i > num_points()) throw structural_error("point index out of range: " + std::to_string(i));
    return i <= num_rays() ? rays[i - 1] : extra[i - 1 - num_rays()];
}

Vec3l StackyFan3::b(int i) const {
    Vec2l p = point(i);
    return Vec3l(p[0], p[1], 1);
}

static std::string vec_str(const Vec2l& v) {
    std::ostringstream os;
    os << "(" << v[0] << "," << v[1] << ")";
    return os.str();
}

static long twice_signed_area(const Vec2l& a, const Vec2l& b, const Vec2l& c) {
    return det2(b - a, c - a);
}

// counterclockwise rotation of the triple, smallest index first
static Cone3 ccw_cone(const StackyFan3& fan, Cone3 c) {
    if (twice_signed_area(fan.point(c[0]), fan.point(c[1]), fan.point(c[2])) < 0) std::swap(c[1], c[2]);
    while (!(c[0] < c[1] && c[0] < c[2])) std::rotate(c.begin(), c.begin() + 1, c.end());
    return c;
}

std::vector<Vec2l> hull_vertices(const StackyFan3& fan) {
    std::vector<Vec2l> pts;
    for (int i = 1; i <= fan.num_points(); ++i) pts.push_back(fan.point(i));
    std::sort(pts.begin(), pts.end(), [](const Vec2l& a, const Vec2l& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    // monotone chain, strict turns only (collinear points are not vertices)
    auto build = [&](std::vector<Vec2l> const& ps) {
        std::vector<Vec2l> h;
        for (auto& p : ps) {
            while (h.size() >= 2 && twice_signed_area(h[h.size() - 2], h.back(), p) <= 0) h.pop_back();
            h.push_back(p);
        }
        return h;
    };
    std::vector<Vec2l> lower = build(pts);
    std::reverse(pts.begin(), pts.end());
    std::vector<Vec2l> upper = build(pts);
    lower.pop_back();
    upper.pop_back();
    lower.insert(lower.end(), upper.begin(), upper.end());
    return lower;
}

// -1 outside, 0 on boundary, 1 interior (hull counterclockwise)
static int locate_in_hull(const std::vector<Vec2l>& hull, const Vec2l& p) {
    bool on_edge = false;
    for (size_t i = 0; i < hull.size(); ++i) {
        const Vec2l& a = hull[i];
        const Vec2l& b = hull[(i + 1) % hull.size()];
        long s = twice_signed_area(a, b, p);
        if (s < 0) return -1;
        if (s == 0) {
            if ((p - a).dot(p - b) <= 0) on_edge = true;
            else return -1;
        }
    }
    return on_edge ? 0 : 1;
}

static bool on_segment_collinear(const Vec2l& a, const Vec2l& b, const Vec2l& p) {
    return twice_signed_area(a, b, p) == 0 && (p - a).dot(p - b) <= 0;
}

// true if the two segments meet anywhere other than a shared endpoint
static bool segments_conflict(Vec2l A, Vec2l B, Vec2l C, Vec2l D) {
    long d1 = twice_signed_area(C, D, A);
    long d2 = twice_signed_area(C, D, B);
    long d3 = twice_signed_area(A, B, C);
    long d4 = twice_signed_area(A, B, D);
    bool shareAC = A == C, shareAD = A == D, shareBC = B == C, shareBD = B == D;
    int shared = (int)shareAC + shareAD + shareBC + shareBD;
    if (shared >= 2) return true; // identical segment handled by caller; here it is a conflict
    if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
        // collinear: overlap beyond a single shared point?
        auto key = [&](const Vec2l& p) { return std::llabs(B[0] - A[0]) >= std::llabs(B[1] - A[1]) ? p[0] : p[1]; };
        long a = key(A), b = key(B), c = key(C), d = key(D);
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        long lo = std::max(a, c), hi = std::min(b, d);
        return lo < hi; // equality = touch at one point (allowed only if a shared endpoint)
    }
    bool touchA = on_segment_collinear(C, D, A), touchB = on_segment_collinear(C, D, B);
    bool touchC = on_segment_collinear(A, B, C), touchD = on_segment_collinear(A, B, D);
    if (shared == 1) {
        // allowed to meet exactly at the shared endpoint and nowhere else
        if (shareAC || shareAD) { if (touchB) return true; } else { if (touchA) return true; }
        if (shareAC || shareBC) { if (touchD) return true; } else { if (touchC) return true; }
        return false;
    }
    if (touchA || touchB || touchC || touchD) return true;
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

ValidationReport validate_fan(const StackyFan3& fan) {
    if (fan.rays.empty() || fan.cones.empty()) throw structural_error("empty rays or cones");
    for (auto& c : fan.cones)
        for (int i : c)
            if (i < 1 || i > fan.num_rays())
                throw structural_error("cone index out of range: " + std::to_string(i));
    for (int i : fan.preferred_sigma)
        if (i != 0 && (i < 1 || i > fan.num_rays())) throw structural_error("preferred flag index out of range");

    ValidationReport rep;
    auto add = [&](const std::string& name, bool ok, const std::string& detail = "") {
        rep.checks.push_back({name, ok, detail});
    };

    add("calabi-yau", true, "generators have height 1 by construction");

    {
        std::set<std::pair<long, long>> seen;
        bool dup = false;
        std::string what;
        for (int i = 1; i <= fan.num_points(); ++i) {
            auto p = fan.point(i);
            if (!seen.insert({p[0], p[1]}).second) { dup = true; what = vec_str(p); }
        }
        add("distinct-points", !dup, dup ? "duplicate point " + what : "");
    }

    auto hull = hull_vertices(fan);
    add("full-dimensional", hull.size() >= 3, hull.size() < 3 ? "polytope degenerates to a segment or point" : "");
    if (hull.size() < 3) return rep;

    {
        bool ok = true;
        std::string what;
        for (auto& c : fan.cones) {
            Mat3l B;
            for (int k = 0; k < 3; ++k) B.col(k) = fan.b(c[k]);
            if (det3(B) == 0) { ok = false; what = "cone over collinear points"; }
        }
        add("cones-span", ok, what);
    }
    if (!rep.ok()) return rep;

    {
        // support = cone over P and pairwise intersections are faces
        long area2 = 0;
        for (size_t i = 1; i + 1 < hull.size(); ++i)
            area2 += twice_signed_area(hull[0], hull[i], hull[i + 1]);
        long cone_area2 = 0;
        for (auto& c : fan.cones) {
            long a = twice_signed_area(fan.point(c[0]), fan.point(c[1]), fan.point(c[2]));
            cone_area2 += std::llabs(a);
        }
        add("support-covers-polytope", cone_area2 == area2,
            cone_area2 == area2 ? "" : "triangle areas sum to " + std::to_string(cone_area2) + "/2, polytope has " + std::to_string(area2) + "/2");

        std::map<std::pair<int, int>, int> edge_count;
        for (auto& c : fan.cones)
            for (int k = 0; k < 3; ++k) {
                int a = c[k], b = c[(k + 1) % 3];
                if (a > b) std::swap(a, b);
                edge_count[{a, b}]++;
            }
        bool faces_ok = true;
        std::string detail;
        for (auto& [e, cnt] : edge_count) {
            Vec2l pa = fan.point(e.first), pb = fan.point(e.second);
            Vec2l mid2 = pa + pb; // midpoint doubled; test against doubled hull
            std::vector<Vec2l> hull2;
            for (auto& h : hull) hull2.push_back(2 * h);
            bool on_bd = locate_in_hull(hull2, mid2) == 0;
            int want = on_bd ? 1 : 2;
            if (cnt != want) {
                faces_ok = false;
                detail = "edge {" + std::to_string(e.first) + "," + std::to_string(e.second) + "} shared by " +
                         std::to_string(cnt) + " cones (intersection not a face)";
            }
        }
        std::vector<std::pair<int, int>> edges;
        for (auto& [e, cnt] : edge_count) edges.push_back(e);
        for (size_t i = 0; i < edges.size() && faces_ok; ++i)
            for (size_t j = i + 1; j < edges.size() && faces_ok; ++j)
                if (segments_conflict(fan.point(edges[i].first), fan.point(edges[i].second),
                                      fan.point(edges[j].first), fan.point(edges[j].second))) {
                    faces_ok = false;
                    detail = "edges cross: intersection not a face";
                }
        add("intersections-are-faces", faces_ok, detail);
    }

    {
        // vertices of P are rays, and rays+extra are exactly the lattice points of P
        std::set<std::pair<long, long>> rayset, ptset;
        for (auto& r : fan.rays) rayset.insert({r[0], r[1]});
        for (int i = 1; i <= fan.num_points(); ++i) {
            auto p = fan.point(i);
            ptset.insert({p[0], p[1]});
        }
        bool vert_ok = true;
        for (auto& h : hull)
            if (!rayset.count({h[0], h[1]})) vert_ok = false;
        add("vertices-are-rays", vert_ok, vert_ok ? "" : "an extra vector is a vertex of the polytope");

        long lo0 = hull[0][0], hi0 = lo0, lo1 = hull[0][1], hi1 = lo1;
        for (auto& h : hull) {
            lo0 = std::min(lo0, h[0]); hi0 = std::max(hi0, h[0]);
            lo1 = std::min(lo1, h[1]); hi1 = std::max(hi1, h[1]);
        }
        bool complete = true;
        std::string missing;
        long count = 0;
        for (long x = lo0; x <= hi0; ++x)
            for (long y = lo1; y <= hi1; ++y)
                if (locate_in_hull(hull, Vec2l(x, y)) >= 0) {
                    ++count;
                    if (!ptset.count({x, y})) {
                        complete = false;
                        missing = "(" + std::to_string(x) + "," + std::to_string(y) + ")";
                    }
                }
        if (count != (long)ptset.size()) complete = false;
        add("lattice-point-complete", complete,
            complete ? "" : (missing.empty() ? "listed point outside polytope" : "missing lattice point " + missing));
    }

    {
        bool ok = true;
        std::string detail;
        if (fan.preferred_sigma[0] != 0) {
            Cone3 want = fan.preferred_sigma;
            std::sort(want.begin(), want.end());
            bool found = false;
            for (auto& c : fan.cones) {
                Cone3 s = c;
                std::sort(s.begin(), s.end());
                if (s == want) found = true;
            }
            if (!found) { ok = false; detail = "preferred sigma is not a cone of the fan"; }
            bool tau_in = std::find(want.begin(), want.end(), fan.preferred_tau[0]) != want.end() &&
                          std::find(want.begin(), want.end(), fan.preferred_tau[1]) != want.end() &&
                          fan.preferred_tau[0] != fan.preferred_tau[1];
            if (!tau_in) { ok = false; detail = "preferred tau is not an edge of preferred sigma"; }
        }
        add("preferred-flag", ok, detail);
    }

    return rep;
}

std::vector<std::pair<Cone2, std::vector<Cone3>>> two_cones(const StackyFan3& fan) {
    std::map<std::pair<int, int>, std::vector<Cone3>> m;
    for (auto& c : fan.cones)
        for (int k = 0; k < 3; ++k) {
            int a = c[k], b = c[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            m[{a, b}].push_back(c);
        }
    std::vector<std::pair<Cone2, std::vector<Cone3>>> out;
    for (auto& [e, cs] : m) out.push_back({Cone2{e.first, e.second}, cs});
    return out;
}

bool cone_contains(const Cone3& sigma, const Cone2& tau) {
    auto in = [&](int i) { return sigma[0] == i || sigma[1] == i || sigma[2] == i; };
    return in(tau[0]) && in(tau[1]);
}

bool is_interior(const StackyFan3& fan, const Cone2& tau) {
    int count = 0;
    for (auto& c : fan.cones)
        if (cone_contains(c, tau)) ++count;
    return count == 2;
}

long stabilizer_order(const StackyFan3& fan, const Cone3& sigma) {
    Mat3l B;
    for (int k = 0; k < 3; ++k) B.col(k) = fan.b(sigma[k]);
    return std::llabs(det3(B));
}

long stabilizer_order(const StackyFan3& fan, const Cone2& tau) {
    Vec3l a = fan.b(tau[0]), b = fan.b(tau[1]);
    std::vector<std::vector<long>> m{{a[0], b[0]}, {a[1], b[1]}, {a[2], b[2]}};
    auto d = smith_diagonal(m);
    long out = 1;
    for (long x : d) out *= x;
    return out;
}

std::vector<BoxElement> box_elements(const StackyFan3& fan, const Cone3& sigma) {
    Mat3l B;
    for (int k = 0; k < 3; ++k) B.col(k) = fan.b(sigma[k]);
    if (det3(B) == 0) throw structural_error("box_elements: degenerate cone");
    long lo[3], hi[3];
    for (int k = 0; k < 3; ++k) {
        lo[k] = hi[k] = 0;
        for (int j = 0; j < 3; ++j) {
            if (B(k, j) < 0) lo[k] += B(k, j);
            else hi[k] += B(k, j);
        }
    }
    std::vector<BoxElement> out;
    for (long x = lo[0]; x <= hi[0]; ++x)
        for (long y = lo[1]; y <= hi[1]; ++y)
            for (long z = lo[2]; z <= hi[2]; ++z) {
                Vec3l v(x, y, z);
                auto c = solve3(B, v);
                bool in = true;
                for (auto& ci : c)
                    if (ci < 0 || ci >= 1) in = false;
                if (!in) continue;
                BoxElement el;
                el.v = v;
                el.age = c[0] + c[1] + c[2];
                for (int k = 0; k < 3; ++k) {
                    el.coeff.push_back({sigma[k], c[k]});
                    if (c[k] != 0) el.sigma_min.push_back(sigma[k]);
                }
                std::sort(el.sigma_min.begin(), el.sigma_min.end());
                out.push_back(std::move(el));
            }
    std::sort(out.begin(), out.end(), [](const BoxElement& a, const BoxElement& b) {
        if (a.age != b.age) return a.age < b.age;
        return std::lexicographical_compare(a.v.data(), a.v.data() + 3, b.v.data(), b.v.data() + 3);
    });
    if ((long)out.size() != stabilizer_order(fan, sigma))
        throw fan_error("box enumeration does not match stabilizer order");
    return out;
}

std::vector<BoxElement> box_elements(const StackyFan3& fan, const Cone2& tau) {
    for (auto& c : fan.cones)
        if (cone_contains(c, tau)) {
            auto all = box_elements(fan, c);
            std::vector<BoxElement> out;
            for (auto& el : all) {
                bool on_tau = true;
                for (int i : el.sigma_min)
                    if (i != tau[0] && i != tau[1]) on_tau = false;
                if (on_tau) out.push_back(el);
            }
            return out;
        }
    throw structural_error("box_elements: tau is not an edge of any cone");
}

BoxElement box_involution(const StackyFan3& fan, const Cone3& sigma, const BoxElement& el) {
    // v_inv = sum ((1-c_i) mod 1) b_i
    Vec3l w(0, 0, 0);
    std::array<Rat, 3> acc{Rat(0), Rat(0), Rat(0)};
    for (auto& [i, ci] : el.coeff) {
        Rat inv_c = ci == 0 ? Rat(0) : 1 - ci;
        Vec3l bi = fan.b(i);
        for (int k = 0; k < 3; ++k) acc[k] += inv_c * Rat(bi[k]);
    }
    for (int k = 0; k < 3; ++k) {
        if (!is_integer(acc[k])) throw fan_error("box involution did not land in the lattice");
        w[k] = to_long(acc[k]);
    }
    for (auto& cand : box_elements(fan, sigma))
        if (cand.v == w) return cand;
    throw fan_error("box involution image not found");
}

Flag flag_frame(const StackyFan3& fan, const Cone2& tau, const Cone3& sigma) {
    if (!cone_contains(sigma, tau)) throw structural_error("flag_frame: tau is not an edge of sigma");
    bool found = false;
    for (auto& c : fan.cones) {
        Cone3 s = c, t = sigma;
        std::sort(s.begin(), s.end());
        std::sort(t.begin(), t.end());
        if (s == t) found = true;
    }
    if (!found) throw structural_error("flag_frame: sigma is not a cone of the fan");

    Flag f;
    f.tau = tau;
    f.sigma = sigma;
    int i1 = sigma[0] + sigma[1] + sigma[2] - tau[0] - tau[1];
    int i2 = tau[0], i3 = tau[1];
    if (twice_signed_area(fan.point(i1), fan.point(i2), fan.point(i3)) < 0) std::swap(i2, i3);
    f.ordered = {i1, i2, i3};

    Vec2l p1 = fan.point(i1), p2 = fan.point(i2), p3 = fan.point(i3);
    Vec2l u = p2 - p3;
    f.m = content(u);
    f.e2f = u / f.m;
    Vec2l w = p1 - p3;
    f.r = det2(w, f.e2f);
    if (f.r <= 0) throw fan_error("flag frame: non-positive index (orientation)");
    f.s = -1;
    for (long s = 0; s < f.r; ++s) {
        Vec2l num = w + s * f.e2f;
        if (num[0] % f.r == 0 && num[1] % f.r == 0) {
            f.s = s;
            f.e1f = num / f.r;
            break;
        }
    }
    if (f.s < 0) throw fan_error("flag frame: no valid shear found");
    if (det2(f.e1f, f.e2f) != 1) throw fan_error("flag frame: basis change not unimodular");
    f.a = f.e1f[0];
    f.bb = f.e1f[1];
    f.c = f.e2f[0];
    f.d = f.e2f[1];
    if (f.r * f.m != stabilizer_order(fan, sigma)) throw fan_error("flag frame: r*m != |G_sigma|");
    return f;
}

Flag preferred_flag(const StackyFan3& fan) {
    Cone3 sigma = fan.preferred_sigma;
    Cone2 tau = fan.preferred_tau;
    if (sigma[0] == 0) {
        Cone3 c = ccw_cone(fan, fan.cones[0]);
        sigma = c;
        tau = {c[1], c[2]};
    }
    return flag_frame(fan, tau, sigma);
}

StackyFan3 canonicalize(const StackyFan3& fan) {
    Flag f0 = preferred_flag(fan);
    Mat2l M;
    M.col(0) = f0.e1f;
    M.col(1) = f0.e2f;
    long det = det2(f0.e1f, f0.e2f);
    if (det != 1) throw fan_error("canonicalize: frame not unimodular");
    Vec2l origin = fan.point(f0.ordered[2]);
    auto transform = [&](const Vec2l& p) {
        Vec2l q = p - origin;
        // inverse of unimodular M = [[a,c],[bb,d]] applied exactly
        return Vec2l(M(1, 1) * q[0] - M(0, 1) * q[1], -M(1, 0) * q[0] + M(0, 0) * q[1]);
    };
    StackyFan3 out = fan;
    for (auto& r : out.rays) r = transform(r);
    for (auto& e : out.extra) e = transform(e);
    for (auto& c : out.cones) c = ccw_cone(out, c);
    std::sort(out.cones.begin(), out.cones.end());
    out.preferred_sigma = f0.ordered;
    out.preferred_tau = {f0.ordered[1], f0.ordered[2]};
    return out;
}

PolytopeStats polytope_stats(const StackyFan3& fan) {
    auto hull = hull_vertices(fan);
    if (hull.size() < 3) throw fan_error("polytope_stats: degenerate polytope");
    long lo0 = hull[0][0], hi0 = lo0, lo1 = hull[0][1], hi1 = lo1;
    for (auto& h : hull) {
        lo0 = std::min(lo0, h[0]); hi0 = std::max(hi0, h[0]);
        lo1 = std::min(lo1, h[1]); hi1 = std::max(hi1, h[1]);
    }
    PolytopeStats st;
    for (long x = lo0; x <= hi0; ++x)
        for (long y = lo1; y <= hi1; ++y) {
            int where = locate_in_hull(hull, Vec2l(x, y));
            if (where == 1) ++st.interior;
            else if (where == 0) ++st.boundary;
        }
    st.p = st.interior + st.boundary - 3;
    st.p_prime = fan.num_rays() - 3;
    return st;
}

} // namespace remodel
