#pragma once

#include "remodel/lattice.hpp"
#include <map>
#include <optional>
#include <string>

namespace remodel {

using Cone3 = std::array<int, 3>; // 1-based ray indices
using Cone2 = std::array<int, 2>;

// Stacky fan of a semi-projective toric Calabi-Yau 3-orbifold. Rays are the
// primitive generators b_i = (m_i, n_i, 1) with the third coordinate implicit;
// extra holds the remaining lattice points of the polytope P.
struct StackyFan3 {
    std::vector<Vec2l> rays;
    std::vector<Vec2l> extra;
    std::vector<Cone3> cones;
    Cone3 preferred_sigma{0, 0, 0};
    Cone2 preferred_tau{0, 0};

    int num_rays() const { return (int)rays.size(); }
    int num_points() const { return (int)(rays.size() + extra.size()); }

    // 1-based access across rays then extra
    Vec2l point(int i) const;
    Vec3l b(int i) const; // (m_i, n_i, 1)

    bool has_ray(const Cone3& c, int i) const { return c[0] == i || c[1] == i || c[2] == i; }
};

struct ValidationCheck {
    std::string name;
    bool ok;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool ok() const {
        for (auto& c : checks) if (!c.ok) return false;
        return true;
    }
    std::string first_failure() const {
        for (auto& c : checks) if (!c.ok) return c.name + ": " + c.detail;
        return "";
    }
};

struct Flag {
    Cone2 tau;
    Cone3 sigma;
    std::array<int, 3> ordered; // (i1, i2, i3): i1 opposite tau, (i2,i3) counterclockwise
    long r = 1, s = 0, m = 1;   // b_{i1} = r e1 - s e2 + e3, b_{i2} = m e2 + e3, b_{i3} = e3
    long a = 1, bb = 0, c = 0, d = 1; // e1^f = a e1 + bb e2, e2^f = c e1 + d e2
    Vec2l e1f, e2f;             // frame vectors in ambient coordinates (= (a,bb),(c,d))
};

struct BoxElement {
    Vec3l v;
    std::vector<int> sigma_min;          // rays of the minimal cone containing v
    std::vector<std::pair<int, Rat>> coeff; // (ray index, c_i(v)) over the enumerating cone
    Rat age;

    Rat c(int i) const {
        for (auto& [j, cj] : coeff) if (j == i) return cj;
        return Rat(0);
    }
};

struct PolytopeStats {
    long interior = 0; // g
    long boundary = 0; // n
    long p = 0;        // g + n - 3 = dim H^2_CR
    long p_prime = 0;  // |rays| - 3
};

struct fan_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// malformed indices and the like, as opposed to geometric validation failures
struct structural_error : fan_error {
    using fan_error::fan_error;
};

ValidationReport validate_fan(const StackyFan3& fan);

// GL2(Z)-change of coordinates putting the preferred flag in normal form:
// b_1' = (r,-s), b_2' = (0,m), b_3' = (0,0). Cones are reordered
// counterclockwise. Idempotent.
StackyFan3 canonicalize(const StackyFan3& fan);

PolytopeStats polytope_stats(const StackyFan3& fan);

long stabilizer_order(const StackyFan3& fan, const Cone3& sigma);
long stabilizer_order(const StackyFan3& fan, const Cone2& tau);

// all Box elements of the 3-cone, untwisted element first, then by age
std::vector<BoxElement> box_elements(const StackyFan3& fan, const Cone3& sigma);
// Box(tau) as the subset of Box(sigma) supported on tau, for any sigma containing tau
std::vector<BoxElement> box_elements(const StackyFan3& fan, const Cone2& tau);

// the involution v -> inv(v) within Box(sigma)
BoxElement box_involution(const StackyFan3& fan, const Cone3& sigma, const BoxElement& el);

Flag flag_frame(const StackyFan3& fan, const Cone2& tau, const Cone3& sigma);
Flag preferred_flag(const StackyFan3& fan);

// 2-cones of the fan with the list of 3-cones containing each
std::vector<std::pair<Cone2, std::vector<Cone3>>> two_cones(const StackyFan3& fan);
bool cone_contains(const Cone3& sigma, const Cone2& tau);

// interior 2-cones (walls between two 3-cones)
bool is_interior(const StackyFan3& fan, const Cone2& tau);

// convex hull of rays, counterclockwise; each entry a vertex
std::vector<Vec2l> hull_vertices(const StackyFan3& fan);

} // namespace remodel
