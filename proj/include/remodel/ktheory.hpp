#pragma once

#include "remodel/hypergeo.hpp"
#include <set>

namespace remodel {

struct ktheory_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// primitive cocharacter of the Calabi-Yau subtorus
struct Cocharacter {
    long a = 1, b = 0;
    Rat pair(const LinForm& w) const { return w.a * a + w.b * b; }
};

enum class Support { full, plus, minus, compact };

// cones listed as sorted ray-index vectors (the 0-cone is the empty vector)
using ConeKey = std::vector<int>;

struct SupportClassification {
    Cocharacter v;
    std::set<ConeKey> plus, minus, compact;
    // attracting/repelling partition of each 3-cone: rays with negative/positive
    // tangent-weight pairing
    std::map<ConeKey, std::pair<ConeKey, ConeKey>> split;

    bool in(Support s, const ConeKey& c) const {
        switch (s) {
            case Support::full: return true;
            case Support::plus: return plus.count(c) > 0;
            case Support::minus: return minus.count(c) > 0;
            case Support::compact: return compact.count(c) > 0;
        }
        return false;
    }
    std::vector<ConeKey> minimal(Support s) const;
};

SupportClassification classify_support(const StackyFan3& fan, const EquivWeights& w, const Cocharacter& v);

// one word term c * O_{V(I)} (x) O(sum_s r_s D_s)
struct GenWord {
    ConeKey I;
    std::vector<long> twist; // length = number of rays
    long mult = 1;
};

struct KClass {
    Support support = Support::full;
    std::vector<GenWord> word;

    KClass twisted(const std::vector<long>& r) const;
    KClass operator+(const KClass& o) const;
    KClass operator*(long k) const;
};

// inv^* of the twisted Chern character at the fixed-point sector (sigma, v)
CoeffExpr localization(const StackyFan3& fan, const EquivWeights& w, const KClass& cls, const SVKey& key);

// generator family O_{V(sigma)} (x) L for minimal sigma in the support, with the
// given list of twists (defaults to the untwisted representative)
std::vector<KClass> kgroup_generators(const StackyFan3& fan, const SupportClassification& cl, Support s,
                                      const std::vector<std::vector<long>>& twists = {});

struct FramedClass {
    std::map<SVKey, CoeffExpr> a;
};

// central-charge coefficients a_{sigma,v} in closed form
FramedClass frame(const StackyFan3& fan, const EquivWeights& w, const KClass& cls);

// u -> 0 limit of the coefficient family; throws if some coefficient diverges
FramedClass nonequiv_limit(const StackyFan3& fan, const FramedClass& f);

// Euler characteristic pairing chi(E+, E-) via Koszul reduction and the
// equivariant Lefschetz fixed-point sum in the u -> 0 limit
Int euler_pairing(const StackyFan3& fan, const EquivWeights& w, const SupportClassification& cl,
                  const KClass& eplus, const KClass& eminus);

// Euler characteristic of a compactly supported class
Int euler_characteristic(const StackyFan3& fan, const EquivWeights& w, const KClass& cls);

// the ordered basis {(sigma, gamma)} of K^{+/-} used for the pairing matrix:
// per 3-cone in moment order, the attracting/repelling generator with |G_sigma|
// character twists
struct PairingBasis {
    std::vector<KClass> elements;
    std::vector<std::pair<ConeKey, int>> labels; // (3-cone, character index)
};
PairingBasis pairing_basis(const StackyFan3& fan, const EquivWeights& w, const SupportClassification& cl,
                           Support s);

// the character-summed point class F_sigma
KClass point_class_summed(const StackyFan3& fan, const Cone3& sigma);
KClass point_class(const StackyFan3& fan, const Cone3& sigma);
KClass divisor_class(const StackyFan3& fan, int ray);
KClass curve_class(const StackyFan3& fan, const Cone2& tau);

} // namespace remodel
