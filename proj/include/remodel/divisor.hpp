#pragma once

#include "remodel/fan.hpp"
#include "remodel/linform.hpp"

namespace remodel {

// Extended divisor lattice data built from the exact sequence 0 -> L -> Z^(3+p) -> N -> 0.
// Classes in L^vee are integer vectors in Z^(3+p) modulo the image of M.
struct DivisorLattice {
    long p = 0, p_prime = 0;
    std::vector<std::vector<long>> kernel;      // basis of L, p x (3+p), beta_i = <D_i, beta>
    std::vector<std::vector<long>> nef;         // H_a lifts, p x (3+p)
    // s^sigma_{a,i}: per cone (index into fan.cones), a in 0..p-1, i a 1-based point index in I_sigma
    std::vector<std::map<int, std::vector<long>>> s_coeff; // [cone][i] -> column (s_{ai})_a
    std::vector<std::vector<Rat>> m_coeff;      // m_i^(a): (3+p) x p, D_i = sum_a m_i^(a) H_a

    // point indices not on the cone (I_sigma), ascending
    static std::vector<int> complement(const StackyFan3& fan, const Cone3& sigma);
};

struct EffClass {
    std::vector<Rat> beta;   // <D_i, beta> for all i (3+p entries)
    std::vector<long> qexp;  // <H_a, beta> for a = 1..p
    long total_deg = 0;      // sum of qexp
    BoxElement v;
    bool minimal = false;    // the distinguished q^v representative of its Box element
};

struct EquivWeights {
    // per cone (index into fan.cones): w_{i,sigma} for 1-based point index i (zero off the cone)
    std::vector<std::vector<LinForm>> w_ray;
    // per cone: w_{a,sigma} for a = 1..p (zero at the preferred cone)
    std::vector<std::vector<LinForm>> w_nef;
    int preferred_cone = -1;

    const LinForm& w(int cone_idx, int i) const { return w_ray[cone_idx][i - 1]; }
    // tropical distance c_sigma = sum_a w_{a,sigma} log q_a, returned as the list of forms
    const std::vector<LinForm>& tropical(int cone_idx) const { return w_nef[cone_idx]; }
};

struct divisor_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cone_index(const StackyFan3& fan, const Cone3& sigma);

DivisorLattice nef_basis(const StackyFan3& fan);

std::vector<EffClass> effective_classes(const StackyFan3& fan, const DivisorLattice& lat,
                                        const Cone3& sigma, long max_deg);

EquivWeights equiv_weights(const StackyFan3& fan, const DivisorLattice& lat);

// the (w1, w2, w3) of a flag frame, for cross-checking against the cone weights
std::array<LinForm, 3> flag_weights(const StackyFan3& fan, const Flag& f);

// cone-weight table as CSV: sigma, i, w_coeff_u1, w_coeff_u2 (exact "num/den")
std::string weights_csv(const StackyFan3& fan, const EquivWeights& w);

} // namespace remodel
