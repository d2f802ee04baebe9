#pragma once

#include "remodel/divisor.hpp"
#include "remodel/logseries.hpp"

namespace remodel {

// key of a fixed-point sector: cone index into fan.cones, box index into box_elements(sigma)
struct SVKey {
    int cone = 0;
    int box = 0;
    bool operator<(const SVKey& o) const { return cone != o.cone ? cone < o.cone : box < o.box; }
    bool operator==(const SVKey& o) const { return cone == o.cone && box == o.box; }
};

// restriction component I_{sigma,v} of the small I-function at z -> -z, exact to the given order
LogSeries i_component(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                      const Cone3& sigma, const BoxElement& v, long order);

// the GKZ weight vector (w^1,...,w^{3+p}) fixed by the preferred flag
std::vector<LinForm> gkz_weights(const StackyFan3& fan);

// action of the box operator D_beta, beta an integer vector in the kernel lattice
LogSeries gkz_apply(const StackyFan3& fan, const DivisorLattice& lat,
                    const std::vector<long>& beta, const LogSeries& s);

// action of the homogeneity operator E = z d/dz + u1 d/du1 + u2 d/du2
LogSeries euler_apply(const LogSeries& s);

// generating set of L used by the annihilation tests: kernel basis and small combinations
std::vector<std::vector<long>> gkz_test_set(const DivisorLattice& lat);

// scalar q-series with rational coefficients, one mirror-map direction
struct ScalarSeries {
    bool has_log = false; // log q_a leading term (Kaehler directions)
    std::map<QExp, Rat> c;
    cplx eval(const std::vector<cplx>& q, int log_var) const;
};

struct MirrorMap {
    std::vector<ScalarSeries> kaehler;                      // a = 1..p'
    std::vector<std::pair<Vec3l, ScalarSeries>> orbifold;   // age-1 box elements
    // the M'-character component of the equivariant mirror map (same linear form
    // at every fixed point), per q-monomial
    std::map<QExp, LinForm> character;
};

MirrorMap mirror_map(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w, long order);

struct CentralChargeSeries {
    std::map<SVKey, std::pair<CoeffExpr, LogSeries>> comps;
    cplx eval(cplx u1, cplx u2, cplx z, const std::vector<cplx>& q) const;
};

CentralChargeSeries central_charge(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                                   const std::map<SVKey, CoeffExpr>& coeffs, long order);

// Appendix-B structural identities for the mirror curve polynomial, as exact
// polynomial identities in (X, Y, q); m_override substitutes corrupted inverse
// coefficients for the negative control
struct IdentityReport {
    std::vector<std::pair<std::string, bool>> rows;
    bool ok() const {
        for (auto& [n, b] : rows) if (!b) return false;
        return true;
    }
};

IdentityReport appendixB_identities(const StackyFan3& fan, const DivisorLattice& lat,
                                    const std::vector<std::vector<Rat>>* m_override = nullptr);

} // namespace remodel
