#pragma once

#include "remodel/ktheory.hpp"
#include "remodel/quadrature.hpp"

namespace remodel {

struct curve_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// mirror curve H(X,Y,q) = sum_i a_i(q) X^{m_i} Y^{n_i} in the coordinates of a flag
struct MirrorCurve {
    const StackyFan3* fan = nullptr;
    Flag flag;                     // coordinates of this chart
    std::vector<Vec2l> expo;       // (m_i^f, n_i^f) per point, flag coordinates
    std::vector<cplx> coeff;       // a_i^sigma(q), numeric
    std::vector<cplx> q;           // the q values used
    long genus = 0, npunct = 0;
    bool q_small = true;           // chart-decomposition smallness gate

    cplx H(cplx X, cplx Y) const;
    cplx HX(cplx X, cplx Y) const; // dH/dlogX
    cplx HY(cplx X, cplx Y) const;
    cplx Hmix(int dx, int dy, cplx X, cplx Y) const; // (dlogX)^dx (dlogY)^dy H
    double Hscale(cplx X, cplx Y) const;             // sum of term magnitudes
};

// curve in the given flag's coordinates at numeric q (ordered per the nef basis)
MirrorCurve build_curve(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                        const Flag& flag, const std::vector<cplx>& q);

// residual of H = a(q) X^{m_{i3}} Y^{n_{i3}} H_f at random curve points, f1 the reference chart
double reparameterization_residual(const StackyFan3& fan, const DivisorLattice& lat,
                                   const EquivWeights& w, const std::vector<cplx>& q,
                                   const Flag& f1, const Flag& f2, int samples = 6);

struct CriticalPoint {
    cplx X, Y;        // global coordinates
    cplx xhat;        // critical value (chart branch + tropical distance)
    cplx d2x_dyhat2;  // local frame: second derivative of xhat in yhat
    Cone3 sigma;
    int branch;       // index within the cone's |G_sigma| sheets
};

struct RamificationSet {
    std::vector<CriticalPoint> points;
    double max_residual = 0;
};

RamificationSet critical_points(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                                const std::vector<cplx>& q, cplx u1, cplx u2);

enum class CycleKind { gamma, gamma_prime };

struct PathNode {
    double t;
    cplx X, Y;   // chart coordinates
    cplx x, y;   // continuously tracked -log X, -log Y (chart branches)
};

struct ChartCycle {
    CycleKind kind;
    Flag flag;
    std::pair<Rat, Rat> chi;     // character in (u1,u2)-coordinates
    std::vector<PathNode> nodes; // ordered path, increasing t
    cplx c_sigma;                // tropical distance of the chart
    // the first seg_begin_ray and last seg_end_ray nodes are x-driven ray tails
    long seg_begin_ray = 0, seg_end_ray = 0;
    double re_growth_begin = 0, re_growth_end = 0;
};

// chart cycle at small q: gamma (divisor type) or gamma_prime (curve type),
// deck-shifted by chi in M'_sigma. trim_begin/trim_end > 0 stop the walk when
// the tube coordinate passes the gate (for patched cycles); 0 extends the end
// until e^{-Re xhat/Re z} falls below the tail cutoff.
ChartCycle chart_cycle(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                       const std::vector<cplx>& q, const Flag& flag, std::pair<Rat, Rat> chi,
                       CycleKind kind, cplx u1, cplx u2, cplx z, double tail_T = 40.0,
                       double trim_begin = 0, double trim_end = 0);

struct IntegralResult {
    cplx value{0, 0};
    double abs_error = 0;
    double tail_bound = 0;
};

// oscillatory integral of e^{-xhat/z} yhat dxhat over the chart cycle, global
// normalization (tropical-distance prefactor included)
IntegralResult oscillatory_integral(const StackyFan3& fan, const DivisorLattice& lat,
                                    const EquivWeights& w, const std::vector<cplx>& q,
                                    const ChartCycle& cycle, cplx u1, cplx u2, cplx z);

// exact closed-form q-series of the chart integral, comparable with framed classes
CentralChargeSeries chart_integral_series(const StackyFan3& fan, const DivisorLattice& lat,
                                          const EquivWeights& w, const Flag& flag,
                                          std::pair<Rat, Rat> chi, CycleKind kind, long order);

// patched mirror cycle of a divisor or curve generator
struct PatchedCycle {
    CycleKind kind;
    bool closed = false;
    std::vector<std::pair<Flag, std::pair<Rat, Rat>>> charts; // flag + character per chart
};

PatchedCycle mirror_cycle(const StackyFan3& fan, const EquivWeights& w, const SupportClassification& cl,
                          const KClass& generator);

// integral over a patched cycle: chart pieces joined through the connecting
// tubes with branch bookkeeping in global coordinates
IntegralResult patched_integral(const StackyFan3& fan, const DivisorLattice& lat, const EquivWeights& w,
                                const std::vector<cplx>& q, const PatchedCycle& pc, cplx u1, cplx u2, cplx z);

// cycle dump: JSON array of path nodes
std::string cycle_json(const ChartCycle& c);

} // namespace remodel
