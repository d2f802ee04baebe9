#include "remodel/limitr.hpp"
#include "remodel/ktheory.hpp"
#include <algorithm>

namespace remodel {

namespace {

// exp of a z-series with zero constant term, coefficients CoeffExpr
std::vector<CoeffExpr> exp_series(const std::vector<CoeffExpr>& e, long order) {
    std::vector<CoeffExpr> r(order + 1);
    r[0] = CoeffExpr::one();
    std::vector<CoeffExpr> pw = r;
    Rat fac = 1;
    for (long k = 1; k <= order; ++k) {
        // pw = e^k / via repeated multiplication
        std::vector<CoeffExpr> next(order + 1);
        for (long i = 0; i <= order; ++i)
            for (long j = 1; i + j <= order; ++j)
                if (j < (long)e.size()) next[i + j] = next[i + j] + pw[i] * e[j];
        pw = std::move(next);
        fac *= k;
        for (long m = 0; m <= order; ++m) r[m] = r[m] + pw[m] * (1 / fac);
    }
    return r;
}

std::vector<CoeffExpr> mul_series(const std::vector<CoeffExpr>& a, const std::vector<CoeffExpr>& b,
                                  long order) {
    std::vector<CoeffExpr> r(order + 1);
    for (long i = 0; i <= order && i < (long)a.size(); ++i)
        for (long j = 0; i + j <= order && j < (long)b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    return r;
}

// twist vectors realizing all characters of G_sigma, as in the pairing basis
std::vector<std::vector<long>> character_reps(const StackyFan3& fan, const Cone3& sigma) {
    auto box = box_elements(fan, sigma);
    long gsz = (long)box.size();
    std::vector<std::vector<Rat>> seen;
    std::vector<std::vector<long>> reps;
    for (long radius = 0; (long)reps.size() < gsz && radius <= 3 * gsz; ++radius) {
        std::vector<std::vector<long>> cands;
        if (radius == 0) cands.push_back(std::vector<long>(fan.num_rays(), 0));
        for (int s = 1; s <= fan.num_rays() && radius > 0; ++s)
            for (long val : {radius, -radius}) {
                std::vector<long> r(fan.num_rays(), 0);
                r[s - 1] = val;
                cands.push_back(r);
            }
        for (auto& r : cands) {
            std::vector<Rat> chars;
            for (auto& v : box) {
                Rat c = 0;
                for (size_t s = 0; s < r.size(); ++s) c += rat(r[s]) * v.c((int)s + 1);
                chars.push_back(rfrac(c));
            }
            if (std::find(seen.begin(), seen.end(), chars) == seen.end()) {
                seen.push_back(chars);
                reps.push_back(r);
            }
            if ((long)reps.size() == gsz) break;
        }
    }
    if ((long)reps.size() != gsz) throw ktheory_error("limit_r: could not realize all characters");
    return reps;
}

} // namespace

std::vector<RMatrixBlock> limit_r(const StackyFan3& fan, const EquivWeights& w, long order) {
    std::vector<RMatrixBlock> out;
    for (size_t kc = 0; kc < fan.cones.size(); ++kc) {
        const Cone3& sigma = fan.cones[kc];
        auto box = box_elements(fan, sigma);
        long gsz = (long)box.size();
        RMatrixBlock blk;
        blk.cone = (int)kc;
        blk.order = order;
        blk.char_reps = character_reps(fan, sigma);
        blk.entry.assign(gsz, std::vector<std::vector<CoeffExpr>>(gsz));

        // per group element h: the Bernoulli exponential factor
        std::vector<std::vector<CoeffExpr>> hfac;
        for (auto& h : box) {
            std::vector<CoeffExpr> e(order + 1);
            for (int j = 0; j < 3; ++j) {
                int i = sigma[j];
                // (z / w_{i,sigma})^m with coefficient (-1)^m/(m(m+1)) B_{m+1}(c_i(h))
                RatFun2 winv = RatFun2::inv_aff(AffForm{w.w((int)kc, i), Rat(0)});
                RatFun2 wpow(Rat(1));
                for (long m = 1; m <= order; ++m) {
                    wpow = wpow * winv;
                    Rat c = bernoulli_poly(m + 1, h.c(i)) * Rat(m % 2 ? -1 : 1, m * (m + 1));
                    e[m] = e[m] + CoeffExpr::from_ratfun(wpow * c);
                }
            }
            hfac.push_back(exp_series(e, order));
        }

        // character values chi_gamma(h) = e^{2 pi i sum_s r_s c_s(h)}
        auto chi = [&](long gamma, long hidx, int sign) {
            Rat arg = 0;
            for (size_t s = 0; s < blk.char_reps[gamma].size(); ++s)
                arg += rat(blk.char_reps[gamma][s]) * box[hidx].c((int)s + 1);
            return CoeffExpr::exp_pi(AffForm{LinForm{}, arg * rat(2 * sign)});
        };

        for (long d = 0; d < gsz; ++d)
            for (long g = 0; g < gsz; ++g) {
                std::vector<CoeffExpr> acc(order + 1);
                for (long h = 0; h < gsz; ++h) {
                    CoeffExpr weight = chi(d, h, +1) * chi(g, h, -1) * Rat(1, gsz);
                    for (long m = 0; m <= order; ++m) acc[m] = acc[m] + weight * hfac[h][m];
                }
                blk.entry[d][g] = std::move(acc);
            }
        out.push_back(std::move(blk));
    }
    return out;
}

bool limit_r_unitary(const RMatrixBlock& blk) {
    long gsz = (long)blk.entry.size();
    long order = blk.order;
    for (long a = 0; a < gsz; ++a)
        for (long b = 0; b < gsz; ++b) {
            // sum_c R_{c,a}(-z) R_{c,b}(z)
            std::vector<CoeffExpr> acc(order + 1);
            for (long c = 0; c < gsz; ++c) {
                std::vector<CoeffExpr> neg = blk.entry[c][a];
                for (long m = 1; m <= order; m += 2) neg[m] = neg[m] * Rat(-1);
                auto prod = mul_series(neg, blk.entry[c][b], order);
                for (long m = 0; m <= order; ++m) acc[m] = acc[m] + prod[m];
            }
            for (long m = 0; m <= order; ++m) {
                CoeffExpr want = (m == 0 && a == b) ? CoeffExpr::one() : CoeffExpr::zero();
                if (!(acc[m] - want).is_zero()) return false;
            }
        }
    return true;
}

} // namespace remodel
