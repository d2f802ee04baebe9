#pragma once

#include "remodel/linform.hpp"
#include <map>
#include <array>
#include <vector>
#include <string>

namespace remodel {

// affine form a*U1 + b*U2 + c in the scaled parameters U1 = u1/z, U2 = u2/z
struct AffForm {
    LinForm lin;
    Rat cst;

    AffForm() : cst(0) {}
    AffForm(LinForm l, Rat c) : lin(std::move(l)), cst(std::move(c)) {}
    explicit AffForm(Rat c) : cst(std::move(c)) {}

    bool is_const() const { return lin.is_zero(); }
    cplx eval(cplx u1, cplx u2, cplx z) const { return lin.eval(u1 / z, u2 / z) + to_double(cst); }

    AffForm operator+(const Rat& k) const { return {lin, cst + k}; }
    AffForm operator-(const Rat& k) const { return {lin, cst - k}; }
    AffForm operator+(const AffForm& o) const { return {lin + o.lin, cst + o.cst}; }
    AffForm operator-(const AffForm& o) const { return {lin - o.lin, cst - o.cst}; }
    AffForm operator-() const { return {-lin, -cst}; }
    AffForm operator*(const Rat& k) const { return {lin * k, cst * k}; }
    bool operator==(const AffForm& o) const { return lin == o.lin && cst == o.cst; }
    bool operator<(const AffForm& o) const { return lin != o.lin ? lin < o.lin : cst < o.cst; }
};

std::string to_string(const AffForm& f);

// polynomial in (U1, U2) over Q
struct Poly2 {
    std::map<std::array<int, 2>, Rat> c;

    Poly2() {}
    explicit Poly2(Rat k) { if (k != 0) c[{0, 0}] = std::move(k); }
    static Poly2 from_aff(const AffForm& f);

    bool is_zero() const { return c.empty(); }
    void trim();
    Poly2 operator+(const Poly2& o) const;
    Poly2 operator-(const Poly2& o) const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 operator*(const Rat& k) const;
    Poly2 deriv(int var) const;
    cplx eval(cplx U1, cplx U2) const;
    bool operator==(const Poly2& o) const { return c == o.c; }
    // exact division by an affine form; false if not divisible
    bool divide_by_aff(const AffForm& f, Poly2& quotient) const;
    std::string str() const;
};

// rational function num / prod_f f^mult with affine denominator factors
struct RatFun2 {
    Poly2 num;
    std::map<AffForm, int> den; // factor -> multiplicity >= 1

    RatFun2() {}
    explicit RatFun2(Rat k) : num(std::move(k)) {}
    explicit RatFun2(Poly2 p) : num(std::move(p)) {}
    static RatFun2 from_aff(const AffForm& f) { return RatFun2(Poly2::from_aff(f)); }
    static RatFun2 inv_aff(const AffForm& f);

    bool is_zero() const { return num.is_zero(); }
    void reduce(); // cancel affine factors dividing the numerator
    RatFun2 operator+(const RatFun2& o) const;
    RatFun2 operator-(const RatFun2& o) const;
    RatFun2 operator*(const RatFun2& o) const;
    RatFun2 operator*(const Rat& k) const;
    RatFun2 div_aff(const AffForm& f) const;
    RatFun2 deriv(int var) const; // d/dU_var, var in {0,1}
    cplx eval(cplx U1, cplx U2) const;
    bool operator==(const RatFun2& o) const;
    std::string str() const;
};

// Exact scalar: sum of terms  ratfun(U1,U2) * e^{pi i (lin + phase)} * (2 pi)^k * prod Gamma(arg)^e.
// Gamma arguments are normalized so the constant part lies in (0,1]; phases are
// normalized to [0,1) with signs folded into the rational part. Zero testing
// collapses rational-phase combinations through the cyclotomic relations.
class CoeffExpr {
public:
    struct Key {
        int two_pi = 0;
        LinForm expi_lin;
        Rat phase{0}; // e^{pi i phase}, phase in [0,1)
        std::map<AffForm, int> gammas;
        bool operator<(const Key& o) const;
        bool operator==(const Key& o) const;
    };

    CoeffExpr() {}

    static CoeffExpr zero() { return CoeffExpr(); }
    static CoeffExpr one() { return scalar(Rat(1)); }
    static CoeffExpr scalar(const Rat& k);
    static CoeffExpr from_ratfun(RatFun2 r);
    static CoeffExpr exp_pi(const AffForm& arg);        // e^{pi i arg}
    static CoeffExpr gamma(const AffForm& arg, int exponent = 1);
    static CoeffExpr two_pi_i(int k);                    // (2 pi i)^k, k may be negative
    static CoeffExpr minus_two_pi_i(int k);              // (-2 pi i)^k

    bool is_zero() const;
    bool operator==(const CoeffExpr& o) const { return (*this - o).is_zero(); }
    CoeffExpr operator+(const CoeffExpr& o) const;
    CoeffExpr operator-(const CoeffExpr& o) const;
    CoeffExpr operator*(const CoeffExpr& o) const;
    CoeffExpr operator*(const Rat& k) const;
    CoeffExpr operator-() const { return *this * Rat(-1); }

    cplx eval(cplx u1, cplx u2, cplx z) const;
    size_t term_count() const { return terms_.size(); }
    std::string str() const;

    const std::map<Key, RatFun2>& terms() const { return terms_; }

private:
    std::map<Key, RatFun2> terms_;
    void add_term(Key k, RatFun2 r);
    friend CoeffExpr normalized_gamma_product(const CoeffExpr& e);
};

// cyclotomic polynomial Phi_n as integer coefficients (ascending)
std::vector<Rat> cyclotomic_poly(long n);

} // namespace remodel
