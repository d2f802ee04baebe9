#pragma once

#include "remodel/rational.hpp"

namespace remodel {

// exact linear form a*u1 + b*u2 in the equivariant parameters
struct LinForm {
    Rat a, b;

    LinForm() : a(0), b(0) {}
    LinForm(Rat a_, Rat b_) : a(std::move(a_)), b(std::move(b_)) {}

    bool is_zero() const { return a == 0 && b == 0; }
    cplx eval(cplx u1, cplx u2) const { return to_double(a) * u1 + to_double(b) * u2; }

    LinForm operator+(const LinForm& o) const { return {a + o.a, b + o.b}; }
    LinForm operator-(const LinForm& o) const { return {a - o.a, b - o.b}; }
    LinForm operator-() const { return {-a, -b}; }
    LinForm operator*(const Rat& s) const { return {a * s, b * s}; }
    bool operator==(const LinForm& o) const { return a == o.a && b == o.b; }
    bool operator!=(const LinForm& o) const { return !(*this == o); }
    bool operator<(const LinForm& o) const { return a != o.a ? a < o.a : b < o.b; }
};

inline LinForm operator*(const Rat& s, const LinForm& f) { return f * s; }

inline std::string to_string(const LinForm& f) {
    return rat_str(f.a) + "*u1 + " + rat_str(f.b) + "*u2";
}

} // namespace remodel
