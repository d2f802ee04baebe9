#include "remodel/lattice.hpp"

namespace remodel {

long det3(const Mat3l& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
         - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
         + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

std::vector<long> smith_diagonal(std::vector<std::vector<long>> m) {
    size_t rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    std::vector<long> diag;
    size_t r0 = 0, c0 = 0;
    while (r0 < rows && c0 < cols) {
        // find a pivot with minimal |value|
        size_t pr = rows, pc = cols;
        long best = 0;
        for (size_t i = r0; i < rows; ++i)
            for (size_t j = c0; j < cols; ++j)
                if (m[i][j] != 0 && (best == 0 || std::abs(m[i][j]) < std::abs(best))) {
                    best = m[i][j]; pr = i; pc = j;
                }
        if (best == 0) break;
        std::swap(m[r0], m[pr]);
        for (size_t i = 0; i < rows; ++i) std::swap(m[i][c0], m[i][pc]);
        bool clean = true;
        for (size_t i = r0 + 1; i < rows; ++i)
            if (m[i][c0] != 0) {
                long q = m[i][c0] / m[r0][c0];
                for (size_t j = c0; j < cols; ++j) m[i][j] -= q * m[r0][j];
                if (m[i][c0] != 0) clean = false;
            }
        for (size_t j = c0 + 1; j < cols; ++j)
            if (m[r0][j] != 0) {
                long q = m[r0][j] / m[r0][c0];
                for (size_t i = r0; i < rows; ++i) m[i][j] -= q * m[i][c0];
                if (m[r0][j] != 0) clean = false;
            }
        if (!clean) continue; // repeat with smaller pivot
        diag.push_back(std::abs(m[r0][c0]));
        ++r0; ++c0;
    }
    // fix divisibility chain d1 | d2 | ...
    for (size_t i = 0; i + 1 < diag.size(); ++i)
        for (size_t j = i + 1; j < diag.size(); ++j)
            if (diag[j] % diag[i] != 0) {
                long g = gcdl(diag[i], diag[j]);
                long l = diag[i] / g * diag[j];
                diag[i] = g;
                diag[j] = l;
            }
    return diag;
}

std::array<Rat, 3> solve3(const Mat3l& B, const Vec3l& v) {
    long d = det3(B);
    if (d == 0) throw std::domain_error("solve3: singular matrix");
    std::array<Rat, 3> out;
    for (int k = 0; k < 3; ++k) {
        Mat3l Bk = B;
        for (int i = 0; i < 3; ++i) Bk(i, k) = v[i];
        out[k] = Rat(det3(Bk), d);
        out[k].canonicalize();
    }
    return out;
}

std::vector<std::vector<Rat>> rational_kernel(const std::vector<std::vector<long>>& m) {
    size_t rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    MatQ a(rows, cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) a(i, j) = rat(m[i][j]);
    // Gauss-Jordan over Q
    std::vector<long> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a(p, c) == 0) ++p;
        if (p == rows) continue;
        for (size_t j = 0; j < cols; ++j) std::swap(a(r, j), a(p, j));
        Rat inv = 1 / a(r, c);
        for (size_t j = 0; j < cols; ++j) a(r, j) *= inv;
        for (size_t i = 0; i < rows; ++i)
            if (i != r && a(i, c) != 0) {
                Rat f = a(i, c);
                for (size_t j = 0; j < cols; ++j) a(i, j) -= f * a(r, j);
            }
        pivot_col.push_back((long)c);
        ++r;
    }
    std::vector<std::vector<Rat>> basis;
    for (size_t c = 0; c < cols; ++c) {
        if (std::find(pivot_col.begin(), pivot_col.end(), (long)c) != pivot_col.end()) continue;
        std::vector<Rat> v(cols, Rat(0));
        v[c] = 1;
        for (size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -a(i, c);
        basis.push_back(std::move(v));
    }
    return basis;
}

Rat bernoulli_number(long m) {
    static std::vector<Rat> cache{Rat(1)};
    while ((long)cache.size() <= m) {
        long n = (long)cache.size();
        // B_n = -1/(n+1) sum_{k<n} C(n+1,k) B_k
        Rat s = 0;
        for (long k = 0; k < n; ++k) s += Rat(binomial(n + 1, k)) * cache[k];
        cache.push_back(-s / Rat(n + 1));
    }
    return cache[m];
}

Rat bernoulli_poly(long m, const Rat& x) {
    Rat s = 0;
    for (long k = 0; k <= m; ++k) s += Rat(binomial(m, k)) * bernoulli_number(k) * rpow(x, m - k);
    return s;
}

} // namespace remodel

namespace remodel {

std::vector<std::vector<long>> integer_kernel(const std::vector<std::vector<long>>& m_in) {
    size_t rows = m_in.size();
    size_t cols = rows ? m_in[0].size() : 0;
    // arbitrary precision to be safe against intermediate growth
    std::vector<std::vector<Int>> m(rows, std::vector<Int>(cols));
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) m[i][j] = m_in[i][j];
    std::vector<std::vector<Int>> u(cols, std::vector<Int>(cols, 0));
    for (size_t j = 0; j < cols; ++j) u[j][j] = 1;

    auto colop = [&](size_t j, size_t k, const Int& f) { // col_j -= f * col_k
        for (size_t i = 0; i < rows; ++i) m[i][j] -= f * m[i][k];
        for (size_t i = 0; i < cols; ++i) u[i][j] -= f * u[i][k];
    };
    auto colswap = [&](size_t j, size_t k) {
        for (size_t i = 0; i < rows; ++i) std::swap(m[i][j], m[i][k]);
        for (size_t i = 0; i < cols; ++i) std::swap(u[i][j], u[i][k]);
    };

    size_t c0 = 0;
    for (size_t r = 0; r < rows && c0 < cols; ++r) {
        while (true) {
            size_t piv = cols;
            for (size_t j = c0; j < cols; ++j)
                if (m[r][j] != 0 && (piv == cols || cmp(abs(m[r][j]), abs(m[r][piv])) < 0)) piv = j;
            if (piv == cols) break; // row is zero on active columns
            colswap(c0, piv);
            bool done = true;
            for (size_t j = c0 + 1; j < cols; ++j)
                if (m[r][j] != 0) {
                    Int f;
                    mpz_fdiv_q(f.get_mpz_t(), m[r][j].get_mpz_t(), m[r][c0].get_mpz_t());
                    colop(j, c0, f);
                    if (m[r][j] != 0) done = false;
                }
            if (done) { ++c0; break; }
        }
    }
    std::vector<std::vector<long>> out;
    for (size_t j = c0; j < cols; ++j) {
        bool zero = true;
        for (size_t i = 0; i < rows; ++i)
            if (m[i][j] != 0) zero = false;
        if (!zero) continue;
        std::vector<long> v(cols);
        for (size_t i = 0; i < cols; ++i) v[i] = to_long(u[i][j]);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Rat> gauss_solve(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
    size_t n = a.size();
    if (n == 0 || a[0].size() != n || b.size() != n) throw std::domain_error("gauss_solve: shape");
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw std::domain_error("gauss_solve: singular system");
        std::swap(a[c], a[p]);
        std::swap(b[c], b[p]);
        Rat inv = 1 / a[c][c];
        for (size_t j = c; j < n; ++j) a[c][j] *= inv;
        b[c] *= inv;
        for (size_t i = 0; i < n; ++i)
            if (i != c && a[i][c] != 0) {
                Rat f = a[i][c];
                for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
                b[i] -= f * b[c];
            }
    }
    return b;
}

long rational_rank(const std::vector<std::vector<Rat>>& rows_in) {
    auto rows = rows_in;
    size_t nr = rows.size();
    if (nr == 0) return 0;
    size_t nc = rows[0].size();
    long rank = 0;
    size_t r = 0;
    for (size_t c = 0; c < nc && r < nr; ++c) {
        size_t p = r;
        while (p < nr && rows[p][c] == 0) ++p;
        if (p == nr) continue;
        std::swap(rows[r], rows[p]);
        Rat inv = 1 / rows[r][c];
        for (size_t j = c; j < nc; ++j) rows[r][j] *= inv;
        for (size_t i = 0; i < nr; ++i)
            if (i != r && rows[i][c] != 0) {
                Rat f = rows[i][c];
                for (size_t j = c; j < nc; ++j) rows[i][j] -= f * rows[r][j];
            }
        ++rank;
        ++r;
    }
    return rank;
}

} // namespace remodel
