#include "remodel/witten.hpp"
#include <algorithm>
#include <map>

namespace remodel {

namespace {

std::map<std::pair<long, std::vector<long>>, Rat> cache;

Rat witten_impl(long g, std::vector<long> k);

Rat lookup(long g, std::vector<long> k) {
    if (g < 0) return 0;
    long n = (long)k.size();
    if (2 * g - 2 + n <= 0) return 0;
    long dim = 3 * g - 3 + n;
    long total = 0;
    for (long x : k) {
        if (x < 0) return 0;
        total += x;
    }
    if (total != dim) return 0;
    std::sort(k.begin(), k.end());
    auto key = std::make_pair(g, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Rat v = witten_impl(g, k);
    cache[key] = v;
    return v;
}

// DVV/Virasoro recursion on the largest index
Rat witten_impl(long g, std::vector<long> k) {
    long n = (long)k.size();
    if (g == 0 && n == 3) return 1; // point
    if (g == 1 && n == 1) return Rat(1, 24);
    // pick d = max entry (sorted ascending: last)
    long d = k.back();
    std::vector<long> rest(k.begin(), k.end() - 1);
    if (d == 0) {
        // string equation
        Rat s = 0;
        for (size_t j = 0; j < rest.size(); ++j) {
            if (rest[j] == 0) continue;
            auto kk = rest;
            kk[j] -= 1;
            s += lookup(g, kk);
        }
        return s;
    }
    // (2d+1)!! <tau_d prod> = sum_j (2(d+k_j)-1)!!/(2k_j-1)!! <tau_{d+k_j-1} ...>
    //   + 1/2 sum_{a+b=d-2} (2a+1)!!(2b+1)!! [ <tau_a tau_b ...>_{g-1}
    //   + sum_{g1+g2=g, I sqcup J} <tau_a I>_{g1} <tau_b J>_{g2} ]
    Rat s = 0;
    for (size_t j = 0; j < rest.size(); ++j) {
        auto kk = rest;
        kk.erase(kk.begin() + j);
        kk.push_back(d + rest[j] - 1);
        s += Rat(double_factorial_odd(d + rest[j])) / Rat(double_factorial_odd(rest[j])) * lookup(g, kk);
    }
    for (long a = 0; a + a <= d - 2; ++a) {
        long b = d - 2 - a;
        if (b < a) break;
        Rat fac = Rat(double_factorial_odd(a + 1)) * Rat(double_factorial_odd(b + 1));
        Rat sym = a == b ? Rat(1, 2) : Rat(1);
        // non-separating
        {
            auto kk = rest;
            kk.push_back(a);
            kk.push_back(b);
            s += sym * fac * lookup(g - 1, kk);
        }
        // separating
        long m = (long)rest.size();
        for (long mask = 0; mask < (1l << m); ++mask)
            for (long g1 = 0; g1 <= g; ++g1) {
                std::vector<long> I{a}, J{b};
                for (long j = 0; j < m; ++j) (mask & (1l << j) ? I : J).push_back(rest[j]);
                Rat t = lookup(g1, I) * lookup(g - g1, J);
                if (t != 0) s += sym * fac * t;
            }
    }
    return s / Rat(double_factorial_odd(d + 1));
}

} // namespace

Rat witten(long g, std::vector<long> k) { return lookup(g, std::move(k)); }

} // namespace remodel
