#pragma once

#include "coha/common.hpp"

#include <cstdint>
#include <string>

namespace coha {

inline bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// The prime field F_p with a runtime modulus.  Elements are residues in
// [0, p) stored as uint32; all arithmetic is exact mod p.
struct PrimeField {
    std::uint32_t p;

    using Elem = std::uint32_t;

    explicit PrimeField(std::uint32_t modulus) : p(modulus) {
        if (!is_prime_u32(modulus))
            throw PreconditionError("PrimeField: modulus " + std::to_string(modulus) +
                                    " is not prime");
    }

    std::uint64_t order() const { return p; }
    std::string name() const { return "F" + std::to_string(p); }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem add(Elem a, Elem b) const {
        std::uint64_t s = std::uint64_t(a) + b;
        return s >= p ? Elem(s - p) : Elem(s);
    }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p - b; }
    Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
    Elem mul(Elem a, Elem b) const { return Elem((std::uint64_t(a) * b) % p); }
    Elem pow(Elem a, std::uint64_t e) const {
        Elem r = 1, b = a;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }
    Elem inv(Elem a) const {
        if (a == 0) throw PreconditionError("PrimeField::inv of zero");
        return pow(a, p - 2);
    }
    // Reduction of an arbitrary signed integer.
    Elem from_int(long long v) const {
        long long r = v % (long long)p;
        if (r < 0) r += p;
        return Elem(r);
    }
    Elem from_index(std::uint64_t i) const { return Elem(i); }
    std::uint64_t to_index(Elem a) const { return a; }

    bool operator==(const PrimeField&) const = default;
};

// F_4 = F_2[z]/(z^2+z+1).  Element a+bz is encoded as the bit pair a|(b<<1),
// so 0,1,2,3 stand for 0, 1, z, z+1.  Same interface as PrimeField, which is
// all the matrix layer needs.
struct GF4 {
    using Elem = std::uint8_t;

    std::uint64_t order() const { return 4; }
    std::string name() const { return "F4"; }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem add(Elem a, Elem b) const { return a ^ b; }
    Elem sub(Elem a, Elem b) const { return a ^ b; }
    Elem neg(Elem a) const { return a; }
    Elem mul(Elem a, Elem b) const {
        // z^2 = z+1
        static constexpr Elem table[4][4] = {
            {0, 0, 0, 0}, {0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
        return table[a][b];
    }
    Elem inv(Elem a) const {
        if (a == 0) throw PreconditionError("GF4::inv of zero");
        static constexpr Elem table[4] = {0, 1, 3, 2};
        return table[a];
    }
    Elem from_index(std::uint64_t i) const { return Elem(i); }
    std::uint64_t to_index(Elem a) const { return a; }

    bool operator==(const GF4&) const = default;
};

}  // namespace coha
