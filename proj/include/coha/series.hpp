#pragma once

#include "coha/common.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace coha::series {

// --- univariate rational functions of u -------------------------------------

struct UniPoly {
    std::vector<BigRat> c;  // c[k] multiplies u^k

    static UniPoly monomial(int degree, const BigRat& coeff = BigRat(1));
    static UniPoly constant(const BigRat& v) { return monomial(0, v); }

    void trim();
    bool is_zero() const;
    int degree() const { return int(c.size()) - 1; }
    BigRat eval(const BigRat& u) const;

    UniPoly operator+(const UniPoly&) const;
    UniPoly operator-(const UniPoly&) const;
    UniPoly operator*(const UniPoly&) const;
    bool operator==(const UniPoly&) const;
};

struct RationalFn {
    UniPoly num, den;

    static RationalFn zero() { return {UniPoly::constant(BigRat(0)), UniPoly::constant(BigRat(1))}; }
    RationalFn operator+(const RationalFn&) const;
    RationalFn operator*(const RationalFn&) const;
    BigRat eval(const BigRat& u) const;  // den(u) must be nonzero
    bool equals(const RationalFn&) const;
};

// --- truncated bivariate Laurent series -------------------------------------
//
// Exact in t up to degree t_order; each t-slice is a Laurent polynomial in u
// with exact rational coefficients, valid for u-exponents at or above the
// slice's floor and genuinely zero above its top term.  u-exponents are kept
// in half-integer units (stored value = 2 x exponent) so odd homological
// degrees are representable.  Reading below the floor throws; truncation is
// never a silent zero.

struct LaurentBiSeries {
    // floor value meaning "the slice is exact all the way down"
    static constexpr int kExact = INT32_MIN / 2;

    int t_order = 0;
    std::vector<std::map<int, BigRat>> slices;  // index = t-degree; key = u_times_2
    std::vector<int> floors;                    // per-slice validity floor (u_times_2)

    explicit LaurentBiSeries(int t_order_);
    static LaurentBiSeries one(int t_order);

    // throws PreconditionError outside the validity window
    BigRat coeff(int t_deg, int u_times_2) const;

    // weakest floor across slices; kExact when every slice is exact
    int u_floor_half() const;

    void set_term(int t_deg, int u_times_2, const BigRat& v);
    void clamp_floor(int floor_half);  // truncate: raise floors to >= floor_half

    LaurentBiSeries operator*(const LaurentBiSeries&) const;
    // requires the t^0 slice to be a single invertible monomial
    LaurentBiSeries inverse() const;

    // true when the two series agree at every point both windows cover
    bool agrees_with(const LaurentBiSeries&) const;
};

// One generator of a free graded-commutative algebra: bidegree
// (t_deg, u_half/2), parity of the homological degree, and multiplicity.
struct Generator {
    int t_deg = 1;
    int u_half = 0;
    bool odd = false;
    int multiplicity = 1;
};

// Hilbert series of the free graded-commutative algebra on the given
// generators: (1 - t^a u^b)^-m per even generator, (1 + t^a u^b)^m per odd
// one.  All t-degrees must be >= 1.
LaurentBiSeries sym_hilbert(const std::vector<Generator>& gens, int N, int K);

// The exponent of u attached to the i-th Chern direction is
// kChernExponentOffset - i; the value is pinned by the count-matching tests.
inline constexpr int kChernExponentOffset = 1;

// prod_{m>=1} prod_{i>=0} (1 - t^m u^(1-i))^-1 truncated to (N, -K).
// The t^n-coefficient evaluated at u = q equals |C_n(F_q)| / |GL_n(F_q)|.
LaurentBiSeries feit_fine_series(int N, int K);

// The same t^n-coefficient as an exact rational function of u.
RationalFn feit_fine_coeff_rational(int n);

// dim H_k^BM(S) for k = 0..4 -- the only input about the surface needed.
struct BettiTable {
    std::array<long, 5> b{0, 0, 0, 0, 0};

    void validate() const;
    BettiTable operator+(const BettiTable& o) const;
};

// Hilbert series of Sym(H_*^BM(S) (x) Theta'), generators of bidegree
// (n, (k-2-2i)/2) with parity k mod 2 and multiplicity b[k].
LaurentBiSeries pbw_series(const BettiTable& betti, int N, int K);

// Number of closed points of degree d of the affine plane over F_q:
// N_d = (1/d) sum_{e|d} mu(d/e) q^(2e).  Checks sum_{d|m} d N_d = q^(2m).
std::vector<BigInt> closed_point_counts(int d_max, const BigInt& q);

// --- truncated univariate power series over Q (variable x) ------------------

struct RatSeries {
    std::vector<BigRat> c;  // c[n] multiplies x^n; fixed truncation length

    explicit RatSeries(int order) : c(std::size_t(order) + 1, BigRat(0)) {}
    int order() const { return int(c.size()) - 1; }
    RatSeries operator*(const RatSeries&) const;
    RatSeries pow(unsigned e) const;
};

// Counting shadow of the factorization property: compares
//   sum_n |C_n(F_q)|/|GL_n(F_q)| x^n
// against
//   prod_{d>=1} [ sum_m |NC_m(F_{q^d})|/|GL_m(F_{q^d})| x^(dm) ]^(N_d(q))
// coefficient by coefficient up to x^N.
struct PowerStructureReport {
    bool equal = false;
    std::vector<BigRat> lhs, rhs;
};

PowerStructureReport power_structure_check(std::uint32_t q, int N);

}  // namespace coha::series
