#pragma once

#include "coha/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace coha::commvar {

// |GL_n(F_q)| = prod_{i<n} (q^n - q^i);  gl_order(0, q) = 1.
BigInt gl_order(int n, const BigInt& q);

// An F_q-point of the commuting variety: an ordered pair of commuting
// n x n matrices, i.e. a length-n module over F_q[x,y].
template <class F>
struct CommPair {
    Matrix<F> A, B;

    CommPair(Matrix<F> a, Matrix<F> b) : A(std::move(a)), B(std::move(b)) {
        if (A.rows != A.cols || B.rows != B.cols || A.rows != B.rows)
            throw PreconditionError("CommPair: matrices must be square of equal size");
        if (!(A.field == B.field)) throw PreconditionError("CommPair: field mismatch");
        if (!(A * B == B * A)) throw PreconditionError("CommPair: matrices do not commute");
    }

    int size() const { return A.rows; }
    bool operator==(const CommPair& o) const { return A == o.A && B == o.B; }
};

enum class Variety { commuting, nilcommuting };
enum class Method { brute, kernel, classes, autodetect };

Variety variety_from_string(const std::string& s);
Method method_from_string(const std::string& s);
std::string to_string(Variety v);
std::string to_string(Method m);

// --- enumeration counters -------------------------------------------------

// Full scan of all q^(2n^2) ordered pairs.  The ground-truth oracle.
template <class F>
BigInt count_commuting_bruteforce(int n, F field);

// |C_n(F_q)| = sum_A q^(dim ker ad_A); scans the q^(n^2) matrices A.
template <class F>
BigInt count_commuting_kernel(int n, F field);

// |NC_n(F_q)|: scan A with A^n = 0; for each, walk ker(ad_A) and count the
// members B with B^n = 0.
template <class F>
BigInt count_nilpotent_commuting(int n, F field);

// --- similarity-class counters ---------------------------------------------
//
// Same counts through the decomposition of M_n(F_q) into similarity classes
// (one class per assignment of partitions to distinct monic irreducibles):
// |C_n| = sum over classes of orbit_size * q^(dim centralizer).  Runs in
// about q^3 work, which is what makes interpolation through 14 primes
// possible; cross-checked against the enumeration counters wherever both run.

// Number of monic irreducible polynomials of degree d over F_q.
BigInt irreducible_poly_count(int d, const BigInt& q);

// Order of the centralizer in GL_{|lambda|}(F_q) of a nilpotent matrix with
// Jordan type lambda.
BigInt nilpotent_centralizer_order(const std::vector<int>& lambda, const BigInt& q);

// dim of the full matrix centralizer of a nilpotent of type lambda:
// sum_{i,j} min(lambda_i, lambda_j).
int centralizer_dim(const std::vector<int>& lambda);

std::vector<std::vector<int>> partitions_of(int n);

BigInt count_commuting_classes(int n, const BigInt& q);

template <class F>
BigInt count_nilpotent_commuting_classes(int n, F field);

// --- dispatch ---------------------------------------------------------------

// q must be a prime or 4 (the one extension field shipped).  autodetect
// resolves to the classes route, which is feasible everywhere the caps allow.
BigInt count_points(Variety v, int n, std::uint32_t q, Method m = Method::autodetect);

// --- count polynomials ------------------------------------------------------

struct CountPolynomial {
    std::vector<BigInt> coeffs;  // coeffs[k] multiplies q^k
    std::vector<std::uint32_t> primes_used;
    std::uint32_t holdout_prime = 0;

    int degree() const;
    BigInt eval(const BigInt& q) const;
};

// Exact Lagrange interpolation of q -> count(n, q) through
// degree_bound + 1 primes, validated at one held-out prime.  Throws
// ExpectationError on a held-out mismatch or non-integer coefficients.
CountPolynomial interpolate_count_polynomial(Variety v, int n, int degree_bound);

}  // namespace coha::commvar
