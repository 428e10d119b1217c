#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace coha {

// All counts are exact; |C_3(F_43)| ~ 4e19 already exceeds int64.
using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// A caller violated a documented precondition (bad parameters, malformed
// input, mismatched sizes).  CLI exit code 2.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// The request is well-formed but outside the enumeration bounds this tool
// commits to.  CLI exit code 4.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// A mathematical expectation failed: an identity that should hold did not.
// Distinct from infrastructure errors so CI can tell "finding" from "bug".
// CLI exit code 3.
class ExpectationError : public std::runtime_error {
public:
    explicit ExpectationError(const std::string& msg) : std::runtime_error(msg) {}
};

inline BigInt big_pow(const BigInt& base, unsigned long exp) {
    return boost::multiprecision::pow(base, exp);
}

inline BigInt factorial(unsigned n) {
    BigInt r = 1;
    for (unsigned k = 2; k <= n; ++k) r *= k;
    return r;
}

// n·(n-1)···(n-k+1)
inline BigInt falling_factorial(const BigInt& n, unsigned k) {
    BigInt r = 1;
    for (unsigned i = 0; i < k; ++i) r *= n - i;
    return r;
}

inline BigRat rat(long num, long den = 1) { return BigRat(num, den); }

}  // namespace coha
