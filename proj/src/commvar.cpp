#include "coha/commvar.hpp"

#include "coha/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace coha::commvar {

BigInt gl_order(int n, const BigInt& q) {
    if (n < 0) throw PreconditionError("gl_order: n must be >= 0");
    if (q < 2) throw PreconditionError("gl_order: q must be >= 2");
    BigInt qn = big_pow(q, unsigned(n));
    BigInt r = 1;
    BigInt qi = 1;
    for (int i = 0; i < n; ++i) {
        r *= qn - qi;
        qi *= q;
    }
    return r;
}

Variety variety_from_string(const std::string& s) {
    if (s == "commuting") return Variety::commuting;
    if (s == "nilcommuting") return Variety::nilcommuting;
    throw PreconditionError("unknown variety: " + s);
}

Method method_from_string(const std::string& s) {
    if (s == "brute") return Method::brute;
    if (s == "kernel") return Method::kernel;
    if (s == "classes") return Method::classes;
    if (s == "auto") return Method::autodetect;
    throw PreconditionError("unknown method: " + s);
}

std::string to_string(Variety v) {
    return v == Variety::commuting ? "commuting" : "nilcommuting";
}

std::string to_string(Method m) {
    switch (m) {
        case Method::brute: return "brute";
        case Method::kernel: return "kernel";
        case Method::classes: return "classes";
        default: return "auto";
    }
}

namespace {

// q^e as uint64 with an explicit feasibility cap.
std::uint64_t pow_checked(std::uint64_t q, int e, std::uint64_t cap, const char* what) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > cap / q)
            throw InfeasibleError(std::string(what) + ": enumeration size exceeds bound");
        r *= q;
    }
    if (r > cap) throw InfeasibleError(std::string(what) + ": enumeration size exceeds bound");
    return r;
}

}  // namespace

template <class F>
BigInt count_commuting_bruteforce(int n, F field) {
    if (n < 1) throw PreconditionError("count_commuting_bruteforce: n must be >= 1");
    std::uint64_t q = field.order();
    if (n > 2) pow_checked(q, 2 * n * n, 1'000'000'000, "count_commuting_bruteforce");
    std::uint64_t size = pow_checked(q, n * n, UINT64_MAX / 2, "count_commuting_bruteforce");

    return chunked_sum<BigInt>(size * size, [&](std::uint64_t idx) -> BigInt {
        auto A = Matrix<F>::from_index(field, n, n, idx / size);
        auto B = Matrix<F>::from_index(field, n, n, idx % size);
        return A * B == B * A ? 1 : 0;
    });
}

template <class F>
BigInt count_commuting_kernel(int n, F field) {
    if (n < 1 || n > 4) throw PreconditionError("count_commuting_kernel: n must be in [1,4]");
    std::uint64_t q = field.order();
    std::uint64_t size = pow_checked(q, n * n, 100'000'000, "count_commuting_kernel");

    return chunked_sum<BigInt>(size, [&](std::uint64_t idx) -> BigInt {
        auto A = Matrix<F>::from_index(field, n, n, idx);
        int dim_ker = n * n - rank(adjoint_operator(A));
        return big_pow(BigInt(q), unsigned(dim_ker));
    });
}

template <class F>
BigInt count_nilpotent_commuting(int n, F field) {
    if (n < 1 || n > 3) throw PreconditionError("count_nilpotent_commuting: n must be in [1,3]");
    std::uint64_t q = field.order();
    std::uint64_t size = pow_checked(q, n * n, 100'000'000, "count_nilpotent_commuting");

    return chunked_sum<BigInt>(size, [&](std::uint64_t idx) -> BigInt {
        auto A = Matrix<F>::from_index(field, n, n, idx);
        if (!A.is_nilpotent()) return 0;
        auto kernel = kernel_basis(adjoint_operator(A));
        std::uint64_t members = 1;
        for (int i = 0; i < kernel.rows; ++i) members *= q;
        std::uint64_t hits = 0;
        for (std::uint64_t k = 0; k < members; ++k) {
            auto B = unflatten(field, n, row_combination(kernel, k));
            if (B.is_nilpotent()) ++hits;
        }
        return hits;
    });
}

BigInt irreducible_poly_count(int d, const BigInt& q) {
    if (d < 1) throw PreconditionError("irreducible_poly_count: d must be >= 1");
    static constexpr int moebius[] = {0, 1, -1, -1, 0, -1, 1, -1, 0};
    BigInt sum = 0;
    for (int e = 1; e <= d; ++e) {
        if (d % e != 0) continue;
        int mu = moebius[d / e];
        sum += mu * big_pow(q, unsigned(e));
    }
    BigInt n = sum / d;
    if (n * d != sum) throw ExpectationError("irreducible_poly_count: not divisible");
    return n;
}

std::vector<std::vector<int>> partitions_of(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int max_part) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (int part = std::min(remaining, max_part); part >= 1; --part) {
            cur.push_back(part);
            self(self, remaining - part, part);
            cur.pop_back();
        }
    };
    rec(rec, n, n);
    return out;
}

int centralizer_dim(const std::vector<int>& lambda) {
    int z = 0;
    for (int a : lambda)
        for (int b : lambda) z += std::min(a, b);
    return z;
}

BigInt nilpotent_centralizer_order(const std::vector<int>& lambda, const BigInt& q) {
    // a_lambda(q) = q^(z - sum_i T(m_i)) * prod_i prod_{k<=m_i} (q^k - 1),
    // m_i the multiplicity of part i, z = sum min(lambda_i, lambda_j).
    std::map<int, int> mult;
    for (int part : lambda) ++mult[part];
    int exponent = centralizer_dim(lambda);
    BigInt factor = 1;
    for (auto [part, m] : mult) {
        exponent -= m * (m + 1) / 2;
        for (int k = 1; k <= m; ++k) factor *= big_pow(q, unsigned(k)) - 1;
    }
    return big_pow(q, unsigned(exponent)) * factor;
}

namespace {

// One similarity-class shape: for each (block degree d, Jordan type lambda),
// how many distinct irreducibles of degree d carry that lambda.
struct ClassShape {
    // slot = (d, lambda); m = number of distinct irreducibles so labelled
    std::vector<std::pair<std::pair<int, std::vector<int>>, int>> slots;
};

std::vector<ClassShape> class_shapes(int n) {
    // All (d, lambda) pairs with d * |lambda| <= n, in a fixed order.
    std::vector<std::pair<int, std::vector<int>>> slot_kinds;
    for (int d = 1; d <= n; ++d)
        for (int s = 1; d * s <= n; ++s)
            for (auto& lambda : partitions_of(s)) slot_kinds.emplace_back(d, lambda);

    std::vector<ClassShape> shapes;
    ClassShape cur;
    auto rec = [&](auto&& self, std::size_t kind, int remaining) -> void {
        if (remaining == 0) {
            shapes.push_back(cur);
            return;
        }
        if (kind >= slot_kinds.size()) return;
        const auto& [d, lambda] = slot_kinds[kind];
        int size = 0;
        for (int part : lambda) size += part;
        const int weight = d * size;
        for (int m = 0; m * weight <= remaining; ++m) {
            if (m > 0) cur.slots.emplace_back(slot_kinds[kind], m);
            self(self, kind + 1, remaining - m * weight);
            if (m > 0) cur.slots.pop_back();
        }
    };
    rec(rec, 0, n);
    return shapes;
}

}  // namespace

BigInt count_commuting_classes(int n, const BigInt& q) {
    if (n < 1 || n > 4) throw PreconditionError("count_commuting_classes: n must be in [1,4]");
    if (q < 2) throw PreconditionError("count_commuting_classes: q must be >= 2");
    const BigInt gl = gl_order(n, q);

    BigInt total = 0;
    for (const auto& shape : class_shapes(n)) {
        // number of classes with this shape: per degree d, choose disjoint
        // sets of distinct irreducibles for the lambdas attached to d
        std::map<int, int> taken_of_degree;
        BigInt class_count = 1;
        BigInt centralizer_order = 1;
        int centralizer_dimension = 0;
        for (const auto& [kind, m] : shape.slots) {
            const auto& [d, lambda] = kind;
            BigInt nd = irreducible_poly_count(d, q);
            int& taken = taken_of_degree[d];
            BigInt ways = falling_factorial(nd - taken, unsigned(m));
            BigInt perms = factorial(unsigned(m));
            if (ways % perms != 0)
                throw ExpectationError("count_commuting_classes: non-integer class count");
            class_count *= ways / perms;
            taken += m;
            BigInt qd = big_pow(q, unsigned(d));
            for (int i = 0; i < m; ++i) {
                centralizer_order *= nilpotent_centralizer_order(lambda, qd);
                centralizer_dimension += d * centralizer_dim(lambda);
            }
        }
        BigInt orbit = gl / centralizer_order;
        if (orbit * centralizer_order != gl)
            throw ExpectationError("count_commuting_classes: centralizer does not divide |GL|");
        total += class_count * orbit * big_pow(q, unsigned(centralizer_dimension));
    }
    return total;
}

namespace {

template <class F>
Matrix<F> jordan_nilpotent(F field, const std::vector<int>& lambda) {
    int n = 0;
    for (int part : lambda) n += part;
    Matrix<F> J(field, n, n);
    int offset = 0;
    for (int part : lambda) {
        for (int i = 0; i + 1 < part; ++i) J(offset + i, offset + i + 1) = field.one();
        offset += part;
    }
    return J;
}

}  // namespace

template <class F>
BigInt count_nilpotent_commuting_classes(int n, F field) {
    if (n < 1 || n > 3)
        throw PreconditionError("count_nilpotent_commuting_classes: n must be in [1,3]");
    const BigInt q = BigInt(field.order());
    const BigInt gl = gl_order(n, q);

    auto partitions = partitions_of(n);
    // total nilpotent matrix count, used as the fiber over A = 0
    BigInt nilpotent_total = 0;
    for (const auto& lambda : partitions) {
        BigInt a = nilpotent_centralizer_order(lambda, q);
        BigInt orbit = gl / a;
        if (orbit * a != gl)
            throw ExpectationError("nilpotent orbit size: centralizer does not divide |GL|");
        nilpotent_total += orbit;
    }
    if (nilpotent_total != big_pow(q, unsigned(n * n - n)))
        throw ExpectationError("nilpotent matrix count != q^(n^2-n)");

    BigInt total = 0;
    for (const auto& lambda : partitions) {
        BigInt orbit = gl / nilpotent_centralizer_order(lambda, q);
        BigInt fiber;
        if (int(lambda.size()) == n) {
            fiber = nilpotent_total;  // A = 0: every nilpotent B commutes
        } else {
            auto J = jordan_nilpotent(field, lambda);
            auto kernel = kernel_basis(adjoint_operator(J));
            std::uint64_t members =
                pow_checked(field.order(), kernel.rows, 100'000'000,
                            "count_nilpotent_commuting_classes");
            fiber = chunked_sum<BigInt>(members, [&](std::uint64_t k) -> BigInt {
                auto B = unflatten(field, n, row_combination(kernel, k));
                return B.is_nilpotent() ? 1 : 0;
            });
        }
        total += orbit * fiber;
    }
    return total;
}

namespace {

template <class F>
BigInt count_with_field(Variety v, int n, F field, Method m) {
    switch (m) {
        case Method::brute:
            if (v == Variety::nilcommuting)
                throw PreconditionError("brute method is only wired for the commuting variety");
            return count_commuting_bruteforce(n, field);
        case Method::kernel:
            if (v == Variety::nilcommuting)
                return count_nilpotent_commuting(n, field);
            return count_commuting_kernel(n, field);
        case Method::classes:
        case Method::autodetect:
            if (v == Variety::nilcommuting) return count_nilpotent_commuting_classes(n, field);
            return count_commuting_classes(n, BigInt(field.order()));
    }
    throw PreconditionError("unknown method");
}

}  // namespace

BigInt count_points(Variety v, int n, std::uint32_t q, Method m) {
    if (q == 4) return count_with_field(v, n, GF4{}, m);
    return count_with_field(v, n, PrimeField(q), m);
}

int CountPolynomial::degree() const {
    for (int k = int(coeffs.size()); k-- > 0;)
        if (coeffs[k] != 0) return k;
    return -1;
}

BigInt CountPolynomial::eval(const BigInt& q) const {
    BigInt r = 0;
    for (int k = int(coeffs.size()); k-- > 0;) r = r * q + coeffs[k];
    return r;
}

namespace {

bool classes_feasible(Variety v, int n, std::uint32_t q) {
    if (v == Variety::commuting) return true;
    // nilcommuting fiber enumeration walks q^centralizer_dim(lambda) members
    // for every non-scalar Jordan type
    for (const auto& lambda : partitions_of(n)) {
        if (int(lambda.size()) == n) continue;
        double size = std::pow(double(q), centralizer_dim(lambda));
        if (size > 100'000'000.0) return false;
    }
    return true;
}

}  // namespace

CountPolynomial interpolate_count_polynomial(Variety v, int n, int degree_bound) {
    if (degree_bound < 0) throw PreconditionError("interpolate: degree_bound must be >= 0");
    const int points_needed = degree_bound + 2;  // fit through all but one, verify at the last

    std::vector<std::uint32_t> primes;
    for (std::uint32_t c = 2; int(primes.size()) < points_needed; ++c) {
        if (c > 10'000)
            throw InfeasibleError("interpolate: not enough feasible primes for this degree");
        if (is_prime_u32(c) && classes_feasible(v, n, c)) primes.push_back(c);
    }

    std::vector<BigInt> counts;
    counts.reserve(primes.size());
    for (std::uint32_t p : primes)
        counts.push_back(count_points(v, n, p, Method::classes));

    // Lagrange through the first degree_bound + 1 points, in coefficient form.
    const int k = degree_bound + 1;
    std::vector<BigRat> acc(std::size_t(k), BigRat(0));
    for (int i = 0; i < k; ++i) {
        std::vector<BigRat> basis{BigRat(1)};
        BigRat denom(1);
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            // basis *= (x - x_j)
            std::vector<BigRat> next(basis.size() + 1, BigRat(0));
            for (std::size_t t = 0; t < basis.size(); ++t) {
                next[t + 1] += basis[t];
                next[t] -= basis[t] * BigInt(primes[j]);
            }
            basis = std::move(next);
            denom *= BigRat(BigInt(primes[i]) - BigInt(primes[j]));
        }
        BigRat scale = BigRat(counts[i]) / denom;
        for (std::size_t t = 0; t < basis.size(); ++t) acc[t] += basis[t] * scale;
    }

    CountPolynomial poly;
    poly.primes_used.assign(primes.begin(), primes.end() - 1);
    poly.holdout_prime = primes.back();
    poly.coeffs.reserve(acc.size());
    for (const BigRat& c : acc) {
        if (boost::multiprecision::denominator(c) != 1)
            throw ExpectationError(
                "interpolate: non-integer coefficients; degree_bound too small or counting bug");
        poly.coeffs.push_back(boost::multiprecision::numerator(c));
    }
    if (poly.eval(BigInt(poly.holdout_prime)) != counts.back())
        throw ExpectationError(
            "interpolate: held-out prime mismatch; degree_bound too small or counting bug");
    return poly;
}

// the two fields used by the workbench
template BigInt count_commuting_bruteforce<PrimeField>(int, PrimeField);
template BigInt count_commuting_bruteforce<GF4>(int, GF4);
template BigInt count_commuting_kernel<PrimeField>(int, PrimeField);
template BigInt count_commuting_kernel<GF4>(int, GF4);
template BigInt count_nilpotent_commuting<PrimeField>(int, PrimeField);
template BigInt count_nilpotent_commuting<GF4>(int, GF4);
template BigInt count_nilpotent_commuting_classes<PrimeField>(int, PrimeField);
template BigInt count_nilpotent_commuting_classes<GF4>(int, GF4);

}  // namespace coha::commvar
