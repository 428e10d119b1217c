#include "coha/series.hpp"

#include "coha/commvar.hpp"

#include <algorithm>

namespace coha::series {

// --- UniPoly / RationalFn ----------------------------------------------------

UniPoly UniPoly::monomial(int degree, const BigRat& coeff) {
    if (degree < 0) throw PreconditionError("UniPoly: negative degree");
    UniPoly p;
    p.c.assign(std::size_t(degree) + 1, BigRat(0));
    p.c[degree] = coeff;
    return p;
}

void UniPoly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

bool UniPoly::is_zero() const {
    for (const auto& x : c)
        if (x != 0) return false;
    return true;
}

BigRat UniPoly::eval(const BigRat& u) const {
    BigRat r = 0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * u + c[k];
    return r;
}

UniPoly UniPoly::operator+(const UniPoly& o) const {
    UniPoly r;
    r.c.resize(std::max(c.size(), o.c.size()), BigRat(0));
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
    r.trim();
    return r;
}

UniPoly UniPoly::operator-(const UniPoly& o) const {
    UniPoly r;
    r.c.resize(std::max(c.size(), o.c.size()), BigRat(0));
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] -= o.c[i];
    r.trim();
    return r;
}

UniPoly UniPoly::operator*(const UniPoly& o) const {
    UniPoly r;
    if (is_zero() || o.is_zero()) return r;
    r.c.assign(c.size() + o.c.size() - 1, BigRat(0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    }
    r.trim();
    return r;
}

bool UniPoly::operator==(const UniPoly& o) const {
    return (*this - o).is_zero();
}

RationalFn RationalFn::operator+(const RationalFn& o) const {
    return {num * o.den + o.num * den, den * o.den};
}

RationalFn RationalFn::operator*(const RationalFn& o) const {
    return {num * o.num, den * o.den};
}

BigRat RationalFn::eval(const BigRat& u) const {
    BigRat d = den.eval(u);
    if (d == 0) throw PreconditionError("RationalFn::eval: pole");
    return num.eval(u) / d;
}

bool RationalFn::equals(const RationalFn& o) const {
    return num * o.den == o.num * den;
}

// --- LaurentBiSeries ---------------------------------------------------------

LaurentBiSeries::LaurentBiSeries(int t_order_) : t_order(t_order_) {
    if (t_order < 0) throw PreconditionError("LaurentBiSeries: negative t_order");
    slices.resize(std::size_t(t_order) + 1);
    floors.assign(std::size_t(t_order) + 1, kExact);
}

LaurentBiSeries LaurentBiSeries::one(int t_order) {
    LaurentBiSeries s(t_order);
    s.slices[0][0] = 1;
    return s;
}

BigRat LaurentBiSeries::coeff(int t_deg, int u_times_2) const {
    if (t_deg < 0 || t_deg > t_order)
        throw PreconditionError("LaurentBiSeries::coeff: t-degree outside truncation");
    if (u_times_2 < floors[t_deg])
        throw PreconditionError("LaurentBiSeries::coeff: u-exponent below validity window");
    auto it = slices[t_deg].find(u_times_2);
    return it == slices[t_deg].end() ? BigRat(0) : it->second;
}

int LaurentBiSeries::u_floor_half() const {
    int f = kExact;
    for (int v : floors) f = std::max(f, v);
    return f;
}

void LaurentBiSeries::set_term(int t_deg, int u_times_2, const BigRat& v) {
    if (t_deg < 0 || t_deg > t_order)
        throw PreconditionError("LaurentBiSeries::set_term: t-degree outside truncation");
    if (v == 0)
        slices[t_deg].erase(u_times_2);
    else
        slices[t_deg][u_times_2] = v;
}

void LaurentBiSeries::clamp_floor(int floor_half) {
    for (int d = 0; d <= t_order; ++d) {
        floors[d] = std::max(floors[d], floor_half);
        std::erase_if(slices[d], [&](const auto& kv) { return kv.first < floors[d]; });
    }
}

namespace {

// highest stored exponent of a slice, or nullopt for an identically-zero one
std::optional<int> slice_top(const std::map<int, BigRat>& s) {
    if (s.empty()) return std::nullopt;
    return s.rbegin()->first;
}

// validity floor of the product of two slices with windows (f1, top1), (f2, top2)
int pair_floor(int f1, std::optional<int> top1, int f2, std::optional<int> top2) {
    int floor = LaurentBiSeries::kExact;
    if (f2 != LaurentBiSeries::kExact && top1)
        floor = std::max(floor, f2 + *top1);
    if (f1 != LaurentBiSeries::kExact && top2)
        floor = std::max(floor, f1 + *top2);
    // a slice with a finite floor but no stored terms can still hide unknown
    // terms below its floor; the convolution is then unknown below f + f'
    if (f1 != LaurentBiSeries::kExact && !top1 && f2 != LaurentBiSeries::kExact)
        floor = std::max(floor, f1 + f2);
    if (f2 != LaurentBiSeries::kExact && !top2 && f1 != LaurentBiSeries::kExact)
        floor = std::max(floor, f1 + f2);
    return floor;
}

}  // namespace

LaurentBiSeries LaurentBiSeries::operator*(const LaurentBiSeries& o) const {
    LaurentBiSeries r(std::min(t_order, o.t_order));
    for (int d = 0; d <= r.t_order; ++d) {
        int floor = kExact;
        for (int d1 = 0; d1 <= d; ++d1)
            floor = std::max(floor, pair_floor(floors[d1], slice_top(slices[d1]),
                                               o.floors[d - d1], slice_top(o.slices[d - d1])));
        r.floors[d] = floor;
        std::map<int, BigRat> conv;
        for (int d1 = 0; d1 <= d; ++d1)
            for (const auto& [e1, c1] : slices[d1])
                for (const auto& [e2, c2] : o.slices[d - d1]) conv[e1 + e2] += c1 * c2;
        for (auto& [e, c] : conv)
            if (e >= floor && c != 0) r.slices[d][e] = c;
    }
    return r;
}

LaurentBiSeries LaurentBiSeries::inverse() const {
    if (slices[0].size() != 1 || floors[0] != kExact)
        throw PreconditionError(
            "LaurentBiSeries::inverse: t^0 slice must be an exact invertible monomial");
    auto [e0, c0] = *slices[0].begin();
    if (c0 == 0) throw PreconditionError("LaurentBiSeries::inverse: zero leading term");

    LaurentBiSeries inv(t_order);
    inv.slices[0][-e0] = 1 / c0;

    for (int d = 1; d <= t_order; ++d) {
        // inv[d] = -(1/c0) u^(-e0) * sum_{j=1..d} s[j] * inv[d-j]
        std::map<int, BigRat> acc;
        int floor = kExact;
        for (int j = 1; j <= d; ++j) {
            floor = std::max(floor, pair_floor(floors[j], slice_top(slices[j]),
                                               inv.floors[d - j], slice_top(inv.slices[d - j])));
            for (const auto& [e1, c1] : slices[j])
                for (const auto& [e2, c2] : inv.slices[d - j]) acc[e1 + e2] += c1 * c2;
        }
        if (floor != kExact) floor -= e0;
        inv.floors[d] = floor;
        for (auto& [e, c] : acc) {
            if (c == 0) continue;
            int shifted = e - e0;
            if (shifted >= floor) inv.slices[d][shifted] = -c / c0;
        }
    }
    return inv;
}

bool LaurentBiSeries::agrees_with(const LaurentBiSeries& o) const {
    int d_max = std::min(t_order, o.t_order);
    for (int d = 0; d <= d_max; ++d) {
        int lo = std::max(floors[d], o.floors[d]);
        for (const auto* side : {&slices[d], &o.slices[d]})
            for (const auto& [e, c] : *side)
                if (e >= lo && coeff(d, e) != o.coeff(d, e)) return false;
    }
    return true;
}

// --- constructors ------------------------------------------------------------

LaurentBiSeries sym_hilbert(const std::vector<Generator>& gens, int N, int K) {
    if (N < 0 || K < 0) throw PreconditionError("sym_hilbert: N and K must be >= 0");
    LaurentBiSeries acc = LaurentBiSeries::one(N);
    for (const auto& g : gens) {
        if (g.t_deg < 1)
            throw PreconditionError("sym_hilbert: generator with t-degree 0 rejected");
        if (g.multiplicity < 0) throw PreconditionError("sym_hilbert: negative multiplicity");
        if (g.multiplicity == 0) continue;
        LaurentBiSeries factor(N);
        const unsigned m = unsigned(g.multiplicity);
        for (int k = 0; k * g.t_deg <= N; ++k) {
            BigInt binom;
            if (g.odd) {
                if (unsigned(k) > m) break;
                binom = falling_factorial(BigInt(m), unsigned(k)) / factorial(unsigned(k));
            } else {
                binom = falling_factorial(BigInt(m) + k - 1, unsigned(k)) / factorial(unsigned(k));
            }
            factor.set_term(k * g.t_deg, k * g.u_half, BigRat(binom));
        }
        acc = acc * factor;
    }
    return acc;
}

LaurentBiSeries feit_fine_series(int N, int K) {
    if (N < 1 || K < 0) throw PreconditionError("feit_fine_series: need N >= 1, K >= 0");
    std::vector<Generator> gens;
    // members of a contributing multiset sit at exponent >= -K - (N-1), so
    // Chern indices i <= K + N cover the whole window
    for (int m = 1; m <= N; ++m)
        for (int i = 0; i <= K + N; ++i)
            gens.push_back({m, 2 * (kChernExponentOffset - i), false, 1});
    LaurentBiSeries s = sym_hilbert(gens, N, K);
    s.clamp_floor(-2 * K);
    return s;
}

RationalFn feit_fine_coeff_rational(int n) {
    if (n < 0) throw PreconditionError("feit_fine_coeff_rational: n must be >= 0");
    // R_k = h_k(u, 1, u^-1, ...) = u^(k + k(k+1)/2) / prod_{j<=k} (u^j - 1)
    std::vector<RationalFn> R(std::size_t(n) + 1);
    R[0] = {UniPoly::constant(BigRat(1)), UniPoly::constant(BigRat(1))};
    for (int k = 1; k <= n; ++k) {
        UniPoly den = R[k - 1].den * (UniPoly::monomial(k) - UniPoly::constant(BigRat(1)));
        R[k] = {UniPoly::monomial(k + k * (k + 1) / 2), den};
    }

    // sum over (k_1, ..., k_n) with sum m*k_m = n of prod_m R_{k_m}
    RationalFn total = RationalFn::zero();
    std::vector<int> ks(std::size_t(n) + 1, 0);
    auto rec = [&](auto&& self, int m, int remaining) -> void {
        if (m > n || remaining == 0) {
            if (remaining != 0) return;
            RationalFn term = R[0];
            for (int mm = 1; mm <= n; ++mm) term = term * R[std::size_t(ks[mm])];
            total = total + term;
            return;
        }
        for (int k = 0; k * m <= remaining; ++k) {
            ks[std::size_t(m)] = k;
            self(self, m + 1, remaining - k * m);
        }
        ks[std::size_t(m)] = 0;
    };
    rec(rec, 1, n);
    return total;
}

void BettiTable::validate() const {
    long total = 0;
    for (long v : b) {
        if (v < 0) throw PreconditionError("BettiTable: negative entry");
        total += v;
    }
    if (total == 0) throw PreconditionError("BettiTable: at least one entry must be positive");
}

BettiTable BettiTable::operator+(const BettiTable& o) const {
    BettiTable r;
    for (std::size_t k = 0; k < b.size(); ++k) r.b[k] = b[k] + o.b[k];
    return r;
}

LaurentBiSeries pbw_series(const BettiTable& betti, int N, int K) {
    betti.validate();
    if (N < 1 || K < 0) throw PreconditionError("pbw_series: need N >= 1, K >= 0");
    std::vector<Generator> gens;
    // generator (n, (k-2-2i)/2): largest positive half-exponent is k-2 <= 2,
    // so indices with k-2-2i >= -2K - 2(N-1) cover the (N, -K) window
    const int cutoff = -2 * K - 2 * (N - 1);
    for (int k = 0; k <= 4; ++k) {
        if (betti.b[std::size_t(k)] == 0) continue;
        for (int n = 1; n <= N; ++n)
            for (int i = 0; k - 2 - 2 * i >= cutoff; ++i)
                gens.push_back({n, k - 2 - 2 * i, k % 2 == 1, int(betti.b[std::size_t(k)])});
    }
    LaurentBiSeries s = sym_hilbert(gens, N, K);
    s.clamp_floor(-2 * K);
    return s;
}

std::vector<BigInt> closed_point_counts(int d_max, const BigInt& q) {
    if (d_max < 1) throw PreconditionError("closed_point_counts: d_max must be >= 1");
    std::vector<BigInt> counts(std::size_t(d_max) + 1, BigInt(0));
    for (int d = 1; d <= d_max; ++d)
        counts[std::size_t(d)] = commvar::irreducible_poly_count(d, q * q);
    // sum_{d|m} d N_d = q^(2m)
    for (int m = 1; m <= d_max; ++m) {
        BigInt sum = 0;
        for (int d = 1; d <= m; ++d)
            if (m % d == 0) sum += d * counts[std::size_t(d)];
        if (sum != big_pow(q * q, unsigned(m)))
            throw ExpectationError("closed_point_counts: zeta consistency check failed");
    }
    return {counts.begin() + 1, counts.end()};
}

// --- RatSeries / power structure ----------------------------------------------

RatSeries RatSeries::operator*(const RatSeries& o) const {
    RatSeries r(std::min(order(), o.order()));
    for (int i = 0; i <= r.order(); ++i)
        for (int j = 0; i + j <= r.order(); ++j)
            if (j <= o.order()) r.c[std::size_t(i + j)] += c[std::size_t(i)] * o.c[std::size_t(j)];
    return r;
}

RatSeries RatSeries::pow(unsigned e) const {
    RatSeries r(order());
    r.c[0] = 1;
    for (unsigned i = 0; i < e; ++i) r = r * (*this);
    return r;
}

PowerStructureReport power_structure_check(std::uint32_t q, int N) {
    if (q != 2 || N > 2 || N < 0)
        throw InfeasibleError("power_structure_check: only q = 2, N <= 2 is supported "
                              "(keeps F_4 the only extension field needed)");

    RatSeries lhs(N);
    lhs.c[0] = 1;
    for (int n = 1; n <= N; ++n)
        lhs.c[std::size_t(n)] =
            BigRat(commvar::count_points(commvar::Variety::commuting, n, q,
                                         commvar::Method::kernel)) /
            BigRat(commvar::gl_order(n, BigInt(q)));

    auto n_points = closed_point_counts(std::max(N, 1), BigInt(q));

    RatSeries rhs(N);
    rhs.c[0] = 1;
    for (int d = 1; d <= N; ++d) {
        // punctual series at q^d in the variable x^d
        RatSeries punctual(N);
        punctual.c[0] = 1;
        std::uint32_t qd = 1;
        for (int i = 0; i < d; ++i) qd *= q;
        for (int m = 1; d * m <= N; ++m) {
            BigInt nc = commvar::count_points(commvar::Variety::nilcommuting, m, qd,
                                              commvar::Method::kernel);
            punctual.c[std::size_t(d * m)] = BigRat(nc) / BigRat(commvar::gl_order(m, BigInt(qd)));
        }
        BigInt nd = n_points[std::size_t(d) - 1];
        if (nd < 0 || nd > 1'000'000)
            throw InfeasibleError("power_structure_check: exponent too large");
        rhs = rhs * punctual.pow(unsigned(nd));
    }

    PowerStructureReport report;
    report.lhs = lhs.c;
    report.rhs = rhs.c;
    report.equal = lhs.c == rhs.c;
    return report;
}

}  // namespace coha::series
