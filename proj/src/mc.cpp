#include "coha/mc.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <unordered_map>

namespace coha::mc {

namespace {

Vec vadd(const PrimeField& f, const Vec& a, const Vec& b) {
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = f.add(r[i], b[i]);
    return r;
}

Vec vsub(const PrimeField& f, const Vec& a, const Vec& b) {
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = f.sub(r[i], b[i]);
    return r;
}

Vec vscale(const PrimeField& f, Elem c, const Vec& a) {
    Vec r = a;
    for (auto& x : r) x = f.mul(c, x);
    return r;
}

bool vzero(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](Elem x) { return x == 0; });
}

Vec mat_apply(const Matrix<PrimeField>& m, const Vec& v) {
    Vec r(std::size_t(m.rows), 0);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            r[std::size_t(i)] = m.field.add(r[std::size_t(i)], m.field.mul(m(i, j), v[std::size_t(j)]));
    return r;
}

Vec bilinear(const PrimeField& f, const DgLie3::Tensor& t, const Vec& a, const Vec& b,
             std::size_t out_dim) {
    Vec r(out_dim, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0) continue;
            Elem c = f.mul(a[i], b[j]);
            const Vec& target = t[i][j];
            for (std::size_t k = 0; k < out_dim; ++k)
                r[k] = f.add(r[k], f.mul(c, target[k]));
        }
    }
    return r;
}

Vec index_to_vec(const PrimeField& f, int dim, std::uint64_t idx) {
    Vec v(std::size_t(dim), 0);
    for (int i = dim; i-- > 0;) {
        v[std::size_t(i)] = Elem(idx % f.p);
        idx /= f.p;
    }
    return v;
}

std::uint64_t vec_to_index(const PrimeField& f, const Vec& v) {
    std::uint64_t idx = 0;
    for (Elem x : v) idx = idx * f.p + x;
    return idx;
}

std::uint64_t space_size(const PrimeField& f, int dim, std::uint64_t cap, const char* what) {
    std::uint64_t n = 1;
    for (int i = 0; i < dim; ++i) {
        if (n > cap / f.p) throw InfeasibleError(std::string(what) + ": enumeration bound exceeded");
        n *= f.p;
    }
    return n;
}

DgLie3::Tensor zero_tensor(int a, int b, int target) {
    return DgLie3::Tensor(std::size_t(a),
                          std::vector<Vec>(std::size_t(b), Vec(std::size_t(target), 0)));
}

}  // namespace

DgLie3::DgLie3(PrimeField f, std::array<int, 3> dims_)
    : field(f),
      dims(dims_),
      d0(f, dims_[1], dims_[0]),
      d1(f, dims_[2], dims_[1]),
      b00(zero_tensor(dims_[0], dims_[0], dims_[0])),
      b01(zero_tensor(dims_[0], dims_[1], dims_[1])),
      b02(zero_tensor(dims_[0], dims_[2], dims_[2])),
      b11(zero_tensor(dims_[1], dims_[1], dims_[2])) {
    for (int d : dims)
        if (d < 0) throw PreconditionError("DgLie3: negative dimension");
}

Graded DgLie3::bracket(const Graded& x, const Graded& y) const {
    int deg = x.deg + y.deg;
    if (deg > 2) return {deg, {}};
    auto out_dim = std::size_t(dims[std::size_t(deg)]);
    switch (x.deg * 4 + y.deg) {
        case 0: return {0, bilinear(field, b00, x.v, y.v, out_dim)};
        case 1: return {1, bilinear(field, b01, x.v, y.v, out_dim)};
        case 4: {  // [g1, g0] = -[g0, g1]
            Vec r = bilinear(field, b01, y.v, x.v, out_dim);
            for (auto& c : r) c = field.neg(c);
            return {1, r};
        }
        case 2: return {2, bilinear(field, b02, x.v, y.v, out_dim)};
        case 8: {  // [g2, g0] = -[g0, g2]
            Vec r = bilinear(field, b02, y.v, x.v, out_dim);
            for (auto& c : r) c = field.neg(c);
            return {2, r};
        }
        case 5: return {2, bilinear(field, b11, x.v, y.v, out_dim)};
        default: throw PreconditionError("DgLie3::bracket: bad degrees");
    }
}

Graded DgLie3::differential(const Graded& x) const {
    if (x.deg == 0) return {1, mat_apply(d0, x.v)};
    if (x.deg == 1) return {2, mat_apply(d1, x.v)};
    return {x.deg + 1, {}};
}

bool DgLie3::is_abelian() const {
    auto all_zero = [](const Tensor& t) {
        for (const auto& row : t)
            for (const auto& v : row)
                if (!vzero(v)) return false;
        return true;
    };
    return all_zero(b00) && all_zero(b01) && all_zero(b02) && all_zero(b11);
}

int DgLie3::nilpotency_class() const {
    // L_1 = g, L_{k+1} = [g, L_k]; the class is the least k with L_k = 0.
    // Spans are tracked per degree as row spaces.
    std::array<std::vector<Vec>, 3> span;
    for (int deg = 0; deg < 3; ++deg)
        for (int i = 0; i < dims[std::size_t(deg)]; ++i) {
            Vec e(std::size_t(dims[std::size_t(deg)]), 0);
            e[std::size_t(i)] = 1;
            span[std::size_t(deg)].push_back(e);
        }

    auto span_empty = [&] {
        return span[0].empty() && span[1].empty() && span[2].empty();
    };
    auto reduce = [&](std::vector<Vec>& rows, int dim) {
        if (rows.empty() || dim == 0) {
            rows.clear();
            return;
        }
        Matrix<PrimeField> m(field, int(rows.size()), dim);
        for (int i = 0; i < int(rows.size()); ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)];
        int rk = reduce_in_place(m);
        rows.clear();
        for (int i = 0; i < rk; ++i) {
            Vec v(std::size_t(dim), 0);
            for (int j = 0; j < dim; ++j) v[std::size_t(j)] = m(i, j);
            rows.push_back(v);
        }
    };

    for (int c = 1; c <= dims[0] + dims[1] + dims[2] + 2; ++c) {
        if (span_empty()) return c;
        std::array<std::vector<Vec>, 3> next;
        for (int adeg = 0; adeg < 3; ++adeg)
            for (int i = 0; i < dims[std::size_t(adeg)]; ++i) {
                Graded a{adeg, zero_vec(adeg)};
                a.v[std::size_t(i)] = 1;
                for (int vdeg = 0; vdeg < 3; ++vdeg)
                    for (const Vec& w : span[std::size_t(vdeg)]) {
                        Graded r = bracket(a, Graded{vdeg, w});
                        if (r.deg <= 2 && !vzero(r.v)) next[std::size_t(r.deg)].push_back(r.v);
                    }
            }
        for (int deg = 0; deg < 3; ++deg) reduce(next[std::size_t(deg)], dims[std::size_t(deg)]);
        span = std::move(next);
    }
    return -1;  // the lower central series stabilized away from zero
}

ValidationResult validate(const DgLie3& g) {
    const PrimeField& f = g.field;
    if (f.p == 2) return {false, "characteristic: p must be odd"};

    // d^2 = 0
    if (!(g.d1 * g.d0).is_zero()) return {false, "d2 != 0"};

    // graded antisymmetry
    for (int i = 0; i < g.dims[0]; ++i)
        for (int j = 0; j < g.dims[0]; ++j) {
            Vec lhs = g.b00[std::size_t(i)][std::size_t(j)];
            Vec rhs = g.b00[std::size_t(j)][std::size_t(i)];
            for (auto& c : rhs) c = f.neg(c);
            if (lhs != rhs) return {false, "antisymmetry: [g0,g0]"};
        }
    for (int i = 0; i < g.dims[1]; ++i)
        for (int j = 0; j < g.dims[1]; ++j)
            if (g.b11[std::size_t(i)][std::size_t(j)] != g.b11[std::size_t(j)][std::size_t(i)])
                return {false, "antisymmetry: [g1,g1] must be symmetric"};

    auto basis = [&](int deg, int i) {
        Graded e{deg, g.zero_vec(deg)};
        e.v[std::size_t(i)] = 1;
        return e;
    };

    // graded Jacobi on basis triples with total degree <= 2
    for (int da = 0; da < 3; ++da)
        for (int db = 0; db < 3; ++db)
            for (int dc = 0; dc < 3; ++dc) {
                if (da + db + dc > 2) continue;
                for (int i = 0; i < g.dims[std::size_t(da)]; ++i)
                    for (int j = 0; j < g.dims[std::size_t(db)]; ++j)
                        for (int k = 0; k < g.dims[std::size_t(dc)]; ++k) {
                            Graded a = basis(da, i), b = basis(db, j), c = basis(dc, k);
                            // (-1)^(|a||c|)[a,[b,c]] + (-1)^(|b||a|)[b,[c,a]]
                            //   + (-1)^(|c||b|)[c,[a,b]] = 0
                            Vec sum = g.zero_vec(da + db + dc);
                            auto addTerm = [&](const Graded& x, const Graded& y,
                                               const Graded& z, int sign_exp) {
                                Graded t = g.bracket(x, g.bracket(y, z));
                                if (t.deg > 2) return;
                                Vec v = t.v;
                                if (sign_exp % 2 == 1)
                                    for (auto& cc : v) cc = f.neg(cc);
                                sum = vadd(f, sum, v);
                            };
                            addTerm(a, b, c, da * dc);
                            addTerm(b, c, a, db * da);
                            addTerm(c, a, b, dc * db);
                            if (!vzero(sum)) return {false, "jacobi"};
                        }
            }

    // graded Leibniz: d[x,y] = [dx,y] + (-1)^|x| [x,dy] for |x|+|y| <= 1
    for (int da = 0; da < 2; ++da)
        for (int db = 0; db + da < 2; ++db)
            for (int i = 0; i < g.dims[std::size_t(da)]; ++i)
                for (int j = 0; j < g.dims[std::size_t(db)]; ++j) {
                    Graded a = basis(da, i), b = basis(db, j);
                    Vec lhs = g.differential(g.bracket(a, b)).v;
                    Graded t1 = g.bracket(g.differential(a), b);
                    Graded t2 = g.bracket(a, g.differential(b));
                    Vec rhs = t1.v;
                    Vec t2v = t2.v;
                    if (da % 2 == 1)
                        for (auto& c : t2v) c = f.neg(c);
                    rhs = vadd(f, rhs, t2v);
                    if (lhs != rhs) return {false, "leibniz"};
                }

    int c = g.nilpotency_class();
    if (c < 0) return {false, "nilpotency: the algebra is not nilpotent"};
    if (std::uint32_t(c + 1) >= f.p)
        return {false, "nilpotency: p must exceed nilpotency class + 1"};
    return {};
}

void require_valid(const DgLie3& g) {
    auto r = validate(g);
    if (!r.ok) throw PreconditionError("dg-Lie axioms violated: " + r.violation);
}

bool is_mc(const DgLie3& g, const Vec& x) {
    const PrimeField& f = g.field;
    Vec q = bilinear(f, g.b11, x, x, std::size_t(g.dims[2]));
    Elem half = f.inv(2);
    Vec v = vadd(f, mat_apply(g.d1, x), vscale(f, half, q));
    return vzero(v);
}

std::vector<Vec> mc_set(const DgLie3& g) {
    std::uint64_t total = space_size(g.field, g.dims[1], 10'000'000, "mc_set");
    std::vector<Vec> out;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        Vec x = index_to_vec(g.field, g.dims[1], idx);
        if (is_mc(g, x)) out.push_back(std::move(x));
    }
    return out;
}

Vec exp_group_mul(const DgLie3& g, const Vec& y1, const Vec& y2) {
    const PrimeField& f = g.field;
    int c = g.nilpotency_class();
    if (c < 0) throw PreconditionError("exp_group_mul: the algebra is not nilpotent");
    if (c > 5)
        throw InfeasibleError("exp_group_mul: Campbell-Hausdorff terms implemented through "
                              "nilpotency class 5");
    if (std::uint32_t(c + 1) >= f.p)
        throw PreconditionError("exp_group_mul: p must exceed nilpotency class + 1");

    Graded a{0, y1}, b{0, y2};
    auto br = [&](const Graded& x, const Graded& y) { return g.bracket(x, y); };

    Vec z = vadd(f, y1, y2);
    Graded ab = br(a, b);
    z = vadd(f, z, vscale(f, f.inv(2), ab.v));
    // 1/12 ([a,[a,b]] + [b,[b,a]])
    Elem tw = f.inv(f.from_int(12));
    z = vadd(f, z, vscale(f, tw, br(a, ab).v));
    Graded ba = br(b, a);
    z = vadd(f, z, vscale(f, tw, br(b, ba).v));
    // -1/24 [b,[a,[a,b]]]
    Elem tf = f.neg(f.inv(f.from_int(24)));
    z = vadd(f, z, vscale(f, tf, br(b, br(a, ab)).v));
    return z;
}

Vec gauge_act(const DgLie3& g, const Vec& y, const Vec& x) {
    const PrimeField& f = g.field;
    const int c = g.nilpotency_class();
    if (c < 0) throw PreconditionError("gauge_act: the algebra is not nilpotent");
    if (std::uint32_t(c + 1) >= f.p)
        throw PreconditionError("gauge_act: p must exceed nilpotency class + 1");
    Graded yg{0, y};

    // e^(ad y)(x) = sum_k (ad y)^k (x) / k!
    Vec result = g.zero_vec(1);
    {
        Vec term = x;
        Elem inv_fact = 1;
        for (int k = 0; !vzero(term); ++k) {
            if (k > c) throw ExpectationError("gauge_act: ad(y) fails to be nilpotent");
            if (k > 0) inv_fact = f.mul(inv_fact, f.inv(f.from_int(k)));
            result = vadd(f, result, vscale(f, inv_fact, term));
            term = g.bracket(yg, Graded{1, term}).v;
        }
    }
    // ((1 - e^(ad y)) / ad y)(d y) = -sum_k (ad y)^k (d y) / (k+1)!
    {
        Vec term = mat_apply(g.d0, y);
        Elem inv_fact = 1;
        for (int k = 0; !vzero(term); ++k) {
            if (k > c) throw ExpectationError("gauge_act: ad(y) fails to be nilpotent");
            inv_fact = f.mul(inv_fact, f.inv(f.from_int(k + 1)));
            result = vsub(f, result, vscale(f, inv_fact, term));
            term = g.bracket(yg, Graded{1, term}).v;
        }
    }

    if (is_mc(g, x) && !is_mc(g, result))
        throw ExpectationError("gauge_act: image of a Maurer-Cartan element left mc");
    return result;
}

GroupoidCard groupoid_card(const DgLie3& g) {
    const PrimeField& f = g.field;
    std::uint64_t group_size = space_size(f, g.dims[0], 1'000'000, "groupoid_card");

    auto mc = mc_set(g);
    std::unordered_map<std::uint64_t, int> position;
    position.reserve(mc.size());
    for (std::size_t i = 0; i < mc.size(); ++i) position[vec_to_index(f, mc[i])] = int(i);

    GroupoidCard card;
    card.object_count = BigInt(mc.size());
    card.cardinality = 0;

    std::vector<char> seen(mc.size(), 0);
    BigInt orbit_size_total = 0;
    for (std::size_t start = 0; start < mc.size(); ++start) {
        if (seen[start]) continue;
        // breadth-first closure under the one-parameter moves along basis
        // directions of g0; these generate the whole exponential group
        std::vector<int> queue{int(start)};
        seen[start] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const Vec& x = mc[std::size_t(queue[head])];
            for (int i = 0; i < g.dims[0]; ++i) {
                Vec y = g.zero_vec(0);
                y[std::size_t(i)] = 1;
                Vec moved = gauge_act(g, y, x);
                auto it = position.find(vec_to_index(f, moved));
                if (it == position.end())
                    throw ExpectationError("groupoid_card: gauge action left the mc set");
                if (!seen[std::size_t(it->second)]) {
                    seen[std::size_t(it->second)] = 1;
                    queue.push_back(it->second);
                }
            }
        }

        // stabilizer of the representative by direct counting
        const Vec& rep = mc[start];
        BigInt stab = 0;
        for (std::uint64_t yi = 0; yi < group_size; ++yi) {
            Vec y = index_to_vec(f, g.dims[0], yi);
            if (gauge_act(g, y, rep) == rep) ++stab;
        }
        BigInt orbit = BigInt(queue.size());
        if (orbit * stab != BigInt(group_size))
            throw ExpectationError("groupoid_card: orbit-stabilizer identity failed");
        orbit_size_total += orbit;

        card.orbit_count += 1;
        card.stabilizer_orders.push_back(stab);
        card.cardinality += BigRat(1) / BigRat(stab);
        card.orbit_reps.push_back(rep);
    }

    if (orbit_size_total != card.object_count)
        throw ExpectationError("groupoid_card: orbits do not partition mc");
    if (card.cardinality != BigRat(card.object_count) / BigRat(BigInt(group_size)))
        throw ExpectationError("groupoid_card: cardinality != |mc| / |G0|");

    std::sort(card.stabilizer_orders.begin(), card.stabilizer_orders.end());
    return card;
}

namespace {

// rank of the row space spanned by a list of vectors of length dim
int span_rank(const PrimeField& f, const std::vector<Vec>& rows, int dim) {
    if (rows.empty() || dim == 0) return 0;
    Matrix<PrimeField> m(f, int(rows.size()), dim);
    for (int i = 0; i < int(rows.size()); ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)];
    return rank(m);
}

std::vector<Vec> matrix_rows(const Matrix<PrimeField>& m) {
    std::vector<Vec> rows;
    for (int i = 0; i < m.rows; ++i) {
        Vec v(std::size_t(m.cols), 0);
        for (int j = 0; j < m.cols; ++j) v[std::size_t(j)] = m(i, j);
        rows.push_back(v);
    }
    return rows;
}

// columns of m as vectors (the image basis generators)
std::vector<Vec> matrix_cols(const Matrix<PrimeField>& m) {
    std::vector<Vec> cols;
    for (int j = 0; j < m.cols; ++j) {
        Vec v(std::size_t(m.rows), 0);
        for (int i = 0; i < m.rows; ++i) v[std::size_t(i)] = m(i, j);
        cols.push_back(v);
    }
    return cols;
}

}  // namespace

std::array<int, 3> cohomology_dims(const DgLie3& g) {
    int r0 = rank(g.d0), r1 = rank(g.d1);
    return {g.dims[0] - r0, g.dims[1] - r1 - r0, g.dims[2] - r1};
}

CompareReport quasi_iso_compare(const DgLie3& g1, const DgLie3& g2, const DgMorphism& phi) {
    const PrimeField& f = g1.field;
    if (!(g1.field == g2.field)) throw PreconditionError("quasi_iso_compare: field mismatch");
    for (int k = 0; k < 3; ++k) {
        const auto& m = phi.phi[std::size_t(k)];
        if (m.rows != g2.dims[std::size_t(k)] || m.cols != g1.dims[std::size_t(k)])
            throw PreconditionError("quasi_iso_compare: phi has wrong shape");
    }

    // phi must be a morphism of dg-Lie algebras
    if (!(phi.phi[1] * g1.d0 == g2.d0 * phi.phi[0]) ||
        !(phi.phi[2] * g1.d1 == g2.d1 * phi.phi[1]))
        throw PreconditionError("quasi_iso_compare: phi does not intertwine the differentials");
    auto check_bracket = [&](int da, int db) {
        for (int i = 0; i < g1.dims[std::size_t(da)]; ++i)
            for (int j = 0; j < g1.dims[std::size_t(db)]; ++j) {
                Graded a{da, g1.zero_vec(da)}, b{db, g1.zero_vec(db)};
                a.v[std::size_t(i)] = 1;
                b.v[std::size_t(j)] = 1;
                Graded lhs = g1.bracket(a, b);
                Vec lhs_avatar = mat_apply(phi.phi[std::size_t(lhs.deg)], lhs.v);
                Graded ap{da, mat_apply(phi.phi[std::size_t(da)], a.v)};
                Graded bp{db, mat_apply(phi.phi[std::size_t(db)], b.v)};
                if (lhs_avatar != g2.bracket(ap, bp).v)
                    throw PreconditionError("quasi_iso_compare: phi is not a Lie morphism");
            }
    };
    check_bracket(0, 0);
    check_bracket(0, 1);
    check_bracket(0, 2);
    check_bracket(1, 1);

    // phi must induce isomorphisms on cohomology
    auto h1dims = cohomology_dims(g1), h2dims = cohomology_dims(g2);
    if (h1dims != h2dims)
        throw PreconditionError("quasi_iso_compare: phi is not a quasi-isomorphism");

    // H^0: restriction of phi0 to ker d0 must have full rank
    {
        auto k1 = kernel_basis(g1.d0);
        std::vector<Vec> images;
        for (const Vec& v : matrix_rows(k1)) images.push_back(mat_apply(phi.phi[0], v));
        if (span_rank(f, images, g2.dims[0]) != h1dims[0])
            throw PreconditionError("quasi_iso_compare: phi is not a quasi-isomorphism");
    }
    // H^1: phi1(ker d1) must cover ker d1 / im d0 on the target side
    {
        auto k1 = kernel_basis(g1.d1);
        std::vector<Vec> images = matrix_cols(g2.d0);
        int base = span_rank(f, images, g2.dims[1]);
        for (const Vec& v : matrix_rows(k1)) images.push_back(mat_apply(phi.phi[1], v));
        if (span_rank(f, images, g2.dims[1]) - base != h1dims[1])
            throw PreconditionError("quasi_iso_compare: phi is not a quasi-isomorphism");
    }
    // H^2: phi2(g2-part) must cover coker d1 on the target side
    {
        std::vector<Vec> images = matrix_cols(g2.d1);
        int base = span_rank(f, images, g2.dims[2]);
        for (int i = 0; i < g1.dims[2]; ++i) {
            Vec e = g1.zero_vec(2);
            e[std::size_t(i)] = 1;
            images.push_back(mat_apply(phi.phi[2], e));
        }
        if (span_rank(f, images, g2.dims[2]) - base != h1dims[2])
            throw PreconditionError("quasi_iso_compare: phi is not a quasi-isomorphism");
    }

    CompareReport report;
    report.lhs = groupoid_card(g1);
    report.rhs = groupoid_card(g2);

    // phi must send mc to mc and induce a bijection on orbits
    auto mc1 = mc_set(g1);
    auto card2 = report.rhs;
    std::unordered_map<std::uint64_t, int> orbit_of;
    {
        // label every mc(g2) point with its orbit id
        auto mc2 = mc_set(g2);
        std::unordered_map<std::uint64_t, int> position;
        for (std::size_t i = 0; i < mc2.size(); ++i) position[vec_to_index(f, mc2[i])] = int(i);
        std::vector<int> label(mc2.size(), -1);
        for (int o = 0; o < card2.orbit_count; ++o) {
            std::vector<int> queue{position.at(vec_to_index(f, card2.orbit_reps[std::size_t(o)]))};
            label[std::size_t(queue[0])] = o;
            for (std::size_t head = 0; head < queue.size(); ++head)
                for (int i = 0; i < g2.dims[0]; ++i) {
                    Vec y = g2.zero_vec(0);
                    y[std::size_t(i)] = 1;
                    Vec moved = gauge_act(g2, y, mc2[std::size_t(queue[head])]);
                    int pos = position.at(vec_to_index(f, moved));
                    if (label[std::size_t(pos)] == -1) {
                        label[std::size_t(pos)] = o;
                        queue.push_back(pos);
                    }
                }
        }
        for (std::size_t i = 0; i < mc2.size(); ++i)
            orbit_of[vec_to_index(f, mc2[i])] = label[i];
    }

    std::vector<char> hit(std::size_t(card2.orbit_count), 0);
    for (const Vec& x : mc1) {
        Vec y = mat_apply(phi.phi[1], x);
        auto it = orbit_of.find(vec_to_index(f, y));
        if (it == orbit_of.end())
            throw ExpectationError("quasi_iso_compare: phi does not map mc into mc");
        hit[std::size_t(it->second)] = 1;
    }
    bool onto = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });

    report.match = report.lhs.orbit_count == report.rhs.orbit_count &&
                   report.lhs.stabilizer_orders == report.rhs.stabilizer_orders && onto;
    if (!report.match)
        throw ExpectationError("quasi_iso_compare: groupoid invariants differ for a "
                               "quasi-isomorphic pair");
    return report;
}

namespace {

struct SplitParts {
    DgLie3 h, n;
};

// project an embedded g-coordinate vector onto the n suffix of one degree,
// checking the h components vanish
Vec project_to_n(const Vec& v, int h_dim, int n_dim, const char* what) {
    for (int i = 0; i < h_dim; ++i)
        if (v[std::size_t(i)] != 0)
            throw PreconditionError(std::string(what) + ": value does not lie in the ideal");
    return Vec(v.begin() + h_dim, v.begin() + h_dim + n_dim);
}

SplitParts split_semidirect(const FibrationInput& input) {
    const DgLie3& g = input.g;
    const PrimeField& f = g.field;
    std::array<int, 3> hd = input.h_dims, nd{};
    for (int k = 0; k < 3; ++k) {
        if (hd[std::size_t(k)] < 0 || hd[std::size_t(k)] > g.dims[std::size_t(k)])
            throw PreconditionError("fibration: h_dims out of range");
        nd[std::size_t(k)] = g.dims[std::size_t(k)] - hd[std::size_t(k)];
    }

    // the differential must be block diagonal for the splitting
    auto check_block = [&](const Matrix<PrimeField>& d, int h_src, int h_tgt, const char* nm) {
        for (int i = 0; i < d.rows; ++i)
            for (int j = 0; j < d.cols; ++j) {
                bool src_h = j < h_src, tgt_h = i < h_tgt;
                if (src_h != tgt_h && d(i, j) != 0)
                    throw PreconditionError(std::string("fibration: ") + nm +
                                            " does not respect the splitting");
            }
    };
    check_block(g.d0, hd[0], hd[1], "d0");
    check_block(g.d1, hd[1], hd[2], "d1");

    // h must be a subalgebra and n an ideal
    auto part = [&](int deg, int i) {  // 0 = h, 1 = n
        return i < hd[std::size_t(deg)] ? 0 : 1;
    };
    auto check_tensor = [&](const DgLie3::Tensor& t, int da, int db) {
        int dc = da + db;
        for (int i = 0; i < g.dims[std::size_t(da)]; ++i)
            for (int j = 0; j < g.dims[std::size_t(db)]; ++j) {
                const Vec& out = t[std::size_t(i)][std::size_t(j)];
                for (int k = 0; k < g.dims[std::size_t(dc)]; ++k) {
                    if (out[std::size_t(k)] == 0) continue;
                    int pi = part(da, i), pj = part(db, j), pk = part(dc, k);
                    if (pi == 0 && pj == 0 && pk == 1)
                        throw PreconditionError("fibration: h is not a subalgebra");
                    if ((pi == 1 || pj == 1) && pk == 0)
                        throw PreconditionError("fibration: n is not an ideal");
                }
            }
    };
    check_tensor(g.b00, 0, 0);
    check_tensor(g.b01, 0, 1);
    check_tensor(g.b02, 0, 2);
    check_tensor(g.b11, 1, 1);

    auto restrict = [&](int offset0, int offset1, int offset2, std::array<int, 3> dims) {
        DgLie3 out(f, dims);
        for (int i = 0; i < dims[1]; ++i)
            for (int j = 0; j < dims[0]; ++j) out.d0(i, j) = g.d0(offset1 + i, offset0 + j);
        for (int i = 0; i < dims[2]; ++i)
            for (int j = 0; j < dims[1]; ++j) out.d1(i, j) = g.d1(offset2 + i, offset1 + j);
        auto sub_tensor = [&](const DgLie3::Tensor& t, int oa, int ob, int oc, int na, int nb,
                              int nc) {
            DgLie3::Tensor r = zero_tensor(na, nb, nc);
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < nb; ++j)
                    for (int k = 0; k < nc; ++k)
                        r[std::size_t(i)][std::size_t(j)][std::size_t(k)] =
                            t[std::size_t(oa + i)][std::size_t(ob + j)][std::size_t(oc + k)];
            return r;
        };
        out.b00 = sub_tensor(g.b00, offset0, offset0, offset0, dims[0], dims[0], dims[0]);
        out.b01 = sub_tensor(g.b01, offset0, offset1, offset1, dims[0], dims[1], dims[1]);
        out.b02 = sub_tensor(g.b02, offset0, offset2, offset2, dims[0], dims[2], dims[2]);
        out.b11 = sub_tensor(g.b11, offset1, offset1, offset2, dims[1], dims[1], dims[2]);
        return out;
    };

    SplitParts parts{restrict(0, 0, 0, hd), restrict(hd[0], hd[1], hd[2], nd)};
    require_valid(parts.h);
    require_valid(parts.n);
    return parts;
}

}  // namespace

std::string FibrationReport::passing_signs() const {
    std::string s;
    if (plus.axioms_ok && plus.set_identity_ok && plus.card_identity_ok) s += "+";
    if (minus.axioms_ok && minus.set_identity_ok && minus.card_identity_ok) s += "-";
    return s;
}

FibrationReport fibration_count(const FibrationInput& input) {
    const DgLie3& g = input.g;
    const PrimeField& f = g.field;
    require_valid(g);
    auto parts = split_semidirect(input);
    const auto& hd = input.h_dims;
    const DgLie3& n = parts.n;

    FibrationReport report;
    report.mc_g = BigInt(mc_set(g).size());
    auto mc_h = mc_set(parts.h);
    report.mc_h = BigInt(mc_h.size());

    auto embed1 = [&](const Vec& xh) {
        Vec x(std::size_t(g.dims[1]), 0);
        for (int i = 0; i < hd[1]; ++i) x[std::size_t(i)] = xh[std::size_t(i)];
        return x;
    };

    // n with the differential twisted by ad(x), x a Maurer-Cartan element of h
    auto twisted = [&](const Vec& xh, int sign) {
        DgLie3 nx = n;
        Vec x = embed1(xh);
        for (int j = 0; j < n.dims[0]; ++j) {
            Vec v(std::size_t(g.dims[0]), 0);
            v[std::size_t(hd[0] + j)] = 1;
            Graded br = g.bracket(Graded{1, x}, Graded{0, v});
            Vec col = project_to_n(br.v, hd[1], n.dims[1], "fibration twist d0");
            for (int i = 0; i < n.dims[1]; ++i) {
                Elem delta = sign > 0 ? col[std::size_t(i)] : f.neg(col[std::size_t(i)]);
                nx.d0(i, j) = f.add(nx.d0(i, j), delta);
            }
        }
        for (int j = 0; j < n.dims[1]; ++j) {
            Vec v(std::size_t(g.dims[1]), 0);
            v[std::size_t(hd[1] + j)] = 1;
            Graded br = g.bracket(Graded{1, x}, Graded{1, v});
            Vec col = project_to_n(br.v, hd[2], n.dims[2], "fibration twist d1");
            for (int i = 0; i < n.dims[2]; ++i) {
                Elem delta = sign > 0 ? col[std::size_t(i)] : f.neg(col[std::size_t(i)]);
                nx.d1(i, j) = f.add(nx.d1(i, j), delta);
            }
        }
        return nx;
    };

    auto run_sign = [&](int sign) {
        FibrationSignResult result;
        result.fiber_sum = 0;
        for (const Vec& xh : mc_h) {
            DgLie3 nx = twisted(xh, sign);
            auto check = validate(nx);
            if (!check.ok) {
                result.axioms_ok = false;
                result.failure = "twisted fiber violates dg-Lie axioms: " + check.violation;
                return result;
            }
            result.fiber_sum += BigInt(mc_set(nx).size());
        }
        result.set_identity_ok = result.fiber_sum == report.mc_g;
        if (!result.set_identity_ok)
            result.failure = "set-level identity |mc(g)| = sum |mc(n_x)| fails";

        // groupoid-cardinality identity over the orbits of MC(h)
        auto card_g = groupoid_card(g);
        auto card_h = groupoid_card(parts.h);
        BigRat rhs = 0;
        for (int o = 0; o < card_h.orbit_count; ++o) {
            DgLie3 nx = twisted(card_h.orbit_reps[std::size_t(o)], sign);
            auto card_fiber = groupoid_card(nx);
            rhs += card_fiber.cardinality / BigRat(card_h.stabilizer_orders[std::size_t(o)]);
        }
        result.card_identity_ok = card_g.cardinality == rhs;
        if (result.set_identity_ok && !result.card_identity_ok)
            result.failure = "groupoid-cardinality identity fails";
        return result;
    };

    report.plus = run_sign(+1);
    report.minus = run_sign(-1);
    return report;
}

// --- catalog -----------------------------------------------------------------

namespace {

using nlohmann::json;

Matrix<PrimeField> matrix_from_json(PrimeField f, int rows, int cols, const json& j,
                                    const std::string& what) {
    Matrix<PrimeField> m(f, rows, cols);
    if (j.is_null()) return m;
    if (int(j.size()) != rows)
        throw PreconditionError("catalog: " + what + " has wrong row count");
    for (int i = 0; i < rows; ++i) {
        if (int(j[std::size_t(i)].size()) != cols)
            throw PreconditionError("catalog: " + what + " has wrong column count");
        for (int c = 0; c < cols; ++c)
            m(i, c) = f.from_int(j[std::size_t(i)][std::size_t(c)].get<long long>());
    }
    return m;
}

DgLie3::Tensor tensor_from_json(PrimeField f, int a, int b, int target, const json& j,
                                const std::string& what) {
    auto t = zero_tensor(a, b, target);
    if (j.is_null()) return t;
    if (int(j.size()) != a) throw PreconditionError("catalog: " + what + " has wrong shape");
    for (int i = 0; i < a; ++i) {
        if (int(j[std::size_t(i)].size()) != b)
            throw PreconditionError("catalog: " + what + " has wrong shape");
        for (int k = 0; k < b; ++k) {
            const json& cell = j[std::size_t(i)][std::size_t(k)];
            if (int(cell.size()) != target)
                throw PreconditionError("catalog: " + what + " has wrong target size");
            for (int s = 0; s < target; ++s)
                t[std::size_t(i)][std::size_t(k)][std::size_t(s)] =
                    f.from_int(cell[std::size_t(s)].get<long long>());
        }
    }
    return t;
}

DgLie3 algebra_from_json(const json& j) {
    PrimeField f(j.at("p").get<std::uint32_t>());
    std::array<int, 3> dims{j.at("dims")[0].get<int>(), j.at("dims")[1].get<int>(),
                            j.at("dims")[2].get<int>()};
    DgLie3 g(f, dims);
    g.d0 = matrix_from_json(f, dims[1], dims[0], j.value("d0", json()), "d0");
    g.d1 = matrix_from_json(f, dims[2], dims[1], j.value("d1", json()), "d1");
    g.b00 = tensor_from_json(f, dims[0], dims[0], dims[0], j.value("b00", json()), "b00");
    g.b01 = tensor_from_json(f, dims[0], dims[1], dims[1], j.value("b01", json()), "b01");
    g.b02 = tensor_from_json(f, dims[0], dims[2], dims[2], j.value("b02", json()), "b02");
    g.b11 = tensor_from_json(f, dims[1], dims[1], dims[2], j.value("b11", json()), "b11");
    require_valid(g);
    return g;
}

CardExpectation expectation_from_json(const json& j) {
    CardExpectation e;
    e.object_count = BigInt(j.at("object_count").get<long long>());
    e.orbit_count = j.at("orbit_count").get<int>();
    for (const auto& s : j.at("stabilizer_orders"))
        e.stabilizer_orders.push_back(BigInt(s.get<long long>()));
    return e;
}

}  // namespace

const CatalogAlgebra& Catalog::algebra(const std::string& id) const {
    for (const auto& a : algebras)
        if (a.id == id) return a;
    throw PreconditionError("catalog: no algebra entry named " + id);
}

const CatalogQisPair& Catalog::qis_pair(const std::string& lhs_id,
                                        const std::string& rhs_id) const {
    for (const auto& p : qis_pairs)
        if ((p.lhs_id == lhs_id && p.rhs_id == rhs_id) || p.id == lhs_id) return p;
    throw PreconditionError("catalog: no quasi-isomorphic pair for " + lhs_id + " vs " + rhs_id);
}

const CatalogFibration& Catalog::fibration(const std::string& id) const {
    for (const auto& f : fibrations)
        if (f.id == id) return f;
    throw PreconditionError("catalog: no fibration entry named " + id);
}

Catalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("catalog: cannot open " + path);
    json j = json::parse(in);

    Catalog catalog;
    for (const auto& entry : j.at("algebras")) {
        CatalogAlgebra a{entry.at("id").get<std::string>(), algebra_from_json(entry),
                         expectation_from_json(entry.at("expected"))};
        catalog.algebras.push_back(std::move(a));
    }
    for (const auto& entry : j.value("qis_pairs", json::array())) {
        auto resolve = [&](const json& side, std::string& id_out) -> DgLie3 {
            if (side.is_string()) {
                id_out = side.get<std::string>();
                return catalog.algebra(id_out).algebra;
            }
            id_out = side.at("id").get<std::string>();
            return algebra_from_json(side);
        };
        std::string lhs_id, rhs_id;
        DgLie3 lhs = resolve(entry.at("lhs"), lhs_id);
        DgLie3 rhs = resolve(entry.at("rhs"), rhs_id);
        const json& phi_json = entry.at("phi");
        DgMorphism phi{{Matrix<PrimeField>(lhs.field, rhs.dims[0], lhs.dims[0]),
                        Matrix<PrimeField>(lhs.field, rhs.dims[1], lhs.dims[1]),
                        Matrix<PrimeField>(lhs.field, rhs.dims[2], lhs.dims[2])}};
        phi.phi[0] = matrix_from_json(lhs.field, rhs.dims[0], lhs.dims[0],
                                      phi_json.value("phi0", json()), "phi0");
        phi.phi[1] = matrix_from_json(lhs.field, rhs.dims[1], lhs.dims[1],
                                      phi_json.value("phi1", json()), "phi1");
        phi.phi[2] = matrix_from_json(lhs.field, rhs.dims[2], lhs.dims[2],
                                      phi_json.value("phi2", json()), "phi2");
        catalog.qis_pairs.push_back(
            CatalogQisPair{entry.at("id").get<std::string>(), lhs_id, rhs_id,
                           std::move(lhs), std::move(rhs), std::move(phi)});
    }
    for (const auto& entry : j.value("fibrations", json::array())) {
        CatalogFibration fib{
            entry.at("id").get<std::string>(),
            FibrationInput{algebra_from_json(entry.at("g")),
                           {entry.at("h_dims")[0].get<int>(), entry.at("h_dims")[1].get<int>(),
                            entry.at("h_dims")[2].get<int>()}},
            entry.at("expected_sign").get<std::string>(),
            BigInt(entry.at("expected_mc_g").get<long long>())};
        catalog.fibrations.push_back(std::move(fib));
    }
    return catalog;
}

}  // namespace coha::mc
