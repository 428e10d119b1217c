#include "coha/hall.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_set>

namespace coha::hall {

namespace {

void require_supported(const PrimeField& f, int n) {
    if (n < 0 || n > 3 || (f.p != 2 && f.p != 3))
        throw PreconditionError("hall: only n <= 3 over F_2 and F_3 are supported");
}

// g and g^-1, cached per (p, n)
struct GlList {
    std::vector<Matrix<PrimeField>> g, ginv;
};

const GlList& gl_elements(PrimeField field, int n) {
    static std::map<std::pair<std::uint32_t, int>, GlList> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(field.p, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    GlList list;
    std::uint64_t total = matrix_space_size(field, n, n);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        auto m = Matrix<PrimeField>::from_index(field, n, n, idx);
        if (auto inv = inverse(m)) {
            list.g.push_back(m);
            list.ginv.push_back(*inv);
        }
    }
    return cache.emplace(key, std::move(list)).first->second;
}

// characteristic polynomial coefficients from sums of principal minors;
// n <= 3 so the subset walk is nothing
std::vector<std::uint32_t> char_poly(const Matrix<PrimeField>& m) {
    const PrimeField& f = m.field;
    const int n = m.rows;
    std::vector<std::uint32_t> coeffs;  // e_1, ..., e_n
    for (int k = 1; k <= n; ++k) {
        PrimeField::Elem sum = f.zero();
        std::vector<int> subset(k);
        auto rec = [&](auto&& self, int pos, int start) -> void {
            if (pos == k) {
                Matrix<PrimeField> minor(f, k, k);
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < k; ++j) minor(i, j) = m(subset[i], subset[j]);
                // determinant via elimination with sign tracking
                PrimeField::Elem det = f.one();
                Matrix<PrimeField> w = minor;
                for (int col = 0; col < k; ++col) {
                    int pivot = -1;
                    for (int i = col; i < k; ++i)
                        if (w(i, col) != f.zero()) {
                            pivot = i;
                            break;
                        }
                    if (pivot < 0) {
                        det = f.zero();
                        break;
                    }
                    if (pivot != col) {
                        for (int j = 0; j < k; ++j) std::swap(w(pivot, j), w(col, j));
                        det = f.neg(det);
                    }
                    det = f.mul(det, w(col, col));
                    PrimeField::Elem inv = f.inv(w(col, col));
                    for (int i = col + 1; i < k; ++i) {
                        PrimeField::Elem factor = f.mul(w(i, col), inv);
                        for (int j = col; j < k; ++j)
                            w(i, j) = f.sub(w(i, j), f.mul(factor, w(col, j)));
                    }
                }
                sum = f.add(sum, det);
                return;
            }
            for (int v = start; v < n; ++v) {
                subset[pos] = v;
                self(self, pos + 1, v + 1);
            }
        };
        rec(rec, 0, 0);
        coeffs.push_back(sum);
    }
    return coeffs;
}

std::uint64_t pair_code(const Pair& m) {
    std::uint64_t size = matrix_space_size(m.A.field, m.size(), m.size());
    return m.A.to_index() * size + m.B.to_index();
}

}  // namespace

Fingerprint fingerprint(const Pair& m) {
    const PrimeField& f = m.A.field;
    const int n = m.size();
    Fingerprint fp;
    fp.data.push_back(std::uint32_t(n));
    for (const auto& mat : {m.A, m.B, m.A + m.B, m.A * m.B})
        for (std::uint32_t c : char_poly(mat)) fp.data.push_back(c);
    fp.data.push_back(std::uint32_t(n - rank(m.A)));
    fp.data.push_back(std::uint32_t(n - rank(m.B)));
    // dim (ker A  intersect  ker B) via the stacked matrix
    Matrix<PrimeField> stacked(f, 2 * n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            stacked(i, j) = m.A(i, j);
            stacked(n + i, j) = m.B(i, j);
        }
    fp.data.push_back(std::uint32_t(n - rank(stacked)));
    return fp;
}

bool is_isomorphic(const Pair& m, const Pair& n) {
    if (m.size() != n.size() || !(m.A.field == n.A.field))
        throw PreconditionError("is_isomorphic: size or field mismatch");
    require_supported(m.A.field, m.size());
    if (m == n) return true;
    if (fingerprint(m) != fingerprint(n)) return false;
    const auto& gl = gl_elements(m.A.field, m.size());
    for (std::size_t i = 0; i < gl.g.size(); ++i) {
        const auto& g = gl.g[i];
        if (g * m.A == n.A * g && g * m.B == n.B * g) return true;
    }
    return false;
}

std::string class_name(ClassId id) {
    return "n" + std::to_string(id.first) + "-" + std::to_string(id.second);
}

ClassId parse_class_name(const std::string& name) {
    auto dash = name.find('-');
    if (name.size() < 4 || name[0] != 'n' || dash == std::string::npos)
        throw PreconditionError("bad class name (expected n<length>-<index>): " + name);
    try {
        int len = std::stoi(name.substr(1, dash - 1));
        int idx = std::stoi(name.substr(dash + 1));
        return {len, idx};
    } catch (const std::exception&) {
        throw PreconditionError("bad class name (expected n<length>-<index>): " + name);
    }
}

const std::vector<ModuleClass>& ClassTable::of_length(int len) const {
    if (len < 1 || len > n_max)
        throw PreconditionError("class table does not cover length " +
                                std::to_string(len) + "; re-enumerate with a larger n_max");
    return classes[std::size_t(len)];
}

const ModuleClass& ClassTable::at(ClassId id) const {
    const auto& list = of_length(id.first);
    if (id.second < 0 || id.second >= int(list.size()))
        throw PreconditionError("no class named " + class_name(id));
    return list[std::size_t(id.second)];
}

ClassId ClassTable::classify(const Pair& m) const {
    const auto& list = of_length(m.size());
    Fingerprint fp = fingerprint(m);
    for (const auto& cls : list)
        if (cls.fp == fp && is_isomorphic(m, cls.rep)) return {m.size(), &cls - list.data()};
    throw ExpectationError("classify: pair matches no enumerated class (table incomplete?)");
}

ClassTable enumerate_classes(int n_max, PrimeField field) {
    if (n_max < 1) throw PreconditionError("enumerate_classes: n_max must be >= 1");
    require_supported(field, n_max);

    ClassTable table{field, n_max, {}, {}};
    table.classes.resize(std::size_t(n_max) + 1);

    for (int n = 1; n <= n_max; ++n) {
        const auto& gl = gl_elements(field, n);
        const BigInt gl_size = BigInt(gl.g.size());
        std::uint64_t space = matrix_space_size(field, n, n);
        std::unordered_set<std::uint64_t> visited;
        BigInt orbit_total = 0;

        for (std::uint64_t a_idx = 0; a_idx < space; ++a_idx) {
            auto A = Matrix<PrimeField>::from_index(field, n, n, a_idx);
            auto kernel = kernel_basis(adjoint_operator(A));
            std::uint64_t members = 1;
            for (int i = 0; i < kernel.rows; ++i) members *= field.order();
            for (std::uint64_t k = 0; k < members; ++k) {
                auto B = unflatten(field, n, row_combination(kernel, k));
                Pair pair(A, B);
                if (visited.count(pair_code(pair))) continue;

                // new class; walk its whole orbit once
                BigInt aut = 0;
                for (std::size_t i = 0; i < gl.g.size(); ++i) {
                    Pair conj(gl.g[i] * A * gl.ginv[i], gl.g[i] * B * gl.ginv[i]);
                    if (conj == pair) ++aut;
                    visited.insert(pair_code(conj));
                }
                BigInt orbit = gl_size / aut;
                if (orbit * aut != gl_size)
                    throw ExpectationError("enumerate_classes: |Aut| does not divide |GL|");
                orbit_total += orbit;

                ModuleClass cls{n, pair, aut, fingerprint(pair), ""};
                cls.name = class_name({n, int(table.classes[std::size_t(n)].size())});
                table.classes[std::size_t(n)].push_back(std::move(cls));
            }
        }

        // orbit-stabilizer completeness: the orbits partition C_n(F_p)
        if (orbit_total != commvar::count_commuting_classes(n, BigInt(field.p)) ||
            orbit_total != BigInt(visited.size()))
            throw ExpectationError("enumerate_classes: orbit sizes do not sum to |C_n|");
    }
    return table;
}

std::vector<Submodule> submodules(const Pair& m) {
    const PrimeField& f = m.A.field;
    const int n = m.size();
    require_supported(f, n);

    std::vector<Submodule> result;
    for (int k = 0; k <= n; ++k) {
        // enumerate rank-k row-reduced echelon bases by pivot set + free entries
        std::vector<int> pivots(k);
        auto pivot_rec = [&](auto&& self, int pos, int start) -> void {
            if (pos < k) {
                for (int c = start; c < n; ++c) {
                    pivots[pos] = c;
                    self(self, pos + 1, c + 1);
                }
                return;
            }
            std::vector<std::pair<int, int>> free_slots;
            for (int i = 0; i < k; ++i)
                for (int j = pivots[i] + 1; j < n; ++j)
                    if (std::find(pivots.begin(), pivots.end(), j) == pivots.end())
                        free_slots.emplace_back(i, j);
            std::uint64_t fills = 1;
            for (std::size_t i = 0; i < free_slots.size(); ++i) fills *= f.order();
            for (std::uint64_t fill = 0; fill < fills; ++fill) {
                Matrix<PrimeField> basis(f, k, n);
                for (int i = 0; i < k; ++i) basis(i, pivots[i]) = f.one();
                std::uint64_t rest = fill;
                for (auto [i, j] : free_slots) {
                    basis(i, j) = f.from_index(rest % f.order());
                    rest /= f.order();
                }

                // invariance of the row space under both operators
                bool invariant = true;
                for (const auto& op : {m.A, m.B}) {
                    Matrix<PrimeField> stacked(f, 2 * k, n);
                    for (int i = 0; i < k; ++i) {
                        for (int j = 0; j < n; ++j) {
                            stacked(i, j) = basis(i, j);
                            PrimeField::Elem s = f.zero();
                            for (int t = 0; t < n; ++t)
                                s = f.add(s, f.mul(op(j, t), basis(i, t)));
                            stacked(k + i, j) = s;
                        }
                    }
                    if (rank(stacked) != k) {
                        invariant = false;
                        break;
                    }
                }
                if (!invariant) continue;

                // change of basis: subspace basis first, then the standard
                // vectors at non-pivot coordinates
                Matrix<PrimeField> S(f, n, n);
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < n; ++j) S(j, i) = basis(i, j);
                int col = k;
                for (int j = 0; j < n; ++j)
                    if (std::find(pivots.begin(), pivots.end(), j) == pivots.end())
                        S(j, col++) = f.one();
                auto Sinv = inverse(S);
                if (!Sinv) throw ExpectationError("submodules: completion not invertible");
                auto A2 = *Sinv * m.A * S;
                auto B2 = *Sinv * m.B * S;

                auto block = [&](const Matrix<PrimeField>& mat, int r0, int c0, int sz) {
                    Matrix<PrimeField> out(f, sz, sz);
                    for (int i = 0; i < sz; ++i)
                        for (int j = 0; j < sz; ++j) out(i, j) = mat(r0 + i, c0 + j);
                    return out;
                };
                result.push_back(Submodule{
                    basis,
                    Pair(block(A2, 0, 0, k), block(B2, 0, 0, k)),
                    Pair(block(A2, k, k, n - k), block(B2, k, k, n - k))});
            }
        };
        pivot_rec(pivot_rec, 0, 0);
    }
    return result;
}

const std::map<std::pair<ClassId, ClassId>, BigInt>& structure_constants(const ClassTable& table,
                                                                         ClassId M) {
    if (auto it = table.tensor_cache.find(M); it != table.tensor_cache.end()) return it->second;

    const ModuleClass& m = table.at(M);
    std::map<std::pair<ClassId, ClassId>, BigInt> tensor;
    for (const auto& sub : submodules(m.rep)) {
        int k = sub.sub.size();
        if (k == 0 || k == m.length) continue;  // table classes have length >= 1
        ClassId n_id = table.classify(sub.sub);
        ClassId l_id = table.classify(sub.quot);
        tensor[{n_id, l_id}] += 1;
    }
    return table.tensor_cache.emplace(M, std::move(tensor)).first->second;
}

BigInt hall_number(const ClassTable& table, ClassId M, ClassId N, ClassId L) {
    if (N.first + L.first != M.first) return 0;  // documented convention
    table.at(N);
    table.at(L);
    const auto& tensor = structure_constants(table, M);
    auto it = tensor.find({N, L});
    return it == tensor.end() ? BigInt(0) : it->second;
}

void HallElement::add(ClassId id, const BigRat& c) {
    if (c == 0) return;
    auto [it, inserted] = coeffs.emplace(id, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) coeffs.erase(it);
    }
}

HallElement hall_product(const ClassTable& table, const HallElement& a, const HallElement& b) {
    HallElement out;
    for (const auto& [n_id, n_coeff] : a.coeffs)
        for (const auto& [l_id, l_coeff] : b.coeffs) {
            int m_len = n_id.first + l_id.first;
            const auto& targets = table.of_length(m_len);  // throws if not covered
            for (int m_idx = 0; m_idx < int(targets.size()); ++m_idx) {
                BigInt g = hall_number(table, {m_len, m_idx}, n_id, l_id);
                if (g != 0) out.add({m_len, m_idx}, n_coeff * l_coeff * BigRat(g));
            }
        }
    return out;
}

AssocReport check_associativity(const ClassTable& table, int L_max) {
    if (L_max > table.n_max)
        throw PreconditionError("check_associativity: table does not cover L_max");
    AssocReport report;
    std::vector<ClassId> ids;
    for (int len = 1; len <= L_max; ++len)
        for (int i = 0; i < int(table.of_length(len).size()); ++i) ids.push_back({len, i});

    for (ClassId n : ids)
        for (ClassId l : ids)
            for (ClassId p : ids) {
                if (n.first + l.first + p.first > L_max) continue;
                HallElement en, el, ep;
                en.add(n, 1);
                el.add(l, 1);
                ep.add(p, 1);
                auto left = hall_product(table, hall_product(table, en, el), ep);
                auto right = hall_product(table, en, hall_product(table, el, ep));
                ++report.triples_checked;
                if (!(left == right)) report.violations.push_back({n, l, p});
            }
    return report;
}

std::vector<CommutatorEntry> commutator_table(const ClassTable& table, int L_max) {
    std::vector<ClassId> ids;
    for (int len = 1; len <= L_max; ++len)
        for (int i = 0; i < int(table.of_length(len).size()); ++i) ids.push_back({len, i});

    std::vector<CommutatorEntry> entries;
    for (ClassId a : ids)
        for (ClassId b : ids) {
            if (a.first + b.first > L_max) continue;
            HallElement ea, eb;
            ea.add(a, 1);
            eb.add(b, 1);
            auto ab = hall_product(table, ea, eb);
            auto ba = hall_product(table, eb, ea);
            CommutatorEntry entry{a, b, 0, {}};
            for (const auto& [id, c] : ab.coeffs) entry.difference[id] += c;
            for (const auto& [id, c] : ba.coeffs) entry.difference[id] -= c;
            std::erase_if(entry.difference, [](const auto& kv) { return kv.second == 0; });
            for (const auto& [id, c] : entry.difference)
                entry.defect += boost::multiprecision::abs(boost::multiprecision::numerator(c));
            entries.push_back(std::move(entry));
        }
    return entries;
}

}  // namespace coha::hall
