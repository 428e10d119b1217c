#pragma once

#include "coha/commvar.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace coha::hall {

using Pair = commvar::CommPair<PrimeField>;

// Cheap simultaneous-conjugacy invariants, used only to prefilter the
// exhaustive GL search; correctness never depends on them.
struct Fingerprint {
    std::vector<std::uint32_t> data;
    bool operator==(const Fingerprint&) const = default;
    auto operator<=>(const Fingerprint&) const = default;
};

Fingerprint fingerprint(const Pair& m);

// Simultaneous conjugacy: exists g in GL_n with gA1g^-1 = A2, gB1g^-1 = B2.
// Fingerprint filter followed by exhaustive search over GL_n(F_p).
bool is_isomorphic(const Pair& m, const Pair& n);

// identifier of a class inside a table: (length, index in enumeration order)
using ClassId = std::pair<int, int>;

std::string class_name(ClassId id);
ClassId parse_class_name(const std::string& name);

struct ModuleClass {
    int length = 0;
    Pair rep;
    BigInt aut_order;  // |{g in GL_n : gA = Ag, gB = Bg}|
    Fingerprint fp;
    std::string name;
};

// One representative per simultaneous-conjugacy orbit of commuting pairs,
// for every length n <= n_max, with automorphism-group orders.
struct ClassTable {
    PrimeField field;
    int n_max = 0;
    std::vector<std::vector<ModuleClass>> classes;  // classes[len], len in 1..n_max

    const std::vector<ModuleClass>& of_length(int len) const;
    const ModuleClass& at(ClassId id) const;
    // class of an arbitrary commuting pair (its length must be covered)
    ClassId classify(const Pair& m) const;

    // g^M_{N,L} for all (N, L), filled in one submodule walk per M
    mutable std::map<ClassId, std::map<std::pair<ClassId, ClassId>, BigInt>> tensor_cache;
};

// All nonzero g^M_{N,L} for a fixed M, keyed by (N, L).
const std::map<std::pair<ClassId, ClassId>, BigInt>& structure_constants(const ClassTable& table,
                                                                         ClassId M);

ClassTable enumerate_classes(int n_max, PrimeField field);

// A subspace invariant under both matrices, with the induced action on the
// subspace and on the quotient.
struct Submodule {
    Matrix<PrimeField> basis;  // rows = echelon basis of the subspace
    Pair sub, quot;
};

std::vector<Submodule> submodules(const Pair& m);

// g^M_{N,L} = #{ U <= M : U iso N as the sub, M/U iso L }.
// N is the sub and L the quotient; length mismatch counts as 0.
BigInt hall_number(const ClassTable& table, ClassId M, ClassId N, ClassId L);

// finitely supported rational linear combination of classes
struct HallElement {
    std::map<ClassId, BigRat> coeffs;

    void add(ClassId id, const BigRat& c);
    bool operator==(const HallElement&) const = default;
};

// [N]*[L] = sum_M g^M_{N,L} [M], extended bilinearly.
HallElement hall_product(const ClassTable& table, const HallElement& a, const HallElement& b);

struct AssocViolation {
    ClassId n, l, p;
};

struct AssocReport {
    int triples_checked = 0;
    std::vector<AssocViolation> violations;
};

// ([N][L])[P] = [N]([L][P]) for every class triple with total length <= L_max.
AssocReport check_associativity(const ClassTable& table, int L_max);

struct CommutatorEntry {
    ClassId lhs, rhs;
    BigInt defect;  // sum_M |g^M_{lhs,rhs} - g^M_{rhs,lhs}|
    std::map<ClassId, BigRat> difference;
};

// Measures [N][L] - [L][N] for pairs with total length <= L_max.  Reporting
// only; the homology-level commutativity theorem says nothing about these
// counting constants, so no expectation is asserted.
std::vector<CommutatorEntry> commutator_table(const ClassTable& table, int L_max);

}  // namespace coha::hall
