#pragma once

#include "coha/matrix.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace coha::mc {

using Elem = PrimeField::Elem;
using Vec = std::vector<Elem>;

// Homogeneous element of a graded space: degree plus coordinate vector.
struct Graded {
    int deg = 0;
    Vec v;
};

// A finite-dimensional nilpotent dg-Lie algebra concentrated in degrees
// [0,2] over F_p (p odd), given by structure constants:
//   d0 : g0 -> g1,  d1 : g1 -> g2,
//   brackets [g0,g0]->g0, [g0,g1]->g1, [g0,g2]->g2, [g1,g1]->g2
// (the remaining graded components land in degree > 2 and vanish).
struct DgLie3 {
    using Tensor = std::vector<std::vector<Vec>>;  // [i][j] -> target coords

    PrimeField field;
    std::array<int, 3> dims{0, 0, 0};
    Matrix<PrimeField> d0, d1;
    Tensor b00, b01, b02, b11;

    DgLie3(PrimeField f, std::array<int, 3> dims_);

    // least c such that every c-fold nested bracket vanishes
    int nilpotency_class() const;

    // graded bracket of homogeneous elements; zero in degrees > 2
    Graded bracket(const Graded& x, const Graded& y) const;
    // the differential leaving degree `deg`
    Graded differential(const Graded& x) const;

    bool is_abelian() const;

    Vec zero_vec(int deg) const { return Vec(std::size_t(dims[std::size_t(deg)]), 0); }
};

// Runs the dg-Lie axioms in a fixed order and names the first violation.
struct ValidationResult {
    bool ok = true;
    std::string violation;  // empty on success
};

ValidationResult validate(const DgLie3& g);
void require_valid(const DgLie3& g);  // throws PreconditionError with the violation

// Solutions of d1 x + (1/2)[x,x] = 0, by full enumeration of g1.
std::vector<Vec> mc_set(const DgLie3& g);
bool is_mc(const DgLie3& g, const Vec& x);

// Campbell-Hausdorff product on g0, truncated by nilpotency.
Vec exp_group_mul(const DgLie3& g, const Vec& y1, const Vec& y2);

// Gauge action of exp(y) on x in g1:
//   e^y * x = e^(ad y)(x) - sum_{k>=0} (ad y)^k (d y) / (k+1)!
// The result satisfies the MC equation whenever x does (checked).
Vec gauge_act(const DgLie3& g, const Vec& y, const Vec& x);

struct GroupoidCard {
    BigInt object_count;               // |mc(g)|
    int orbit_count = 0;               // |pi_0|
    std::vector<BigInt> stabilizer_orders;  // sorted, one per orbit
    BigRat cardinality;                // sum over orbits of 1/|Aut|
    std::vector<Vec> orbit_reps;
};

// Orbits and stabilizers of the gauge action on mc(g); the orbit-stabilizer
// identity |orbit| * |Aut| = |G0| and cardinality = |mc|/|G0| are asserted.
GroupoidCard groupoid_card(const DgLie3& g);

// (dim H^0, dim H^1, dim H^2)
std::array<int, 3> cohomology_dims(const DgLie3& g);

// degreewise linear map g1 -> g2; phi[k] is dims2[k] x dims1[k]
struct DgMorphism {
    std::array<Matrix<PrimeField>, 3> phi;
};

struct CompareReport {
    GroupoidCard lhs, rhs;
    bool match = false;
};

// Checks phi is a dg-Lie quasi-isomorphism (precondition), then asserts the
// groupoid invariants agree and phi descends to a bijection on orbits.
CompareReport quasi_iso_compare(const DgLie3& g1, const DgLie3& g2, const DgMorphism& phi);

// A split extension g = h x| n presented inside g: the first h_dims[k] basis
// vectors of g^k span a sub-dg-Lie algebra h, the rest span a dg-ideal n.
struct FibrationInput {
    DgLie3 g;
    std::array<int, 3> h_dims{0, 0, 0};
};

struct FibrationSignResult {
    bool axioms_ok = true;        // every twisted fiber is a valid dg-Lie algebra
    bool set_identity_ok = false; // |mc(g)| = sum_x |mc(n_x)|
    bool card_identity_ok = false;
    BigInt fiber_sum;
    std::string failure;  // first failure description, if any
};

struct FibrationReport {
    BigInt mc_g;
    BigInt mc_h;
    FibrationSignResult plus, minus;  // twist d + ad(x) vs d - ad(x)
    // signs under which everything passes: "+", "-", "+-" or ""
    std::string passing_signs() const;
};

FibrationReport fibration_count(const FibrationInput& input);

// --- shipped example catalog -------------------------------------------------

struct CardExpectation {
    BigInt object_count;
    int orbit_count = 0;
    std::vector<BigInt> stabilizer_orders;
};

struct CatalogAlgebra {
    std::string id;
    DgLie3 algebra;
    CardExpectation expected;
};

struct CatalogQisPair {
    std::string id;
    std::string lhs_id, rhs_id;
    DgLie3 lhs, rhs;
    DgMorphism phi;
};

struct CatalogFibration {
    std::string id;
    FibrationInput input;
    std::string expected_sign;  // "+" or "-" or "+-"
    BigInt expected_mc_g;
};

struct Catalog {
    std::vector<CatalogAlgebra> algebras;
    std::vector<CatalogQisPair> qis_pairs;
    std::vector<CatalogFibration> fibrations;

    const CatalogAlgebra& algebra(const std::string& id) const;
    const CatalogQisPair& qis_pair(const std::string& lhs_id, const std::string& rhs_id) const;
    const CatalogFibration& fibration(const std::string& id) const;
};

Catalog load_catalog(const std::string& path);

}  // namespace coha::mc
