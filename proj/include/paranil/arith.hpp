#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace paranil {

// Exact arbitrary-precision signed integer. All group exponents, matrix
// entries and indices in the toolkit are of this type; nothing overflows.
using Integer = mpz_class;

struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

inline Integer int_gcd(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Integer int_lcm(const Integer& a, const Integer& b) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

// g = gcd(a,b) together with u,v such that u*a + v*b = g.
Integer int_gcdext(const Integer& a, const Integer& b, Integer& u, Integer& v);

// Floor division: quotient rounded toward -infinity, remainder in [0, |d|).
inline Integer fdiv_q(const Integer& n, const Integer& d) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return q;
}

inline Integer fdiv_r(const Integer& n, const Integer& d) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return r;
}

// Exact division; throws if d does not divide n.
Integer exact_div(const Integer& n, const Integer& d);

bool is_prime(const Integer& n);

// Prime factorization by trial division (desk-scale inputs). Returns the
// sorted list of distinct prime divisors of |n|; n must be nonzero.
std::vector<Integer> prime_divisors(const Integer& n);

// Dense rectangular matrix over Z, row-major.
class IntMatrix {
 public:
  IntMatrix() : rows_(0), cols_(0) {}
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), e_(rows * cols, Integer(0)) {}
  // Construct from nested initializer rows; all rows must have equal length.
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const Integer& at(std::size_t i, std::size_t j) const {
    return e_[i * cols_ + j];
  }

  IntMatrix operator*(const IntMatrix& other) const;
  IntMatrix operator+(const IntMatrix& other) const;
  IntMatrix operator-(const IntMatrix& other) const;
  bool operator==(const IntMatrix& other) const = default;

  IntMatrix transposed() const;
  IntMatrix pow(const Integer& k) const;  // k >= 0, square matrices
  bool is_zero() const;
  bool is_identity() const;

  std::vector<Integer> row(std::size_t i) const;
  std::vector<Integer> col(std::size_t j) const;

  // Fraction-free (Bareiss) determinant; square matrices only.
  Integer determinant() const;

  // Inverse of a unimodular matrix (|det| = 1); throws otherwise.
  IntMatrix inverse_unimodular() const;

  // Characteristic polynomial det(tI - M), coefficients low degree first
  // (Faddeev-LeVerrier; all divisions exact over Z).
  std::vector<Integer> characteristic_polynomial() const;

  std::string to_string() const;

 private:
  std::size_t rows_, cols_;
  std::vector<Integer> e_;
};

struct HermiteResult {
  IntMatrix h;  // row-style Hermite normal form
  IntMatrix u;  // unimodular, u * m = h
};

// Row-style HNF: pivots positive, entries above a pivot reduced into
// [0, pivot), zero rows at the bottom. The single canonical echelon form
// used by every lattice and subgroup computation in the toolkit.
HermiteResult hermite_normal_form(const IntMatrix& m);

struct SmithResult {
  IntMatrix s;  // diagonal, nonnegative, s_1 | s_2 | ...
  IntMatrix u;  // unimodular
  IntMatrix v;  // unimodular, u * m * v = s
};

// Smith normal form with smallest-nonzero-entry pivoting and full reduction.
SmithResult smith_normal_form(const IntMatrix& m);

// Rank + elementary divisors of a finitely generated abelian group, in the
// unique canonical form: divisors >= 2 forming a divisibility chain.
struct AbelianInvariants {
  long rank = 0;
  std::vector<Integer> divisors;

  bool operator==(const AbelianInvariants& other) const = default;

  bool is_trivial() const { return rank == 0 && divisors.empty(); }
  bool is_finite() const { return rank == 0; }
  // Group order; only valid when finite.
  Integer order() const;
  // Exponent of the torsion part (1 when torsion-free).
  Integer torsion_exponent() const;
  // Distinct primes dividing the torsion order.
  std::vector<Integer> torsion_primes() const;

  std::string to_string() const;
};

// Invariants of Z^ncols modulo the row lattice of `relations`.
AbelianInvariants abelian_invariants_from_relations(const IntMatrix& relations,
                                                    std::size_t ncols);

// Rows spanning the left kernel {v : v * M = 0}.
std::vector<std::vector<Integer>> integer_kernel(const IntMatrix& m);

// Explicit basis of Z^ncols modulo the row lattice of `relations`: vectors
// g_j with orders s_j (0 = infinite) such that the quotient is the direct
// sum of the cyclic groups <g_j>. Entries of order 1 are omitted.
struct AbelianBasisElement {
  std::vector<Integer> vec;
  Integer order;  // 0 = infinite
};
std::vector<AbelianBasisElement> abelian_basis(const IntMatrix& relations,
                                               std::size_t ncols);

struct LatticeMembership {
  bool member = false;
  // Coefficients c with sum_i c_i * generators_i = v (present iff member).
  std::vector<Integer> coefficients;
};

// Decides membership of v in the integer row span of `generators` (all
// vectors of equal dimension) and returns witnessing coefficients.
LatticeMembership lattice_membership(
    const std::vector<std::vector<Integer>>& generators,
    const std::vector<Integer>& v);

}  // namespace paranil
