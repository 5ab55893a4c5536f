#include "paranil/arith.hpp"

#include <algorithm>
#include <sstream>

namespace paranil {

Integer int_gcdext(const Integer& a, const Integer& b, Integer& u, Integer& v) {
  Integer g;
  mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), a.get_mpz_t(),
             b.get_mpz_t());
  return g;
}

Integer exact_div(const Integer& n, const Integer& d) {
  if (d == 0) throw error("exact_div: division by zero");
  Integer q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  if (r != 0) throw error("exact_div: not divisible");
  return q;
}

bool is_prime(const Integer& n) {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

std::vector<Integer> prime_divisors(const Integer& n) {
  if (n == 0) throw error("prime_divisors: zero has no factorization");
  Integer m = abs(n);
  std::vector<Integer> out;
  for (Integer p = 2; p * p <= m && p < 1000000; p == 2 ? p = 3 : p += 2) {
    if (m % p == 0) {
      out.push_back(p);
      while (m % p == 0) m = exact_div(m, p);
    }
  }
  if (m > 1) {
    if (!is_prime(m))
      throw error("prime_divisors: cofactor " + m.get_str() +
                  " out of trial-division range and not prime");
    out.push_back(m);
  }
  return out;
}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  e_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw error("IntMatrix: ragged initializer");
    for (long x : r) e_.emplace_back(x);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; i++) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
  if (cols_ != other.rows_) throw error("IntMatrix: dimension mismatch in *");
  IntMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; i++)
    for (std::size_t k = 0; k < cols_; k++) {
      const Integer& a = at(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < other.cols_; j++)
        out.at(i, j) += a * other.at(k, j);
    }
  return out;
}

IntMatrix IntMatrix::operator+(const IntMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw error("IntMatrix: dimension mismatch in +");
  IntMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < e_.size(); i++) out.e_[i] = e_[i] + other.e_[i];
  return out;
}

IntMatrix IntMatrix::operator-(const IntMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw error("IntMatrix: dimension mismatch in -");
  IntMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < e_.size(); i++) out.e_[i] = e_[i] - other.e_[i];
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; i++)
    for (std::size_t j = 0; j < cols_; j++) out.at(j, i) = at(i, j);
  return out;
}

IntMatrix IntMatrix::pow(const Integer& k) const {
  if (rows_ != cols_) throw error("IntMatrix: pow of non-square matrix");
  if (k < 0) throw error("IntMatrix: negative matrix power");
  IntMatrix result = identity(rows_);
  IntMatrix base = *this;
  Integer n = k;
  while (n > 0) {
    if (mpz_odd_p(n.get_mpz_t())) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

bool IntMatrix::is_zero() const {
  return std::all_of(e_.begin(), e_.end(),
                     [](const Integer& x) { return x == 0; });
}

bool IntMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  return *this == identity(rows_);
}

std::vector<Integer> IntMatrix::row(std::size_t i) const {
  return std::vector<Integer>(e_.begin() + i * cols_,
                              e_.begin() + (i + 1) * cols_);
}

std::vector<Integer> IntMatrix::col(std::size_t j) const {
  std::vector<Integer> out(rows_);
  for (std::size_t i = 0; i < rows_; i++) out[i] = at(i, j);
  return out;
}

Integer IntMatrix::determinant() const {
  if (rows_ != cols_) throw error("determinant: non-square matrix");
  const std::size_t n = rows_;
  if (n == 0) return 1;
  IntMatrix a = *this;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; k++) {
    if (a.at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a.at(p, k) == 0) p++;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; j++) std::swap(a.at(k, j), a.at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; i++)
      for (std::size_t j = k + 1; j < n; j++)
        a.at(i, j) = exact_div(a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j),
                               prev);
    prev = a.at(k, k);
  }
  return sign > 0 ? a.at(n - 1, n - 1) : Integer(-a.at(n - 1, n - 1));
}

IntMatrix IntMatrix::inverse_unimodular() const {
  if (rows_ != cols_) throw error("inverse_unimodular: non-square matrix");
  HermiteResult hr = hermite_normal_form(*this);
  if (!hr.h.is_identity())
    throw error("inverse_unimodular: matrix is not unimodular");
  return hr.u;
}

std::vector<Integer> IntMatrix::characteristic_polynomial() const {
  if (rows_ != cols_) throw error("characteristic_polynomial: non-square");
  const std::size_t n = rows_;
  // Faddeev-LeVerrier: c_n = 1, M_1 = A, c_{n-k} = -tr(A M_k)/k,
  // M_{k+1} = A M_k + c_{n-k} I. Divisions are exact over Z.
  std::vector<Integer> c(n + 1, Integer(0));
  c[n] = 1;
  IntMatrix m = identity(n);
  for (std::size_t k = 1; k <= n; k++) {
    m = (*this) * m;
    Integer tr = 0;
    for (std::size_t i = 0; i < n; i++) tr += m.at(i, i);
    Integer ck = exact_div(-tr, Integer(static_cast<long>(k)));
    c[n - k] = ck;
    for (std::size_t i = 0; i < n; i++) m.at(i, i) += ck;
  }
  return c;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; i++) {
    if (i) os << ",";
    os << "[";
    for (std::size_t j = 0; j < cols_; j++) {
      if (j) os << ",";
      os << at(i, j);
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

namespace {

void add_row_multiple(IntMatrix& m, std::size_t dst, std::size_t src,
                      const Integer& q) {
  if (q == 0) return;
  for (std::size_t j = 0; j < m.cols(); j++) m.at(dst, j) += q * m.at(src, j);
}

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); j++) std::swap(m.at(a, j), m.at(b, j));
}

void negate_row(IntMatrix& m, std::size_t i) {
  for (std::size_t j = 0; j < m.cols(); j++) m.at(i, j) = -m.at(i, j);
}

}  // namespace

HermiteResult hermite_normal_form(const IntMatrix& m) {
  const std::size_t nr = m.rows(), nc = m.cols();
  HermiteResult res{m, IntMatrix::identity(nr)};
  IntMatrix& h = res.h;
  IntMatrix& u = res.u;

  std::size_t r = 0;
  for (std::size_t c = 0; c < nc && r < nr; c++) {
    // clear column c below row r by repeated division at the smallest entry
    for (;;) {
      std::size_t best = nr;
      for (std::size_t i = r; i < nr; i++) {
        if (h.at(i, c) == 0) continue;
        if (best == nr || mpz_cmpabs(h.at(i, c).get_mpz_t(),
                                 h.at(best, c).get_mpz_t()) < 0)
          best = i;
      }
      if (best == nr) break;  // column empty below r
      swap_rows(h, r, best);
      swap_rows(u, r, best);
      if (h.at(r, c) < 0) {
        negate_row(h, r);
        negate_row(u, r);
      }
      bool clean = true;
      for (std::size_t i = r + 1; i < nr; i++) {
        if (h.at(i, c) == 0) continue;
        Integer q = fdiv_q(h.at(i, c), h.at(r, c));
        add_row_multiple(h, i, r, -q);
        add_row_multiple(u, i, r, -q);
        if (h.at(i, c) != 0) clean = false;
      }
      if (clean) {
        // reduce entries above the pivot into [0, pivot)
        for (std::size_t i = 0; i < r; i++) {
          Integer q = fdiv_q(h.at(i, c), h.at(r, c));
          add_row_multiple(h, i, r, -q);
          add_row_multiple(u, i, r, -q);
        }
        r++;
        break;
      }
    }
  }
  return res;
}

namespace {

void add_col_multiple(IntMatrix& m, std::size_t dst, std::size_t src,
                      const Integer& q) {
  if (q == 0) return;
  for (std::size_t i = 0; i < m.rows(); i++) m.at(i, dst) += q * m.at(i, src);
}

void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows(); i++) std::swap(m.at(i, a), m.at(i, b));
}

}  // namespace

SmithResult smith_normal_form(const IntMatrix& m) {
  const std::size_t nr = m.rows(), nc = m.cols();
  SmithResult res{m, IntMatrix::identity(nr), IntMatrix::identity(nc)};
  IntMatrix& s = res.s;
  IntMatrix& u = res.u;
  IntMatrix& v = res.v;

  const std::size_t nd = std::min(nr, nc);
  for (std::size_t t = 0; t < nd; t++) {
    for (;;) {
      // smallest nonzero entry of the trailing submatrix as pivot
      std::size_t pi = nr, pj = nc;
      for (std::size_t i = t; i < nr; i++)
        for (std::size_t j = t; j < nc; j++) {
          if (s.at(i, j) == 0) continue;
          if (pi == nr || mpz_cmpabs(s.at(i, j).get_mpz_t(),
                                 s.at(pi, pj).get_mpz_t()) < 0) {
            pi = i;
            pj = j;
          }
        }
      if (pi == nr) {
        for (std::size_t k = t; k < nd; k++) s.at(k, k) = 0;
        return res;  // trailing submatrix is zero
      }
      swap_rows(s, t, pi);
      swap_rows(u, t, pi);
      swap_cols(s, t, pj);
      swap_cols(v, t, pj);
      if (s.at(t, t) < 0) {
        negate_row(s, t);
        negate_row(u, t);
      }
      bool clean = true;
      for (std::size_t i = t + 1; i < nr; i++) {
        Integer q = fdiv_q(s.at(i, t), s.at(t, t));
        add_row_multiple(s, i, t, -q);
        add_row_multiple(u, i, t, -q);
        if (s.at(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < nc; j++) {
        Integer q = fdiv_q(s.at(t, j), s.at(t, t));
        add_col_multiple(s, j, t, -q);
        add_col_multiple(v, j, t, -q);
        if (s.at(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // enforce divisibility: pivot must divide the whole trailing block
      bool divides = true;
      for (std::size_t i = t + 1; i < nr && divides; i++)
        for (std::size_t j = t + 1; j < nc && divides; j++)
          if (s.at(i, j) % s.at(t, t) != 0) {
            add_row_multiple(s, t, i, Integer(1));
            add_row_multiple(u, t, i, Integer(1));
            divides = false;
          }
      if (divides) break;
    }
  }
  return res;
}

Integer AbelianInvariants::order() const {
  if (rank != 0) throw error("AbelianInvariants: infinite group has no order");
  Integer n = 1;
  for (const Integer& d : divisors) n *= d;
  return n;
}

Integer AbelianInvariants::torsion_exponent() const {
  return divisors.empty() ? Integer(1) : divisors.back();
}

std::vector<Integer> AbelianInvariants::torsion_primes() const {
  if (divisors.empty()) return {};
  Integer n = 1;
  for (const Integer& d : divisors) n *= d;
  return prime_divisors(n);
}

std::string AbelianInvariants::to_string() const {
  std::ostringstream os;
  os << "rank " << rank << ", divisors (";
  for (std::size_t i = 0; i < divisors.size(); i++) {
    if (i) os << ",";
    os << divisors[i];
  }
  os << ")";
  return os.str();
}

AbelianInvariants abelian_invariants_from_relations(const IntMatrix& relations,
                                                    std::size_t ncols) {
  if (relations.rows() != 0 && relations.cols() != ncols)
    throw error("abelian_invariants_from_relations: column count mismatch");
  AbelianInvariants inv;
  if (relations.rows() == 0) {
    inv.rank = static_cast<long>(ncols);
    return inv;
  }
  SmithResult sr = smith_normal_form(relations);
  std::size_t nd = std::min(relations.rows(), ncols);
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < nd; k++) {
    const Integer& d = sr.s.at(k, k);
    if (d == 0) break;
    nonzero++;
    if (d >= 2) inv.divisors.push_back(d);
  }
  inv.rank = static_cast<long>(ncols - nonzero);
  return inv;
}

std::vector<std::vector<Integer>> integer_kernel(const IntMatrix& m) {
  HermiteResult hr = hermite_normal_form(m);
  std::vector<std::vector<Integer>> out;
  for (std::size_t i = 0; i < m.rows(); i++) {
    bool zero = true;
    for (std::size_t j = 0; j < m.cols() && zero; j++)
      if (hr.h.at(i, j) != 0) zero = false;
    if (zero) out.push_back(hr.u.row(i));
  }
  return out;
}

std::vector<AbelianBasisElement> abelian_basis(const IntMatrix& relations,
                                               std::size_t ncols) {
  std::vector<AbelianBasisElement> out;
  if (relations.rows() == 0) {
    for (std::size_t j = 0; j < ncols; j++) {
      AbelianBasisElement e;
      e.vec.assign(ncols, Integer(0));
      e.vec[j] = 1;
      e.order = 0;
      out.push_back(std::move(e));
    }
    return out;
  }
  if (relations.cols() != ncols)
    throw error("abelian_basis: column count mismatch");
  SmithResult sr = smith_normal_form(relations);
  IntMatrix vinv = sr.v.inverse_unimodular();
  const std::size_t nd = std::min(relations.rows(), ncols);
  for (std::size_t j = 0; j < ncols; j++) {
    Integer order = j < nd ? sr.s.at(j, j) : Integer(0);
    if (order == 1) continue;
    AbelianBasisElement e;
    e.vec = vinv.row(j);
    e.order = order;
    out.push_back(std::move(e));
  }
  return out;
}

LatticeMembership lattice_membership(
    const std::vector<std::vector<Integer>>& generators,
    const std::vector<Integer>& v) {
  const std::size_t k = generators.size();
  const std::size_t n = v.size();
  for (const auto& g : generators)
    if (g.size() != n) throw error("lattice_membership: dimension mismatch");

  LatticeMembership out;
  if (k == 0) {
    bool zero = std::all_of(v.begin(), v.end(),
                            [](const Integer& x) { return x == 0; });
    out.member = zero;
    return out;
  }

  IntMatrix g(k, n);
  for (std::size_t i = 0; i < k; i++)
    for (std::size_t j = 0; j < n; j++) g.at(i, j) = generators[i][j];
  HermiteResult hr = hermite_normal_form(g);

  // peel v off against the echelon rows; pivots must divide exactly
  std::vector<Integer> rem = v;
  std::vector<Integer> q(k, Integer(0));
  for (std::size_t i = 0; i < k; i++) {
    std::size_t p = 0;
    while (p < n && hr.h.at(i, p) == 0) p++;
    if (p == n) break;  // zero rows follow
    Integer quo, r;
    mpz_fdiv_qr(quo.get_mpz_t(), r.get_mpz_t(), rem[p].get_mpz_t(),
                hr.h.at(i, p).get_mpz_t());
    if (r != 0) return out;  // not in the lattice
    q[i] = quo;
    if (quo != 0)
      for (std::size_t j = 0; j < n; j++) rem[j] -= quo * hr.h.at(i, j);
  }
  for (std::size_t j = 0; j < n; j++)
    if (rem[j] != 0) return out;

  // coefficients over the original generators: q * U
  out.member = true;
  out.coefficients.assign(k, Integer(0));
  for (std::size_t j = 0; j < k; j++)
    for (std::size_t i = 0; i < k; i++)
      out.coefficients[j] += q[i] * hr.u.at(i, j);
  return out;
}

}  // namespace paranil
