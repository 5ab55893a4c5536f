#include "paranil/nilpotent.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace paranil {

// --- PrimeSet -------------------------------------------------------------

PrimeSet PrimeSet::finite_set(std::vector<Integer> ps) {
  PrimeSet s;
  s.kind = Kind::finite;
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  for (const Integer& p : ps)
    if (!is_prime(p)) throw error("PrimeSet: " + p.get_str() + " is not prime");
  s.primes = std::move(ps);
  return s;
}

PrimeSet PrimeSet::complement_of(std::vector<Integer> ps) {
  PrimeSet s = finite_set(std::move(ps));
  s.kind = Kind::cofinite;
  return s;
}

bool PrimeSet::contains(const Integer& p) const {
  bool listed = std::binary_search(primes.begin(), primes.end(), p);
  return kind == Kind::finite ? listed : !listed;
}

bool PrimeSet::is_pi_number(const Integer& n) const {
  if (n == 0) throw error("PrimeSet: zero is not a pi-number candidate");
  if (n == 1 || n == -1) return true;
  for (const Integer& p : prime_divisors(n))
    if (!contains(p)) return false;
  return true;
}

PrimeSet PrimeSet::complement() const {
  PrimeSet s = *this;
  s.kind = kind == Kind::finite ? Kind::cofinite : Kind::finite;
  return s;
}

std::string PrimeSet::to_string() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < primes.size(); i++) {
    if (i) os << ",";
    os << primes[i];
  }
  os << "}";
  if (kind == Kind::cofinite) os << "'";
  return os.str();
}

// --- Subgroup: canonical induced generating sequences ----------------------

namespace {

int leading_col(const ExponentVector& u) {
  for (int i = 0; i < static_cast<int>(u.size()); i++)
    if (u[i] != 0) return i;
  return -1;
}

}  // namespace

Subgroup Subgroup::trivial(PcPresentationPtr p) { return Subgroup(std::move(p)); }

Subgroup Subgroup::whole(PcPresentationPtr p) {
  Subgroup s(p);
  for (int i = 0; i < p->ngens(); i++) {
    s.igs_.push_back(p->generator(i));
    s.leading_.push_back(i);
  }
  return s;
}

Subgroup Subgroup::generated_by(PcPresentationPtr p,
                                std::vector<ExponentVector> gens) {
  Subgroup s(std::move(p));
  for (ExponentVector& g : gens) s.insert(std::move(g));
  s.close();
  return s;
}

Subgroup Subgroup::normal_closure(PcPresentationPtr p,
                                  std::vector<ExponentVector> gens) {
  Subgroup s = generated_by(p, std::move(gens));
  const PcPresentation& g = *s.ambient_;
  for (;;) {
    std::vector<ExponentVector> missing;
    for (const ExponentVector& u : s.igs_)
      for (int i = 0; i < g.ngens(); i++) {
        ExponentVector c1 = g.conjugate(u, g.generator(i));
        if (!s.contains(c1)) missing.push_back(c1);
        ExponentVector c2 = g.conjugate(u, g.invert(g.generator(i)));
        if (!s.contains(c2)) missing.push_back(c2);
      }
    if (missing.empty()) break;
    for (ExponentVector& u : missing) s.insert(std::move(u));
    s.close();
  }
  return s;
}

Integer Subgroup::relative_order(int k) const {
  const Integer& o = ambient_->relative_order(leading_[k]);
  if (o == 0) return 0;
  return exact_div(o, leading_exp(k));
}

bool Subgroup::is_whole() const {
  if (size() != ambient_->ngens()) return false;
  for (int k = 0; k < size(); k++)
    if (leading_[k] != k || leading_exp(k) != 1) return false;
  return true;
}

long Subgroup::hirsch_length() const {
  long h = 0;
  for (int k = 0; k < size(); k++)
    if (relative_order(k) == 0) h++;
  return h;
}

Integer Subgroup::order() const {
  Integer n = 1;
  for (int k = 0; k < size(); k++) {
    Integer o = relative_order(k);
    if (o == 0) return 0;
    n *= o;
  }
  return n;
}

void Subgroup::insert(ExponentVector u) {
  const PcPresentation& g = *ambient_;
  std::vector<ExponentVector> queue;
  queue.push_back(std::move(u));
  while (!queue.empty()) {
    ExponentVector v = std::move(queue.back());
    queue.pop_back();
    for (;;) {
      int l = leading_col(v);
      if (l < 0) break;  // identity
      const Integer& o = g.relative_order(l);
      if (o == 0 && v[l] < 0) v = g.invert(v);
      // slot for column l, table kept sorted by leading column
      std::size_t pos = 0;
      while (pos < igs_.size() && leading_[pos] < l) pos++;
      if (pos == igs_.size() || leading_[pos] != l) {
        igs_.insert(igs_.begin() + pos, v);
        leading_.insert(leading_.begin() + pos, l);
        break;
      }
      ExponentVector& w = igs_[pos];
      const Integer e = v[l], dw = w[l];
      Integer d, x, y;
      if (o == 0) {
        d = int_gcdext(e, dw, x, y);
      } else {
        Integer a, b, c, cc;
        Integer g1 = int_gcdext(e, dw, a, b);
        d = int_gcdext(g1, o, c, cc);
        x = a * c;
        y = b * c;
      }
      if (d == dw) {
        // w already minimal at l; peel v and keep going deeper
        Integer q = exact_div(e, dw);
        v = g.multiply(g.power(w, -q), v);
        continue;
      }
      // combine to realize the gcd, requeue the displaced entry
      ExponentVector wn = g.multiply(g.power(v, x), g.power(w, y));
      if (leading_col(wn) != l || wn[l] != d)
        throw error("igs insert: gcd combination failed");
      ExponentVector old = std::move(w);
      igs_[pos] = std::move(wn);
      queue.push_back(std::move(old));
      // v still reduces against the new entry on the next pass
    }
  }
}

void Subgroup::close() {
  const PcPresentation& g = *ambient_;
  for (;;) {
    std::vector<ExponentVector> missing;
    auto test = [&](const ExponentVector& x) {
      if (!contains(x)) missing.push_back(x);
    };
    for (std::size_t i = 0; i < igs_.size(); i++) {
      // power overflow into the deeper part of the chain
      Integer ro = relative_order(static_cast<int>(i));
      if (ro != 0) test(g.power(igs_[i], ro));
      for (std::size_t j = i + 1; j < igs_.size(); j++) {
        test(g.conjugate(igs_[j], igs_[i]));
        test(g.conjugate(igs_[j], g.invert(igs_[i])));
      }
    }
    if (missing.empty()) break;
    for (ExponentVector& u : missing) insert(std::move(u));
  }
  canonicalize();
}

void Subgroup::canonicalize() {
  const PcPresentation& g = *ambient_;
  // reduce entries of shallower elements at deeper igs columns, left to right
  for (std::size_t k = 0; k < igs_.size(); k++) {
    const int col = leading_[k];
    const Integer& d = igs_[k][col];
    for (std::size_t i = 0; i < k; i++) {
      Integer q = fdiv_q(igs_[i][col], d);
      if (q != 0) igs_[i] = g.multiply(igs_[i], g.power(igs_[k], -q));
    }
  }
}

Subgroup::Membership Subgroup::membership(const ExponentVector& u) const {
  const PcPresentation& g = *ambient_;
  Membership m;
  m.exponents.assign(igs_.size(), Integer(0));
  ExponentVector v = u;
  for (;;) {
    int l = leading_col(v);
    if (l < 0) {
      m.member = true;
      return m;
    }
    std::size_t pos = 0;
    while (pos < igs_.size() && leading_[pos] < l) pos++;
    if (pos == igs_.size() || leading_[pos] != l) return m;  // not a member
    const Integer& d = igs_[pos][l];
    Integer q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v[l].get_mpz_t(), d.get_mpz_t());
    if (r != 0) return m;
    m.exponents[pos] = q;
    v = g.multiply(g.power(igs_[pos], -q), v);
    if (leading_col(v) <= l && leading_col(v) >= 0)
      throw error("igs membership: reduction did not progress");
  }
}

bool Subgroup::contains(const ExponentVector& u) const {
  return membership(u).member;
}

bool Subgroup::contains_subgroup(const Subgroup& other) const {
  for (const ExponentVector& u : other.igs_)
    if (!contains(u)) return false;
  return true;
}

bool Subgroup::operator==(const Subgroup& other) const {
  return ambient_.get() == other.ambient_.get() && igs_ == other.igs_;
}

ExponentVector Subgroup::reduce(const ExponentVector& u) const {
  const PcPresentation& g = *ambient_;
  ExponentVector v = u;
  for (std::size_t k = 0; k < igs_.size(); k++) {
    const int l = leading_[k];
    Integer q = fdiv_q(v[l], igs_[k][l]);
    if (q != 0) v = g.multiply(v, g.power(igs_[k], -q));
  }
  return v;
}

bool Subgroup::is_normal() const {
  const PcPresentation& g = *ambient_;
  for (const ExponentVector& u : igs_)
    for (int i = 0; i < g.ngens(); i++) {
      if (!contains(g.conjugate(u, g.generator(i)))) return false;
      if (!contains(g.conjugate(u, g.invert(g.generator(i))))) return false;
    }
  return true;
}

bool Subgroup::is_abelian() const {
  const PcPresentation& g = *ambient_;
  for (std::size_t i = 0; i < igs_.size(); i++)
    for (std::size_t j = i + 1; j < igs_.size(); j++)
      if (!g.is_identity(g.commutator(igs_[i], igs_[j]))) return false;
  return true;
}

bool Subgroup::invariant_under(const ExponentVector& x) const {
  const PcPresentation& g = *ambient_;
  for (const ExponentVector& u : igs_) {
    if (!contains(g.conjugate(u, x))) return false;
    if (!contains(g.conjugate(u, g.invert(x)))) return false;
  }
  return true;
}

Subgroup Subgroup::join(const Subgroup& other) const {
  if (ambient_.get() != other.ambient_.get())
    throw error("join: subgroups of different groups");
  std::vector<ExponentVector> gens = igs_;
  gens.insert(gens.end(), other.igs_.begin(), other.igs_.end());
  return generated_by(ambient_, std::move(gens));
}

// --- subgroup presentation --------------------------------------------------

SubgroupPresentation subgroup_presentation(const Subgroup& s) {
  const PcPresentation& g = *s.ambient();
  const int r = s.size();
  std::vector<std::string> names;
  std::vector<Integer> orders;
  for (int k = 0; k < r; k++) {
    names.push_back("s" + std::to_string(k + 1));
    orders.push_back(s.relative_order(k));
  }
  PcPresentation pres(names, orders);

  auto express = [&](const ExponentVector& el, int above) {
    Subgroup::Membership m = s.membership(el);
    if (!m.member)
      throw error("subgroup_presentation: closure is incomplete");
    for (int t = 0; t <= above; t++)
      if (m.exponents[t] != 0)
        throw error("subgroup_presentation: relation not in the deeper part");
    return m.exponents;
  };

  for (int k = 0; k < r; k++) {
    Integer ro = orders[k];
    if (ro != 0) {
      ExponentVector rhs = express(g.power(s.igs()[k], ro), k);
      bool trivialw = std::all_of(rhs.begin(), rhs.end(),
                                  [](const Integer& x) { return x == 0; });
      if (!trivialw) pres.set_power(k, rhs);
    }
  }
  for (int i = 0; i < r; i++)
    for (int j = i + 1; j < r; j++) {
      ExponentVector cij = express(g.conjugate(s.igs()[j], s.igs()[i]), i);
      ExponentVector triv(r, Integer(0));
      triv[j] = 1;
      bool nontrivial = cij != triv;
      if (nontrivial) pres.set_conjugate(i, j, cij);
      if (orders[i] == 0 && nontrivial) {
        ExponentVector cinv =
            express(g.conjugate(s.igs()[j], g.invert(s.igs()[i])), i);
        pres.set_conjugate_inverse(i, j, cinv);
      }
    }
  SubgroupPresentation out;
  out.presentation = finish_presentation(std::move(pres));
  out.inclusion = GroupHom{out.presentation, s.ambient(), s.igs(), false};
  CheckReport hv = verify_hom(out.inclusion);
  if (!hv.passed())
    throw error("subgroup_presentation: inclusion failed verification");
  return out;
}

// --- quotient presentation ---------------------------------------------------

ExponentVector QuotientResult::lift(const ExponentVector& u) const {
  ExponentVector v(projection.domain->ngens(), Integer(0));
  for (std::size_t k = 0; k < kept.size(); k++) v[kept[k]] = u[k];
  return v;
}

Subgroup QuotientResult::preimage(const Subgroup& s) const {
  std::vector<ExponentVector> gens;
  for (const ExponentVector& u : s.igs()) gens.push_back(lift(u));
  for (const ExponentVector& u : kernel.igs()) gens.push_back(u);
  return Subgroup::generated_by(projection.domain, std::move(gens));
}

QuotientResult quotient_presentation(const PcPresentationPtr& p,
                                     const Subgroup& k) {
  if (k.ambient().get() != p.get())
    throw error("quotient_presentation: subgroup of a different group");
  if (!k.is_normal())
    throw error("quotient_presentation: subgroup is not normal");
  const PcPresentation& g = *p;
  const int n = g.ngens();

  // per-column leading exponents of the kernel igs (0 = no entry)
  std::vector<Integer> d(n, Integer(0));
  for (int t = 0; t < k.size(); t++) d[k.leading(t)] = k.leading_exp(t);

  std::vector<int> kept;
  std::vector<Integer> qorders;
  std::vector<std::string> qnames;
  for (int j = 0; j < n; j++) {
    Integer qo = d[j] != 0 ? d[j] : g.relative_order(j);
    if (d[j] == 1) continue;  // generator dies in the quotient
    kept.push_back(j);
    qorders.push_back(qo);
    qnames.push_back(g.gen_name(j));
  }
  const int nq = static_cast<int>(kept.size());

  auto to_quotient = [&](const ExponentVector& reduced) {
    ExponentVector q(nq, Integer(0));
    for (int t = 0; t < nq; t++) q[t] = reduced[kept[t]];
    for (int j = 0; j < n; j++)
      if (d[j] == 1 && reduced[j] != 0)
        throw error("quotient_presentation: reduction left a dead generator");
    return q;
  };

  PcPresentation pres(qnames, qorders);
  for (int t = 0; t < nq; t++) {
    int j = kept[t];
    if (qorders[t] != 0) {
      ExponentVector rep = k.reduce(g.power(g.generator(j), qorders[t]));
      ExponentVector rhs = to_quotient(rep);
      if (std::any_of(rhs.begin(), rhs.end(),
                      [](const Integer& x) { return x != 0; }))
        pres.set_power(t, rhs);
    }
  }
  for (int a = 0; a < nq; a++)
    for (int b = a + 1; b < nq; b++) {
      int i = kept[a], j = kept[b];
      ExponentVector rep =
          k.reduce(g.conjugate(g.generator(j), g.generator(i)));
      ExponentVector rhs = to_quotient(rep);
      ExponentVector triv(nq, Integer(0));
      triv[b] = 1;
      if (rhs != triv) {
        pres.set_conjugate(a, b, rhs);
        if (qorders[a] == 0) {
          ExponentVector rep2 =
              k.reduce(g.conjugate(g.generator(j), g.invert(g.generator(i))));
          pres.set_conjugate_inverse(a, b, to_quotient(rep2));
        }
      }
    }

  QuotientResult out;
  out.presentation = finish_presentation(std::move(pres));
  out.kernel = k;
  out.kept = kept;
  std::vector<ExponentVector> images;
  for (int i = 0; i < n; i++) images.push_back(to_quotient(k.reduce(g.generator(i))));
  out.projection = GroupHom{p, out.presentation, std::move(images), false};
  CheckReport hv = verify_hom(out.projection);
  if (!hv.passed())
    throw error("quotient_presentation: projection failed verification");
  return out;
}

// --- layers ------------------------------------------------------------------

std::vector<Integer> LayerCoords::coords(const ExponentVector& u) const {
  Subgroup::Membership m = k.membership(u);
  if (!m.member) throw error("layer coords: element outside the layer group");
  return m.exponents;
}

AbelianInvariants LayerCoords::invariants() const {
  return abelian_invariants_from_relations(relations,
                                           static_cast<std::size_t>(k.size()));
}

LayerCoords layer_coords(const Subgroup& k, const Subgroup& l) {
  if (!k.contains_subgroup(l))
    throw error("layer_coords: lower term is not contained in the upper term");
  const PcPresentation& g = *k.ambient();
  const int r = k.size();
  std::vector<std::vector<Integer>> rows;
  auto coords_of = [&](const ExponentVector& u) {
    Subgroup::Membership m = k.membership(u);
    if (!m.member) throw error("layer_coords: commutator escapes the layer");
    return m.exponents;
  };
  for (const ExponentVector& w : l.igs()) rows.push_back(coords_of(w));
  for (int t = 0; t < r; t++) {
    Integer ro = k.relative_order(t);
    if (ro == 0) continue;
    std::vector<Integer> row = coords_of(g.power(k.igs()[t], ro));
    for (auto& x : row) x = -x;
    row[t] += ro;
    rows.push_back(std::move(row));
  }
  for (int i = 0; i < r; i++)
    for (int j = i + 1; j < r; j++) {
      ExponentVector c = g.commutator(k.igs()[j], k.igs()[i]);
      if (!l.contains(c))
        throw error("layer_coords: quotient is not abelian");
      rows.push_back(coords_of(c));
    }
  LayerCoords out{k, l, IntMatrix(rows.size(), r)};
  for (std::size_t i = 0; i < rows.size(); i++)
    for (int j = 0; j < r; j++) out.relations.at(i, j) = rows[i][j];
  return out;
}

// --- lower central series -----------------------------------------------------

namespace {

Subgroup commutator_term(const PcPresentationPtr& p, const Subgroup& prev) {
  std::vector<ExponentVector> gens;
  for (const ExponentVector& u : prev.igs())
    for (int i = 0; i < p->ngens(); i++)
      gens.push_back(p->commutator(u, p->generator(i)));
  return Subgroup::normal_closure(p, std::move(gens));
}

}  // namespace

SeriesTable lower_central_series(const PcPresentationPtr& p, long depth) {
  if (depth < 1) throw error("lower_central_series: depth must be >= 1");
  SeriesTable t;
  t.group = p;
  t.terms.push_back(Subgroup::whole(p));
  for (long i = 1; i <= depth; i++) {
    const Subgroup& prev = t.terms.back();
    if (prev.is_trivial() ||
        (t.terms.size() >= 2 && prev == t.terms[t.terms.size() - 2])) {
      t.terms.push_back(prev);  // series went constant
    } else {
      t.terms.push_back(commutator_term(p, prev));
    }
  }
  for (std::size_t i = 0; i + 1 < t.terms.size(); i++)
    t.step_invariants.push_back(
        layer_coords(t.terms[i], t.terms[i + 1]).invariants());
  for (std::size_t i = 0; i + 1 < t.terms.size(); i++)
    if (t.terms[i].hirsch_length() == t.terms[i + 1].hirsch_length()) {
      t.stabilized_at = static_cast<long>(i + 1);
      break;
    }
  for (std::size_t i = 0; i < t.terms.size(); i++)
    if (t.terms[i].is_trivial()) {
      t.nilpotency_class = static_cast<long>(i);
      break;
    }
  return t;
}

AbelianizationResult abelianization(const PcPresentationPtr& p) {
  Subgroup gamma2 = commutator_term(p, Subgroup::whole(p));
  AbelianizationResult out{
      layer_coords(Subgroup::whole(p), gamma2).invariants(),
      quotient_presentation(p, gamma2)};
  return out;
}

PrimeSet tau(const PcPresentationPtr& p) {
  std::vector<Integer> primes;
  Subgroup cur = Subgroup::whole(p);
  const long guard = hirsch_length(p) + 2;
  for (long i = 0; i <= guard; i++) {
    Subgroup next = cur.is_trivial() ? cur : commutator_term(p, cur);
    AbelianInvariants inv = layer_coords(cur, next).invariants();
    for (const Integer& q : inv.torsion_primes()) primes.push_back(q);
    if (cur.hirsch_length() == next.hirsch_length()) break;
    cur = next;
  }
  return PrimeSet::finite_set(std::move(primes));
}

long hirsch_length(const PcPresentationPtr& p) {
  return p->infinite_gen_count();
}

long hirsch_length(const Subgroup& s) { return s.hirsch_length(); }

std::optional<long> nilpotency_class(const PcPresentationPtr& p,
                                     long class_bound) {
  Subgroup cur = Subgroup::whole(p);
  for (long c = 0; c <= class_bound; c++) {
    if (cur.is_trivial()) return c;
    Subgroup next = commutator_term(p, cur);
    if (next == cur) return std::nullopt;  // series went constant, nontrivial
    cur = next;
  }
  return std::nullopt;
}

long default_class_bound() {
  if (const char* env = std::getenv("PARANIL_CLASS_BOUND")) {
    long v = std::atol(env);
    if (v >= 1) return v;
  }
  return 16;
}

// --- center and upper central series ------------------------------------------

namespace {

ExponentVector element_from_coords(const PcPresentation& g,
                                   const std::vector<ExponentVector>& basis,
                                   const std::vector<Integer>& a) {
  ExponentVector out = g.identity();
  for (std::size_t t = 0; t < basis.size(); t++) {
    if (a[t] == 0) continue;
    out = g.multiply(out, g.power(basis[t], a[t]));
  }
  return out;
}

// {x in C : [x, gen] lies in `low` for every ambient generator}, where the
// commutators of C-elements with generators lie in `high` and high/low is a
// central layer.
Subgroup centralizer_step(const PcPresentationPtr& p, const Subgroup& c,
                          const LayerCoords& layer) {
  const PcPresentation& g = *p;
  const int m = c.size();
  if (m == 0) return c;
  const int rank = layer.rank();
  const int nblocks = g.ngens();
  const std::size_t relrows = layer.relations.rows();

  IntMatrix big(m + relrows * nblocks, rank * nblocks);
  for (int t = 0; t < m; t++)
    for (int s = 0; s < nblocks; s++) {
      std::vector<Integer> v =
          layer.coords(g.commutator(c.igs()[t], g.generator(s)));
      for (int j = 0; j < rank; j++) big.at(t, s * rank + j) = v[j];
    }
  for (int s = 0; s < nblocks; s++)
    for (std::size_t q = 0; q < relrows; q++)
      for (int j = 0; j < rank; j++)
        big.at(m + s * relrows + q, s * rank + j) = layer.relations.at(q, j);

  std::vector<ExponentVector> gens;
  for (const std::vector<Integer>& kerrow : integer_kernel(big)) {
    std::vector<Integer> a(kerrow.begin(), kerrow.begin() + m);
    ExponentVector el = element_from_coords(g, c.igs(), a);
    if (!g.is_identity(el)) gens.push_back(std::move(el));
  }
  return Subgroup::generated_by(p, std::move(gens));
}

}  // namespace

Subgroup center(const PcPresentationPtr& p, long class_bound) {
  std::optional<long> cls = nilpotency_class(p, class_bound);
  if (!cls)
    throw error("center: group is not nilpotent within class bound " +
                std::to_string(class_bound));
  if (*cls <= 1) return Subgroup::whole(p);
  SeriesTable t = lower_central_series(p, *cls);
  Subgroup c = Subgroup::whole(p);
  for (long i = 2; i <= *cls; i++) {
    LayerCoords layer = layer_coords(t.gamma(i), t.gamma(i + 1));
    c = centralizer_step(p, c, layer);
  }
  return c;
}

std::vector<Subgroup> upper_central_series(const PcPresentationPtr& p, long j,
                                           long class_bound) {
  if (!nilpotency_class(p, class_bound))
    throw error(
        "upper_central_series: group is not nilpotent within class bound " +
        std::to_string(class_bound));
  std::vector<Subgroup> out;
  Subgroup z = Subgroup::trivial(p);
  for (long s = 1; s <= j; s++) {
    if (z.is_whole()) {
      out.push_back(z);
      continue;
    }
    QuotientResult q = quotient_presentation(p, z);
    Subgroup zbar = center(q.presentation, class_bound);
    z = q.preimage(zbar);
    out.push_back(z);
  }
  return out;
}

// --- isolators -----------------------------------------------------------------

namespace {

// pi-part of n: the largest divisor whose primes all lie in pi.
Integer pi_part(const Integer& n, const PrimeSet& pi) {
  Integer rest = abs(n), part = 1;
  for (const Integer& p : prime_divisors(rest))
    if (pi.contains(p))
      while (rest % p == 0) {
        rest = exact_div(rest, p);
        part *= p;
      }
  return part;
}

// Generators of the pi-torsion subgroup of an abelian subgroup.
std::vector<ExponentVector> pi_torsion_generators(const Subgroup& z,
                                                  const PrimeSet& pi) {
  const PcPresentation& g = *z.ambient();
  const int r = z.size();
  std::vector<std::vector<Integer>> rows;
  for (int t = 0; t < r; t++) {
    Integer ro = z.relative_order(t);
    if (ro == 0) continue;
    Subgroup::Membership m = z.membership(g.power(z.igs()[t], ro));
    if (!m.member) throw error("pi_torsion: inconsistent igs");
    std::vector<Integer> row = m.exponents;
    for (auto& x : row) x = -x;
    row[t] += ro;
    rows.push_back(std::move(row));
  }
  IntMatrix rel(rows.size(), r);
  for (std::size_t i = 0; i < rows.size(); i++)
    for (int j = 0; j < r; j++) rel.at(i, j) = rows[i][j];
  std::vector<ExponentVector> out;
  for (const AbelianBasisElement& b : abelian_basis(rel, r)) {
    if (b.order == 0) continue;
    Integer pp = pi_part(b.order, pi);
    if (pp == 1) continue;
    ExponentVector el = element_from_coords(g, z.igs(), b.vec);
    out.push_back(g.power(el, exact_div(b.order, pp)));
  }
  return out;
}

}  // namespace

Subgroup isolator(const PcPresentationPtr& p, const Subgroup& k,
                  const PrimeSet& pi, long class_bound) {
  if (pi.kind != PrimeSet::Kind::finite)
    throw error("isolator: prime set must be finite");
  if (!k.is_normal()) throw error("isolator: subgroup is not normal");
  if (pi.primes.empty()) return k;

  QuotientResult q0 = quotient_presentation(p, k);
  if (!nilpotency_class(q0.presentation, class_bound))
    throw error("isolator: quotient is not nilpotent within class bound " +
                std::to_string(class_bound));

  std::vector<QuotientResult> chain;
  chain.push_back(std::move(q0));
  for (int guard = 0; guard < 64; guard++) {
    const PcPresentationPtr& cur = chain.back().presentation;
    Subgroup z = center(cur, class_bound);
    std::vector<ExponentVector> tg = pi_torsion_generators(z, pi);
    if (tg.empty()) break;
    Subgroup t = Subgroup::generated_by(cur, std::move(tg));
    chain.push_back(quotient_presentation(cur, t));
  }
  Subgroup s = Subgroup::trivial(chain.back().presentation);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) s = it->preimage(s);
  return s;
}

// --- tensor epimorphism check ----------------------------------------------------

CheckReport tensor_epi_check(const SeriesTable& t, long i) {
  CheckReport report;
  if (static_cast<long>(t.terms.size()) < i + 2)
    throw error("tensor_epi_check: series depth insufficient (need depth >= " +
                std::to_string(i + 1) + ")");
  const PcPresentationPtr& p = t.group;
  LayerCoords target = layer_coords(t.gamma(i + 1), t.gamma(i + 2));
  report.depth_checked = i;
  AbelianInvariants target_inv = target.invariants();
  report.add("target", target_inv.to_string());
  if (target.rank() == 0 || target_inv.is_trivial()) {
    report.verdict = Verdict::pass;
    report.add("image", "trivial target");
    return report;
  }
  std::vector<std::vector<Integer>> rows;
  for (const ExponentVector& u : t.gamma(i).igs())
    for (int s = 0; s < p->ngens(); s++)
      rows.push_back(target.coords(p->commutator(u, p->generator(s))));
  IntMatrix m(rows.size() + target.relations.rows(),
              static_cast<std::size_t>(target.rank()));
  for (std::size_t a = 0; a < rows.size(); a++)
    for (int j = 0; j < target.rank(); j++) m.at(a, j) = rows[a][j];
  for (std::size_t a = 0; a < target.relations.rows(); a++)
    for (int j = 0; j < target.rank(); j++)
      m.at(rows.size() + a, j) = target.relations.at(a, j);
  AbelianInvariants cokernel = abelian_invariants_from_relations(
      m, static_cast<std::size_t>(target.rank()));
  report.add("cokernel", cokernel.to_string());
  report.verdict = cokernel.is_trivial() ? Verdict::pass : Verdict::fail;
  return report;
}

// --- power subgroups and exponents -------------------------------------------------

namespace {

std::optional<long> subgroup_class(const Subgroup& x, long bound) {
  if (x.is_trivial()) return 0;
  SubgroupPresentation sp = subgroup_presentation(x);
  return nilpotency_class(sp.presentation, bound);
}

}  // namespace

Subgroup power_subgroup(const Subgroup& x, const Integer& d) {
  if (d < 1) throw error("power_subgroup: exponent must be positive");
  std::optional<long> cls = subgroup_class(x, 3);
  if (!cls || *cls > 2)
    throw error("power_subgroup: exact powers implemented for class <= 2 only");
  const PcPresentation& g = *x.ambient();
  std::vector<ExponentVector> gens;
  for (const ExponentVector& u : x.igs()) gens.push_back(g.power(u, d));
  Integer choose2 = exact_div(d * (d - 1), Integer(2));
  if (choose2 != 0)
    for (int i = 0; i < x.size(); i++)
      for (int j = i + 1; j < x.size(); j++)
        gens.push_back(
            g.power(g.commutator(x.igs()[j], x.igs()[i]), choose2));
  return Subgroup::generated_by(x.ambient(), std::move(gens));
}

// Intersection with a normal subgroup via the direct-product trick.
static Subgroup intersection_with_normal(const Subgroup& a, const Subgroup& b) {
  if (!b.is_normal())
    throw error("intersection: second subgroup must be normal");
  const PcPresentationPtr& p = a.ambient();
  PcPresentationPtr prod = direct_product(p, p, "l_", "r_");
  const int n = p->ngens();
  std::vector<ExponentVector> gens;
  auto pair = [&](const ExponentVector& x, const ExponentVector& y) {
    ExponentVector v(2 * n, Integer(0));
    for (int i = 0; i < n; i++) {
      v[i] = x[i];
      v[n + i] = y[i];
    }
    return v;
  };
  for (const ExponentVector& u : a.igs()) gens.push_back(pair(u, u));
  for (const ExponentVector& u : b.igs()) gens.push_back(pair(u, p->identity()));
  Subgroup graph = Subgroup::generated_by(prod, std::move(gens));
  std::vector<ExponentVector> out;
  for (const ExponentVector& v : graph.igs()) {
    bool left_zero = true;
    for (int i = 0; i < n && left_zero; i++)
      if (v[i] != 0) left_zero = false;
    if (!left_zero) continue;
    out.push_back(ExponentVector(v.begin() + n, v.end()));
  }
  return Subgroup::generated_by(p, std::move(out));
}

std::optional<Integer> minimal_power_exponent(const Subgroup& x,
                                              const Subgroup& k) {
  if (!x.contains_subgroup(k))
    throw error("minimal_power_exponent: K is not contained in X");
  if (k.hirsch_length() < x.hirsch_length()) return std::nullopt;
  // work inside the subgroup presentation of X, where X is the whole group
  SubgroupPresentation sx = subgroup_presentation(x);
  const PcPresentationPtr& xp = sx.presentation;
  std::vector<ExponentVector> kgens;
  for (const ExponentVector& u : k.igs()) {
    Subgroup::Membership m = x.membership(u);
    if (!m.member) throw error("minimal_power_exponent: bad containment");
    kgens.push_back(m.exponents);
  }
  Subgroup kx = Subgroup::generated_by(xp, std::move(kgens));
  std::optional<long> cls = nilpotency_class(xp, 3);
  if (!cls || *cls > 2)
    throw error("minimal_power_exponent: implemented for class <= 2 only");

  Subgroup whole = Subgroup::whole(xp);
  Subgroup derived = commutator_term(xp, whole);
  AbelianInvariants ab =
      layer_coords(whole, kx.join(derived)).invariants();
  if (!ab.is_finite()) return std::nullopt;
  Integer e = ab.torsion_exponent();

  if (*cls <= 1) return e;

  Subgroup kcap = intersection_with_normal(kx, derived);
  AbelianInvariants comm_ab = layer_coords(derived, kcap).invariants();
  if (!comm_ab.is_finite()) return std::nullopt;
  Integer e2 = comm_ab.torsion_exponent();
  for (Integer kk = 1; kk <= 2 * e2; kk++) {
    Integer n = e * kk;
    if (kx.contains_subgroup(power_subgroup(whole, n))) return n;
  }
  throw error("minimal_power_exponent: bound search failed");
}

namespace {

std::vector<Integer> sorted_divisors(const Integer& n) {
  std::vector<Integer> divs{1};
  Integer rest = abs(n);
  for (const Integer& p : prime_divisors(rest)) {
    std::size_t sz = divs.size();
    Integer pk = p;
    while (rest % pk == 0) {
      for (std::size_t i = 0; i < sz; i++) divs.push_back(divs[i] * pk);
      pk *= p;
    }
  }
  std::sort(divs.begin(), divs.end());
  divs.erase(std::unique(divs.begin(), divs.end()), divs.end());
  return divs;
}

}  // namespace

PowerExponents power_exponent_search(const PcPresentationPtr& p,
                                     const Subgroup& n_sub, const Integer& m) {
  if (m < 1) throw error("power_exponent_search: m must be positive");
  std::optional<long> cls = nilpotency_class(p, default_class_bound());
  if (!cls)
    throw error("power_exponent_search: group is not nilpotent within class bound " +
                std::to_string(default_class_bound()));
  if (*cls > 2)
    throw error("power_exponent_search: implemented for class <= 2 only");
  Subgroup whole = Subgroup::whole(p);
  Subgroup derived = commutator_term(p, whole);
  Subgroup ngp = n_sub.join(derived);
  for (int i = 0; i < p->ngens(); i++)
    if (!ngp.contains(p->power(p->generator(i), m)))
      throw error("power_exponent_search: precondition G^m <= N*G' fails at "
                  "generator " +
                  p->gen_name(i));

  PowerExponents out;
  if (*cls <= 1) {
    out.bound_n = m;
    for (const Integer& dv : sorted_divisors(m))
      if (n_sub.contains_subgroup(power_subgroup(whole, dv))) {
        out.n = dv;
        break;
      }
    return out;
  }

  // class 2: gamma_2(N) from the subgroup presentation of N
  SubgroupPresentation sn = subgroup_presentation(n_sub);
  Subgroup n_derived_local =
      commutator_term(sn.presentation, Subgroup::whole(sn.presentation));
  std::vector<ExponentVector> gens;
  for (const ExponentVector& u : n_derived_local.igs())
    gens.push_back(sn.inclusion.apply(u));
  Subgroup n_derived = Subgroup::generated_by(p, std::move(gens));

  out.bound_i.push_back(m * m);
  out.bound_n = m * m * m;
  bool found = false;
  for (const Integer& dv : sorted_divisors(m * m)) {
    if (n_derived.contains_subgroup(power_subgroup(derived, dv))) {
      out.n_i.push_back(dv);
      found = true;
      break;
    }
  }
  if (!found)
    throw error("power_exponent_search: no divisor of the bound works for "
                "gamma_2; bound reasoning violated");
  found = false;
  for (const Integer& dv : sorted_divisors(out.bound_n)) {
    if (n_sub.contains_subgroup(power_subgroup(whole, dv))) {
      out.n = dv;
      found = true;
      break;
    }
  }
  if (!found)
    throw error("power_exponent_search: no divisor of the bound works for G; "
                "bound reasoning violated");
  return out;
}

// --- hom machinery -----------------------------------------------------------------

Subgroup image_subgroup(const GroupHom& f) {
  return Subgroup::generated_by(f.codomain, f.images);
}

Subgroup image_of_subgroup(const GroupHom& f, const Subgroup& s) {
  std::vector<ExponentVector> gens;
  for (const ExponentVector& u : s.igs()) gens.push_back(f.apply(u));
  return Subgroup::generated_by(f.codomain, std::move(gens));
}

namespace {

struct GraphData {
  PcPresentationPtr prod;
  int nh, ng;
};

GraphData make_graph_product(const GroupHom& f) {
  GraphData d;
  d.prod = direct_product(f.codomain, f.domain, "h_", "g_");
  d.nh = f.codomain->ngens();
  d.ng = f.domain->ngens();
  return d;
}

std::vector<ExponentVector> graph_generators(const GroupHom& f,
                                             const GraphData& d) {
  std::vector<ExponentVector> gens;
  for (int i = 0; i < d.ng; i++) {
    ExponentVector v(d.nh + d.ng, Integer(0));
    const ExponentVector& im = f.images[i];
    for (int t = 0; t < d.nh; t++) v[t] = im[t];
    v[d.nh + i] = 1;
    gens.push_back(std::move(v));
  }
  return gens;
}

Subgroup project_zero_prefix(const Subgroup& graph, const GroupHom& f,
                             const GraphData& d) {
  std::vector<ExponentVector> out;
  for (const ExponentVector& v : graph.igs()) {
    bool prefix_zero = true;
    for (int t = 0; t < d.nh && prefix_zero; t++)
      if (v[t] != 0) prefix_zero = false;
    if (!prefix_zero) continue;
    out.push_back(ExponentVector(v.begin() + d.nh, v.end()));
  }
  return Subgroup::generated_by(f.domain, std::move(out));
}

}  // namespace

Subgroup kernel_of_hom(const GroupHom& f) {
  GraphData d = make_graph_product(f);
  Subgroup graph = Subgroup::generated_by(d.prod, graph_generators(f, d));
  return project_zero_prefix(graph, f, d);
}

Subgroup preimage_of_subgroup(const GroupHom& f, const Subgroup& s) {
  if (s.ambient().get() != f.codomain.get())
    throw error("preimage_of_subgroup: subgroup of a different group");
  GraphData d = make_graph_product(f);
  std::vector<ExponentVector> gens = graph_generators(f, d);
  for (const ExponentVector& u : s.igs()) {
    ExponentVector v(d.nh + d.ng, Integer(0));
    for (int t = 0; t < d.nh; t++) v[t] = u[t];
    gens.push_back(std::move(v));
  }
  Subgroup graph = Subgroup::generated_by(d.prod, std::move(gens));
  return project_zero_prefix(graph, f, d);
}

}  // namespace paranil
