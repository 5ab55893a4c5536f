#include "paranil/pcgroup.hpp"

#include <algorithm>
#include <sstream>

namespace paranil {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "indeterminate";
  }
}

std::string CheckReport::get(const std::string& key) const {
  for (const auto& [k, val] : witnesses)
    if (k == key) return val;
  return "";
}

std::string CheckReport::to_string() const {
  std::ostringstream os;
  os << paranil::to_string(verdict);
  if (depth_checked > 0) os << " (depth " << depth_checked << ")";
  for (const auto& [k, val] : witnesses) os << "\n  " << k << " = " << val;
  return os.str();
}

PcPresentation::PcPresentation(std::vector<std::string> gen_names,
                               std::vector<Integer> relative_orders)
    : names_(std::move(gen_names)), orders_(std::move(relative_orders)) {
  if (names_.size() != orders_.size())
    throw error("PcPresentation: name/order count mismatch");
  for (const Integer& o : orders_)
    if (o < 0 || o == 1)
      throw error("PcPresentation: relative orders must be 0 or >= 2");
  const int n = ngens();
  powers_.resize(n);
  conj_.assign(n, std::vector<std::optional<ExponentVector>>(n));
  conj_inv_.assign(n, std::vector<std::optional<ExponentVector>>(n));
}

int PcPresentation::gen_index(const std::string& name) const {
  for (int i = 0; i < ngens(); i++)
    if (names_[i] == name) return i;
  return -1;
}

long PcPresentation::infinite_gen_count() const {
  long h = 0;
  for (const Integer& o : orders_)
    if (o == 0) h++;
  return h;
}

Integer PcPresentation::group_order() const {
  Integer n = 1;
  for (const Integer& o : orders_) {
    if (o == 0) return 0;
    n *= o;
  }
  return n;
}

void PcPresentation::validate_relation_word(int subject,
                                            const ExponentVector& rhs) const {
  if (static_cast<int>(rhs.size()) != ngens())
    throw error("relation word has wrong length");
  for (int k = 0; k < ngens(); k++) {
    if (rhs[k] == 0) continue;
    if (k <= subject)
      throw error("relation word for generator " + names_[subject] +
                  " uses generator " + names_[k] + " of index <= its own");
    if (orders_[k] != 0 && (rhs[k] < 0 || rhs[k] >= orders_[k]))
      throw error("relation word exponent of " + names_[k] +
                  " out of normal-form range");
  }
}

void PcPresentation::set_power(int i, ExponentVector rhs) {
  if (built_) throw error("presentation is frozen");
  if (orders_[i] == 0)
    throw error("power relation for infinite-order generator " + names_[i]);
  validate_relation_word(i, rhs);
  powers_[i] = std::move(rhs);
}

void PcPresentation::set_conjugate(int i, int j, ExponentVector rhs) {
  if (built_) throw error("presentation is frozen");
  if (!(0 <= i && i < j && j < ngens()))
    throw error("set_conjugate: need indices i < j");
  validate_relation_word(i, rhs);
  conj_[i][j] = std::move(rhs);
}

void PcPresentation::set_conjugate_inverse(int i, int j, ExponentVector rhs) {
  if (built_) throw error("presentation is frozen");
  if (!(0 <= i && i < j && j < ngens()))
    throw error("set_conjugate_inverse: need indices i < j");
  if (orders_[i] != 0)
    throw error("inverse conjugation relation only applies to infinite-order " +
                names_[i]);
  validate_relation_word(i, rhs);
  conj_inv_[i][j] = std::move(rhs);
}

ExponentVector PcPresentation::power_word(int i) const {
  if (powers_[i]) return *powers_[i];
  return ExponentVector(ngens(), Integer(0));
}

bool PcPresentation::has_nontrivial_power(int i) const {
  return powers_[i].has_value() && !is_identity(*powers_[i]);
}

void PcPresentation::set_conjugate_inverse_unchecked(int i, int j,
                                                     ExponentVector rhs) {
  validate_relation_word(i, rhs);
  conj_inv_[i][j] = std::move(rhs);
}

ExponentVector PcPresentation::conjugate_word(int i, int j) const {
  if (conj_[i][j]) return *conj_[i][j];
  ExponentVector w(ngens(), Integer(0));
  w[j] = 1;
  return w;
}

ExponentVector PcPresentation::conjugate_inverse_word(int i, int j) const {
  if (conj_inv_[i][j]) return *conj_inv_[i][j];
  ExponentVector w(ngens(), Integer(0));
  w[j] = 1;
  return w;
}

bool PcPresentation::has_nontrivial_conjugate(int i, int j) const {
  return conj_[i][j].has_value() || conj_inv_[i][j].has_value();
}

bool PcPresentation::is_identity(const ExponentVector& u) const {
  return std::all_of(u.begin(), u.end(),
                     [](const Integer& x) { return x == 0; });
}

ExponentVector PcPresentation::generator(int i) const {
  ExponentVector u = identity();
  u[i] = 1;
  return u;
}

Word PcPresentation::to_word(const ExponentVector& u) {
  Word w;
  for (int i = 0; i < static_cast<int>(u.size()); i++)
    if (u[i] != 0) w.push_back({i, u[i]});
  return w;
}

namespace {

// One uncollected chunk: a word, possibly inverted (letters reversed and
// negated), repeated `repeat` times.
struct StackEntry {
  Word word;
  Integer repeat;
  bool inverted;
  std::size_t pos = 0;
};

}  // namespace

ExponentVector PcPresentation::collect_onto(ExponentVector ev,
                                            const Word& w) const {
  const int n = ngens();
  std::vector<StackEntry> stack;
  auto push = [&stack](Word word, Integer repeat, bool inverted) {
    if (word.empty() || repeat == 0) return;
    stack.push_back({std::move(word), std::move(repeat), inverted, 0});
  };
  auto push_ev = [&](const ExponentVector& v, Integer repeat, bool inverted) {
    push(to_word(v), std::move(repeat), inverted);
  };
  push(w, 1, false);

  long steps = 0;
  auto charge = [&steps, this]() {
    if (++steps > budget_)
      throw collect_budget_error(
          "collection step budget exhausted (" + std::to_string(budget_) +
          " steps); presentation is inconsistent or pathological");
  };

  while (!stack.empty()) {
    StackEntry& top = stack.back();
    if (top.pos == top.word.size()) {
      top.pos = 0;
      top.repeat -= 1;
      if (top.repeat == 0) stack.pop_back();
      continue;
    }
    charge();
    Letter letter = top.word[top.inverted ? top.word.size() - 1 - top.pos
                                          : top.pos];
    if (top.inverted) letter.exp = -letter.exp;
    top.pos++;
    // `top` may dangle after pushes below; don't touch it again.

    int m = letter.gen;
    if (m < 0 || m >= n) throw error("collect: generator index out of range");
    Integer e = std::move(letter.exp);
    if (e == 0) continue;

    const Integer& om = orders_[m];
    // negative exponents of a finite-order generator: g^e = g^r * P^q with
    // e = q*om + r, r in [0, om)
    if (om != 0 && e < 0) {
      Integer q = fdiv_q(e, om);
      e -= q * om;
      if (powers_[m] && !is_identity(*powers_[m]))
        push_ev(*powers_[m], -q, true);
      if (e == 0) continue;
    }

    int tail_at = -1;
    for (int k = n - 1; k > m; k--)
      if (ev[k] != 0) {
        tail_at = k;
        break;
      }
    if (tail_at < 0) {
      // no later generators present: merge the whole exponent at once
      ev[m] += e;
      if (om != 0) {
        Integer q = fdiv_q(ev[m], om);
        if (q != 0) {
          ev[m] -= q * om;
          if (powers_[m] && !is_identity(*powers_[m]))
            push_ev(*powers_[m], abs(q), q < 0);
        }
      }
      continue;
    }
    // A tail is displaced: T g_m^e = g_m^s T^(g_m^s) g_m^(e-s) with s = +-1.
    // Everything right of the merged g_m^s goes back on the stack, the
    // leftover exponent below the conjugated tail.
    int s = e > 0 ? 1 : -1;
    if (e != s) push({{m, e - s}}, 1, false);
    std::vector<Letter> tail;
    for (int k = m + 1; k < n; k++)
      if (ev[k] != 0) {
        tail.push_back({k, ev[k]});
        ev[k] = 0;
      }
    ev[m] += s;
    Integer q(0);
    if (om != 0) {
      q = fdiv_q(ev[m], om);
      if (q != 0) ev[m] -= q * om;
    }
    // push conjugated tail, deepest generator first so it pops in order
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
      const auto& slot = (s > 0) ? conj_[m][it->gen] : conj_inv_[m][it->gen];
      if (!slot) {
        if (s < 0 && om == 0 && conj_[m][it->gen])
          throw error("collect: missing inverse conjugation relation for " +
                      names_[it->gen] + "^" + names_[m] + "^-1");
        push({{it->gen, it->exp}}, 1, false);  // trivial action
      } else {
        push_ev(*slot, abs(it->exp), it->exp < 0);
      }
    }
    if (q != 0 && powers_[m] && !is_identity(*powers_[m]))
      push_ev(*powers_[m], abs(q), q < 0);
  }
  return ev;
}

ExponentVector PcPresentation::collect(const Word& w) const {
  return collect_onto(identity(), w);
}

ExponentVector PcPresentation::multiply(const ExponentVector& u,
                                        const ExponentVector& v) const {
  return collect_onto(u, to_word(v));
}

ExponentVector PcPresentation::invert(const ExponentVector& u) const {
  Word w;
  for (int i = static_cast<int>(u.size()) - 1; i >= 0; i--)
    if (u[i] != 0) w.push_back({i, -u[i]});
  return collect(w);
}

ExponentVector PcPresentation::power(const ExponentVector& u,
                                     const Integer& k) const {
  if (k == 0) return identity();
  ExponentVector base = k < 0 ? invert(u) : u;
  Integer e = abs(k);
  ExponentVector result = identity();
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) result = multiply(result, base);
    e >>= 1;
    if (e > 0) base = multiply(base, base);
  }
  return result;
}

ExponentVector PcPresentation::commutator(const ExponentVector& u,
                                          const ExponentVector& v) const {
  return multiply(multiply(invert(u), invert(v)), multiply(u, v));
}

ExponentVector PcPresentation::conjugate(const ExponentVector& u,
                                         const ExponentVector& x) const {
  return multiply(multiply(invert(x), u), x);
}

std::string PcPresentation::word_to_string(const ExponentVector& u) const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < ngens(); i++) {
    if (u[i] == 0) continue;
    if (!first) os << " ";
    os << names_[i] << "^" << u[i];
    first = false;
  }
  if (first) os << "1";
  return os.str();
}

void PcPresentation::derive_inverse_conjugates() {
  const int n = ngens();
  for (int i = n - 1; i >= 0; i--) {
    if (orders_[i] != 0) continue;
    bool needed = false, present = true;
    for (int j = i + 1; j < n; j++) {
      if (conj_[i][j]) needed = true;
      if (conj_[i][j] && !conj_inv_[i][j]) present = false;
    }
    if (!needed || present) continue;

    // action of g_i on the tail generators; invert it if possible
    auto apply_action = [&](const std::vector<ExponentVector>& images,
                            const ExponentVector& u) {
      ExponentVector out = identity();
      for (int k = i + 1; k < n; k++) {
        if (u[k] == 0) continue;
        out = multiply(out, power(images[static_cast<std::size_t>(k)], u[k]));
      }
      return out;
    };
    std::vector<ExponentVector> psi(n);
    for (int j = i + 1; j < n; j++) psi[j] = conjugate_word(i, j);

    // (a) finite order: psi^d = id for some small d
    std::vector<ExponentVector> acc = psi;
    bool solved = false;
    for (int d = 1; d <= 64 && !solved; d++) {
      bool isid = true;
      for (int j = i + 1; j < n && isid; j++)
        if (acc[j] != generator(j)) isid = false;
      if (isid) {
        // psi^{-1} = psi^{d-1}
        std::vector<ExponentVector> inv(n);
        for (int j = i + 1; j < n; j++) inv[j] = generator(j);
        for (int t = 0; t < d - 1; t++)
          for (int j = i + 1; j < n; j++) inv[j] = apply_action(psi, inv[j]);
        for (int j = i + 1; j < n; j++)
          if (inv[j] != generator(j)) set_conjugate_inverse_unchecked(i, j, inv[j]);
        solved = true;
        break;
      }
      for (int j = i + 1; j < n; j++) acc[j] = apply_action(psi, acc[j]);
    }
    if (solved) continue;

    // (b) unipotent action: solve psi(x) = g_j by pushing the error deeper
    std::vector<ExponentVector> inv(n);
    bool converged = true;
    for (int j = i + 1; j < n && converged; j++) {
      ExponentVector x = generator(j);
      converged = false;
      for (int it = 0; it <= n + 2; it++) {
        ExponentVector err = multiply(invert(apply_action(psi, x)), generator(j));
        if (is_identity(err)) {
          converged = true;
          break;
        }
        x = multiply(x, err);
      }
      inv[j] = x;
    }
    if (!converged)
      throw error("cannot derive inverse conjugation action of " + names_[i] +
                  "; provide explicit gj^" + names_[i] + "^-1 relations");
    for (int j = i + 1; j < n; j++)
      if (inv[j] != generator(j)) set_conjugate_inverse_unchecked(i, j, inv[j]);
  }
}

void PcPresentation::build() {
  if (built_) return;
  built_ = true;  // arithmetic is required during derivation
  try {
    derive_inverse_conjugates();
  } catch (...) {
    built_ = false;
    throw;
  }
}

CheckReport check_consistency(const PcPresentation& p) {
  CheckReport report;
  const int n = p.ngens();
  auto gen = [&p](int i) { return p.generator(i); };
  auto fail = [&](const std::string& overlap, const ExponentVector& lhs,
                  const ExponentVector& rhs) {
    report.verdict = Verdict::fail;
    report.add("overlap", overlap);
    report.add("lhs", p.word_to_string(lhs));
    report.add("rhs", p.word_to_string(rhs));
  };

  try {
    // g_k (g_j g_i) = (g_k g_j) g_i for k > j > i
    for (int k = 0; k < n; k++)
      for (int j = 0; j < k; j++)
        for (int i = 0; i < j; i++) {
          ExponentVector lhs = p.multiply(gen(k), p.multiply(gen(j), gen(i)));
          ExponentVector rhs = p.multiply(p.multiply(gen(k), gen(j)), gen(i));
          if (lhs != rhs) {
            fail(p.gen_name(k) + "*" + p.gen_name(j) + "*" + p.gen_name(i),
                 lhs, rhs);
            return report;
          }
        }
    for (int i = 0; i < n; i++)
      for (int j = i + 1; j < n; j++) {
        if (p.relative_order(i) != 0) {
          // g_j g_i^{o_i} = (g_j g_i) g_i^{o_i - 1}
          ExponentVector lhs =
              p.multiply(gen(j), p.power(gen(i), p.relative_order(i)));
          ExponentVector rhs =
              p.multiply(p.multiply(gen(j), gen(i)),
                         p.power(gen(i), p.relative_order(i) - 1));
          if (lhs != rhs) {
            fail(p.gen_name(j) + "^(" + p.gen_name(i) + "^" +
                     p.relative_order(i).get_str() + ")",
                 lhs, rhs);
            return report;
          }
        }
        if (p.relative_order(j) != 0) {
          // g_j^{o_j} g_i = g_j^{o_j - 1} (g_j g_i)
          ExponentVector lhs =
              p.multiply(p.power(gen(j), p.relative_order(j)), gen(i));
          ExponentVector rhs =
              p.multiply(p.power(gen(j), p.relative_order(j) - 1),
                         p.multiply(gen(j), gen(i)));
          if (lhs != rhs) {
            fail(p.gen_name(j) + "^" + p.relative_order(j).get_str() + "*" +
                     p.gen_name(i),
                 lhs, rhs);
            return report;
          }
        }
      }
    for (int i = 0; i < n; i++) {
      if (p.relative_order(i) == 0) continue;
      // g_i g_i^{o_i} = g_i^{o_i} g_i
      ExponentVector pw = p.power(gen(i), p.relative_order(i));
      ExponentVector lhs = p.multiply(gen(i), pw);
      ExponentVector rhs = p.multiply(pw, gen(i));
      if (lhs != rhs) {
        fail(p.gen_name(i) + "^" + Integer(p.relative_order(i) + 1).get_str(),
             lhs, rhs);
        return report;
      }
    }
    // inverse conjugation compatibility for infinite-order conjugators
    for (int i = 0; i < n; i++) {
      if (p.relative_order(i) != 0) continue;
      for (int j = i + 1; j < n; j++) {
        if (!p.has_nontrivial_conjugate(i, j)) continue;
        ExponentVector back =
            p.conjugate(p.conjugate(gen(j), gen(i)), p.invert(gen(i)));
        if (back != gen(j)) {
          fail(p.gen_name(j) + "^(" + p.gen_name(i) + "*" + p.gen_name(i) +
                   "^-1)",
               back, gen(j));
          return report;
        }
      }
    }
  } catch (const collect_budget_error& e) {
    report.verdict = Verdict::fail;
    report.add("overlap", "collection budget exhausted");
    report.add("detail", e.what());
    return report;
  }
  report.verdict = Verdict::pass;
  p.mark_consistent();
  return report;
}

PcPresentationPtr finish_presentation(PcPresentation p) {
  p.build();
  CheckReport r = check_consistency(p);
  if (!r.passed())
    throw error("presentation is inconsistent: overlap " + r.get("overlap"));
  return std::make_shared<const PcPresentation>(std::move(p));
}

ExponentVector GroupHom::apply(const ExponentVector& u) const {
  ExponentVector out = codomain->identity();
  for (std::size_t i = 0; i < images.size(); i++) {
    if (u[i] == 0) continue;
    out = codomain->multiply(out, codomain->power(images[i], u[i]));
  }
  return out;
}

ExponentVector GroupHom::apply_word(const Word& w) const {
  ExponentVector out = codomain->identity();
  for (const Letter& l : w) {
    if (l.exp == 0) continue;
    out = codomain->multiply(out, codomain->power(images[l.gen], l.exp));
  }
  return out;
}

CheckReport verify_hom(GroupHom& f) {
  CheckReport report;
  const PcPresentation& d = *f.domain;
  const PcPresentation& c = *f.codomain;
  if (static_cast<int>(f.images.size()) != d.ngens())
    throw error("verify_hom: image count mismatch");
  auto fail = [&](const std::string& rel, const ExponentVector& lhs,
                  const ExponentVector& rhs) {
    report.verdict = Verdict::fail;
    report.add("relation", rel);
    report.add("lhs_image", c.word_to_string(lhs));
    report.add("rhs_image", c.word_to_string(rhs));
  };

  for (int i = 0; i < d.ngens(); i++) {
    if (d.relative_order(i) == 0) continue;
    ExponentVector lhs = c.power(f.images[i], d.relative_order(i));
    ExponentVector rhs = f.apply(d.power_word(i));
    if (lhs != rhs) {
      fail(d.gen_name(i) + "^" + d.relative_order(i).get_str(), lhs, rhs);
      return report;
    }
  }
  for (int i = 0; i < d.ngens(); i++)
    for (int j = i + 1; j < d.ngens(); j++) {
      ExponentVector lhs = c.conjugate(f.images[j], f.images[i]);
      ExponentVector rhs = f.apply(d.conjugate_word(i, j));
      if (lhs != rhs) {
        fail(d.gen_name(j) + "^" + d.gen_name(i), lhs, rhs);
        return report;
      }
      if (d.relative_order(i) == 0) {
        ExponentVector lhs2 =
            c.conjugate(f.images[j], c.invert(f.images[i]));
        ExponentVector rhs2 = f.apply(d.conjugate_inverse_word(i, j));
        if (lhs2 != rhs2) {
          fail(d.gen_name(j) + "^" + d.gen_name(i) + "^-1", lhs2, rhs2);
          return report;
        }
      }
    }
  report.verdict = Verdict::pass;
  f.verified = true;
  return report;
}

GroupHom identity_hom(const PcPresentationPtr& p) {
  GroupHom f{p, p, {}, true};
  for (int i = 0; i < p->ngens(); i++) f.images.push_back(p->generator(i));
  return f;
}

GroupHom compose(const GroupHom& second, const GroupHom& first) {
  if (first.codomain.get() != second.domain.get())
    throw error("compose: domain/codomain mismatch");
  GroupHom out{first.domain, second.codomain, {},
               first.verified && second.verified};
  for (const ExponentVector& im : first.images)
    out.images.push_back(second.apply(im));
  return out;
}

PcPresentationPtr direct_product(const PcPresentationPtr& a,
                                 const PcPresentationPtr& b,
                                 const std::string& a_prefix,
                                 const std::string& b_prefix) {
  const int na = a->ngens(), nb = b->ngens();
  std::vector<std::string> names;
  std::vector<Integer> orders;
  for (int i = 0; i < na; i++) {
    names.push_back(a_prefix + a->gen_name(i));
    orders.push_back(a->relative_order(i));
  }
  for (int i = 0; i < nb; i++) {
    names.push_back(b_prefix + b->gen_name(i));
    orders.push_back(b->relative_order(i));
  }
  PcPresentation p(names, orders);
  auto lift_a = [&](const ExponentVector& u) {
    ExponentVector v(na + nb, Integer(0));
    for (int i = 0; i < na; i++) v[i] = u[i];
    return v;
  };
  auto lift_b = [&](const ExponentVector& u) {
    ExponentVector v(na + nb, Integer(0));
    for (int i = 0; i < nb; i++) v[na + i] = u[i];
    return v;
  };
  for (int i = 0; i < na; i++) {
    if (a->has_nontrivial_power(i)) p.set_power(i, lift_a(a->power_word(i)));
    for (int j = i + 1; j < na; j++) {
      if (!a->has_nontrivial_conjugate(i, j)) continue;
      p.set_conjugate(i, j, lift_a(a->conjugate_word(i, j)));
      if (a->relative_order(i) == 0)
        p.set_conjugate_inverse(i, j, lift_a(a->conjugate_inverse_word(i, j)));
    }
  }
  for (int i = 0; i < nb; i++) {
    if (b->has_nontrivial_power(i)) p.set_power(na + i, lift_b(b->power_word(i)));
    for (int j = i + 1; j < nb; j++) {
      if (!b->has_nontrivial_conjugate(i, j)) continue;
      p.set_conjugate(na + i, na + j, lift_b(b->conjugate_word(i, j)));
      if (b->relative_order(i) == 0)
        p.set_conjugate_inverse(na + i, na + j,
                                lift_b(b->conjugate_inverse_word(i, j)));
    }
  }
  return finish_presentation(std::move(p));
}

}  // namespace paranil
