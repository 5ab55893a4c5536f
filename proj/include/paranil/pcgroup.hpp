#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paranil/arith.hpp"
#include "paranil/check.hpp"

namespace paranil {

// One syllable of a group word: generator index (0-based) and exponent.
struct Letter {
  int gen;
  Integer exp;
};

using Word = std::vector<Letter>;

// Normal-form element of a pc presentation: one exponent per generator,
// reduced into [0, order) wherever the relative order is finite.
using ExponentVector = std::vector<Integer>;

// Thrown when collection exceeds its step budget, which signals an
// inconsistent or pathological presentation.
struct collect_budget_error : error {
  using error::error;
};

// A polycyclic presentation: generators g_0 < g_1 < ... < g_{n-1} with
// relative orders (0 = infinite), power relations g_i^{o_i} = word(>i) and
// conjugation relations g_j^(g_i) = word(>i) for i < j. For infinite-order
// g_i the inverse conjugates g_j^(g_i^-1) are also stored; build() derives
// them when the action can be inverted.
//
// Immutable after build(); all arithmetic is by collection from the left
// under a configurable step budget.
class PcPresentation {
 public:
  PcPresentation(std::vector<std::string> gen_names,
                 std::vector<Integer> relative_orders);

  // --- construction (before build) ---
  void set_power(int i, ExponentVector rhs);
  void set_conjugate(int i, int j, ExponentVector rhs);          // g_j^(g_i)
  void set_conjugate_inverse(int i, int j, ExponentVector rhs);  // g_j^(g_i^-1)
  void build();

  // --- structure ---
  int ngens() const { return static_cast<int>(orders_.size()); }
  const std::vector<std::string>& gen_names() const { return names_; }
  const std::string& gen_name(int i) const { return names_[i]; }
  const Integer& relative_order(int i) const { return orders_[i]; }
  const std::vector<Integer>& relative_orders() const { return orders_; }
  bool finite_order(int i) const { return orders_[i] != 0; }
  bool built() const { return built_; }
  bool consistency_checked() const { return consistent_; }
  // Index of a generator name, -1 when unknown.
  int gen_index(const std::string& name) const;
  // Number of infinite relative orders (= Hirsch length of the group).
  long infinite_gen_count() const;
  Integer group_order() const;  // 0 when infinite

  // Power relation right-hand side (all-zero vector = identity).
  ExponentVector power_word(int i) const;
  bool has_nontrivial_power(int i) const;
  // Conjugate relation as stored; identity action yields the trivial word.
  ExponentVector conjugate_word(int i, int j) const;
  ExponentVector conjugate_inverse_word(int i, int j) const;
  bool has_nontrivial_conjugate(int i, int j) const;

  // --- arithmetic (after build) ---
  ExponentVector identity() const { return ExponentVector(ngens(), Integer(0)); }
  bool is_identity(const ExponentVector& u) const;
  ExponentVector generator(int i) const;

  // Normal form of an arbitrary word; the kernel everything else reduces to.
  ExponentVector collect(const Word& w) const;
  ExponentVector multiply(const ExponentVector& u, const ExponentVector& v) const;
  ExponentVector invert(const ExponentVector& u) const;
  ExponentVector power(const ExponentVector& u, const Integer& k) const;
  // [u,v] = u^-1 v^-1 u v
  ExponentVector commutator(const ExponentVector& u, const ExponentVector& v) const;
  // u^x = x^-1 u x
  ExponentVector conjugate(const ExponentVector& u, const ExponentVector& x) const;

  static Word to_word(const ExponentVector& u);
  std::string word_to_string(const ExponentVector& u) const;

  void set_collect_budget(long steps) { budget_ = steps; }
  long collect_budget() const { return budget_; }

  void mark_consistent() const { consistent_ = true; }

 private:
  ExponentVector collect_onto(ExponentVector ev, const Word& w) const;
  void validate_relation_word(int subject, const ExponentVector& rhs) const;
  void set_conjugate_inverse_unchecked(int i, int j, ExponentVector rhs);
  void derive_inverse_conjugates();

  std::vector<std::string> names_;
  std::vector<Integer> orders_;
  std::vector<std::optional<ExponentVector>> powers_;
  // conj_[i][j], conj_inv_[i][j] for i < j; absent = trivial action
  std::vector<std::vector<std::optional<ExponentVector>>> conj_;
  std::vector<std::vector<std::optional<ExponentVector>>> conj_inv_;
  bool built_ = false;
  mutable bool consistent_ = false;
  long budget_ = 10000000;
};

using PcPresentationPtr = std::shared_ptr<const PcPresentation>;

// Overlap/associativity consistency test. On failure the report carries the
// offending overlap word and both collected sides.
CheckReport check_consistency(const PcPresentation& p);

// Convenience: build, check consistency and wrap in a shared pointer;
// throws on inconsistency.
PcPresentationPtr finish_presentation(PcPresentation p);

// Homomorphism between pc groups, given on generators.
struct GroupHom {
  PcPresentationPtr domain;
  PcPresentationPtr codomain;
  std::vector<ExponentVector> images;  // one per domain generator
  bool verified = false;

  ExponentVector apply(const ExponentVector& u) const;
  ExponentVector apply_word(const Word& w) const;
};

// Checks that every domain relation maps to the identity; on success the
// returned hom is flagged `verified`.
CheckReport verify_hom(GroupHom& f);
GroupHom identity_hom(const PcPresentationPtr& p);
GroupHom compose(const GroupHom& second, const GroupHom& first);

// Direct product with the A-generators first; embeddings are by index.
PcPresentationPtr direct_product(const PcPresentationPtr& a,
                                 const PcPresentationPtr& b,
                                 const std::string& a_prefix = "",
                                 const std::string& b_prefix = "");

}  // namespace paranil
