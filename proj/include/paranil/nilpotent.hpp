#pragma once

#include <optional>

#include "paranil/pcgroup.hpp"

namespace paranil {

// Finite or cofinite set of primes.
struct PrimeSet {
  enum class Kind { finite, cofinite };
  Kind kind = Kind::finite;
  std::vector<Integer> primes;  // sorted, distinct, all prime

  static PrimeSet finite_set(std::vector<Integer> ps);
  static PrimeSet complement_of(std::vector<Integer> ps);
  static PrimeSet empty() { return finite_set({}); }

  bool contains(const Integer& p) const;
  // True when every prime divisor of |n| lies in the set; n must be nonzero.
  bool is_pi_number(const Integer& n) const;
  PrimeSet complement() const;
  bool operator==(const PrimeSet&) const = default;
  std::string to_string() const;
};

// Subgroup of a pc group, held as a canonical induced generating sequence:
// one element per occupied leading index, leading exponents positive and
// dividing the relative order, entries at deeper igs columns reduced.
// Canonical form is unique per subgroup, so equality is vector equality.
class Subgroup {
 public:
  static Subgroup trivial(PcPresentationPtr p);
  static Subgroup whole(PcPresentationPtr p);
  static Subgroup generated_by(PcPresentationPtr p,
                               std::vector<ExponentVector> gens);
  static Subgroup normal_closure(PcPresentationPtr p,
                                 std::vector<ExponentVector> gens);

  const PcPresentationPtr& ambient() const { return ambient_; }
  const std::vector<ExponentVector>& igs() const { return igs_; }
  int size() const { return static_cast<int>(igs_.size()); }
  // Leading generator index of igs element k.
  int leading(int k) const { return leading_[k]; }
  const Integer& leading_exp(int k) const { return igs_[k][leading_[k]]; }
  // Relative order of igs element k in the induced chain (0 = infinite).
  Integer relative_order(int k) const;

  bool is_trivial() const { return igs_.empty(); }
  bool is_whole() const;
  long hirsch_length() const;
  // Order of the subgroup (0 when infinite).
  Integer order() const;

  struct Membership {
    bool member = false;
    // u = prod_k igs[k]^(exponents[k]) when member.
    std::vector<Integer> exponents;
  };
  Membership membership(const ExponentVector& u) const;
  bool contains(const ExponentVector& u) const;
  bool contains_subgroup(const Subgroup& other) const;
  bool operator==(const Subgroup& other) const;

  // Canonical right-coset representative: entries at igs columns reduced
  // into [0, leading_exp); for normal subgroups this is the coset normal
  // form used by quotient presentations.
  ExponentVector reduce(const ExponentVector& u) const;

  bool is_normal() const;
  bool is_abelian() const;
  // Conjugation-invariance under a single element (both directions).
  bool invariant_under(const ExponentVector& x) const;

  Subgroup join(const Subgroup& other) const;

 private:
  Subgroup(PcPresentationPtr p) : ambient_(std::move(p)) {}
  void insert(ExponentVector u);
  void close();
  void canonicalize();
  friend Subgroup join_generated(PcPresentationPtr, std::vector<ExponentVector>);

  PcPresentationPtr ambient_;
  std::vector<ExponentVector> igs_;
  std::vector<int> leading_;
};

// Presentation of a subgroup on its igs, with the inclusion map.
struct SubgroupPresentation {
  PcPresentationPtr presentation;
  GroupHom inclusion;  // presentation -> ambient, igs elements as images
};
SubgroupPresentation subgroup_presentation(const Subgroup& s);

// Consistent presentation of P/K with the projection hom and enough data
// to lift quotient elements back into P.
struct QuotientResult {
  PcPresentationPtr presentation;
  GroupHom projection;       // P -> P/K
  Subgroup kernel;           // K
  std::vector<int> kept;     // quotient generator -> ambient generator index
  ExponentVector lift(const ExponentVector& u) const;
  Subgroup preimage(const Subgroup& s) const;  // full preimage in P
};
QuotientResult quotient_presentation(const PcPresentationPtr& p,
                                     const Subgroup& k);

// Lower central series data.
struct SeriesTable {
  PcPresentationPtr group;
  std::vector<Subgroup> terms;  // terms[i] = gamma_{i+1}
  std::vector<AbelianInvariants> step_invariants;
  // First index k (1-based) with h(gamma_k) = h(gamma_{k+1}).
  std::optional<long> stabilized_at;
  // Class c when the series hits the trivial group: gamma_{c+1} = 1.
  std::optional<long> nilpotency_class;

  long depth() const { return static_cast<long>(terms.size()) - 1; }
  const Subgroup& gamma(long i) const { return terms.at(i - 1); }
  const AbelianInvariants& step(long i) const {
    return step_invariants.at(i - 1);
  }
};

SeriesTable lower_central_series(const PcPresentationPtr& p, long depth);

// Abelian invariants of the step gamma_i/gamma_{i+1} of a pair of nested
// subgroups with [K,K] <= L: coordinates of K-elements plus the relation
// lattice of the quotient.
struct LayerCoords {
  Subgroup k, l;
  IntMatrix relations;  // rows: relations among igs(K)-coordinates
  std::vector<Integer> coords(const ExponentVector& u) const;
  AbelianInvariants invariants() const;
  int rank() const { return k.size(); }
};
LayerCoords layer_coords(const Subgroup& k, const Subgroup& l);

struct AbelianizationResult {
  AbelianInvariants invariants;
  QuotientResult quotient;  // P / gamma_2(P)
};
AbelianizationResult abelianization(const PcPresentationPtr& p);

// tau(P): union of the torsion primes of the lower central steps up to the
// Hirsch-length stabilization index.
PrimeSet tau(const PcPresentationPtr& p);

long hirsch_length(const PcPresentationPtr& p);
long hirsch_length(const Subgroup& s);

// Nilpotency class by bounded lower-central computation.
std::optional<long> nilpotency_class(const PcPresentationPtr& p,
                                     long class_bound);

// Configurable bound used by operations that must establish nilpotency.
long default_class_bound();

// The pi-isolator of a normal subgroup K with nilpotent quotient P/K.
Subgroup isolator(const PcPresentationPtr& p, const Subgroup& k,
                  const PrimeSet& pi, long class_bound = default_class_bound());

// Center of a nilpotent pc group.
Subgroup center(const PcPresentationPtr& p,
                long class_bound = default_class_bound());

// Upper central series Z_1 <= ... <= Z_j of a nilpotent group.
std::vector<Subgroup> upper_central_series(
    const PcPresentationPtr& p, long j,
    long class_bound = default_class_bound());

// Surjectivity of gamma_i/gamma_{i+1} (x) G_ab ->> gamma_{i+1}/gamma_{i+2}
// induced by commutation (checked on generator pairs).
CheckReport tensor_epi_check(const SeriesTable& t, long i);

// Lemma-style power exponents: minimal pi(m)-numbers n_i, n with
// gamma_i(P)^{n_i} <= gamma_i(N) and P^n <= N, searched among divisors of
// the inductive bound. Requires P nilpotent of class <= 2.
struct PowerExponents {
  Integer n;                    // P^n <= N
  std::vector<Integer> n_i;     // n_i[k] for gamma_{k+2}, k = 0..c-2
  Integer bound_n;              // inductive bounds the minima divide
  std::vector<Integer> bound_i;
};
PowerExponents power_exponent_search(const PcPresentationPtr& p,
                                     const Subgroup& n_sub, const Integer& m);

// Exact power subgroup X^d for X of nilpotency class <= 2.
Subgroup power_subgroup(const Subgroup& x, const Integer& d);

// --- homomorphism machinery built on subgroups ---

Subgroup image_subgroup(const GroupHom& f);
Subgroup image_of_subgroup(const GroupHom& f, const Subgroup& s);
Subgroup kernel_of_hom(const GroupHom& f);
// Full preimage f^{-1}(S); S need not be normal.
Subgroup preimage_of_subgroup(const GroupHom& f, const Subgroup& s);

// Smallest exponent n >= 1 with X^n <= K (X of class <= 2, K <= X of equal
// Hirsch length); nullopt when no exponent exists.
std::optional<Integer> minimal_power_exponent(const Subgroup& x,
                                              const Subgroup& k);

}  // namespace paranil
