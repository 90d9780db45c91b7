#pragma once

// Class-field data for an imaginary quadratic field K = Q(sqrt(D)):
// binary quadratic forms with Gauss composition, the class group Cl(D),
// the quotient by the class of the ramified prime above p, and the
// characters of that quotient.

#include <vector>

#include "aclp/linalg.hpp"
#include "aclp/padic.hpp"
#include "aclp/util.hpp"

namespace aclp {

// Positive definite integral binary quadratic form A x^2 + B xy + C y^2.
struct Form {
  Int A, B, C;
  Int disc() const { return B * B - 4 * A * C; }
  bool operator==(const Form&) const = default;
  bool operator<(const Form& o) const {
    if (A != o.A) return A < o.A;
    if (B != o.B) return B < o.B;
    return C < o.C;
  }
};

bool is_reduced(const Form& f);
Form reduce_form(Form f);
Form principal_form(long D);
Form form_inverse(const Form& f);
// Gauss composition; both forms must share the discriminant.
Form compose(const Form& f, const Form& g);
Form form_pow(const Form& f, Int e);
// A form equivalent to f whose leading coefficient is coprime to m.
Form with_coprime_lead(const Form& f, const Int& m);

// All reduced forms of discriminant D < 0, sorted.
std::vector<Form> reduced_forms(long D);

bool is_fundamental_disc(long D);

// Reduced form of the ramified prime ideal above p (p | D required).
Form prime_form(long D, long p);

// Hypothesis-checked (D, p) bundle: D fundamental, < 0, not -3/-4, and p
// ramified in K. Carries the reduced radicand d and f with sqrt(D) = f*w.
struct FieldData {
  long D = 0;
  long p = 0;
  long d = 0;
  long f = 0;
  FieldTag tag;
  static FieldData make(long D, long p);
};

class ClassGroup {
 public:
  explicit ClassGroup(long D);
  long disc() const { return D_; }
  const std::vector<Form>& elements() const { return elems_; }
  size_t order() const { return elems_.size(); }
  size_t index_of(const Form& f) const;  // reduces first
  Form id() const { return principal_form(D_); }
  long element_order(const Form& f) const;

 private:
  long D_;
  std::vector<Form> elems_;
};

// Quotient of Cl(D) by the cyclic subgroup generated by the class of the
// prime above p, with deterministic coset labels (label 0 = trivial coset,
// each coset represented by its lexicographically least reduced form).
class AnticycQuotient {
 public:
  AnticycQuotient(const ClassGroup& cl, long p);

  const ClassGroup& cl() const { return cl_; }
  size_t size() const { return reps_.size(); }
  long index_Hp() const { return ord_p_; }  // order of the prime class
  const Form& prime_class() const { return pform_; }
  const std::vector<Form>& reps() const { return reps_; }
  size_t coset_of(const Form& f) const;
  size_t mul(size_t i, size_t j) const;
  size_t inv(size_t i) const;
  // invariant factors d_1 | d_2 | ... (nontrivial ones only; empty = trivial group)
  const std::vector<long>& cyclic_type() const { return cyc_; }
  std::vector<long> coords(size_t i) const;

 private:
  ClassGroup cl_;
  Form pform_;
  long ord_p_;
  std::vector<Form> reps_;
  std::vector<size_t> coset_label_;   // class-group element index -> label
  std::vector<long> cyc_;
  std::vector<long> ss_full_;         // all invariant factors, including 1s
  MatZ basis_change_;                 // exponent rows -> cyclic coordinates
  std::vector<std::vector<long>> gen_exp_;  // label -> exponent vector over gens
};

bool character_value_supported(long order, long p);

// Character of the quotient; e is the exponent tuple against cyclic_type.
struct Character {
  const AnticycQuotient* G = nullptr;
  std::vector<long> e;
  long order = 1;

  // chi(coset i) = zeta_order ^ exponent(i)
  long exponent(size_t i) const;
  bool trivial() const { return order == 1; }
  // p-adic value. Supported when order <= 2 or order | p - 1; anything else
  // would land outside Q_p(w) and is rejected.
  Padic value(size_t i, const FieldTag& F, long prec) const;
  std::string describe() const;
};

// All size() characters, deterministic order (exponent odometer).
std::vector<Character> characters(const AnticycQuotient& G);

}  // namespace aclp
