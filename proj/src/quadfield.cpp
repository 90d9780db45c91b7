#include "aclp/quadfield.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "aclp/linalg.hpp"

namespace aclp {

namespace {
constexpr const char* kMod = "quadfield";
}

bool is_reduced(const Form& f) {
  if (f.A <= 0) return false;
  Int aB = abs(f.B);
  if (!(aB <= f.A && f.A <= f.C)) return false;
  if (f.B < 0 && (aB == f.A || f.A == f.C)) return false;
  return true;
}

Form reduce_form(Form f) {
  require(f.A > 0 && f.disc() < 0, kMod, "reduce: positive definite form expected");
  Int D = f.disc();
  while (!is_reduced(f)) {
    if (f.C < f.A || (f.C == f.A && f.B < 0)) {
      f = Form{f.C, -f.B, f.A};
      continue;
    }
    // translate B into (-A, A]
    Int r = mod_pos(f.B, 2 * f.A);
    if (r > f.A) r -= 2 * f.A;
    require(r != f.B, kMod, "reduce: no progress");
    f = Form{f.A, r, (r * r - D) / (4 * f.A)};
  }
  return f;
}

Form principal_form(long D) {
  long r = ((D % 4) + 4) % 4;
  require(D < 0 && (r == 0 || r == 1), kMod, "principal_form: bad discriminant");
  if (r == 0) return Form{1, 0, Int(-D) / 4};
  return Form{1, 1, Int(1 - D) / 4};
}

Form form_inverse(const Form& f) { return reduce_form(Form{f.A, -f.B, f.C}); }

Form with_coprime_lead(const Form& f, const Int& m) {
  require(m != 0, kMod, "with_coprime_lead: nonzero modulus");
  if (gcd(f.A, m) == 1) return f;
  for (long n = 1; n <= 64; ++n) {
    for (long x = -n; x <= n; ++x) {
      for (long y = -n; y <= n; ++y) {
        if (std::max(labs(x), labs(y)) != n) continue;  // fresh shell only
        if (std::gcd(x, y) != 1) continue;
        Int val = f.A * x * x + f.B * x * y + f.C * y * y;
        if (gcd(val, m) != 1) continue;
        Int g, s, t;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), Int(x).get_mpz_t(),
                   Int(y).get_mpz_t());
        require(g == 1, kMod, "with_coprime_lead: gcd");
        // columns (x, y), (z, w) with det 1
        Int z = -t, w = s;
        Int A2 = val;
        Int B2 = 2 * (f.A * x * z + f.C * y * w) + f.B * (x * w + y * z);
        Int C2 = f.A * z * z + f.B * z * w + f.C * w * w;
        Form out{A2, B2, C2};
        require(out.disc() == f.disc(), kMod, "with_coprime_lead: transform broke disc");
        return out;
      }
    }
  }
  fail(ErrKind::invariant, kMod, "with_coprime_lead: no representative found");
}

Form compose(const Form& f, const Form& g) {
  Int D = f.disc();
  require(D == g.disc(), kMod, "compose: discriminant mismatch");
  Form g2 = with_coprime_lead(g, f.A);
  Int a1 = f.A, a2 = g2.A;
  Int diff = (g2.B - f.B) / 2;  // both middle coefficients share D's parity
  Int t = (a2 == 1) ? Int(0) : mod_pos(diff * inv_mod(mod_pos(a1, a2), a2), a2);
  Int B = f.B + 2 * a1 * t;
  Int A = a1 * a2;
  require(mod_pos(B * B - D, 4 * A) == 0, kMod, "compose: concordance failed");
  return reduce_form(Form{A, B, (B * B - D) / (4 * A)});
}

Form form_pow(const Form& f, Int e) {
  long D = static_cast<long>(f.disc().get_si());
  Form base = (e < 0) ? form_inverse(f) : reduce_form(f);
  if (e < 0) e = -e;
  Form acc = principal_form(D);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) acc = compose(acc, base);
    e >>= 1;
    if (e > 0) base = compose(base, base);
  }
  return acc;
}

std::vector<Form> reduced_forms(long D) {
  long r = ((D % 4) + 4) % 4;
  require(D < 0 && (r == 0 || r == 1), kMod, "reduced_forms: bad discriminant");
  std::vector<Form> out;
  Int bound = isqrt(Int(-D) / 3);
  for (Int A = 1; A <= bound; ++A) {
    for (Int B = -A; B <= A; ++B) {
      if (mod_pos(B - D, Int(2)) != 0) continue;
      Int num = B * B - D;
      if (mod_pos(num, 4 * A) != 0) continue;
      Int C = num / (4 * A);
      if (C < A) continue;
      if (B < 0 && (-B == A || A == C)) continue;
      if (gcd(gcd(A, B), C) != 1) continue;
      out.push_back(Form{A, B, C});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_fundamental_disc(long D) {
  if (D >= 0) return false;  // only the imaginary case matters here
  long r = ((D % 4) + 4) % 4;
  if (r == 1) return is_squarefree(D);
  if (r != 0) return false;
  long m = D / 4;
  long rm = ((m % 4) + 4) % 4;
  return (rm == 2 || rm == 3) && is_squarefree(m);
}

Form prime_form(long D, long p) {
  require(is_fundamental_disc(D), kMod, "prime_form: fundamental discriminant expected");
  require(p >= 2 && is_prime(p) && D % p == 0, kMod, "prime_form: p must ramify");
  Form f;
  if (p != 2) {
    if (((D % 2) + 2) % 2 != 0)
      f = Form{p, p, Int(p * p - D) / (4 * p)};
    else
      f = Form{p, 0, Int(-D) / (4 * p)};
  } else {
    long r16 = ((D % 16) + 16) % 16;
    if (r16 == 8)
      f = Form{2, 0, Int(-D) / 8};
    else if (r16 == 12)
      f = Form{2, 2, Int(4 - D) / 8};
    else
      fail(ErrKind::hypothesis, kMod, "prime_form: 2 does not ramify");
  }
  require(f.disc() == D, kMod, "prime_form: discriminant check");
  return reduce_form(f);
}

FieldData FieldData::make(long D, long p) {
  if (!is_fundamental_disc(D)) fail(ErrKind::hypothesis, kMod, "D must be a fundamental discriminant < 0");
  if (D == -3 || D == -4) fail(ErrKind::hypothesis, kMod, "D = -3 and D = -4 carry extra units; excluded");
  if (!is_prime(p)) fail(ErrKind::hypothesis, kMod, "p must be prime");
  if (D % p != 0) fail(ErrKind::hypothesis, kMod, "p must ramify in K (p | D)");
  FieldData fd;
  fd.D = D;
  fd.p = p;
  fd.d = (((D % 2) + 2) % 2 != 0) ? D : D / 4;
  fd.f = (fd.d == D) ? 1 : 2;
  fd.tag = FieldTag::quadratic(p, fd.d);
  require(fd.tag.ext == Ext::ramified, kMod, "p must ramify in K");
  return fd;
}

// ---------------------------------------------------------------------------
// ClassGroup

ClassGroup::ClassGroup(long D) : D_(D) {
  require(is_fundamental_disc(D), kMod, "class group needs a fundamental discriminant");
  elems_ = reduced_forms(D);
  require(!elems_.empty(), kMod, "empty form list");
}

size_t ClassGroup::index_of(const Form& f) const {
  Form r = reduce_form(f);
  auto it = std::lower_bound(elems_.begin(), elems_.end(), r);
  require(it != elems_.end() && *it == r, kMod, "form not of this discriminant");
  return static_cast<size_t>(it - elems_.begin());
}

long ClassGroup::element_order(const Form& f) const {
  Form id = principal_form(D_), acc = reduce_form(f);
  long n = 1;
  while (!(acc == id)) {
    acc = compose(acc, f);
    ++n;
    require(n <= static_cast<long>(order()), kMod, "element order exceeds group order");
  }
  return n;
}

// ---------------------------------------------------------------------------
// AnticycQuotient

AnticycQuotient::AnticycQuotient(const ClassGroup& cl, long p)
    : cl_(cl), pform_(prime_form(cl.disc(), p)) {
  ord_p_ = cl_.element_order(pform_);
  size_t n = cl_.order();

  // subgroup generated by the prime class
  std::vector<Form> H;
  Form acc = cl_.id();
  for (long k = 0; k < ord_p_; ++k) {
    H.push_back(acc);
    acc = compose(acc, pform_);
  }

  // label cosets by least member
  std::vector<Form> minrep(n);
  for (size_t i = 0; i < n; ++i) {
    const Form& g = cl_.elements()[i];
    Form best = compose(g, H[0]);
    for (const Form& h : H) best = std::min(best, compose(g, h));
    minrep[i] = best;
  }
  reps_.assign(minrep.begin(), minrep.end());
  std::sort(reps_.begin(), reps_.end());
  reps_.erase(std::unique(reps_.begin(), reps_.end()), reps_.end());
  require(reps_.size() * static_cast<size_t>(ord_p_) == n, kMod, "coset count mismatch");
  coset_label_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    auto it = std::lower_bound(reps_.begin(), reps_.end(), minrep[i]);
    coset_label_[i] = static_cast<size_t>(it - reps_.begin());
  }
  require(coset_of(cl_.id()) == 0, kMod, "identity coset must carry label 0");

  // greedy generators for the quotient
  size_t m = reps_.size();
  std::vector<size_t> gens;
  std::vector<char> reached(m, 0);
  reached[0] = 1;
  size_t covered = 1;
  auto close = [&]() {
    bool grew = true;
    while (grew) {
      grew = false;
      for (size_t x = 0; x < m; ++x) {
        if (!reached[x]) continue;
        for (size_t g : gens) {
          size_t y = mul(x, g);
          if (!reached[y]) {
            reached[y] = 1;
            ++covered;
            grew = true;
          }
        }
      }
    }
  };
  for (size_t cand = 1; cand < m && covered < m; ++cand) {
    if (reached[cand]) continue;
    gens.push_back(cand);
    close();
  }
  size_t k = gens.size();

  // exponent vectors by BFS over the Cayley graph
  gen_exp_.assign(m, {});
  std::vector<char> seen(m, 0);
  gen_exp_[0] = std::vector<long>(k, 0);
  seen[0] = 1;
  std::vector<size_t> queue{0};
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    size_t x = queue[qi];
    for (size_t gi = 0; gi < k; ++gi) {
      size_t y = mul(x, gens[gi]);
      if (seen[y]) continue;
      seen[y] = 1;
      gen_exp_[y] = gen_exp_[x];
      gen_exp_[y][gi] += 1;
      queue.push_back(y);
    }
  }
  require(queue.size() == m, kMod, "generators fail to reach the whole quotient");

  if (k == 0) {
    cyc_.clear();
    basis_change_ = MatZ{};
    return;
  }

  // relation lattice: every Cayley edge closes a relation against the tree
  MatZ rel;
  for (size_t x = 0; x < m; ++x)
    for (size_t gi = 0; gi < k; ++gi) {
      size_t y = mul(x, gens[gi]);
      VecZ row(k, 0);
      for (size_t j = 0; j < k; ++j) row[j] = Int(gen_exp_[x][j]) - Int(gen_exp_[y][j]);
      row[gi] += 1;
      rel.push_back(std::move(row));
    }
  MatZ M = row_hnf(std::move(rel));
  require(M.size() == k, kMod, "relation lattice must have full rank");
  MatZ U, V;
  MatZ S = smith(M, &U, &V);
  basis_change_ = V;
  Int prod = 1;
  ss_full_.clear();
  for (size_t i = 0; i < k; ++i) {
    ss_full_.push_back(S[i][i].get_si());
    prod *= S[i][i];
  }
  require(prod == Int(m), kMod, "invariant factors must multiply to the order");
  cyc_.clear();
  for (long s : ss_full_)
    if (s > 1) cyc_.push_back(s);
}

size_t AnticycQuotient::coset_of(const Form& f) const { return coset_label_[cl_.index_of(f)]; }

size_t AnticycQuotient::mul(size_t i, size_t j) const { return coset_of(compose(reps_[i], reps_[j])); }

size_t AnticycQuotient::inv(size_t i) const { return coset_of(form_inverse(reps_[i])); }

std::vector<long> AnticycQuotient::coords(size_t i) const {
  size_t k = gen_exp_[i].size();
  std::vector<long> y;
  for (size_t j = 0; j < k; ++j) {
    if (ss_full_[j] <= 1) continue;
    Int c = 0;
    for (size_t t = 0; t < k; ++t) c += Int(gen_exp_[i][t]) * basis_change_[t][j];
    y.push_back(Int(mod_pos(c, Int(ss_full_[j]))).get_si());
  }
  return y;
}

// ---------------------------------------------------------------------------
// Characters

long Character::exponent(size_t i) const {
  if (order == 1) return 0;
  std::vector<long> y = G->coords(i);
  const std::vector<long>& cyc = G->cyclic_type();
  long k = 0;
  for (size_t j = 0; j < cyc.size(); ++j) {
    long w = (e[j] * order) / cyc[j];  // integral by the definition of order
    k = (k + w % order * (y[j] % order)) % order;
  }
  return ((k % order) + order) % order;
}

bool character_value_supported(long order, long p) { return order <= 2 || (p - 1) % order == 0; }

Padic Character::value(size_t i, const FieldTag& F, long prec) const {
  long k = exponent(i);
  if (order <= 2) return Padic::from_int(F, k == 0 ? 1 : -1, prec);
  if ((F.p - 1) % order != 0)
    fail(ErrKind::unsupported, kMod,
         "character of order " + std::to_string(order) + " has no values in Q_" +
             std::to_string(F.p) + "(w); need order <= 2 or order | p-1");
  long r = primitive_root_mod(F.p);
  Int g = pow_mod(Int(r), Int(((F.p - 1) / order) * k), Int(F.p));
  return Padic::from_int(F, teichmuller_int(g, F.p, prec), prec);
}

std::string Character::describe() const {
  std::ostringstream os;
  os << "chi[";
  for (size_t j = 0; j < e.size(); ++j) os << (j ? "," : "") << e[j];
  os << "] order " << order;
  return os.str();
}

std::vector<Character> characters(const AnticycQuotient& G) {
  const std::vector<long>& cyc = G.cyclic_type();
  std::vector<Character> out;
  std::vector<long> e(cyc.size(), 0);
  while (true) {
    Character chi;
    chi.G = &G;
    chi.e = e;
    long o = 1;
    for (size_t j = 0; j < cyc.size(); ++j) o = std::lcm(o, cyc[j] / std::gcd(cyc[j], e[j]));
    chi.order = o;
    out.push_back(chi);
    // odometer, last index fastest
    size_t j = cyc.size();
    while (j > 0) {
      --j;
      if (++e[j] < cyc[j]) break;
      e[j] = 0;
      if (j == 0) {
        require(out.size() == G.size(), kMod, "character count mismatch");
        return out;
      }
    }
    if (cyc.empty()) {
      require(out.size() == 1, kMod, "trivial group has one character");
      return out;
    }
  }
}

}  // namespace aclp
