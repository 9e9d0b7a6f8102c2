#pragma once

#include "tors/cyclotomic.hpp"
#include "tors/finite_field.hpp"
#include "tors/roots.hpp"

#include <memory>
#include <stdexcept>

namespace tors {

// Q(zeta_N)[y]/(g) with g monic and squarefree.
class FieldTower {
  public:
    FieldTower(FieldPtr base, KPoly g, int input_degree);

    const FieldPtr& base() const { return base_; }
    std::uint64_t N() const { return base_->N(); }
    const KPoly& g() const { return g_; }
    std::size_t relative_degree() const { return static_cast<std::size_t>(g_.degree()); }
    std::size_t absolute_degree() const { return base_->degree() * relative_degree(); }
    // Degree removed when taking the squarefree part of the input polynomial.
    int removed_degree() const { return input_degree_ - g_.degree(); }

  private:
    FieldPtr base_;
    KPoly g_;
    int input_degree_;
};

using TowerPtr = std::shared_ptr<const FieldTower>;

// Rejects the zero polynomial, constants and non-monic input; keeps the squarefree part.
TowerPtr make_tower(const FieldPtr& base, const KPoly& g);
// The base field itself, as the tower y - 0.
TowerPtr trivial_tower(const FieldPtr& base);

class TowerElement;

// Inverse of a zero divisor; `factor` is a nontrivial monic factor of g.
class ZeroDivisorError : public std::domain_error {
  public:
    ZeroDivisorError(KPoly factor) : std::domain_error("zero divisor"), factor(std::move(factor)) {}
    KPoly factor;
};

class TowerElement {
  public:
    TowerElement() = default;
    explicit TowerElement(TowerPtr t);
    TowerElement(TowerPtr t, const KPoly& rep);

    static TowerElement from_base(TowerPtr t, const CyclotomicNumber& a);
    static TowerElement from_rational(TowerPtr t, const Rational& a);
    static TowerElement generator(TowerPtr t);

    const TowerPtr& tower() const { return t_; }
    // Representative of degree < deg g.
    const KPoly& rep() const { return rep_; }
    bool is_zero() const { return rep_.is_zero_poly(); }
    // The base-field value when rep is constant.
    std::optional<CyclotomicNumber> base_value() const;
    TowerElement inverse() const;

    friend TowerElement operator+(const TowerElement& a, const TowerElement& b);
    friend TowerElement operator-(const TowerElement& a, const TowerElement& b);
    friend TowerElement operator-(const TowerElement& a);
    friend TowerElement operator*(const TowerElement& a, const TowerElement& b);
    friend bool operator==(const TowerElement& a, const TowerElement& b);

  private:
    TowerPtr t_;
    KPoly rep_;
};

inline bool is_zero(const TowerElement& x) { return x.is_zero(); }
inline TowerElement zero_like(const TowerElement& x) { return TowerElement(x.tower()); }
inline TowerElement one_like(const TowerElement& x) { return TowerElement::from_rational(x.tower(), 1); }
inline TowerElement inverse(const TowerElement& x) { return x.inverse(); }

// Coordinates over Q in the basis zeta^i y^l (l major), length [L:Q].
std::vector<Rational> rational_coordinates(const TowerElement& z);
// Minimal polynomial over Q, monic. Assumes the tower is a field.
QPoly minimal_polynomial_over_Q(const TowerElement& z);
std::size_t absolute_degree(const TowerElement& z);

KPoly conjugate_poly(const KPoly& p, std::uint64_t j);
// Roots of sigma_j(g) in C, certified and ordered by (re, im).
std::vector<CertifiedRoot> complex_roots(const FieldTower& t, std::uint64_t j, unsigned precision_bits);
// Image of z under zeta -> exp(2 pi i j/N), y -> root.
Complex embed(const TowerElement& z, std::uint64_t j, const Complex& root, unsigned precision_bits);

// A prime q = 1 mod N at which g stays irreducible over the residue field F_q,
// which proves g irreducible over Q(zeta_N); 0 when deg g = 1.
std::optional<std::uint64_t> irreducibility_prime(const FieldTower& t, std::size_t tries);

// Irreducible monic factor over Q(zeta_N) of g having the given root of g
// (under the embedding j = 1).
KPoly factor_containing_root(const FieldTower& t, const Complex& root);

struct FiniteReduction {
    std::uint64_t q = 0;
    std::uint64_t zeta_image = 0;
    FpPoly g_image;
    // F_q^e = F_q[t]/(h) with h an irreducible factor of g_image; root is t.
    std::shared_ptr<const GFContext> field;
    GF root;

    std::uint64_t map(const CyclotomicNumber& a) const;
    GF map(const TowerElement& z) const;
    unsigned extension_degree() const { return field->degree(); }
};

// Reduction modulo a prime q = 1 mod N with g squarefree mod q. Throws BadPrime otherwise.
FiniteReduction reduce_mod_prime(const FieldTower& t, std::uint64_t q);
// First `count` primes q = 1 mod N, q >= start, at which the tower reduces well.
std::vector<FiniteReduction> good_reductions(const FieldTower& t, std::size_t count, std::uint64_t start = 1000);

}  // namespace tors
