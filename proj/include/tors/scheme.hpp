#pragma once

#include "tors/elliptic.hpp"
#include "tors/extension.hpp"
#include "tors/ratfunc.hpp"

#include <string>
#include <vector>

namespace tors {

// y^2 = x^3 + a(t) x^2 + b(t) x + c(t) over the t-line, with the section x = section_x(t).
struct EllipticScheme {
    RatFunc a, b, c, section_x;

    RatFunc section_y_square() const;
    RatFunc discriminant() const;
    // Throws std::invalid_argument when the discriminant vanishes identically.
    void validate() const;

    static EllipticScheme legendre(const RatFunc& section_x = RatFunc::constant(2));
    static EllipticScheme from_strings(const std::string& a, const std::string& b, const std::string& c,
                                       const std::string& section_x);
};

struct AlgebraicNumber {
    QPoly minpoly;  // primitive, irreducible over Q
    CertifiedRoot root;
};

struct BadSet {
    std::vector<AlgebraicNumber> points;  // ordered by (re, im) of the root
    bool pole_at_infinity = false;
};

// Zeros of the discriminant numerator and finite poles of a, b, c. The point at
// infinity is flagged whenever some coefficient is nonconstant.
BadSet bad_reduction_set(const EllipticScheme& s, unsigned precision_bits = 128);
// Finite poles of section_x; those parameters are rejected by specialize.
std::vector<AlgebraicNumber> section_poles(const EllipticScheme& s, unsigned precision_bits = 128);

using TowerCurve = WeierstrassCurve<TowerElement>;
using TowerPoint = CurvePoint<TowerElement>;

struct Specialization {
    TowerElement lambda;
    TowerCurve curve;
    TowerPoint point;
    // True when y is carried formally as sqrt(section_y_square(lambda)).
    bool adjoined = false;
};

// Throws BadReduction at poles, at discriminant zeros and at poles of the section.
Specialization specialize(const EllipticScheme& s, const TowerElement& lambda0);

enum class Prescreen { pass, fail };

// fail proves m P != infinity; pass is inconclusive. Primes that are bad for the
// tower or the curve are skipped.
Prescreen torsion_prescreen(const Specialization& sp, unsigned m, const std::vector<std::uint64_t>& primes);

// Order of the reduction of the section at q, if at most `bound`. Throws BadPrime
// when the curve or the point does not reduce well.
std::optional<unsigned> reduced_order(const Specialization& sp, const FiniteReduction& red, unsigned bound);

}  // namespace tors
