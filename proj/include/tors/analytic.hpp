#pragma once

#include "tors/bigfloat.hpp"
#include "tors/scheme.hpp"

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

namespace tors {

// y^2 = x^3 + a x^2 + b x + c over C.
struct ComplexCurve {
    Complex a, b, c;

    Complex cubic(const Complex& x) const { return ((x + a) * x + b) * x + c; }
    Complex discriminant() const;
};

struct ComplexPoint {
    bool infinity = false;
    Complex x, y;
};

// Periods of the differential dx/(2y), i.e. x = wp(z) - a/3, y = wp'(z)/2 with
// wp the Weierstrass function of the lattice. For y^2 = x^3 - x the real
// period is 2.62205755429211981...
struct PeriodLattice {
    Complex omega1, omega2;
    // Absolute error bound on each period.
    Real error;
    unsigned precision_bits = 0;

    Complex tau() const { return omega2 / omega1; }

    // Basis with tau in the standard fundamental domain, for series evaluation.
    Complex reduced1, reduced2;
    // Roots of the depressed cubic x^3 + p x + q, with x shifted by a/3.
    Complex shift, e1, e2, e3;
};

// AGM periods; each AGM basis is accepted only if its Eisenstein invariants
// reproduce g2 and g3 of the curve. Throws std::domain_error for a singular
// curve and PrecisionError if the AGM does not settle.
PeriodLattice period_lattice(const ComplexCurve& E, unsigned precision_bits);

// wp and wp' of the lattice at z, by q-expansion on the reduced basis.
std::pair<Complex, Complex> weierstrass_p(const PeriodLattice& L, const Complex& z, unsigned precision_bits);
ComplexPoint exp_map(const PeriodLattice& L, const Complex& z, unsigned precision_bits);

struct EllipticLog {
    Complex z;
    bool infinity = false;
    Real error;
};

// z in the half-open parallelogram {s omega1 + t omega2 : s, t in [0, 1)} with
// exp_map(z) = P. Uses Carlson's R_F, checked against exp_map.
EllipticLog elliptic_log(const ComplexCurve& E, const ComplexPoint& P, const PeriodLattice& L,
                         unsigned precision_bits);

struct BettiCoords {
    Real b1, b2;
    Real error;
};

// z = b1 omega1 + b2 omega2 with b reduced to [0, 1).
BettiCoords betti_coordinates(const Complex& z, const PeriodLattice& L);

// log(x_j) / (2 pi i) on the principal branch, real part reduced to [0, 1).
std::vector<Complex> a_coordinates(const std::vector<Complex>& x, unsigned precision_bits);

struct LogPoint {
    Real b1, b2;
    std::vector<Complex> a;
    Real error;
};

class LatticeCache {
  public:
    std::shared_ptr<const PeriodLattice> get(const ComplexCurve& E, unsigned precision_bits);
    std::size_t size() const;

  private:
    mutable std::shared_mutex mu_;
    std::map<std::tuple<std::string, std::string, std::string, unsigned>, std::shared_ptr<const PeriodLattice>> map_;
};

Complex eval_complex(const QPoly& p, const Complex& z);
Complex eval_complex(const RatFunc& f, const Complex& z);

// The fibre of the scheme at lambda0 with the section, y taken as the principal
// square root unless given.
ComplexCurve fibre_at(const EllipticScheme& s, const Complex& lambda0);
ComplexPoint section_at(const EllipticScheme& s, const Complex& lambda0, const std::optional<Complex>& y0 = {});

// Betti coordinates of the section at lambda0 and a-coordinates of eps. Checks
// f(lambda0) = sum eps to within 2^-(precision_bits/2).
LogPoint theta_map(const EllipticScheme& s, const RatFunc& f, const Complex& lambda0,
                   const std::vector<Complex>& eps, LatticeCache& cache, unsigned precision_bits,
                   const std::optional<Complex>& y0 = {});

// The p/q with q <= q_max and |r - p/q| <= tol, found among the continued
// fraction convergents of r. Requires tol < 1/(2 q_max^2) so the answer is unique.
std::optional<Rational> rational_reconstruct(const Real& r, const Integer& q_max, const Real& tol);

// Embeddings of specialized data under zeta -> exp(2 pi i j/N), y -> root.
ComplexCurve embed_curve(const TowerCurve& E, std::uint64_t j, const Complex& root, unsigned precision_bits);
ComplexPoint embed_point(const TowerPoint& P, std::uint64_t j, const Complex& root, unsigned precision_bits);

}  // namespace tors
