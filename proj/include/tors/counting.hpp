#pragma once

#include "tors/search.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tors {

// Logarithmic Weil height: log max(|p|, |q|) for p/q, log M(p) / deg p for an
// algebraic number with primitive minimal polynomial p.
Real log_height(const Rational& q);
Real log_height_of_minpoly(const QPoly& p, unsigned precision_bits = 128);

struct DeltaDerivation {
    Real a;
    std::size_t l = 1;  // #B + 1 defining inequalities
    unsigned K_degree = 1;
    Real max_bad_height;
    Real exponent;  // 2 l K_degree (a + max h + log 2)
    Real delta;     // exp(-exponent)
};

// Throws std::domain_error for a <= 0 and std::invalid_argument for K_degree = 0.
DeltaDerivation delta_derivation(const Real& a, const std::vector<Real>& bad_heights, unsigned K_degree);
Real compute_delta(const Real& a, const std::vector<Real>& bad_heights, unsigned K_degree);

// K^1_delta x K^2: |lambda| <= 1/delta, |lambda - beta| >= delta for beta in B,
// and annulus_lo <= |x_i| <= annulus_hi.
struct CompactSetSpec {
    Real delta;
    std::vector<Complex> bad;
    Real norm_bound;
    Real annulus_lo{0.5}, annulus_hi{1.5};

    static CompactSetSpec make(const Real& delta, std::vector<Complex> bad);
    void validate() const;
};

// B from the bad-reduction set of the scheme, K = Q.
CompactSetSpec default_compact_set(const EllipticScheme& s, const Real& a = Real(1), unsigned precision_bits = 128);

// `error` bounds the absolute error of lambda and of each eps_i. Throws
// PrecisionError ("needs more precision") when a comparison falls inside the
// error band. The fibre condition f(lambda) = sum eps is checked to fibre_tol.
bool membership_in_S(const CompactSetSpec& spec, const RatFunc& f, const Complex& lambda, const std::vector<Complex>& eps,
                     const Real& error, const Real& fibre_tol = Real("1e-20"));

// Fraction of the conjugates of (P, eps) over Q lying in S. The tuple's N must
// divide the base N of P's tower.
Rational conjugate_fraction_in_S(const CompactSetSpec& spec, const RatFunc& f, const TowerElement& P,
                                 const RootOfUnityTuple& eps, unsigned precision_bits = 128);

constexpr unsigned kCountCap = 64;

struct CountConfig {
    EllipticScheme scheme = EllipticScheme::legendre();
    RatFunc f = RatFunc::lambda();
    std::size_t n = 2;
    unsigned T_max = 32;
    unsigned precision_bits = 128;
    std::optional<CompactSetSpec> spec;  // default_compact_set(scheme) when absent
    unsigned cap = kCountCap;
};

struct CountedPoint {
    std::vector<Rational> a;  // sorted; the orderings are counted separately
    std::size_t orderings = 1;
    Rational b1, b2;
    unsigned height = 1;
    unsigned curve_order = 0;
    bool vanishing_subsum = false;
    QPoly lambda_minpoly;
    std::string lambda;  // decimal
};

struct CountReport {
    std::vector<unsigned> T;
    std::vector<std::uint64_t> N_nosubsum, N_subsum;
    // Least-squares slope of log N against log T over the T with N > 0, for
    // the no-vanishing-subsum stratum; 0 when fewer than two such T.
    double slope = 0;
    double intercept = 0;
    bool slope_warning = false;  // slope >= kSlopeThreshold
    std::vector<CountedPoint> points;
    std::size_t multisets = 0, outside_S = 0, numeric_candidates = 0, recert_failed = 0;
};

constexpr double kSlopeThreshold = 0.7;

// Ordered tuples (b1, b2, a_1, ..., a_n) of rationals in [0, 1) with height at
// most T whose eps = exp(2 pi i a) and the section's log lie over a point of S.
// Every counted point is recertified exactly and its membership rechecked at
// twice the precision.
CountReport count_rational_points(const CountConfig& cfg);

std::string count_csv(const CountReport& r);
nlohmann::json to_json(const CountReport& r);

// 2 phi(x)^2 >= x, i.e. phi(x) >= sqrt(x / 2), exactly.
bool phi_bound_holds(std::uint64_t x);

struct DegreeRow {
    std::uint64_t T = 1;
    std::size_t degree = 0;
    double ratio = 0;  // degree / T^(1/6)
    unsigned h = 1;    // curve order
    std::uint64_t gm_order = 1;  // order of eps^h, which is T / h
    std::uint64_t gm_degree = 1;  // [Q(eps^h) : Q] = phi(gm_order)
    double gm_bound = 0;          // sqrt(gm_order / 2)
    bool gm_ok = true;
};

struct DegreeReport {
    std::vector<DegreeRow> rows;
    // Calibrated elliptic-side constant: the minimum observed ratio.
    double c4 = 0;
    double c3 = 0;  // 1/sqrt 2
    bool gm_all_ok = true;
};

DegreeRow degree_row(std::uint64_t curve_order, std::uint64_t tuple_order, std::size_t degree);
DegreeReport degree_bound_report(const std::vector<TorsionCertificate>& certs);
nlohmann::json to_json(const DegreeReport& r);

}  // namespace tors
