#pragma once

#include "tors/arith.hpp"
#include "tors/bigfloat.hpp"
#include "tors/poly.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace tors {

// Q(zeta_N) as Q[x]/(Phi_N). Instances are shared and cached per N.
class CyclotomicField {
  public:
    static std::shared_ptr<const CyclotomicField> get(std::uint64_t N);

    std::uint64_t N() const { return N_; }
    std::size_t degree() const { return degree_; }
    // Monic Phi_N, low to high.
    const std::vector<Integer>& modulus() const { return phi_; }
    // x^(k mod N) reduced modulo Phi_N; length degree().
    const std::vector<Integer>& zeta_power(std::int64_t k) const;
    // Residues j in [1, N) coprime to N (j = 1 for N = 1).
    const std::vector<std::uint64_t>& units() const { return units_; }

    explicit CyclotomicField(std::uint64_t N);

  private:
    std::uint64_t N_;
    std::size_t degree_;
    std::vector<Integer> phi_;
    std::vector<std::vector<Integer>> powers_;
    std::vector<std::uint64_t> units_;
};

using FieldPtr = std::shared_ptr<const CyclotomicField>;

std::vector<Integer> cyclotomic_polynomial(std::uint64_t N);

class CyclotomicNumber {
  public:
    CyclotomicNumber() = default;
    explicit CyclotomicNumber(FieldPtr f);
    CyclotomicNumber(FieldPtr f, std::vector<Rational> coeffs);

    static CyclotomicNumber rational(FieldPtr f, const Rational& q);
    static CyclotomicNumber zeta(FieldPtr f, std::int64_t k = 1);

    const FieldPtr& field() const { return f_; }
    std::uint64_t N() const { return f_->N(); }
    const std::vector<Rational>& coeffs() const { return c_; }

    bool is_zero() const;
    bool is_rational() const;
    Rational rational_value() const;

    // sigma_j : zeta -> zeta^j, j coprime to N.
    CyclotomicNumber conjugate(std::uint64_t j) const;
    // The same number in Q(zeta_M), N | M.
    CyclotomicNumber lift(const FieldPtr& g) const;
    CyclotomicNumber inverse() const;

    friend CyclotomicNumber operator+(const CyclotomicNumber& a, const CyclotomicNumber& b);
    friend CyclotomicNumber operator-(const CyclotomicNumber& a, const CyclotomicNumber& b);
    friend CyclotomicNumber operator-(const CyclotomicNumber& a);
    friend CyclotomicNumber operator*(const CyclotomicNumber& a, const CyclotomicNumber& b);
    friend bool operator==(const CyclotomicNumber& a, const CyclotomicNumber& b);
    friend bool operator<(const CyclotomicNumber& a, const CyclotomicNumber& b);

  private:
    FieldPtr f_;
    std::vector<Rational> c_;
};

inline bool is_zero(const CyclotomicNumber& x) { return x.is_zero(); }
inline CyclotomicNumber zero_like(const CyclotomicNumber& x) { return CyclotomicNumber(x.field()); }
inline CyclotomicNumber one_like(const CyclotomicNumber& x) { return CyclotomicNumber::rational(x.field(), 1); }
inline CyclotomicNumber inverse(const CyclotomicNumber& x) { return x.inverse(); }

// Lifts both operands into Q(zeta_lcm).
std::pair<CyclotomicNumber, CyclotomicNumber> common_field(const CyclotomicNumber& a, const CyclotomicNumber& b);

using KPoly = Poly<CyclotomicNumber>;

// A tuple of roots of unity exp(2 pi i k_j / N).
struct RootOfUnityTuple {
    std::uint64_t N = 1;
    std::vector<std::uint64_t> exponents;

    std::size_t n() const { return exponents.size(); }
    friend bool operator==(const RootOfUnityTuple&, const RootOfUnityTuple&) = default;
};

// Validates and reduces exponents mod N; rejects n = 0 and N = 0.
RootOfUnityTuple make_tuple(std::size_t n, std::uint64_t N, std::vector<std::int64_t> exponents);
// Divides N and all exponents by their common gcd, so N becomes the tuple order.
RootOfUnityTuple normalize(const RootOfUnityTuple& t);
std::uint64_t tuple_order(const RootOfUnityTuple& t);
CyclotomicNumber sum_of_roots(const RootOfUnityTuple& t);

constexpr std::size_t kSubsetBudget = 20;
bool has_vanishing_subsum(const RootOfUnityTuple& t, std::size_t max_n = kSubsetBudget);

struct Embedding {
    Complex value;
    // Absolute error bound on value.
    Real error;
};
// Image of z under zeta_N -> exp(2 pi i j / N), accurate to better than 2^-(p - 8)
// for coefficients of moderate size; the attained bound is returned.
Embedding complex_embedding(const CyclotomicNumber& z, std::uint64_t j, unsigned precision_bits);

std::size_t degree_over_Q(const CyclotomicNumber& z);

// Order of [[0,1],[-1,lambda]] in SL2, or nullopt if infinite.
std::optional<std::uint64_t> sl2_torsion_order(const CyclotomicNumber& lambda);

}  // namespace tors
