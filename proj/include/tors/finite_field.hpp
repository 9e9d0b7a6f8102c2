#pragma once

#include "tors/poly.hpp"

#include <cstdint>
#include <memory>
#include <random>

namespace tors {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t q);
std::uint64_t invmod(std::uint64_t a, std::uint64_t q);
// Image of a rational in F_q; throws BadPrime if q divides the denominator.
std::uint64_t reduce_rational(const Rational& x, std::uint64_t q);

// Element of F_q, q an odd prime below 2^62.
struct Fp {
    std::uint64_t v = 0;
    std::uint64_t q = 0;

    friend Fp operator+(Fp a, Fp b) {
        std::uint64_t s = a.v + b.v;
        return {s >= a.q ? s - a.q : s, a.q};
    }
    friend Fp operator-(Fp a, Fp b) { return {a.v >= b.v ? a.v - b.v : a.v + a.q - b.v, a.q}; }
    friend Fp operator-(Fp a) { return {a.v ? a.q - a.v : 0, a.q}; }
    friend Fp operator*(Fp a, Fp b) { return {mulmod(a.v, b.v, a.q), a.q}; }
    friend bool operator==(Fp a, Fp b) { return a.v == b.v; }
};

inline bool is_zero(Fp a) { return a.v == 0; }
inline Fp zero_like(Fp a) { return {0, a.q}; }
inline Fp one_like(Fp a) { return {1, a.q}; }
Fp inverse(Fp a);

using FpPoly = Poly<Fp>;

FpPoly fp_poly(const std::vector<std::uint64_t>& c, std::uint64_t q);
FpPoly powmod(const FpPoly& base, const Integer& e, const FpPoly& mod);
bool is_irreducible(const FpPoly& f);
// Smallest e such that f has a root in F_{q^e}, with an irreducible factor of f of degree e.
std::pair<unsigned, FpPoly> smallest_degree_factor(const FpPoly& f, std::mt19937_64& rng);

// F_q[t]/(h) for monic irreducible h.
struct GFContext {
    std::uint64_t q;
    FpPoly modulus;
    unsigned degree() const { return static_cast<unsigned>(modulus.degree()); }
};

struct GF {
    std::shared_ptr<const GFContext> ctx;
    FpPoly rep;

    friend GF operator+(const GF& a, const GF& b) { return {a.ctx, a.rep + b.rep}; }
    friend GF operator-(const GF& a, const GF& b) { return {a.ctx, a.rep - b.rep}; }
    friend GF operator-(const GF& a) { return {a.ctx, -a.rep}; }
    friend GF operator*(const GF& a, const GF& b) { return {a.ctx, (a.rep * b.rep) % a.ctx->modulus}; }
    friend bool operator==(const GF& a, const GF& b) { return a.rep == b.rep; }
};

inline bool is_zero(const GF& a) { return a.rep.is_zero_poly(); }
GF zero_like(const GF& a);
GF one_like(const GF& a);
GF inverse(const GF& a);
GF gf_from(const std::shared_ptr<const GFContext>& ctx, std::uint64_t v);

}  // namespace tors
