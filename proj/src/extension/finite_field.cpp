#include "tors/finite_field.hpp"
#include "tors/errors.hpp"

namespace tors {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t q) {
    std::uint64_t r = 1 % q;
    a %= q;
    while (e) {
        if (e & 1u) r = mulmod(r, a, q);
        a = mulmod(a, a, q);
        e >>= 1u;
    }
    return r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t q) {
    if (a % q == 0) throw std::domain_error("inverse of zero mod q");
    return powmod(a, q - 2, q);
}

std::uint64_t reduce_rational(const Rational& x, std::uint64_t q) {
    Integer Q(static_cast<unsigned long>(q));
    Integer d = x.get_den() % Q;
    if (d == 0) throw BadPrime("prime divides a denominator");
    Integer n = x.get_num() % Q;
    if (n < 0) n += Q;
    return mulmod(n.get_ui(), invmod(d.get_ui(), q), q);
}

Fp inverse(Fp a) { return {invmod(a.v, a.q), a.q}; }

FpPoly fp_poly(const std::vector<std::uint64_t>& c, std::uint64_t q) {
    std::vector<Fp> v;
    for (auto x : c) v.push_back({x % q, q});
    return FpPoly(std::move(v), Fp{0, q});
}

FpPoly powmod(const FpPoly& base, const Integer& e, const FpPoly& mod) {
    FpPoly r = FpPoly::constant(one_like(mod.zero())), b = base % mod;
    std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
        r = (r * r) % mod;
        if (mpz_tstbit(e.get_mpz_t(), i)) r = (r * b) % mod;
    }
    return r;
}

namespace {

FpPoly x_poly(std::uint64_t q) { return fp_poly({0, 1}, q); }

Integer qpow(std::uint64_t q, unsigned e) {
    Integer r = 1;
    for (unsigned i = 0; i < e; ++i) r *= static_cast<unsigned long>(q);
    return r;
}

}  // namespace

bool is_irreducible(const FpPoly& f) {
    int n = f.degree();
    if (n <= 0) return false;
    if (n == 1) return true;
    std::uint64_t q = f.zero().q;
    FpPoly fm = f.monic(), x = x_poly(q);
    // Rabin: x^(q^n) = x mod f and gcd(x^(q^(n/p)) - x, f) = 1 for primes p | n.
    if (!(powmod(x, qpow(q, static_cast<unsigned>(n)), fm) == x % fm)) return false;
    for (auto p : prime_factors(static_cast<std::uint64_t>(n))) {
        FpPoly h = powmod(x, qpow(q, static_cast<unsigned>(n / static_cast<int>(p))), fm) - x;
        if (gcd(fm, h).degree() != 0) return false;
    }
    return true;
}

std::pair<unsigned, FpPoly> smallest_degree_factor(const FpPoly& f, std::mt19937_64& rng) {
    if (f.degree() <= 0) throw std::domain_error("no roots");
    std::uint64_t q = f.zero().q;
    FpPoly fm = f.monic(), x = x_poly(q), xp = x % fm;
    for (unsigned e = 1; e <= static_cast<unsigned>(fm.degree()); ++e) {
        xp = powmod(xp, Integer(static_cast<unsigned long>(q)), fm);
        FpPoly g = gcd(fm, xp - x);
        if (g.degree() <= 0) continue;
        // g is a product of distinct irreducibles of degree e; split (Cantor-Zassenhaus).
        Integer ex = (qpow(q, e) - 1) / 2;
        while (g.degree() > static_cast<int>(e)) {
            std::vector<std::uint64_t> r;
            for (int i = 0; i < g.degree(); ++i) r.push_back(rng() % q);
            FpPoly a = fp_poly(r, q);
            if (a.degree() <= 0) continue;
            FpPoly d = gcd(g, a);
            if (d.degree() <= 0) {
                FpPoly b = powmod(a, ex, g) - FpPoly::constant(Fp{1, q});
                d = gcd(g, b);
            }
            if (d.degree() > 0 && d.degree() < g.degree()) g = (2 * d.degree() <= g.degree()) ? d : (g / d).monic();
        }
        return {e, g.monic()};
    }
    throw std::logic_error("distinct-degree factorisation found no factor");
}

GF zero_like(const GF& a) { return {a.ctx, FpPoly(Fp{0, a.ctx->q})}; }
GF one_like(const GF& a) { return gf_from(a.ctx, 1); }

GF gf_from(const std::shared_ptr<const GFContext>& ctx, std::uint64_t v) {
    return {ctx, FpPoly::constant(Fp{v % ctx->q, ctx->q})};
}

GF inverse(const GF& a) {
    if (a.rep.is_zero_poly()) throw std::domain_error("inverse of zero in F_q^e");
    auto x = xgcd(a.rep, a.ctx->modulus);
    if (x.g.degree() != 0) throw std::domain_error("non-invertible element in F_q^e");
    return {a.ctx, x.s % a.ctx->modulus};
}

}  // namespace tors
