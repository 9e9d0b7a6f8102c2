#include "tors/extension.hpp"
#include "tors/errors.hpp"

namespace tors {

FieldTower::FieldTower(FieldPtr base, KPoly g, int input_degree)
    : base_(std::move(base)), g_(std::move(g)), input_degree_(input_degree) {}

TowerPtr make_tower(const FieldPtr& base, const KPoly& g) {
    if (g.is_zero_poly()) throw std::invalid_argument("zero polynomial");
    if (g.degree() == 0) throw std::invalid_argument("constant polynomial defines no extension");
    for (const auto& c : g.coeffs())
        if (c.N() != base->N()) throw std::invalid_argument("coefficients outside the base field");
    const auto& lc = g.lead();
    if (!lc.is_rational() || lc.rational_value() != 1) throw std::invalid_argument("polynomial is not monic");
    return std::make_shared<const FieldTower>(base, squarefree_part(g), g.degree());
}

TowerPtr trivial_tower(const FieldPtr& base) {
    CyclotomicNumber z(base);
    return make_tower(base, KPoly::linear_root(z));
}

TowerElement::TowerElement(TowerPtr t) : t_(std::move(t)), rep_(CyclotomicNumber(t_->base())) {}

TowerElement::TowerElement(TowerPtr t, const KPoly& rep) : t_(std::move(t)) {
    rep_ = rep.degree() >= t_->g().degree() ? rep % t_->g() : rep;
}

TowerElement TowerElement::from_base(TowerPtr t, const CyclotomicNumber& a) {
    return TowerElement(t, KPoly::constant(a));
}

TowerElement TowerElement::from_rational(TowerPtr t, const Rational& a) {
    auto base = t->base();
    return from_base(std::move(t), CyclotomicNumber::rational(base, a));
}

TowerElement TowerElement::generator(TowerPtr t) {
    auto base = t->base();
    return TowerElement(t, KPoly::monomial(CyclotomicNumber::rational(base, 1), 1));
}

std::optional<CyclotomicNumber> TowerElement::base_value() const {
    if (rep_.degree() > 0) return std::nullopt;
    return rep_[0];
}

TowerElement TowerElement::inverse() const {
    if (rep_.is_zero_poly()) throw std::domain_error("inverse of zero");
    auto x = xgcd(rep_, t_->g());
    if (x.g.degree() > 0) throw ZeroDivisorError(x.g);
    return TowerElement(t_, x.s);
}

namespace {
void same_tower(const TowerElement& a, const TowerElement& b) {
    if (!a.tower() || !b.tower()) throw std::invalid_argument("uninitialised tower element");
    if (a.tower() != b.tower() && !(a.tower()->g() == b.tower()->g()))
        throw std::invalid_argument("tower elements from different towers");
}
}  // namespace

TowerElement operator+(const TowerElement& a, const TowerElement& b) {
    same_tower(a, b);
    TowerElement r(a.t_);
    r.rep_ = a.rep_ + b.rep_;
    return r;
}

TowerElement operator-(const TowerElement& a, const TowerElement& b) {
    same_tower(a, b);
    TowerElement r(a.t_);
    r.rep_ = a.rep_ - b.rep_;
    return r;
}

TowerElement operator-(const TowerElement& a) {
    TowerElement r(a.t_);
    r.rep_ = -a.rep_;
    return r;
}

TowerElement operator*(const TowerElement& a, const TowerElement& b) {
    same_tower(a, b);
    return TowerElement(a.t_, a.rep_ * b.rep_);
}

bool operator==(const TowerElement& a, const TowerElement& b) {
    same_tower(a, b);
    return a.rep_ == b.rep_;
}

std::vector<Rational> rational_coordinates(const TowerElement& z) {
    std::size_t phi = z.tower()->base()->degree(), d = z.tower()->relative_degree();
    std::vector<Rational> v(phi * d, Rational(0));
    for (std::size_t l = 0; l < d; ++l) {
        const auto& c = z.rep()[l].coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) v[l * phi + i] = c[i];
    }
    return v;
}

QPoly minimal_polynomial_over_Q(const TowerElement& z) {
    std::size_t D = z.tower()->absolute_degree();
    std::vector<std::vector<Rational>> rows, exprs;
    std::vector<std::size_t> piv;
    TowerElement pw = one_like(z);
    for (std::size_t k = 0; k <= D; ++k) {
        auto v = rational_coordinates(pw);
        std::vector<Rational> e(D + 1, Rational(0));
        e[k] = 1;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (sgn(v[piv[r]]) == 0) continue;
            Rational f = v[piv[r]];
            for (std::size_t i = 0; i < v.size(); ++i)
                if (sgn(rows[r][i]) != 0) v[i] -= f * rows[r][i];
            for (std::size_t i = 0; i <= k; ++i)
                if (sgn(exprs[r][i]) != 0) e[i] -= f * exprs[r][i];
        }
        std::size_t p = 0;
        while (p < v.size() && sgn(v[p]) == 0) ++p;
        if (p == v.size()) {
            e.resize(k + 1);
            return QPoly(e, Rational(0));
        }
        Rational inv = Rational(1) / v[p];
        for (auto& x : v) x *= inv;
        for (auto& x : e) x *= inv;
        rows.push_back(std::move(v));
        exprs.push_back(std::move(e));
        piv.push_back(p);
        pw = pw * z;
    }
    throw std::logic_error("no linear dependency among powers");
}

std::size_t absolute_degree(const TowerElement& z) {
    return static_cast<std::size_t>(minimal_polynomial_over_Q(z).degree());
}

KPoly conjugate_poly(const KPoly& p, std::uint64_t j) {
    return p.map([j](const CyclotomicNumber& c) { return c.conjugate(j); });
}

std::vector<CertifiedRoot> complex_roots(const FieldTower& t, std::uint64_t j, unsigned precision_bits) {
    const KPoly& g = t.g();
    return certified_roots(
        [&](unsigned wp) {
            std::vector<Complex> c;
            for (const auto& a : g.coeffs()) c.push_back(complex_embedding(a, j, wp).value);
            return c;
        },
        precision_bits);
}

Complex embed(const TowerElement& z, std::uint64_t j, const Complex& root, unsigned precision_bits) {
    PrecisionScope scope(precision_bits + kGuardBits);
    Complex r;
    const auto& c = z.rep().coeffs();
    for (std::size_t l = c.size(); l-- > 0;) r = r * root + complex_embedding(c[l], j, precision_bits).value;
    return r;
}

namespace {

QPoly to_qpoly(const KPoly& p) {
    std::vector<Rational> c;
    for (const auto& a : p.coeffs()) {
        if (!a.is_rational()) throw std::logic_error("norm polynomial has irrational coefficients");
        c.push_back(a.rational_value());
    }
    return QPoly(c, Rational(0));
}

KPoly to_kpoly(const QPoly& p, const FieldPtr& f) {
    std::vector<CyclotomicNumber> c;
    for (const auto& a : p.coeffs()) c.push_back(CyclotomicNumber::rational(f, a));
    return KPoly(c, CyclotomicNumber(f));
}

}  // namespace

std::optional<std::uint64_t> irreducibility_prime(const FieldTower& t, std::size_t tries) {
    if (t.g().degree() == 1) return std::uint64_t{0};
    std::uint64_t N = std::max<std::uint64_t>(t.N(), 2);
    std::size_t seen = 0;
    for (std::uint64_t q = N + 1; seen < tries; q += N) {
        if (!is_prime_u64(q) || q < 3) continue;
        ++seen;
        try {
            auto red = reduce_mod_prime(t, q);
            if (red.extension_degree() == t.relative_degree()) return q;
        } catch (const BadPrime&) {
        }
    }
    return std::nullopt;
}

KPoly factor_containing_root(const FieldTower& t, const Complex& root) {
    const KPoly& g = t.g();
    const FieldPtr& K = t.base();
    if (g.degree() == 1 || irreducibility_prime(t, 12)) return g;
    if (K->degree() == 1) return to_kpoly(rational_factor_containing(to_qpoly(g), root), K).monic();
    // Norm of g(y - s zeta) down to Q; squarefree for all but finitely many s.
    static const long shifts[] = {0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7};
    const auto& units = K->units();
    for (long s : shifts) {
        CyclotomicNumber shift = CyclotomicNumber::rational(K, s) * CyclotomicNumber::zeta(K, 1);
        KPoly G = taylor_shift(g, -shift);
        KPoly R = KPoly::constant(CyclotomicNumber::rational(K, 1));
        for (auto j : units) R *= conjugate_poly(G, j);
        QPoly Rq = to_qpoly(R);
        if (!is_squarefree(Rq)) continue;
        // Roots of R in block b are those of sigma_j(g), j = units[b], moved by s zeta^j.
        std::vector<std::vector<Complex>> approx;
        for (auto j : units) {
            std::vector<Complex> v;
            for (const auto& r : certified_roots(
                     [&](unsigned wp) {
                         std::vector<Complex> c;
                         for (const auto& a : G.coeffs()) c.push_back(complex_embedding(a.conjugate(j), 1, wp).value);
                         return c;
                     },
                     128))
                v.push_back(r.value);
            approx.push_back(std::move(v));
        }
        auto block_of = [&](const Complex& z) {
            std::size_t best = 0;
            Real bd(-1);
            for (std::size_t b = 0; b < approx.size(); ++b)
                for (const auto& a : approx[b]) {
                    Real d = abs(z - a);
                    if (bd < 0 || d < bd) {
                        bd = d;
                        best = b;
                    }
                }
            return best;
        };
        Complex theta;
        {
            PrecisionScope scope(256);
            theta = root + complex_embedding(shift, 1, 128).value;
        }
        QPoly F = rational_factor_in_blocks(Rq, theta, units.size(), block_of);
        KPoly h = gcd(g, taylor_shift(to_kpoly(F, K), shift));
        if (h.degree() <= 0) throw std::logic_error("factor through the root not found");
        return h.monic();
    }
    throw std::logic_error("no squarefree norm among the tried shifts");
}

std::uint64_t FiniteReduction::map(const CyclotomicNumber& a) const {
    std::uint64_t r = 0, zp = 1;
    for (const auto& c : a.coeffs()) {
        if (sgn(c) != 0) r = (r + mulmod(reduce_rational(c, q), zp, q)) % q;
        zp = mulmod(zp, zeta_image, q);
    }
    return r;
}

GF FiniteReduction::map(const TowerElement& z) const {
    GF r = zero_like(root);
    const auto& c = z.rep().coeffs();
    for (std::size_t l = c.size(); l-- > 0;) r = r * root + gf_from(field, map(c[l]));
    return r;
}

FiniteReduction reduce_mod_prime(const FieldTower& t, std::uint64_t q) {
    std::uint64_t N = t.N();
    if (q < 3 || !is_prime_u64(q) || q > (std::uint64_t{1} << 62)) throw BadPrime("q must be an odd prime");
    if ((q - 1) % N != 0) throw BadPrime("q is not 1 mod N");
    FiniteReduction red;
    red.q = q;
    red.zeta_image = 1;
    if (N > 1) {
        auto ps = prime_factors(N);
        for (std::uint64_t a = 2; a < q; ++a) {
            std::uint64_t b = powmod(a, (q - 1) / N, q);
            bool exact = true;
            for (auto p : ps)
                if (powmod(b, N / p, q) == 1) exact = false;
            if (exact) {
                red.zeta_image = b;
                break;
            }
        }
    }
    std::vector<Fp> gc;
    for (const auto& c : t.g().coeffs()) gc.push_back({red.map(c), q});
    red.g_image = FpPoly(gc, Fp{0, q});
    if (red.g_image.degree() != t.g().degree()) throw BadPrime("leading coefficient vanishes mod q");
    if (gcd(red.g_image, red.g_image.derivative()).degree() != 0) throw BadPrime("g is not squarefree mod q");
    std::mt19937_64 rng(q);
    auto [e, h] = smallest_degree_factor(red.g_image, rng);
    (void)e;
    red.field = std::make_shared<const GFContext>(GFContext{q, h});
    red.root = GF{red.field, fp_poly({0, 1}, q) % h};
    return red;
}

std::vector<FiniteReduction> good_reductions(const FieldTower& t, std::size_t count, std::uint64_t start) {
    std::vector<FiniteReduction> out;
    std::uint64_t N = std::max<std::uint64_t>(t.N(), 2);
    std::uint64_t q = (start / N) * N + 1;
    while (q < start || q < 3) q += N;
    for (; out.size() < count; q += N) {
        if (!is_prime_u64(q)) continue;
        try {
            out.push_back(reduce_mod_prime(t, q));
        } catch (const BadPrime&) {
        }
    }
    return out;
}

}  // namespace tors
