#include "tors/scheme.hpp"

#include <algorithm>

namespace tors {

RatFunc EllipticScheme::section_y_square() const {
    const RatFunc& x = section_x;
    return ((x + a) * x + b) * x + c;
}

RatFunc EllipticScheme::discriminant() const {
    WeierstrassCurve<RatFunc> E{a, b, c};
    return E.discriminant();
}

void EllipticScheme::validate() const {
    if (discriminant().is_zero()) throw std::invalid_argument("discriminant vanishes identically");
}

EllipticScheme EllipticScheme::legendre(const RatFunc& section_x) {
    EllipticScheme s{-(RatFunc::constant(1) + RatFunc::lambda()), RatFunc::lambda(), RatFunc::constant(0), section_x};
    return s;
}

EllipticScheme EllipticScheme::from_strings(const std::string& a, const std::string& b, const std::string& c,
                                            const std::string& section_x) {
    EllipticScheme s{parse_ratfunc(a), parse_ratfunc(b), parse_ratfunc(c), parse_ratfunc(section_x)};
    s.validate();
    return s;
}

namespace {

std::vector<AlgebraicNumber> algebraic_zeros(const QPoly& p, unsigned precision_bits) {
    std::vector<AlgebraicNumber> out;
    if (p.degree() <= 0) return out;
    for (const auto& [f, mult] : factor_over_Q(p)) {
        (void)mult;
        for (auto& r : certified_roots(f, precision_bits)) out.push_back({f, std::move(r)});
    }
    std::sort(out.begin(), out.end(), [](const AlgebraicNumber& x, const AlgebraicNumber& y) {
        const Complex &u = x.root.value, &v = y.root.value;
        return u.re != v.re ? u.re < v.re : u.im < v.im;
    });
    return out;
}

QPoly lcm_den(const EllipticScheme& s) {
    QPoly l = QPoly::constant(Rational(1));
    for (const RatFunc* f : {&s.a, &s.b, &s.c}) l = l * (f->den() / gcd(l, f->den()));
    return l;
}

}  // namespace

BadSet bad_reduction_set(const EllipticScheme& s, unsigned precision_bits) {
    BadSet out;
    QPoly poles = lcm_den(s);
    QPoly all = s.discriminant().num() * poles;
    out.points = algebraic_zeros(all, precision_bits);
    out.pole_at_infinity = !(s.a.is_constant() && s.b.is_constant() && s.c.is_constant());
    return out;
}

std::vector<AlgebraicNumber> section_poles(const EllipticScheme& s, unsigned precision_bits) {
    return algebraic_zeros(s.section_x.den(), precision_bits);
}

namespace {

TowerElement lift_rational(const TowerPtr& t, const Rational& q) { return TowerElement::from_rational(t, q); }

TowerElement eval_tower(const RatFunc& f, const TowerElement& x, const char* what) {
    const TowerPtr& t = x.tower();
    TowerElement d = f.den().eval_in(x, [&](const Rational& q) { return lift_rational(t, q); });
    if (d.is_zero()) throw BadReduction(std::string("bad reduction: ") + what);
    return f.num().eval_in(x, [&](const Rational& q) { return lift_rational(t, q); }) * d.inverse();
}

// A rational square root of v when v is the square of a rational.
std::optional<Rational> rational_sqrt(const TowerElement& v) {
    auto b = v.base_value();
    if (!b || !b->is_rational()) return std::nullopt;
    Rational q = b->rational_value();
    if (sgn(q) < 0) return std::nullopt;
    Integer n = q.get_num(), d = q.get_den();
    Integer rn = sqrt(n), rd = sqrt(d);
    if (rn * rn != n || rd * rd != d) return std::nullopt;
    return Rational(rn, rd);
}

}  // namespace

Specialization specialize(const EllipticScheme& s, const TowerElement& lambda0) {
    Specialization sp;
    sp.lambda = lambda0;
    TowerElement a = eval_tower(s.a, lambda0, "pole of a coefficient");
    TowerElement b = eval_tower(s.b, lambda0, "pole of a coefficient");
    TowerElement c = eval_tower(s.c, lambda0, "pole of a coefficient");
    sp.curve = TowerCurve{a, b, c};
    if (!sp.curve.nonsingular()) throw BadReduction("bad reduction: singular fibre");
    TowerElement x0 = eval_tower(s.section_x, lambda0, "pole of the section");
    TowerElement v = sp.curve.cubic(x0);
    if (v.is_zero()) {
        sp.point = TowerPoint::affine(x0, zero_like(x0));
    } else if (auto r = rational_sqrt(v)) {
        sp.point = TowerPoint::affine(x0, TowerElement::from_rational(x0.tower(), *r));
    } else {
        sp.point = TowerPoint::adjoined(x0, one_like(x0), v);
        sp.adjoined = true;
    }
    return sp;
}

namespace {

struct ReducedSection {
    WeierstrassCurve<GF> curve;
    GF x;
    bool y_zero;
};

ReducedSection reduce_section(const Specialization& sp, const FiniteReduction& red) {
    if (sp.point.infinity) throw std::invalid_argument("section at infinity");
    ReducedSection r{{red.map(sp.curve.a), red.map(sp.curve.b), red.map(sp.curve.c)}, red.map(sp.point.x), false};
    if (!r.curve.nonsingular()) throw BadPrime("curve has bad reduction at q");
    r.y_zero = is_zero(r.curve.cubic(r.x));
    return r;
}

}  // namespace

std::optional<unsigned> reduced_order(const Specialization& sp, const FiniteReduction& red, unsigned bound) {
    if (sp.point.infinity) return 1u;
    ReducedSection r = reduce_section(sp, red);
    if (r.y_zero) return bound >= 2 ? std::optional<unsigned>(2u) : std::nullopt;
    auto fv = division_values(r.curve, r.x, bound);
    for (unsigned m = 3; m <= bound; ++m)
        if (is_zero(fv[m])) return m;
    return std::nullopt;
}

Prescreen torsion_prescreen(const Specialization& sp, unsigned m, const std::vector<std::uint64_t>& primes) {
    if (m == 0) throw std::invalid_argument("m must be positive");
    if (sp.point.infinity) return Prescreen::pass;
    if (m == 1) return Prescreen::fail;
    for (auto q : primes) {
        try {
            auto red = reduce_mod_prime(*sp.lambda.tower(), q);
            ReducedSection r = reduce_section(sp, red);
            auto fv = division_values(r.curve, r.x, m);
            if (!killed_by(fv, r.y_zero, m)) return Prescreen::fail;
        } catch (const BadPrime&) {
        }
    }
    return Prescreen::pass;
}

}  // namespace tors
