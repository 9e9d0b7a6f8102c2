#include "tors/analytic.hpp"

#include "tors/errors.hpp"
#include "tors/roots.hpp"

#include <algorithm>
#include <array>
#include <mutex>

namespace tors {

namespace bmp = boost::multiprecision;

Complex ComplexCurve::discriminant() const {
    return a * a * b * b - Complex(4) * b * b * b - Complex(4) * a * a * a * c - Complex(27) * c * c +
           Complex(18) * a * b * c;
}

namespace {

Complex i_times(const Complex& z) { return {-z.im, z.re}; }

Integer floor_z(const Real& x) {
    Integer out;
    mpfr_get_z(out.get_mpz_t(), x.backend().data(), MPFR_RNDD);
    return out;
}

Integer round_z(const Real& x) {
    Integer out;
    mpfr_get_z(out.get_mpz_t(), x.backend().data(), MPFR_RNDN);
    return out;
}

Real real_from_z(const Integer& n) {
    Real r;
    mpfr_set_z(r.backend().data(), n.get_mpz_t(), MPFR_RNDN);
    return r;
}

unsigned bits_of(const Real& x) { return static_cast<unsigned>(mpfr_get_prec(x.backend().data())); }

// AGM with the optimal branch at every step.
Complex agm(Complex a, Complex b, unsigned wp) {
    Real eps = two_pow(-static_cast<long>(wp));
    for (unsigned it = 0; it < 4 * wp + 64; ++it) {
        if (abs(a - b) <= eps * abs(a)) return a;
        Complex a1 = (a + b) / Real(2);
        Complex b1 = sqrt(a * b);
        if (abs(a1 - b1) > abs(a1 + b1)) b1 = -b1;
        a = std::move(a1);
        b = std::move(b1);
    }
    throw PrecisionError("AGM did not converge");
}

std::pair<Complex, Complex> reduce_basis(Complex w1, Complex w2) {
    Complex tau = w2 / w1;
    if (tau.im < 0) {
        w2 = -w2;
        tau = -tau;
    }
    for (int it = 0; it < 1000; ++it) {
        Integer n = round_z(tau.re);
        if (n != 0) {
            w2 = w2 - real_from_z(n) * w1;
            tau = w2 / w1;
        }
        if (norm(tau) < 1) {
            Complex t = w1;
            w1 = w2;
            w2 = -t;
            tau = w2 / w1;
        } else {
            return {w1, w2};
        }
    }
    throw PrecisionError("lattice reduction did not terminate");
}

Real divisor_power_sum(unsigned n, unsigned k) {
    Integer s = 0;
    for (unsigned d = 1; d <= n; ++d)
        if (n % d == 0) {
            Integer t = 1;
            for (unsigned i = 0; i < k; ++i) t *= d;
            s += t;
        }
    return real_from_z(s);
}

// g2, g3 of the lattice with reduced basis (w1, w2).
std::pair<Complex, Complex> invariants(const Complex& w1, const Complex& w2, unsigned wp) {
    Complex tau = w2 / w1;
    Complex q = exp(Real(2) * pi_real() * i_times(tau));
    Real qa = abs(q);
    Real eps = two_pow(-static_cast<long>(wp) - 8);
    Complex e4(1), e6(1), qn(1);
    Real qna(1);
    for (unsigned n = 1;; ++n) {
        qn = qn * q;
        qna = qna * qa;
        Real weight = qna * Real(n) * Real(n) * Real(n) * Real(n) * Real(n) * Real(n);
        if (weight < eps) break;
        e4 += Real(240) * divisor_power_sum(n, 3) * qn;
        e6 -= Real(504) * divisor_power_sum(n, 5) * qn;
        if (n > 10 * wp) throw PrecisionError("Eisenstein series did not converge");
    }
    Real pi = pi_real();
    Complex w2p = w1 * w1, w4 = w2p * w2p, w6 = w4 * w2p;
    Real c4 = Real(4) * pi * pi * pi * pi / Real(3);
    Real c6 = Real(8) * pi * pi * pi * pi * pi * pi / Real(27);
    return {c4 * e4 / w4, c6 * e6 / w6};
}

bool close(const Complex& x, const Complex& y, const Real& rel) { return abs(x - y) <= rel * (Real(1) + abs(y)); }

// Carlson's R_F by duplication and the fifth order series.
Complex carlson_rf(Complex x, Complex y, Complex z, unsigned wp) {
    Real thresh = two_pow(-static_cast<long>(wp / 6 + 4));
    for (unsigned it = 0;; ++it) {
        Complex A = (x + y + z) / Real(3);
        Real r = std::max({abs(A - x), abs(A - y), abs(A - z)});
        if (r <= thresh * abs(A)) {
            Complex X = Complex(1) - x / A, Y = Complex(1) - y / A;
            Complex Z = -(X + Y);
            Complex E2 = X * Y - Z * Z, E3 = X * Y * Z;
            Complex s = Complex(1) - E2 / Real(10) + E3 / Real(14) + E2 * E2 / Real(24) -
                        Real(3) * E2 * E3 / Real(44);
            return s / sqrt(A);
        }
        if (it > 4 * wp) throw PrecisionError("Carlson R_F did not converge");
        Complex sx = sqrt(x), sy = sqrt(y), sz = sqrt(z);
        Complex l = sx * sy + sy * sz + sz * sx;
        x = (x + l) / Real(4);
        y = (y + l) / Real(4);
        z = (z + l) / Real(4);
    }
}

Real reduce_unit(const Real& b, unsigned bits) {
    Real f = b - real_from_z(floor_z(b));
    if (f < 0 || f >= Real(1) - two_pow(-static_cast<long>(bits))) f = 0;
    return f;
}

}  // namespace

PeriodLattice period_lattice(const ComplexCurve& E, unsigned precision_bits) {
    if (precision_bits < 64) throw std::invalid_argument("period precision must be at least 64 bits");
    check_precision_request(precision_bits);
    unsigned wp = precision_bits + kGuardBits;
    PrecisionScope scope(wp);
    Real size = Real(1) + abs(E.a) + abs(E.b) + abs(E.c);
    if (abs(E.discriminant()) <= two_pow(-static_cast<long>(wp / 2)) * size * size * size * size)
        throw std::domain_error("singular curve");

    PeriodLattice L;
    L.precision_bits = precision_bits;
    L.shift = E.a / Real(3);
    Complex p = E.b - E.a * E.a / Real(3);
    Complex q = E.c - E.a * E.b / Real(3) + Real(2) * E.a * E.a * E.a / Real(27);
    auto roots = certified_roots([&](unsigned) { return std::vector<Complex>{q, p, Complex(0), Complex(1)}; }, wp);
    std::array<Complex, 3> e{roots[2].value, roots[1].value, roots[0].value};
    Complex g2 = Real(-4) * p, g3 = Real(-4) * q;

    Real tol = two_pow(-static_cast<long>(precision_bits / 2));
    std::array<int, 3> perm{0, 1, 2};
    do {
        const Complex &e1 = e[perm[0]], &e2 = e[perm[1]], &e3 = e[perm[2]];
        Complex A = sqrt(e1 - e3), B = sqrt(e1 - e2), C = sqrt(e2 - e3);
        if (abs(A - B) > abs(A + B)) B = -B;
        if (abs(A - C) > abs(A + C)) C = -C;
        Complex MB = agm(A, B, wp), MC = agm(A, C, wp);
        if (abs(MB) == 0 || abs(MC) == 0) continue;
        Complex w1 = Complex(pi_real()) / MB;
        Complex w2 = i_times(Complex(pi_real()) / MC);
        if ((w2 / w1).im < 0) w2 = -w2;
        if ((w2 / w1).im <= two_pow(-static_cast<long>(wp / 2))) continue;
        auto [r1, r2] = reduce_basis(w1, w2);
        auto [G2, G3] = invariants(r1, r2, wp);
        if (!close(G2, g2, tol) || !close(G3, g3, tol)) continue;
        L.omega1 = w1;
        L.omega2 = w2;
        L.reduced1 = r1;
        L.reduced2 = r2;
        L.e1 = e1;
        L.e2 = e2;
        L.e3 = e3;
        L.error = (abs(w1) + abs(w2)) * two_pow(-static_cast<long>(precision_bits) - 8);
        return L;
    } while (std::next_permutation(perm.begin(), perm.end()));
    throw PrecisionError("no AGM basis reproduced the curve invariants");
}

std::pair<Complex, Complex> weierstrass_p(const PeriodLattice& L, const Complex& z, unsigned precision_bits) {
    unsigned wp = precision_bits + kGuardBits;
    PrecisionScope scope(wp);
    const Complex &r1 = L.reduced1, &r2 = L.reduced2;
    Complex tau = r2 / r1;
    Complex u = z / r1;
    u = u - real_from_z(round_z(u.im / tau.im)) * tau;
    u = u - Complex(real_from_z(round_z(u.re)));
    if (abs(u) <= two_pow(-static_cast<long>(wp) + 16)) throw std::domain_error("pole of the Weierstrass function");
    Complex twopii = i_times(Complex(Real(2) * pi_real()));
    Complex w = exp(twopii * u), winv = Complex(1) / w;
    Complex q = exp(twopii * tau);
    Real qa = abs(q);
    auto g = [](const Complex& v) {
        Complex d = Complex(1) - v;
        return v / (d * d);
    };
    auto h = [](const Complex& v) {
        Complex d = Complex(1) - v;
        return v * (Complex(1) + v) / (d * d * d);
    };
    Complex P = Complex(Real(1) / Real(12)) + g(w), D = h(w);
    Real eps = two_pow(-static_cast<long>(wp) - 8);
    Complex qn(1);
    Real qna(1);
    Real wa = std::max(abs(w), abs(winv));
    for (unsigned n = 1;; ++n) {
        qn = qn * q;
        qna = qna * qa;
        if (qna * wa < eps) break;
        if (n > 10 * wp) throw PrecisionError("q-series did not converge");
        Complex a = qn * w, b = qn * winv;
        P += g(a) + g(b) - Real(2) * g(qn);
        D += h(a) - h(b);
    }
    Complex s = twopii / r1;
    Complex s2 = s * s;
    return {s2 * P, s2 * s * D};
}

ComplexPoint exp_map(const PeriodLattice& L, const Complex& z, unsigned precision_bits) {
    ComplexPoint out;
    try {
        auto [P, D] = weierstrass_p(L, z, precision_bits);
        PrecisionScope scope(precision_bits + kGuardBits);
        out.x = P - L.shift;
        out.y = D / Real(2);
    } catch (const std::domain_error&) {
        out.infinity = true;
    }
    return out;
}

BettiCoords betti_coordinates(const Complex& z, const PeriodLattice& L) {
    unsigned wp = L.precision_bits + kGuardBits;
    PrecisionScope scope(wp);
    Complex tau = L.tau();
    if (tau.im <= two_pow(-static_cast<long>(wp / 2))) throw std::domain_error("degenerate lattice");
    Complex u = z / L.omega1;
    Real b2 = u.im / tau.im;
    Real b1 = u.re - b2 * tau.re;
    BettiCoords out;
    out.b1 = reduce_unit(b1, L.precision_bits);
    out.b2 = reduce_unit(b2, L.precision_bits);
    Real scale = (Real(1) + abs(u)) * (Real(1) + abs(tau) / tau.im);
    out.error = scale * (L.error / abs(L.omega1) + two_pow(-static_cast<long>(L.precision_bits) - 4));
    return out;
}

EllipticLog elliptic_log(const ComplexCurve& E, const ComplexPoint& P, const PeriodLattice& L,
                         unsigned precision_bits) {
    EllipticLog out;
    if (P.infinity) {
        out.infinity = true;
        out.error = 0;
        return out;
    }
    unsigned wp = precision_bits + kGuardBits;
    PrecisionScope scope(wp);
    Real tol = two_pow(-static_cast<long>(precision_bits / 2));
    Complex rhs = E.cubic(P.x);
    if (!close(P.y * P.y, rhs, tol))
        throw std::invalid_argument("point is not on the curve");

    Complex X = P.x + L.shift;
    Complex z = carlson_rf(X - L.e1, X - L.e2, X - L.e3, wp);
    auto [wpz, dz] = weierstrass_p(L, z, precision_bits);
    if (abs(dz / Real(2) - P.y) > abs(dz / Real(2) + P.y)) {
        z = -z;
        dz = -dz;
    }
    // Newton on wp(z) = X away from the 2-torsion points.
    for (int it = 0; it < 2 && abs(dz) > tol * (Real(1) + abs(X)); ++it) {
        z = z - (wpz - X) / dz;
        std::tie(wpz, dz) = weierstrass_p(L, z, precision_bits);
    }
    Real res = abs(wpz - X);
    if (res > tol * (Real(1) + abs(X)) || abs(dz / Real(2) - P.y) > tol * (Real(1) + abs(P.y)) * Real(16))
        throw PrecisionError("elliptic logarithm failed to verify against the exponential map");

    Complex u = z / L.omega1;
    Complex tau = L.tau();
    Real b2 = u.im / tau.im;
    Real b1 = u.re - b2 * tau.re;
    Real f1 = reduce_unit(b1, precision_bits), f2 = reduce_unit(b2, precision_bits);
    out.z = f1 * L.omega1 + f2 * L.omega2;
    Real slope = abs(dz);
    Real err = slope > tol ? Real(res / slope) : Real(sqrt(res));
    out.error = err + two_pow(-static_cast<long>(precision_bits)) * (Real(1) + abs(out.z)) + L.error * Real(2);
    return out;
}

std::vector<Complex> a_coordinates(const std::vector<Complex>& x, unsigned precision_bits) {
    check_precision_request(precision_bits);
    PrecisionScope scope(precision_bits + kGuardBits);
    Real twopi = Real(2) * pi_real();
    std::vector<Complex> out;
    for (const auto& v : x) {
        if (v.re == 0 && v.im == 0) throw std::domain_error("a-coordinate of a zero component");
        Complex a{arg(v) / twopi, -bmp::log(abs(v)) / twopi};
        a.re = reduce_unit(a.re, precision_bits);
        out.push_back(std::move(a));
    }
    return out;
}

std::shared_ptr<const PeriodLattice> LatticeCache::get(const ComplexCurve& E, unsigned precision_bits) {
    int digits = static_cast<int>(precision_bits * 0.30103) + 12;
    auto key = std::make_tuple(decimal(E.a, digits), decimal(E.b, digits), decimal(E.c, digits), precision_bits);
    {
        std::shared_lock lock(mu_);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
    }
    auto L = std::make_shared<const PeriodLattice>(period_lattice(E, precision_bits));
    std::unique_lock lock(mu_);
    return map_.emplace(std::move(key), std::move(L)).first->second;
}

std::size_t LatticeCache::size() const {
    std::shared_lock lock(mu_);
    return map_.size();
}

Complex eval_complex(const QPoly& p, const Complex& z) {
    Complex r;
    const auto& c = p.coeffs();
    for (std::size_t k = c.size(); k-- > 0;) r = r * z + Complex(real_from(c[k]));
    return r;
}

Complex eval_complex(const RatFunc& f, const Complex& z) {
    Complex d = eval_complex(f.den(), z);
    if (d.re == 0 && d.im == 0) throw std::domain_error("pole of a rational function");
    return eval_complex(f.num(), z) / d;
}

ComplexCurve fibre_at(const EllipticScheme& s, const Complex& lambda0) {
    return {eval_complex(s.a, lambda0), eval_complex(s.b, lambda0), eval_complex(s.c, lambda0)};
}

ComplexPoint section_at(const EllipticScheme& s, const Complex& lambda0, const std::optional<Complex>& y0) {
    ComplexPoint P;
    P.x = eval_complex(s.section_x, lambda0);
    P.y = y0 ? *y0 : sqrt(fibre_at(s, lambda0).cubic(P.x));
    return P;
}

LogPoint theta_map(const EllipticScheme& s, const RatFunc& f, const Complex& lambda0,
                   const std::vector<Complex>& eps, LatticeCache& cache, unsigned precision_bits,
                   const std::optional<Complex>& y0) {
    check_precision_request(precision_bits);
    PrecisionScope scope(precision_bits + kGuardBits);
    Complex sum;
    for (const auto& e : eps) sum += e;
    Complex fl = eval_complex(f, lambda0);
    if (!close(fl, sum, two_pow(-static_cast<long>(precision_bits / 2))))
        throw std::invalid_argument("f(lambda) differs from the sum of the torus coordinates");
    ComplexCurve E = fibre_at(s, lambda0);
    auto L = cache.get(E, precision_bits);
    EllipticLog lg = elliptic_log(E, section_at(s, lambda0, y0), *L, precision_bits);
    BettiCoords b = betti_coordinates(lg.z, *L);
    LogPoint out;
    out.b1 = b.b1;
    out.b2 = b.b2;
    out.a = a_coordinates(eps, precision_bits);
    out.error = b.error + lg.error / abs(L->omega1) * Real(4);
    return out;
}

std::optional<Rational> rational_reconstruct(const Real& r, const Integer& q_max, const Real& tol) {
    if (q_max < 1) throw std::invalid_argument("q_max must be positive");
    if (tol <= 0) throw std::invalid_argument("tolerance must be positive");
    PrecisionScope scope(std::max(bits_of(r), 64u) + kGuardBits);
    Real bound = Real(1) / (Real(2) * real_from_z(q_max) * real_from_z(q_max));
    if (tol >= bound)
        throw std::invalid_argument("tolerance too large for a unique answer: need tol < 1/(2 q_max^2)");
    Integer h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    Real x = r;
    for (int it = 0; it < 10000; ++it) {
        Integer a = floor_z(x);
        Integer h = a * h1 + h2, k = a * k1 + k2;
        if (k > q_max) break;
        Rational c(h, k);
        c.canonicalize();
        if (bmp::abs(r - real_from(c)) <= tol) return c;
        Real frac = x - real_from_z(a);
        if (frac == 0) break;
        x = Real(1) / frac;
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
    }
    return std::nullopt;
}

ComplexCurve embed_curve(const TowerCurve& E, std::uint64_t j, const Complex& root, unsigned precision_bits) {
    return {embed(E.a, j, root, precision_bits), embed(E.b, j, root, precision_bits),
            embed(E.c, j, root, precision_bits)};
}

ComplexPoint embed_point(const TowerPoint& P, std::uint64_t j, const Complex& root, unsigned precision_bits) {
    ComplexPoint out;
    if (P.infinity) {
        out.infinity = true;
        return out;
    }
    PrecisionScope scope(precision_bits + kGuardBits);
    out.x = embed(P.x, j, root, precision_bits);
    out.y = embed(P.w, j, root, precision_bits) * sqrt(embed(P.v, j, root, precision_bits));
    return out;
}

}  // namespace tors
