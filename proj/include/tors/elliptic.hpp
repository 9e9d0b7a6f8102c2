#pragma once

#include "tors/errors.hpp"
#include "tors/poly.hpp"

#include <optional>
#include <vector>

namespace tors {

// y^2 = x^3 + a x^2 + b x + c over an exact ring R.
template <class R>
struct WeierstrassCurve {
    R a, b, c;

    R cubic(const R& x) const { return ((x + a) * x + b) * x + c; }
    // Discriminant of the cubic; the curve discriminant is 16 times it.
    R discriminant() const {
        R ab = a * b;
        return ab * ab - times_int<R>(b * b * b, 4) - times_int<R>(a * a * a * c, 4) - times_int<R>(c * c, 27) +
               times_int<R>(ab * c, 18);
    }
    bool nonsingular() const { return !is_zero(discriminant()); }
};

// Affine point (x, w sqrt(v)) or infinity. Ordinary points have v = 1; a point whose
// y^2 is not available in R keeps y formal through v. Multiples of such a point stay
// of the form (x', w' sqrt(v)), so only elements of R are ever inverted.
template <class R>
struct CurvePoint {
    bool infinity = true;
    R x, w, v;

    static CurvePoint at_infinity() { return {}; }
    static CurvePoint affine(R x, R y) {
        R one = one_like(x);
        return {false, std::move(x), std::move(y), std::move(one)};
    }
    static CurvePoint adjoined(R x, R w, R v) { return {false, std::move(x), std::move(w), std::move(v)}; }

    R y_square() const { return w * w * v; }
};

template <class R>
bool on_curve(const WeierstrassCurve<R>& E, const CurvePoint<R>& P) {
    return P.infinity || P.y_square() == E.cubic(P.x);
}

template <class R>
bool operator==(const CurvePoint<R>& P, const CurvePoint<R>& Q) {
    if (P.infinity || Q.infinity) return P.infinity == Q.infinity;
    return P.x == Q.x && P.w == Q.w && P.v == Q.v;
}

template <class R>
CurvePoint<R> negate(const CurvePoint<R>& P) {
    if (P.infinity) return P;
    return CurvePoint<R>::adjoined(P.x, -P.w, P.v);
}

template <class R>
CurvePoint<R> point_double(const WeierstrassCurve<R>& E, const CurvePoint<R>& P) {
    if (P.infinity || is_zero(P.w)) return CurvePoint<R>::at_infinity();
    // slope = (3x^2 + 2ax + b) / (2 w sqrt v) = t sqrt v
    R num = times_int<R>(P.x * P.x, 3) + times_int<R>(E.a * P.x, 2) + E.b;
    R t = num * inverse(times_int<R>(P.w * P.v, 2));
    R x3 = t * t * P.v - E.a - P.x - P.x;
    R w3 = -(t * (x3 - P.x) + P.w);
    return CurvePoint<R>::adjoined(std::move(x3), std::move(w3), P.v);
}

template <class R>
CurvePoint<R> point_add(const WeierstrassCurve<R>& E, const CurvePoint<R>& P, const CurvePoint<R>& Q) {
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    if (!(P.v == Q.v)) throw std::invalid_argument("points with different adjoined square roots");
    if (P.x == Q.x) {
        if (P.w == Q.w) return point_double(E, P);
        if (is_zero(P.w + Q.w)) return CurvePoint<R>::at_infinity();
        throw std::domain_error("points share x but are neither equal nor opposite");
    }
    R s = (Q.w - P.w) * inverse(Q.x - P.x);
    R x3 = s * s * P.v - E.a - P.x - Q.x;
    R w3 = -(s * (x3 - P.x) + P.w);
    return CurvePoint<R>::adjoined(std::move(x3), std::move(w3), P.v);
}

template <class R>
CurvePoint<R> scalar_mul(const WeierstrassCurve<R>& E, const CurvePoint<R>& P, unsigned long k) {
    CurvePoint<R> r = CurvePoint<R>::at_infinity(), b = P;
    while (k) {
        if (k & 1ul) r = point_add(E, r, b);
        k >>= 1ul;
        if (k) b = point_double(E, b);
    }
    return r;
}

namespace detail {

// Shared recurrence for f_m, where psi_m = f_m (m odd) and psi_m = psi_2 f_m (m even),
// psi_2^2 = F = 4 (x^3 + a x^2 + b x + c). Works on polynomials and on values alike.
template <class T>
void extend_division(std::vector<T>& f, const T& F, std::size_t upto) {
    while (f.size() <= upto) {
        std::size_t k = f.size();
        std::size_t n = k / 2;
        if (k % 2 == 1) {
            const T& fn = f[n];
            const T& fn1 = f[n + 1];
            T a = f[n + 2] * fn * fn * fn, b = f[n - 1] * fn1 * fn1 * fn1;
            if (n % 2 == 0)
                a = F * F * a;
            else
                b = F * F * b;
            f.push_back(a - b);
        } else {
            const T& fm1 = f[n - 1];
            const T& fp1 = f[n + 1];
            f.push_back(f[n] * (f[n + 2] * fm1 * fm1 - f[n - 2] * fp1 * fp1));
        }
    }
}

}  // namespace detail

// Memoized division polynomials f_m in R[x] for one curve.
template <class R>
class DivisionPolynomials {
  public:
    using P = Poly<R>;
    explicit DivisionPolynomials(WeierstrassCurve<R> E) : E_(std::move(E)) {
        R zero = zero_like(E_.a), one = one_like(E_.a);
        const R &a = E_.a, &b = E_.b, &c = E_.c;
        auto k = [&](unsigned long n) { return times_int<R>(one, n); };
        F_ = P({times_int<R>(c, 4), times_int<R>(b, 4), times_int<R>(a, 4), k(4)}, zero);
        f_.push_back(P(zero));
        f_.push_back(P::constant(one));
        f_.push_back(P::constant(one));
        f_.push_back(P({times_int<R>(a * c, 4) - b * b, times_int<R>(c, 12), times_int<R>(b, 6), times_int<R>(a, 4), k(3)}, zero));
        R b2 = times_int<R>(a, 4), b4 = times_int<R>(b, 2), b6 = times_int<R>(c, 4), b8 = times_int<R>(a * c, 4) - b * b;
        f_.push_back(P({b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, times_int<R>(b8, 10), times_int<R>(b6, 10), times_int<R>(b4, 5), b2, k(2)},
                       zero));
    }

    const WeierstrassCurve<R>& curve() const { return E_; }
    // 4 (x^3 + a x^2 + b x + c) = psi_2^2.
    const P& psi2_squared() const { return F_; }
    const P& f(std::size_t m) {
        detail::extend_division(f_, F_, m);
        return f_[m];
    }
    // psi_m = f_m for odd m and psi_2 f_m for even m.
    static bool has_y_factor(std::size_t m) { return m % 2 == 0; }

  private:
    WeierstrassCurve<R> E_;
    P F_;
    std::vector<P> f_;
};

// Values f_0(x0), ..., f_M(x0) computed in R directly.
template <class R>
std::vector<R> division_values(const WeierstrassCurve<R>& E, const R& x0, std::size_t M) {
    R one = one_like(x0), zero = zero_like(x0);
    const R &a = E.a, &b = E.b, &c = E.c;
    R x2 = x0 * x0, x3 = x2 * x0;
    R F = times_int<R>(E.cubic(x0), 4);
    std::vector<R> f{zero, one, one};
    f.push_back(times_int<R>(x2 * x2, 3) + times_int<R>(a * x3, 4) + times_int<R>(b * x2, 6) + times_int<R>(c * x0, 12) +
                times_int<R>(a * c, 4) - b * b);
    R b2 = times_int<R>(a, 4), b4 = times_int<R>(b, 2), b6 = times_int<R>(c, 4), b8 = times_int<R>(a * c, 4) - b * b;
    f.push_back(times_int<R>(x3 * x3, 2) + b2 * x3 * x2 + times_int<R>(b4 * x2 * x2, 5) + times_int<R>(b6 * x3, 10) +
                times_int<R>(b8 * x2, 10) + (b2 * b8 - b4 * b6) * x0 + (b4 * b8 - b6 * b6));
    detail::extend_division(f, F, M);
    f.resize(M + 1, zero);
    return f;
}

// m P = infinity, decided from x alone: f_m(x) = 0, or m even and y = 0.
template <class R>
bool killed_by(const std::vector<R>& fvals, bool y_zero, std::size_t m) {
    if (m % 2 == 0 && y_zero) return true;
    return is_zero(fvals[m]);
}

// Least m <= T_max with m P = infinity, from division values and cross-checked
// by repeated addition. nullopt when there is none. Assumes R is a field.
template <class R>
std::optional<unsigned> torsion_order(const WeierstrassCurve<R>& E, const CurvePoint<R>& P, unsigned T_max,
                                      bool cross_check = true) {
    if (T_max == 0) throw std::invalid_argument("T_max must be positive");
    if (P.infinity) return 1u;
    if (!on_curve(E, P)) throw std::invalid_argument("point is not on the curve");
    std::optional<unsigned> order;
    if (is_zero(P.w)) {
        if (T_max >= 2) order = 2u;
    } else {
        auto fv = division_values(E, P.x, T_max);
        for (unsigned m = 3; m <= T_max && !order; ++m)
            if (is_zero(fv[m])) order = m;
    }
    if (cross_check) {
        unsigned upto = order ? *order : T_max;
        CurvePoint<R> Q = P;
        for (unsigned k = 1; k < upto; ++k) {
            if (Q.infinity) throw VerificationFailure("repeated addition reaches infinity before the division-polynomial order");
            Q = point_add(E, Q, P);
        }
        if (order && !Q.infinity) throw VerificationFailure("division-polynomial order not confirmed by repeated addition");
        if (!order && Q.infinity) throw VerificationFailure("repeated addition finds torsion the division values missed");
    }
    return order;
}

}  // namespace tors
