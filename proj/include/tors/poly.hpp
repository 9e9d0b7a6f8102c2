#pragma once

#include "tors/arith.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace tors {

// k * a by double-and-add, for rings without an integer embedding.
template <class R>
R times_int(const R& a, unsigned long k) {
    R r = zero_like(a), b = a;
    while (k) {
        if (k & 1ul) r = r + b;
        k >>= 1ul;
        if (k) b = b + b;
    }
    return r;
}

// Dense univariate polynomial, coefficients low to high, no trailing zeros.
// A zero element of the coefficient ring travels with the polynomial so that
// rings needing context (number fields) work without a global.
template <class R>
class Poly {
  public:
    Poly() = default;
    explicit Poly(R zero) : zero_(std::move(zero)) {}
    Poly(std::vector<R> coeffs, R zero) : c_(std::move(coeffs)), zero_(std::move(zero)) { trim(); }

    static Poly constant(const R& a) {
        Poly p(zero_like(a));
        if (!is_zero(a)) p.c_.push_back(a);
        return p;
    }
    static Poly monomial(const R& a, std::size_t k) {
        Poly p(zero_like(a));
        if (!is_zero(a)) {
            p.c_.assign(k + 1, zero_like(a));
            p.c_[k] = a;
        }
        return p;
    }
    // x - a
    static Poly linear_root(const R& a) { return Poly({-a, one_like(a)}, zero_like(a)); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero_poly() const { return c_.empty(); }
    const R& zero() const { return zero_; }
    const std::vector<R>& coeffs() const { return c_; }
    const R& operator[](std::size_t i) const { return i < c_.size() ? c_[i] : zero_; }
    const R& lead() const {
        if (c_.empty()) throw std::domain_error("leading coefficient of zero polynomial");
        return c_.back();
    }

    void set(std::size_t i, const R& a) {
        if (i >= c_.size()) c_.resize(i + 1, zero_);
        c_[i] = a;
        trim();
    }

    R operator()(const R& x) const { return eval(x); }
    R eval(const R& x) const {
        R r = zero_like(x);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
        return r;
    }
    // Evaluate at an element of a ring T that accepts R coefficients.
    template <class T, class Lift>
    T eval_in(const T& x, Lift lift) const {
        T r = zero_like(x);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + lift(*it);
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.c_.size() != b.c_.size()) return false;
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r(a.zero_);
        r.c_.resize(std::max(a.c_.size(), b.c_.size()), a.zero_);
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = a[i] + b[i];
        r.trim();
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        Poly r(a.zero_);
        r.c_.resize(std::max(a.c_.size(), b.c_.size()), a.zero_);
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = a[i] - b[i];
        r.trim();
        return r;
    }
    friend Poly operator-(const Poly& a) {
        Poly r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r(a.zero_);
        if (a.c_.empty() || b.c_.empty()) return r;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, a.zero_);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (is_zero(a.c_[i])) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] = r.c_[i + j] + a.c_[i] * b.c_[j];
        }
        r.trim();
        return r;
    }
    friend Poly operator*(const R& s, const Poly& a) {
        Poly r(a.zero_);
        if (is_zero(s)) return r;
        r.c_.reserve(a.c_.size());
        for (const auto& x : a.c_) r.c_.push_back(s * x);
        r.trim();
        return r;
    }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }

    Poly derivative() const {
        Poly r(zero_);
        for (std::size_t i = 1; i < c_.size(); ++i) {
            r.c_.push_back(times_int(c_[i], i));
        }
        r.trim();
        return r;
    }

    Poly monic() const {
        if (c_.empty()) return *this;
        R inv = inverse(lead());
        return inv * *this;
    }

    // Polynomial with each coefficient mapped through fn.
    template <class Fn>
    Poly map(Fn fn) const {
        Poly r(fn(zero_));
        for (const auto& x : c_) r.c_.push_back(fn(x));
        r.trim();
        return r;
    }

  private:
    void trim() {
        while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
    }
    template <class S>
    friend std::pair<Poly<S>, Poly<S>> divmod(const Poly<S>& a, const Poly<S>& b);

    std::vector<R> c_;
    R zero_{};
};

template <class R>
std::pair<Poly<R>, Poly<R>> divmod(const Poly<R>& a, const Poly<R>& b) {
    if (b.is_zero_poly()) throw std::domain_error("polynomial division by zero");
    Poly<R> q(a.zero()), r = a;
    if (a.degree() < b.degree()) return {q, r};
    R inv = inverse(b.lead());
    int db = b.degree();
    q.c_.assign(static_cast<std::size_t>(a.degree() - db + 1), a.zero());
    auto& rc = r.c_;
    for (int k = static_cast<int>(rc.size()) - 1; k >= db; --k) {
        if (is_zero(rc[static_cast<std::size_t>(k)])) continue;
        R t = rc[static_cast<std::size_t>(k)] * inv;
        q.c_[static_cast<std::size_t>(k - db)] = t;
        for (int j = 0; j <= db; ++j)
            rc[static_cast<std::size_t>(k - db + j)] = rc[static_cast<std::size_t>(k - db + j)] - t * b[static_cast<std::size_t>(j)];
    }
    q.trim();
    r.trim();
    return {q, r};
}

template <class R>
Poly<R> operator%(const Poly<R>& a, const Poly<R>& b) { return divmod(a, b).second; }
template <class R>
Poly<R> operator/(const Poly<R>& a, const Poly<R>& b) { return divmod(a, b).first; }

// Monic gcd over a field; inverse() of a zero divisor throws, which callers rely on.
template <class R>
Poly<R> gcd(Poly<R> a, Poly<R> b) {
    while (!b.is_zero_poly()) {
        auto r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

// Returns (g, s, t) with s*a + t*b = g, g monic.
template <class R>
struct Xgcd {
    Poly<R> g, s, t;
};

template <class R>
Xgcd<R> xgcd(const Poly<R>& a, const Poly<R>& b) {
    const R& z = a.zero();
    Poly<R> r0 = a, r1 = b;
    Poly<R> s0 = Poly<R>::constant(one_like(z)), s1(z);
    Poly<R> t0(z), t1 = Poly<R>::constant(one_like(z));
    while (!r1.is_zero_poly()) {
        auto [q, r] = divmod(r0, r1);
        r0 = std::move(r1);
        r1 = std::move(r);
        Poly<R> s2 = s0 - q * s1, t2 = t0 - q * t1;
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.is_zero_poly()) return {r0, s0, t0};
    R inv = inverse(r0.lead());
    return {inv * r0, inv * s0, inv * t0};
}

// p(x + s)
template <class R>
Poly<R> taylor_shift(const Poly<R>& p, const R& s) {
    Poly<R> r(p.zero());
    Poly<R> lin = Poly<R>::linear_root(-s);
    const auto& c = p.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * lin + Poly<R>::constant(*it);
    return r;
}

template <class R>
Poly<R> pow(const Poly<R>& p, unsigned e) {
    Poly<R> r = Poly<R>::constant(one_like(p.zero())), b = p;
    while (e) {
        if (e & 1u) r *= b;
        e >>= 1u;
        if (e) b *= b;
    }
    return r;
}

// Squarefree part over a field of characteristic 0.
template <class R>
Poly<R> squarefree_part(const Poly<R>& p) {
    if (p.degree() <= 0) return p.monic();
    auto g = gcd(p, p.derivative());
    return (p / g).monic();
}

using QPoly = Poly<Rational>;

inline QPoly qpoly(std::initializer_list<long> c) {
    std::vector<Rational> v;
    for (long x : c) v.emplace_back(x);
    return QPoly(std::move(v), Rational(0));
}

}  // namespace tors
