#pragma once

#include "tors/poly.hpp"

#include <string>

namespace tors {

// num/den in Q(lambda), reduced, den monic.
class RatFunc {
  public:
    RatFunc() : num_(Rational(0)), den_(QPoly::constant(Rational(1))) {}
    RatFunc(QPoly num, QPoly den);
    static RatFunc constant(const Rational& c) { return RatFunc(QPoly::constant(c), QPoly::constant(Rational(1))); }
    static RatFunc lambda() { return RatFunc(qpoly({0, 1}), QPoly::constant(Rational(1))); }

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero_poly(); }
    bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }

    // Value at an element of a ring R; throws std::domain_error at a pole.
    template <class R, class Lift>
    R eval_at(const R& t, Lift lift) const {
        R d = den_.eval_in(t, lift);
        if (is_zero(d)) throw std::domain_error("pole of a rational function");
        return num_.eval_in(t, lift) * inverse(d);
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator-(const RatFunc& a);
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b);
    friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  private:
    QPoly num_, den_;
};

inline bool is_zero(const RatFunc& f) { return f.is_zero(); }
inline RatFunc zero_like(const RatFunc&) { return RatFunc(); }
inline RatFunc one_like(const RatFunc&) { return RatFunc::constant(1); }
inline RatFunc inverse(const RatFunc& f) { return RatFunc::constant(1) / f; }

RatFunc pow(const RatFunc& f, long e);

// Grammar: integers, the variable (lambda, λ or t), + - * / ^ with integer
// exponents, and parentheses. Throws std::invalid_argument on malformed input.
RatFunc parse_ratfunc(const std::string& s);
std::string to_string(const RatFunc& f);
std::string to_string(const QPoly& p, const std::string& var = "t");

}  // namespace tors
