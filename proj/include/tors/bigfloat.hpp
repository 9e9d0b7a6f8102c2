#pragma once

#include "tors/arith.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <mutex>
#include <string>

namespace tors {

using Real = boost::multiprecision::mpfr_float;

constexpr unsigned kDefaultPrecisionBits = 256;
// Extra working bits carried by every numeric routine on top of the request.
constexpr unsigned kGuardBits = 32;

unsigned max_precision_bits();
void set_max_precision_bits(unsigned bits);

// Default precision from the environment (TORS_PRECISION_BITS) or 256.
unsigned default_precision_bits();

// Sets the working precision for newly created Reals. The MPFR default
// precision is process-global, so the scope also holds a process-wide
// recursive lock; nested scopes on one thread are fine.
class PrecisionScope {
  public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;
    unsigned bits() const { return bits_; }

  private:
    std::unique_lock<std::recursive_mutex> lock_;
    unsigned bits_;
    unsigned saved_digits10_;
};

void check_precision_request(unsigned bits);

Real real_from(const Rational& q);
Real pi_real();
Real two_pow(long e);
std::string decimal(const Real& x, int digits = 40);
// log2 of |x|, or a large negative number for 0.
double log2_abs(const Real& x);

struct Complex {
    Real re, im;

    Complex() : re(0), im(0) {}
    Complex(Real r) : re(std::move(r)), im(0) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(int r) : re(r), im(0) {}

    static Complex from_double(std::complex<double> z) { return {Real(z.real()), Real(z.imag())}; }
    std::complex<double> to_double() const { return {re.convert_to<double>(), im.convert_to<double>()}; }

    friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator*(const Real& s, const Complex& a) { return {s * a.re, s * a.im}; }
    friend Complex operator/(const Complex& a, const Complex& b);
    friend Complex operator/(const Complex& a, const Real& s) { return {a.re / s, a.im / s}; }
    Complex& operator+=(const Complex& b) { return *this = *this + b; }
    Complex& operator-=(const Complex& b) { return *this = *this - b; }
    Complex& operator*=(const Complex& b) { return *this = *this * b; }
    Complex& operator/=(const Complex& b) { return *this = *this / b; }
};

Complex conj(const Complex& z);
Real norm(const Complex& z);
Real abs(const Complex& z);
Real arg(const Complex& z);
Complex sqrt(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
// exp(2 pi i t) for real t
Complex expi2pi(const Real& t);
Complex powi(const Complex& z, long e);
std::string decimal(const Complex& z, int digits = 40);

}  // namespace tors
