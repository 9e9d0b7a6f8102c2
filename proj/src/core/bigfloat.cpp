#include "tors/bigfloat.hpp"
#include "tors/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace tors {

namespace {

std::atomic<unsigned> g_max_bits{16384};

std::recursive_mutex& numeric_mutex() {
    static std::recursive_mutex m;
    return m;
}

unsigned digits10_for(unsigned bits) { return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 2; }

}  // namespace

unsigned max_precision_bits() { return g_max_bits.load(); }
void set_max_precision_bits(unsigned bits) { g_max_bits.store(bits); }

unsigned default_precision_bits() {
    if (const char* e = std::getenv("TORS_PRECISION_BITS")) {
        char* end = nullptr;
        long v = std::strtol(e, &end, 10);
        if (end != e && v >= 64) return static_cast<unsigned>(v);
    }
    return kDefaultPrecisionBits;
}

void check_precision_request(unsigned bits) {
    if (bits > max_precision_bits())
        throw PrecisionError("precision request of " + std::to_string(bits) + " bits exceeds the configured maximum of " +
                             std::to_string(max_precision_bits()));
}

PrecisionScope::PrecisionScope(unsigned bits) : lock_(numeric_mutex()), bits_(bits) {
    saved_digits10_ = Real::default_precision();
    Real::default_precision(digits10_for(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_digits10_); }

Real real_from(const Rational& q) {
    Real r;
    mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

Real pi_real() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

Real two_pow(long e) {
    Real r(1);
    mpfr_mul_2si(r.backend().data(), r.backend().data(), e, MPFR_RNDN);
    return r;
}

std::string decimal(const Real& x, int digits) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

double log2_abs(const Real& x) {
    if (x == 0) return -1e300;
    long e = 0;
    double m = mpfr_get_d_2exp(&e, x.backend().data(), MPFR_RNDN);
    return std::log2(std::fabs(m)) + static_cast<double>(e);
}

Complex operator/(const Complex& a, const Complex& b) {
    Real d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

Complex conj(const Complex& z) { return {z.re, -z.im}; }
Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
Real abs(const Complex& z) { return boost::multiprecision::hypot(z.re, z.im); }
Real arg(const Complex& z) { return boost::multiprecision::atan2(z.im, z.re); }

Complex sqrt(const Complex& z) {
    if (z.re == 0 && z.im == 0) return {};
    Real r = abs(z);
    Real a = boost::multiprecision::sqrt((r + boost::multiprecision::abs(z.re)) / 2);
    if (z.re >= 0) return {a, z.im / (2 * a)};
    Real b = z.im >= 0 ? a : Real(-a);
    return {boost::multiprecision::abs(z.im) / (2 * a), b};
}

Complex exp(const Complex& z) {
    Real m = boost::multiprecision::exp(z.re);
    return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

Complex log(const Complex& z) { return {boost::multiprecision::log(abs(z)), arg(z)}; }

Complex expi2pi(const Real& t) {
    Real a = 2 * pi_real() * t;
    return {boost::multiprecision::cos(a), boost::multiprecision::sin(a)};
}

Complex powi(const Complex& z, long e) {
    if (e < 0) return Complex(1) / powi(z, -e);
    Complex r(1), b = z;
    while (e) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

std::string decimal(const Complex& z, int digits) {
    return decimal(z.re, digits) + (z.im < 0 ? " - " : " + ") + decimal(boost::multiprecision::abs(z.im), digits) + "i";
}

}  // namespace tors
