#include "tors/ratfunc.hpp"

#include <cctype>
#include <sstream>

namespace tors {

RatFunc::RatFunc(QPoly num, QPoly den) {
    if (den.is_zero_poly()) throw std::domain_error("zero denominator");
    QPoly g = gcd(num, den);
    if (num.is_zero_poly()) {
        num_ = QPoly(Rational(0));
        den_ = QPoly::constant(Rational(1));
        return;
    }
    num = num / g;
    den = den / g;
    Rational lc = den.lead();
    num_ = inverse(lc) * num;
    den_ = inverse(lc) * den;
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) { return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_); }
RatFunc operator-(const RatFunc& a, const RatFunc& b) { return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_); }
RatFunc operator-(const RatFunc& a) { return RatFunc(-a.num_, a.den_); }
RatFunc operator*(const RatFunc& a, const RatFunc& b) { return RatFunc(a.num_ * b.num_, a.den_ * b.den_); }
RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw std::domain_error("division by the zero function");
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
}

RatFunc pow(const RatFunc& f, long e) {
    if (e < 0) return RatFunc::constant(1) / pow(f, -e);
    return RatFunc(pow(f.num(), static_cast<unsigned>(e)), pow(f.den(), static_cast<unsigned>(e)));
}

namespace {

class Parser {
  public:
    explicit Parser(const std::string& s) : s_(s) {}

    RatFunc parse() {
        RatFunc r = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected input");
        return r;
    }

  private:
    const std::string& s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("rational function '" + s_ + "': " + why + " at offset " + std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    RatFunc expr() {
        RatFunc r = term();
        for (;;) {
            if (eat('+'))
                r = r + term();
            else if (eat('-'))
                r = r - term();
            else
                return r;
        }
    }
    RatFunc term() {
        RatFunc r = unary();
        for (;;) {
            if (eat('*'))
                r = r * unary();
            else if (eat('/'))
                r = r / unary();
            else
                return r;
        }
    }
    RatFunc unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    RatFunc power() {
        RatFunc base = atom();
        if (!eat('^')) return base;
        skip();
        bool neg = eat('-');
        skip();
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail("expected an integer exponent");
        if (i_ - start > 4) fail("exponent too large");
        long e = std::stol(s_.substr(start, i_ - start));
        return pow(base, neg ? -e : e);
    }
    RatFunc atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            RatFunc r = expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            return RatFunc::constant(Rational(Integer(s_.substr(start, i_ - start))));
        }
        static const char* names[] = {"lambda", "\xce\xbb", "t"};
        for (const char* n : names) {
            std::string w(n);
            if (s_.compare(i_, w.size(), w) == 0) {
                std::size_t end = i_ + w.size();
                if (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) continue;
                i_ = end;
                return RatFunc::lambda();
            }
        }
        fail("unexpected character");
    }
};

}  // namespace

RatFunc parse_ratfunc(const std::string& s) { return Parser(s).parse(); }

std::string to_string(const QPoly& p, const std::string& var) {
    if (p.is_zero_poly()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = p.coeffs().size(); k-- > 0;) {
        Rational c = p.coeffs()[k];
        if (sgn(c) == 0) continue;
        if (!first) os << (sgn(c) < 0 ? " - " : " + ");
        else if (sgn(c) < 0) os << "-";
        Rational a = abs(c);
        bool unit = a == 1;
        if (k == 0 || !unit) os << (a.get_den() == 1 ? a.get_num().get_str() : "(" + a.get_str() + ")");
        if (k > 0) {
            if (!unit) os << "*";
            os << var;
            if (k > 1) os << "^" << k;
        }
        first = false;
    }
    return os.str();
}

std::string to_string(const RatFunc& f) {
    if (f.den().degree() == 0) return to_string(f.num());
    return "(" + to_string(f.num()) + ")/(" + to_string(f.den()) + ")";
}

}  // namespace tors
