#include "tors/search.hpp"

#include "tors/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace tors {

const char* const kCertificateSchema = "ctorsion.certificate.v1";
const char* const kConfigSchema = "ctorsion.search-config.v1";

namespace {

struct Fraction {
    std::uint64_t num, den;
};

std::vector<Fraction> alphabet(std::uint64_t N_max, TupleMode mode) {
    std::vector<Fraction> out;
    if (mode == TupleMode::roots_of_N_max) {
        for (std::uint64_t k = 0; k < N_max; ++k) {
            std::uint64_t g = gcd_u64(k, N_max);
            out.push_back(k == 0 ? Fraction{0, 1} : Fraction{k / g, N_max / g});
        }
    } else {
        for (std::uint64_t q = 1; q <= N_max; ++q)
            for (std::uint64_t p = 0; p < q; ++p)
                if (gcd_u64(p, q) == 1 && (p > 0 || q == 1)) out.push_back({p, q});
    }
    return out;
}

RootOfUnityTuple tuple_of(const std::vector<Fraction>& alpha, const std::vector<std::size_t>& idx) {
    std::uint64_t N = 1;
    for (auto i : idx) N = lcm_u64(N, alpha[i].den);
    std::vector<std::int64_t> e;
    for (auto i : idx) e.push_back(static_cast<std::int64_t>(alpha[i].num * (N / alpha[i].den)));
    return make_tuple(idx.size(), N, std::move(e));
}

std::string token_prefix(std::size_t n, std::uint64_t N_max, bool skip, TupleMode mode) {
    std::ostringstream s;
    s << "tuples-v1;n=" << n << ";N=" << N_max << ";mode=" << (mode == TupleMode::roots_of_N_max ? 0 : 1)
      << ";skip=" << (skip ? 1 : 0) << ";next=";
    return s.str();
}

// Next nondecreasing index vector; false after the last one.
bool advance(std::vector<std::size_t>& idx, std::size_t k) {
    std::size_t i = idx.size();
    while (i > 0 && idx[i - 1] == k - 1) --i;
    if (i == 0) return false;
    std::size_t v = idx[i - 1] + 1;
    for (std::size_t j = i - 1; j < idx.size(); ++j) idx[j] = v;
    return true;
}

KPoly lift_poly(const QPoly& p, const FieldPtr& K) {
    std::vector<CyclotomicNumber> c;
    for (const auto& q : p.coeffs()) c.push_back(CyclotomicNumber::rational(K, q));
    return KPoly(std::move(c), CyclotomicNumber(K));
}

TowerElement eval_in_tower(const KPoly& p, const TowerElement& x) {
    const TowerPtr& t = x.tower();
    return p.eval_in(x, [&](const CyclotomicNumber& a) { return TowerElement::from_base(t, a); });
}

TowerElement eval_in_tower(const QPoly& p, const TowerElement& x) {
    const TowerPtr& t = x.tower();
    return p.eval_in(x, [&](const Rational& a) { return TowerElement::from_rational(t, a); });
}

std::size_t nearest(const std::vector<CertifiedRoot>& roots, const Complex& z) {
    if (roots.empty()) throw std::logic_error("no roots to match");
    std::size_t best = 0;
    Real d = abs(roots[0].value - z);
    for (std::size_t i = 1; i < roots.size(); ++i) {
        Real e = abs(roots[i].value - z);
        if (e < d) {
            d = e;
            best = i;
        }
    }
    return best;
}

struct Betti {
    BettiCoords b;
    Rational r1, r2;
    bool rational = false;
};

// Betti coordinates of the section at the root of `factor` nearest to `target`.
Betti betti_at(const Specialization& sp, const FieldTower& t, const Complex& target, unsigned bits, unsigned m) {
    PrecisionScope scope(bits + kGuardBits);
    auto roots = complex_roots(t, 1, bits);
    Complex y = roots[nearest(roots, target)].value;
    ComplexCurve E = embed_curve(sp.curve, 1, y, bits);
    ComplexPoint P = embed_point(sp.point, 1, y, bits);
    PeriodLattice L = period_lattice(E, bits);
    EllipticLog lg = elliptic_log(E, P, L, bits);
    Betti out;
    out.b = betti_coordinates(lg.z, L);
    Real tol("1e-20");
    auto r1 = rational_reconstruct(out.b.b1, m, tol);
    auto r2 = rational_reconstruct(out.b.b2, m, tol);
    if (r1 && r2) {
        out.rational = true;
        out.r1 = *r1;
        out.r2 = *r2;
    }
    return out;
}

std::uint64_t den_lcm(const Rational& a, const Rational& b) {
    Integer l = lcm(Integer(a.get_den()), Integer(b.get_den()));
    return l.get_ui();
}

}  // namespace

TupleBatch enumerate_tuples(std::size_t n, std::uint64_t N_max, bool skip_vanishing_subsums, TupleMode mode,
                            std::size_t budget, const std::string& resume) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    if (N_max == 0) throw std::invalid_argument("N_max must be at least 1");
    auto alpha = alphabet(N_max, mode);
    std::vector<std::size_t> idx(n, 0);
    std::string prefix = token_prefix(n, N_max, skip_vanishing_subsums, mode);
    if (!resume.empty()) {
        if (resume.rfind(prefix, 0) != 0) throw std::invalid_argument("resume token does not match the enumeration");
        std::istringstream rest(resume.substr(prefix.size()));
        std::string part;
        std::vector<std::size_t> got;
        while (std::getline(rest, part, ',')) got.push_back(std::stoul(part));
        if (got.size() != n || !std::is_sorted(got.begin(), got.end()) || got.back() >= alpha.size())
            throw std::invalid_argument("malformed resume token");
        idx = got;
    }
    TupleBatch out;
    std::size_t examined = 0;
    for (;;) {
        if (budget && examined == budget) {
            std::ostringstream s;
            s << prefix;
            for (std::size_t i = 0; i < n; ++i) s << (i ? "," : "") << idx[i];
            out.resume = s.str();
            break;
        }
        RootOfUnityTuple t = tuple_of(alpha, idx);
        ++examined;
        if (!(skip_vanishing_subsums && has_vanishing_subsum(t))) out.tuples.push_back(std::move(t));
        if (!advance(idx, alpha.size())) break;
    }
    return out;
}

FiberSolution solve_fiber(const RatFunc& f, const CyclotomicNumber& zeta, unsigned precision_bits) {
    if (f.is_constant()) throw std::invalid_argument("f must be a nonconstant rational function");
    const FieldPtr& K = zeta.field();
    FiberSolution sol;
    sol.numerator = lift_poly(f.num(), K) - KPoly::constant(zeta) * lift_poly(f.den(), K);
    if (sol.numerator.degree() <= 0) {
        sol.g = sol.numerator;
        return sol;
    }
    sol.g = squarefree_part(sol.numerator);
    TowerPtr tg = make_tower(K, sol.g);
    auto roots = complex_roots(*tg, 1, precision_bits);
    std::vector<std::pair<KPoly, TowerPtr>> factors;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        KPoly h = sol.g.degree() == 1 ? sol.g : factor_containing_root(*tg, roots[i].value);
        auto it = std::find_if(factors.begin(), factors.end(), [&](const auto& p) { return p.first == h; });
        if (it == factors.end()) {
            factors.emplace_back(h, make_tower(K, h));
            it = std::prev(factors.end());
        }
        FiberRoot r;
        r.root_index = i;
        r.value = roots[i].value;
        r.factor = h;
        r.tower = it->second;
        r.P = TowerElement::generator(r.tower);
        if (eval_in_tower(f.den(), r.P).is_zero()) continue;
        r.multiplicity = 0;
        for (KPoly q = sol.numerator;; ++r.multiplicity) {
            auto [quo, rem] = divmod(q, h);
            if (!rem.is_zero_poly()) break;
            q = quo;
        }
        sol.roots.push_back(std::move(r));
    }
    return sol;
}

void SearchConfig::validate() const {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    if (N_max == 0) throw std::invalid_argument("N_max must be at least 1");
    if (T_max < 2 || T_max > kMaxSearchOrder)
        throw std::invalid_argument("T_max must lie in [2, " + std::to_string(kMaxSearchOrder) + "]");
    if (precision_bits < 64) throw std::invalid_argument("precision below 64 bits");
    check_precision_request(2 * precision_bits);
    if (f.is_constant()) throw std::invalid_argument("f must be a nonconstant rational function");
    scheme.validate();
}

TupleOutcome search_tuple(const SearchConfig& cfg, const RootOfUnityTuple& t0) {
    RootOfUnityTuple t = normalize(t0);
    TupleOutcome out;
    CyclotomicNumber zeta = sum_of_roots(t);
    FiberSolution sol = solve_fiber(cfg.f, zeta, 128);
    out.roots = sol.roots.size();
    bool vs = has_vanishing_subsum(t);

    std::vector<bool> done(sol.roots.size(), false);
    for (std::size_t i = 0; i < sol.roots.size(); ++i) {
        if (done[i]) continue;
        // Roots sharing a factor share all exact data.
        std::vector<const FiberRoot*> group;
        for (std::size_t k = i; k < sol.roots.size(); ++k)
            if (sol.roots[k].factor == sol.roots[i].factor) {
                group.push_back(&sol.roots[k]);
                done[k] = true;
            }

        const FiberRoot& r0 = *group[0];
        Specialization sp;
        try {
            sp = specialize(cfg.scheme, r0.P);
        } catch (const BadReduction&) {
            out.bad_reduction += group.size();
            continue;
        }
        std::optional<unsigned> candidate;
        bool rejected = false;
        for (const auto& red : good_reductions(*r0.tower, cfg.prescreen_primes)) {
            std::optional<unsigned> o;
            try {
                o = reduced_order(sp, red, cfg.T_max);
            } catch (const BadPrime&) {
                continue;
            }
            if (!o || (candidate && *candidate != *o)) {
                rejected = true;
                break;
            }
            candidate = o;
        }
        if (rejected) {
            out.prescreen_rejected += group.size();
            continue;
        }
        auto order = torsion_order(sp.curve, sp.point, candidate ? *candidate : cfg.T_max);
        if (!order) {
            out.exact_rejected += group.size();
            continue;
        }
        unsigned m = *order;
        QPoly minpoly = minimal_polynomial_over_Q(r0.P);
        for (const FiberRoot* r : group) {
            TorsionCertificate c;
            c.scheme = cfg.scheme;
            c.f = cfg.f;
            c.tuple = t;
            c.zeta = zeta;
            c.g = sol.g;
            c.factor = r->factor;
            c.root_index = r->root_index;
            c.lambda_minpoly = minpoly;
            c.curve_order = m;
            c.identity = is_zero(sp.point.w) ? "y = 0" : "f_m(x) = 0";
            c.tuple_order = tuple_order(t);
            c.T = lcm_u64(m, c.tuple_order);
            c.degree = r->tower->absolute_degree();
            c.relative_degree = r->tower->relative_degree();
            c.vanishing_subsum = vs;
            c.precision_bits = cfg.precision_bits;
            Betti b = betti_at(sp, *r->tower, r->value, cfg.precision_bits, m);
            if (!b.rational || den_lcm(b.r1, b.r2) != m)
                throw VerificationFailure("Betti coordinates of a torsion section are not rational of the right order");
            c.b1 = decimal(b.b.b1, 40);
            c.b2 = decimal(b.b.b2, 40);
            c.b1_rational = b.r1;
            c.b2_rational = b.r2;
            c.betti_error = decimal(b.b.error, 6);
            out.certificates.push_back(std::move(c));
        }
    }
    return out;
}

namespace {

bool cert_less(const TorsionCertificate& a, const TorsionCertificate& b) {
    if (a.tuple.N != b.tuple.N) return a.tuple.N < b.tuple.N;
    if (a.tuple.exponents != b.tuple.exponents) return a.tuple.exponents < b.tuple.exponents;
    return a.root_index < b.root_index;
}

}  // namespace

SearchReport run_search(const SearchConfig& cfg, unsigned jobs, const std::string& resume) {
    cfg.validate();
    if (jobs == 0) throw std::invalid_argument("jobs must be at least 1");
    TupleBatch batch = enumerate_tuples(cfg.n, cfg.N_max, cfg.skip_vanishing_subsums, cfg.mode, cfg.budget, resume);
    SearchReport rep;
    rep.resume = batch.resume;
    rep.tuples = batch.tuples.size();

    std::vector<TupleOutcome> outcomes(batch.tuples.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= batch.tuples.size()) return;
            try {
                outcomes[k] = search_tuple(cfg, batch.tuples[k]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                next = batch.tuples.size();
                return;
            }
        }
    };
    std::size_t nthreads = std::min<std::size_t>(jobs, std::max<std::size_t>(1, batch.tuples.size()));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<TorsionCertificate> all;
    for (auto& o : outcomes) {
        rep.roots += o.roots;
        rep.bad_reduction += o.bad_reduction;
        rep.prescreen_rejected += o.prescreen_rejected;
        rep.exact_rejected += o.exact_rejected;
        for (auto& c : o.certificates) all.push_back(std::move(c));
    }
    std::sort(all.begin(), all.end(), cert_less);
    for (auto& c : all) {
        if (cfg.dedupe_by_zeta) {
            auto dup = std::find_if(rep.certificates.begin(), rep.certificates.end(), [&](const TorsionCertificate& k) {
                auto [a, b] = common_field(k.zeta, c.zeta);
                return k.root_index == c.root_index && a == b;
            });
            if (dup != rep.certificates.end()) {
                rep.collapsed.emplace_back(to_string(c.tuple), to_string(dup->tuple));
                continue;
            }
        }
        rep.largest_T = std::max(rep.largest_T, c.T);
        rep.certificates.push_back(std::move(c));
    }
    return rep;
}

CertifyResult certify(const TorsionCertificate& c) {
    CertifyResult res;
    auto fail = [&](std::string why) {
        res.pass = false;
        res.failures.push_back(std::move(why));
    };
    try {
        const RootOfUnityTuple& t = c.tuple;
        if (t.n() == 0 || t.N == 0) {
            fail("empty tuple");
            return res;
        }
        CyclotomicNumber sum = sum_of_roots(t);
        auto [s, z] = common_field(sum, c.zeta);
        if (!(s == z)) fail("zeta differs from the sum of the tuple; residue " + to_string(z - s));
        if (c.zeta.N() != t.N) fail("zeta is not recorded in Q(zeta_N) for the tuple's N");
        std::uint64_t order = tuple_order(t);
        if (order != t.N) fail("tuple is not normalized: order " + std::to_string(order) + ", N " + std::to_string(t.N));
        if (c.tuple_order != order)
            fail("tuple order " + std::to_string(c.tuple_order) + " recorded, " + std::to_string(order) + " computed");
        if (has_vanishing_subsum(t) != c.vanishing_subsum) fail("vanishing-subsum flag is wrong");
        if (!res.pass) return res;

        const FieldPtr& K = c.zeta.field();
        if (c.f.is_constant()) {
            fail("f is constant");
            return res;
        }
        KPoly num = lift_poly(c.f.num(), K) - KPoly::constant(c.zeta) * lift_poly(c.f.den(), K);
        if (num.degree() <= 0 || !(squarefree_part(num) == c.g)) {
            fail("g is not the squarefree part of num(f) - zeta den(f)");
            return res;
        }
        if (c.factor.degree() < 1 || !(c.factor.lead() == one_like(c.zeta))) {
            fail("factor is not monic of positive degree");
            return res;
        }
        KPoly rem = c.g % c.factor;
        if (!rem.is_zero_poly()) {
            fail("factor does not divide g");
            return res;
        }
        TowerPtr tg = make_tower(K, c.g);
        TowerPtr th = make_tower(K, c.factor);
        if (c.factor.degree() > 1 && !irreducibility_prime(*th, 64)) {
            auto roots = complex_roots(*th, 1, 128);
            if (!(factor_containing_root(*tg, roots[0].value) == c.factor)) fail("factor is reducible");
        }
        TowerElement P = TowerElement::generator(th);
        TowerElement gP = eval_in_tower(c.g, P);
        if (!gP.is_zero()) fail("g(P) = " + to_string(gP));
        if (eval_in_tower(c.f.den(), P).is_zero()) fail("P is a pole of f");
        if (!(minimal_polynomial_over_Q(P) == c.lambda_minpoly)) fail("minimal polynomial of lambda does not match");

        Specialization sp;
        try {
            sp = specialize(c.scheme, P);
        } catch (const BadReduction& e) {
            fail(e.what());
            return res;
        }
        unsigned m = c.curve_order;
        if (m < 2 || m > kMaxSearchOrder) {
            fail("curve order out of range");
            return res;
        }
        bool y_zero = is_zero(sp.point.w);
        auto fv = division_values(sp.curve, sp.point.x, m);
        if (!killed_by(fv, y_zero, m)) {
            std::string r = "psi_" + std::to_string(m) + "(x(P)) != 0; f_" + std::to_string(m) + "(x(P)) = " + to_string(fv[m]);
            if (m % 2 == 0) r += ", y = " + to_string(sp.point.w) + " * sqrt(" + to_string(sp.point.v) + ")";
            fail(r);
        }
        for (auto d : divisors(m))
            if (d < m && d > 1 && killed_by(fv, y_zero, d)) fail("P is already killed by the proper divisor " + std::to_string(d));
        std::string identity = y_zero ? "y = 0" : "f_m(x) = 0";
        if (c.identity != identity) fail("identity recorded as '" + c.identity + "', expected '" + identity + "'");
        if (c.T != lcm_u64(m, order)) fail("T is not lcm(curve order, tuple order)");
        if (c.degree != th->absolute_degree())
            fail("degree " + std::to_string(c.degree) + " recorded, " + std::to_string(th->absolute_degree()) + " computed");
        if (c.relative_degree != th->relative_degree()) fail("relative degree does not match");
        if (!res.pass) return res;

        // Betti numerics at doubled precision.
        unsigned bits = 2 * c.precision_bits;
        Complex target;
        {
            PrecisionScope scope(bits + kGuardBits);
            auto roots = complex_roots(*tg, 1, bits);
            if (c.root_index >= roots.size()) {
                fail("root index out of range");
                return res;
            }
            target = roots[c.root_index].value;
        }
        Betti b = betti_at(sp, *th, target, bits, m);
        if (!b.rational) {
            fail("Betti coordinates are not rational with denominator <= " + std::to_string(m));
        } else {
            if (b.r1 != c.b1_rational || b.r2 != c.b2_rational)
                fail("Betti rationals " + to_string(b.r1) + ", " + to_string(b.r2) + " recomputed");
            if (den_lcm(b.r1, b.r2) != m) fail("Betti denominators do not give the curve order");
            PrecisionScope scope(bits + kGuardBits);
            Real tol("1e-20");
            if (abs(Real(c.b1) - b.b.b1) > tol || abs(Real(c.b2) - b.b.b2) > tol)
                fail("recorded Betti decimals differ from the recomputation");
        }
    } catch (const std::exception& e) {
        fail(std::string("exception: ") + e.what());
    }
    return res;
}

std::string to_string(const RootOfUnityTuple& t) {
    std::ostringstream s;
    s << "N=" << t.N << " [";
    for (std::size_t i = 0; i < t.n(); ++i) s << (i ? " " : "") << t.exponents[i];
    s << "]";
    return s.str();
}

std::string to_string(const CyclotomicNumber& z) {
    std::ostringstream s;
    bool any = false;
    const auto& c = z.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (sgn(c[i]) == 0) continue;
        Rational a = c[i];
        if (any) s << (sgn(a) < 0 ? " - " : " + ");
        else if (sgn(a) < 0) s << "-";
        a = abs(a);
        any = true;
        if (i == 0) {
            s << to_string(a);
            continue;
        }
        if (a != 1) s << to_string(a) << "*";
        s << "z" << z.N();
        if (i > 1) s << "^" << i;
    }
    return any ? s.str() : "0";
}

std::string to_string(const TowerElement& z) {
    const auto& c = z.rep().coeffs();
    if (c.empty()) return "0";
    std::ostringstream s;
    bool any = false;
    for (std::size_t l = 0; l < c.size(); ++l) {
        if (c[l].is_zero()) continue;
        if (any) s << " + ";
        any = true;
        if (l == 0) {
            s << "(" << to_string(c[l]) << ")";
        } else {
            s << "(" << to_string(c[l]) << ")*y";
            if (l > 1) s << "^" << l;
        }
    }
    return s.str();
}

namespace {

using nlohmann::json;

json rationals(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& q : v) a.push_back(to_string(q));
    return a;
}

std::vector<Rational> rationals_from(const json& a) {
    std::vector<Rational> out;
    for (const auto& s : a) out.push_back(parse_rational(s.get<std::string>()));
    return out;
}

json cyclo_json(const CyclotomicNumber& z) { return rationals(z.coeffs()); }

CyclotomicNumber cyclo_from(const json& a, const FieldPtr& K) {
    auto c = rationals_from(a);
    if (c.size() != K->degree()) throw std::invalid_argument("cyclotomic coefficient vector has the wrong length");
    return CyclotomicNumber(K, std::move(c));
}

json kpoly_json(const KPoly& p) {
    json a = json::array();
    for (const auto& c : p.coeffs()) a.push_back(cyclo_json(c));
    return a;
}

KPoly kpoly_from(const json& a, const FieldPtr& K) {
    std::vector<CyclotomicNumber> c;
    for (const auto& x : a) c.push_back(cyclo_from(x, K));
    return KPoly(std::move(c), CyclotomicNumber(K));
}

template <class T>
T get(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field: ") + key);
    return j.at(key).get<T>();
}

}  // namespace

json scheme_to_json(const EllipticScheme& s) {
    return json{{"a", to_string(s.a)}, {"b", to_string(s.b)}, {"c", to_string(s.c)}, {"section_x", to_string(s.section_x)}};
}

EllipticScheme scheme_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "legendre") throw std::invalid_argument("unknown scheme name");
        return EllipticScheme::legendre();
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "a" && it.key() != "b" && it.key() != "c" && it.key() != "section_x")
            throw std::invalid_argument("unknown scheme field: " + it.key());
    return EllipticScheme::from_strings(get<std::string>(j, "a"), get<std::string>(j, "b"), get<std::string>(j, "c"),
                                        get<std::string>(j, "section_x"));
}

json to_json(const TorsionCertificate& c) {
    json j;
    j["schema"] = kCertificateSchema;
    j["scheme"] = scheme_to_json(c.scheme);
    j["f"] = to_string(c.f);
    j["tuple"] = {{"N", c.tuple.N}, {"exponents", c.tuple.exponents}};
    j["zeta"] = cyclo_json(c.zeta);
    j["g"] = kpoly_json(c.g);
    j["factor"] = kpoly_json(c.factor);
    j["root_index"] = c.root_index;
    j["lambda_minpoly"] = rationals(c.lambda_minpoly.coeffs());
    j["curve_order"] = c.curve_order;
    j["identity"] = c.identity;
    j["tuple_order"] = c.tuple_order;
    j["T"] = c.T;
    j["degree"] = c.degree;
    j["relative_degree"] = c.relative_degree;
    j["vanishing_subsum"] = c.vanishing_subsum;
    j["betti"] = {{"precision_bits", c.precision_bits},
                  {"b1", c.b1},
                  {"b2", c.b2},
                  {"b1_rational", to_string(c.b1_rational)},
                  {"b2_rational", to_string(c.b2_rational)},
                  {"error", c.betti_error}};
    return j;
}

TorsionCertificate certificate_from_json(const json& j) {
    if (get<std::string>(j, "schema") != kCertificateSchema) throw std::invalid_argument("unsupported certificate schema");
    TorsionCertificate c;
    c.scheme = scheme_from_json(j.at("scheme"));
    c.f = parse_ratfunc(get<std::string>(j, "f"));
    const json& t = j.at("tuple");
    c.tuple.N = get<std::uint64_t>(t, "N");
    c.tuple.exponents = get<std::vector<std::uint64_t>>(t, "exponents");
    if (c.tuple.N == 0) throw std::invalid_argument("tuple N must be positive");
    for (auto e : c.tuple.exponents)
        if (e >= c.tuple.N) throw std::invalid_argument("tuple exponent out of range");
    FieldPtr K = CyclotomicField::get(c.tuple.N);
    c.zeta = cyclo_from(j.at("zeta"), K);
    c.g = kpoly_from(j.at("g"), K);
    c.factor = kpoly_from(j.at("factor"), K);
    c.root_index = get<std::size_t>(j, "root_index");
    c.lambda_minpoly = QPoly(rationals_from(j.at("lambda_minpoly")), Rational(0));
    c.curve_order = get<unsigned>(j, "curve_order");
    c.identity = get<std::string>(j, "identity");
    c.tuple_order = get<std::uint64_t>(j, "tuple_order");
    c.T = get<std::uint64_t>(j, "T");
    c.degree = get<std::size_t>(j, "degree");
    c.relative_degree = get<std::size_t>(j, "relative_degree");
    c.vanishing_subsum = get<bool>(j, "vanishing_subsum");
    const json& b = j.at("betti");
    c.precision_bits = get<unsigned>(b, "precision_bits");
    c.b1 = get<std::string>(b, "b1");
    c.b2 = get<std::string>(b, "b2");
    c.b1_rational = parse_rational(get<std::string>(b, "b1_rational"));
    c.b2_rational = parse_rational(get<std::string>(b, "b2_rational"));
    c.betti_error = get<std::string>(b, "error");
    return c;
}

json to_json(const SearchConfig& c) {
    return json{{"schema", kConfigSchema},
                {"scheme", scheme_to_json(c.scheme)},
                {"f", to_string(c.f)},
                {"n", c.n},
                {"N_max", c.N_max},
                {"T_max", c.T_max},
                {"precision_bits", c.precision_bits},
                {"prescreen_primes", c.prescreen_primes},
                {"dedupe", c.dedupe_by_zeta ? "zeta" : "none"},
                {"skip_vanishing_subsums", c.skip_vanishing_subsums},
                {"tuple_mode", c.mode == TupleMode::roots_of_N_max ? "roots_of_N_max" : "orders_up_to"},
                {"budget", c.budget}};
}

SearchConfig search_config_from_json(const json& j) {
    static const std::set<std::string> known{"schema", "scheme", "f", "n", "N_max", "T_max", "precision_bits",
                                             "prescreen_primes", "dedupe", "skip_vanishing_subsums", "tuple_mode",
                                             "budget"};
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw std::invalid_argument("unknown config field: " + it.key());
    SearchConfig c;
    if (j.contains("schema") && j.at("schema") != kConfigSchema) throw std::invalid_argument("unsupported config schema");
    if (j.contains("scheme")) c.scheme = scheme_from_json(j.at("scheme"));
    if (j.contains("f")) c.f = parse_ratfunc(j.at("f").get<std::string>());
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("N_max")) c.N_max = j.at("N_max").get<std::uint64_t>();
    if (j.contains("T_max")) c.T_max = j.at("T_max").get<unsigned>();
    if (j.contains("precision_bits")) c.precision_bits = j.at("precision_bits").get<unsigned>();
    if (j.contains("prescreen_primes")) c.prescreen_primes = j.at("prescreen_primes").get<std::size_t>();
    if (j.contains("dedupe")) {
        auto d = j.at("dedupe").get<std::string>();
        if (d != "zeta" && d != "none") throw std::invalid_argument("dedupe must be \"zeta\" or \"none\"");
        c.dedupe_by_zeta = d == "zeta";
    }
    if (j.contains("skip_vanishing_subsums")) c.skip_vanishing_subsums = j.at("skip_vanishing_subsums").get<bool>();
    if (j.contains("tuple_mode")) {
        auto m = j.at("tuple_mode").get<std::string>();
        if (m == "roots_of_N_max")
            c.mode = TupleMode::roots_of_N_max;
        else if (m == "orders_up_to")
            c.mode = TupleMode::orders_up_to;
        else
            throw std::invalid_argument("tuple_mode must be roots_of_N_max or orders_up_to");
    }
    if (j.contains("budget")) c.budget = j.at("budget").get<std::size_t>();
    c.validate();
    return c;
}

std::string index_csv(const std::vector<TorsionCertificate>& certs) {
    std::ostringstream s;
    s << "# " << "ctorsion.index.v1\n";
    s << "N,exponents,lambda_minpoly,curve_order,tuple_order,T,degree\n";
    for (const auto& c : certs) {
        s << c.tuple.N << ",";
        for (std::size_t i = 0; i < c.tuple.n(); ++i) s << (i ? " " : "") << c.tuple.exponents[i];
        s << ",\"" << to_string(c.lambda_minpoly, "x") << "\"," << c.curve_order << "," << c.tuple_order << "," << c.T << ","
          << c.degree << "\n";
    }
    return s.str();
}

}  // namespace tors
