#include "tors/counting.hpp"

#include "tors/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tors {

Real log_height(const Rational& q) { return log(real_from(Rational(rational_height(q)))); }

Real log_height_of_minpoly(const QPoly& p, unsigned precision_bits) {
    if (p.degree() < 1) throw std::invalid_argument("minimal polynomial of positive degree expected");
    QPoly pp = primitive_part(p);
    PrecisionScope scope(precision_bits + kGuardBits);
    Real logM = log(abs(real_from(pp.lead())));
    for (const auto& r : certified_roots(pp, precision_bits)) {
        Real m = abs(r.value);
        if (m > 1) logM += log(m);
    }
    return logM / Real(pp.degree());
}

DeltaDerivation delta_derivation(const Real& a, const std::vector<Real>& bad_heights, unsigned K_degree) {
    if (!(a > 0)) throw std::domain_error("height bound a must be positive");
    if (K_degree == 0) throw std::invalid_argument("K_degree must be positive");
    DeltaDerivation d;
    d.a = a;
    d.l = bad_heights.size() + 1;
    d.K_degree = K_degree;
    d.max_bad_height = 0;
    for (const auto& h : bad_heights) {
        if (h < 0) throw std::invalid_argument("heights are nonnegative");
        if (h > d.max_bad_height) d.max_bad_height = h;
    }
    d.exponent = Real(2 * d.l * K_degree) * (a + d.max_bad_height + log(Real(2)));
    d.delta = exp(-d.exponent);
    return d;
}

Real compute_delta(const Real& a, const std::vector<Real>& bad_heights, unsigned K_degree) {
    return delta_derivation(a, bad_heights, K_degree).delta;
}

CompactSetSpec CompactSetSpec::make(const Real& delta, std::vector<Complex> bad) {
    CompactSetSpec s;
    s.delta = delta;
    s.bad = std::move(bad);
    s.norm_bound = Real(1) / delta;
    s.validate();
    return s;
}

void CompactSetSpec::validate() const {
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    if (!(norm_bound > 0)) throw std::invalid_argument("norm bound must be positive");
    if (!(annulus_lo > 0) || annulus_hi < annulus_lo) throw std::invalid_argument("bad annulus");
}

CompactSetSpec default_compact_set(const EllipticScheme& s, const Real& a, unsigned precision_bits) {
    BadSet B = bad_reduction_set(s, precision_bits);
    std::vector<Real> heights;
    std::vector<Complex> pts;
    for (const auto& b : B.points) {
        heights.push_back(log_height_of_minpoly(b.minpoly, precision_bits));
        pts.push_back(b.root.value);
    }
    return CompactSetSpec::make(compute_delta(a, heights, 1), std::move(pts));
}

namespace {

void require_decided(const Real& x, const Real& bound, const Real& err, const char* what) {
    if (abs(x - bound) <= err) throw PrecisionError(std::string("needs more precision: ") + what + " is within the error band");
}

}  // namespace

bool membership_in_S(const CompactSetSpec& spec, const RatFunc& f, const Complex& lambda, const std::vector<Complex>& eps,
                     const Real& error, const Real& fibre_tol) {
    spec.validate();
    Real nl = abs(lambda);
    require_decided(nl, spec.norm_bound, error, "|lambda| against 1/delta");
    if (nl > spec.norm_bound) return false;
    for (const auto& b : spec.bad) {
        Real d = abs(lambda - b);
        require_decided(d, spec.delta, error, "distance to a bad point");
        if (d < spec.delta) return false;
    }
    Complex sum;
    for (const auto& e : eps) {
        Real m = abs(e);
        require_decided(m, spec.annulus_lo, error, "|x_i| against the inner radius");
        require_decided(m, spec.annulus_hi, error, "|x_i| against the outer radius");
        if (m < spec.annulus_lo || m > spec.annulus_hi) return false;
        sum += e;
    }
    Complex fl;
    try {
        fl = eval_complex(f, lambda);
    } catch (const std::domain_error&) {
        return false;
    }
    return abs(fl - sum) <= fibre_tol;
}

Rational conjugate_fraction_in_S(const CompactSetSpec& spec, const RatFunc& f, const TowerElement& P,
                                 const RootOfUnityTuple& eps, unsigned precision_bits) {
    const FieldTower& t = *P.tower();
    std::uint64_t N = t.N();
    if (N % eps.N != 0) throw std::invalid_argument("tuple field is not contained in the tower base");
    std::uint64_t scale = N / eps.N;
    PrecisionScope scope(precision_bits + kGuardBits);
    Real err = two_pow(-static_cast<long>(precision_bits) + 8);
    std::size_t in = 0, total = 0;
    for (auto j : t.base()->units()) {
        std::vector<Complex> e;
        for (auto k : eps.exponents)
            e.push_back(expi2pi(real_from(Rational(static_cast<long>((k * scale * j) % N), static_cast<long>(N)))));
        for (const auto& r : complex_roots(t, j, precision_bits)) {
            Complex lam = embed(P, j, r.value, precision_bits);
            ++total;
            if (membership_in_S(spec, f, lam, e, err, two_pow(-static_cast<long>(precision_bits) / 2))) ++in;
        }
    }
    if (total == 0) throw std::logic_error("tower without embeddings");
    Rational r(static_cast<long>(in), static_cast<long>(total));
    r.canonicalize();
    return r;
}

namespace {

unsigned height_of(const Rational& q) { return static_cast<unsigned>(rational_height(q).get_ui()); }

RootOfUnityTuple tuple_of_fractions(const std::vector<Rational>& a) {
    std::uint64_t N = 1;
    for (const auto& x : a) N = lcm_u64(N, x.get_den().get_ui());
    std::vector<std::int64_t> e;
    for (const auto& x : a) e.push_back(Rational(x * static_cast<long>(N)).get_num().get_si());
    return make_tuple(a.size(), N, std::move(e));
}

std::vector<Complex> eps_of(const std::vector<Rational>& a) {
    std::vector<Complex> e;
    for (const auto& x : a) e.push_back(expi2pi(real_from(x)));
    return e;
}

// Numeric fibre f(lambda) = sum exp(2 pi i a) at the current precision.
std::vector<Complex> numeric_fibre(const RatFunc& f, const std::vector<Rational>& a, unsigned bits) {
    const QPoly &num = f.num(), &den = f.den();
    if (num.degree() == 1 && den.degree() == 0) {
        Complex s;
        for (const auto& e : eps_of(a)) s += e;
        return {(real_from(den[0]) * s - Complex(real_from(num[0]))) / Complex(real_from(num[1]))};
    }
    int D = std::max(num.degree(), den.degree());
    auto coeffs_at = [&](unsigned) {
        Complex s;
        for (const auto& e : eps_of(a)) s += e;
        std::vector<Complex> c;
        for (int k = 0; k <= D; ++k) c.push_back(Complex(real_from(num[k])) - real_from(den[k]) * s);
        return c;
    };
    auto c = coeffs_at(bits);
    // A vanishing top coefficient is decided exactly.
    while (!c.empty() && abs(c.back()) < two_pow(-static_cast<long>(bits) / 2)) {
        auto z = sum_of_roots(tuple_of_fractions(a));
        int k = static_cast<int>(c.size()) - 1;
        auto top = CyclotomicNumber::rational(z.field(), num[k]) - CyclotomicNumber::rational(z.field(), den[k]) * z;
        if (!top.is_zero()) break;
        c.pop_back();
        D = static_cast<int>(c.size()) - 1;
    }
    if (c.size() <= 1) return {};
    std::vector<Complex> out;
    for (const auto& r : certified_roots([&](unsigned wb) {
             auto v = coeffs_at(wb);
             v.resize(c.size());
             return v;
         },
                                         bits))
        out.push_back(r.value);
    return out;
}

std::size_t orderings(const std::vector<std::size_t>& idx) {
    // n! / prod(multiplicity!), kept integral at every step
    std::size_t r = 1, run = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        run = (k > 0 && idx[k] == idx[k - 1]) ? run + 1 : 1;
        r = r * (k + 1) / run;
    }
    return r;
}

bool advance(std::vector<std::size_t>& idx, std::size_t k) {
    std::size_t i = idx.size();
    while (i > 0 && idx[i - 1] == k - 1) --i;
    if (i == 0) return false;
    std::size_t v = idx[i - 1] + 1;
    for (std::size_t j = i - 1; j < idx.size(); ++j) idx[j] = v;
    return true;
}

}  // namespace

CountReport count_rational_points(const CountConfig& cfg) {
    if (cfg.n == 0) throw std::invalid_argument("n must be at least 1");
    if (cfg.T_max == 0) throw std::invalid_argument("T_max must be at least 1");
    if (cfg.cap > kCountCap || cfg.T_max > cfg.cap)
        throw std::invalid_argument("T_max exceeds the configured cap " + std::to_string(std::min(cfg.cap, kCountCap)));
    if (cfg.f.is_constant()) throw std::invalid_argument("f must be a nonconstant rational function");
    cfg.scheme.validate();
    unsigned bits = cfg.precision_bits;
    if (bits < 64) throw std::invalid_argument("precision below 64 bits");
    check_precision_request(2 * bits);
    CompactSetSpec spec = cfg.spec ? *cfg.spec : default_compact_set(cfg.scheme);
    const unsigned T = cfg.T_max;

    std::vector<Rational> letters;
    for (unsigned q = 1; q <= T; ++q)
        for (unsigned p = 0; p < q; ++p)
            if (std::gcd(p, q) == 1 && (p > 0 || q == 1)) letters.emplace_back(p, q);

    CountReport rep;
    PrecisionScope scope(bits + kGuardBits);
    Real err = two_pow(-static_cast<long>(bits) + 8);
    Real tol("1e-20");
    std::vector<std::size_t> idx(cfg.n, 0);
    do {
        ++rep.multisets;
        std::vector<Rational> a;
        unsigned ha = 1;
        for (auto i : idx) {
            a.push_back(letters[i]);
            ha = std::max(ha, height_of(letters[i]));
        }
        std::vector<Complex> eps = eps_of(a);
        for (const Complex& lam : numeric_fibre(cfg.f, a, bits)) {
            if (!membership_in_S(spec, cfg.f, lam, eps, err, two_pow(-static_cast<long>(bits) / 2))) {
                ++rep.outside_S;
                continue;
            }
            ComplexCurve E = fibre_at(cfg.scheme, lam);
            ComplexPoint P;
            try {
                P = section_at(cfg.scheme, lam);
            } catch (const std::domain_error&) {
                continue;
            }
            PeriodLattice L = period_lattice(E, bits);
            EllipticLog lg = elliptic_log(E, P, L, bits);
            if (lg.infinity) continue;
            BettiCoords b = betti_coordinates(lg.z, L);
            auto r1 = rational_reconstruct(b.b1, T, tol);
            auto r2 = rational_reconstruct(b.b2, T, tol);
            if (!r1 || !r2) continue;
            unsigned H = std::max({ha, height_of(*r1), height_of(*r2)});
            if (H > T) continue;
            unsigned m = static_cast<unsigned>(Integer(lcm(Integer(r1->get_den()), Integer(r2->get_den()))).get_ui());
            if (m < 2) continue;
            ++rep.numeric_candidates;

            // Exact recertification.
            RootOfUnityTuple t = tuple_of_fractions(a);
            bool ok = false;
            CountedPoint cp;
            try {
                FiberSolution sol = solve_fiber(cfg.f, sum_of_roots(t), bits);
                const FiberRoot* best = nullptr;
                for (const auto& r : sol.roots)
                    if (!best || abs(r.value - lam) < abs(best->value - lam)) best = &r;
                if (best && abs(best->value - lam) < tol) {
                    Specialization sp = specialize(cfg.scheme, best->P);
                    auto o = torsion_order(sp.curve, sp.point, m);
                    if (o && *o == m) {
                        cp.lambda_minpoly = minimal_polynomial_over_Q(best->P);
                        ok = true;
                    }
                }
                if (ok) {
                    PrecisionScope hi(2 * bits + kGuardBits);
                    auto lams = numeric_fibre(cfg.f, a, 2 * bits);
                    const Complex* near = nullptr;
                    for (const auto& l2 : lams)
                        if (!near || abs(l2 - lam) < abs(*near - lam)) near = &l2;
                    ok = near && membership_in_S(spec, cfg.f, *near, eps_of(a), two_pow(-2 * static_cast<long>(bits) + 8),
                                                 two_pow(-static_cast<long>(bits)));
                }
            } catch (const BadReduction&) {
                ok = false;
            }
            if (!ok) {
                ++rep.recert_failed;
                continue;
            }
            cp.a = a;
            cp.orderings = orderings(idx);
            cp.b1 = *r1;
            cp.b2 = *r2;
            cp.height = H;
            cp.curve_order = m;
            cp.vanishing_subsum = has_vanishing_subsum(t);
            cp.lambda = decimal(lam, 30);
            rep.points.push_back(std::move(cp));
        }
    } while (advance(idx, letters.size()));

    for (unsigned k = 1; k <= T; ++k) {
        std::uint64_t no = 0, with = 0;
        for (const auto& p : rep.points)
            if (p.height <= k) (p.vanishing_subsum ? with : no) += p.orderings;
        rep.T.push_back(k);
        rep.N_nosubsum.push_back(no);
        rep.N_subsum.push_back(with);
    }
    std::vector<std::pair<double, double>> xy;
    for (std::size_t i = 0; i < rep.T.size(); ++i)
        if (rep.N_nosubsum[i] > 0) xy.emplace_back(std::log(double(rep.T[i])), std::log(double(rep.N_nosubsum[i])));
    if (xy.size() >= 2) {
        double mx = 0, my = 0;
        for (auto [x, y] : xy) {
            mx += x;
            my += y;
        }
        mx /= double(xy.size());
        my /= double(xy.size());
        double sxx = 0, sxy = 0;
        for (auto [x, y] : xy) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        rep.slope = sxy / sxx;
        rep.intercept = my - rep.slope * mx;
    }
    rep.slope_warning = rep.slope >= kSlopeThreshold;
    return rep;
}

std::string count_csv(const CountReport& r) {
    std::ostringstream s;
    s << "# ctorsion.count.v1\n";
    s << "T,N_nosubsum,N_subsum\n";
    for (std::size_t i = 0; i < r.T.size(); ++i) s << r.T[i] << "," << r.N_nosubsum[i] << "," << r.N_subsum[i] << "\n";
    return s.str();
}

nlohmann::json to_json(const CountReport& r) {
    nlohmann::json j;
    j["schema"] = "ctorsion.count-report.v1";
    j["T"] = r.T;
    j["N_nosubsum"] = r.N_nosubsum;
    j["N_subsum"] = r.N_subsum;
    j["slope"] = r.slope;
    j["intercept"] = r.intercept;
    j["slope_threshold"] = kSlopeThreshold;
    j["slope_warning"] = r.slope_warning;
    j["multisets"] = r.multisets;
    j["outside_S"] = r.outside_S;
    j["numeric_candidates"] = r.numeric_candidates;
    j["recert_failed"] = r.recert_failed;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : r.points) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : p.a) a.push_back(to_string(x));
        pts.push_back({{"a", a},
                       {"orderings", p.orderings},
                       {"b1", to_string(p.b1)},
                       {"b2", to_string(p.b2)},
                       {"height", p.height},
                       {"curve_order", p.curve_order},
                       {"vanishing_subsum", p.vanishing_subsum},
                       {"lambda", p.lambda},
                       {"lambda_minpoly", to_string(p.lambda_minpoly, "x")}});
    }
    j["points"] = pts;
    return j;
}

bool phi_bound_holds(std::uint64_t x) {
    if (x == 0) throw std::invalid_argument("x must be positive");
    Integer p = static_cast<unsigned long>(euler_phi(x));
    return 2 * p * p >= Integer(static_cast<unsigned long>(x));
}

DegreeRow degree_row(std::uint64_t curve_order, std::uint64_t tuple_order, std::size_t degree) {
    DegreeRow r;
    r.h = static_cast<unsigned>(curve_order);
    r.T = lcm_u64(curve_order, tuple_order);
    r.degree = degree;
    r.ratio = double(degree) / std::pow(double(r.T), 1.0 / 6.0);
    r.gm_order = r.T / curve_order;
    r.gm_degree = euler_phi(r.gm_order);
    r.gm_bound = std::sqrt(double(r.gm_order) / 2.0);
    r.gm_ok = phi_bound_holds(r.gm_order);
    return r;
}

DegreeReport degree_bound_report(const std::vector<TorsionCertificate>& certs) {
    DegreeReport rep;
    rep.c3 = 1.0 / std::sqrt(2.0);
    for (const auto& c : certs) {
        DegreeRow r = degree_row(c.curve_order, c.tuple_order, c.degree);
        if (r.T != c.T) throw VerificationFailure("certificate T is not lcm(curve order, tuple order)");
        rep.gm_all_ok = rep.gm_all_ok && r.gm_ok;
        rep.c4 = rep.rows.empty() ? r.ratio : std::min(rep.c4, r.ratio);
        rep.rows.push_back(r);
    }
    return rep;
}

nlohmann::json to_json(const DegreeReport& r) {
    nlohmann::json j;
    j["schema"] = "ctorsion.degree-report.v1";
    j["c3"] = r.c3;
    j["c4_calibrated"] = r.c4;
    j["gm_all_ok"] = r.gm_all_ok;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& x : r.rows)
        rows.push_back({{"T", x.T},
                        {"degree", x.degree},
                        {"degree_over_T_sixth", x.ratio},
                        {"h", x.h},
                        {"gm_order", x.gm_order},
                        {"gm_degree", x.gm_degree},
                        {"gm_bound", x.gm_bound},
                        {"gm_ok", x.gm_ok}});
    j["rows"] = rows;
    return j;
}

}  // namespace tors
