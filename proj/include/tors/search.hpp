#pragma once

#include "tors/analytic.hpp"
#include "tors/scheme.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tors {

// roots_of_N_max: entries are N_max-th roots of unity.
// orders_up_to: entries are roots of unity of any order <= N_max.
enum class TupleMode { roots_of_N_max, orders_up_to };

struct TupleBatch {
    std::vector<RootOfUnityTuple> tuples;
    // Set when the budget ran out; pass it back to continue.
    std::optional<std::string> resume;
};

// Multisets of size n over the alphabet of the mode, each normalized so that N
// is the tuple order. budget = 0 means unlimited.
TupleBatch enumerate_tuples(std::size_t n, std::uint64_t N_max, bool skip_vanishing_subsums,
                            TupleMode mode = TupleMode::roots_of_N_max, std::size_t budget = 0,
                            const std::string& resume = "");

struct FiberRoot {
    std::size_t root_index = 0;  // into the roots of g under zeta -> exp(2 pi i/N)
    Complex value;
    KPoly factor;                // monic irreducible factor of g over Q(zeta_N) with this root
    unsigned multiplicity = 1;   // of the factor in the undeflated polynomial
    TowerPtr tower;              // Q(zeta_N)[y]/(factor)
    TowerElement P;              // the generator
};

struct FiberSolution {
    KPoly numerator;  // num(f) - zeta den(f)
    KPoly g;          // its squarefree part, monic
    std::vector<FiberRoot> roots;
};

// Throws std::invalid_argument for constant f.
FiberSolution solve_fiber(const RatFunc& f, const CyclotomicNumber& zeta, unsigned precision_bits = 128);

struct SearchConfig {
    EllipticScheme scheme = EllipticScheme::legendre();
    RatFunc f = RatFunc::lambda();
    std::size_t n = 2;
    std::uint64_t N_max = 8;
    unsigned T_max = 64;
    unsigned precision_bits = 256;
    std::size_t prescreen_primes = 3;
    bool dedupe_by_zeta = true;
    bool skip_vanishing_subsums = false;
    TupleMode mode = TupleMode::roots_of_N_max;
    std::size_t budget = 0;

    void validate() const;
};

// Reduction primes start above this, so every order up to T_max is prime to q.
constexpr unsigned kMaxSearchOrder = 999;

struct TorsionCertificate {
    EllipticScheme scheme;
    RatFunc f;
    RootOfUnityTuple tuple;
    CyclotomicNumber zeta;
    KPoly g;       // squarefree fibre polynomial over Q(zeta_N)
    KPoly factor;  // irreducible factor carrying P
    std::size_t root_index = 0;
    QPoly lambda_minpoly;
    unsigned curve_order = 0;
    // "y = 0" when the order is 2 through the y-coordinate, else "f_m(x) = 0".
    std::string identity;
    std::uint64_t tuple_order = 1;
    std::uint64_t T = 1;
    std::size_t degree = 0;           // [Q(P, eps) : Q]
    std::size_t relative_degree = 0;  // [Q(P, eps) : Q(eps)]
    bool vanishing_subsum = false;
    unsigned precision_bits = 256;
    std::string b1, b2;  // decimals
    Rational b1_rational, b2_rational;
    std::string betti_error;
};

// One certificate per fibre root of one tuple whose section is torsion of order
// at most T_max. Bad-reduction parameters are skipped.
struct TupleOutcome {
    std::vector<TorsionCertificate> certificates;
    std::size_t roots = 0, bad_reduction = 0, prescreen_rejected = 0, exact_rejected = 0;
};
TupleOutcome search_tuple(const SearchConfig& cfg, const RootOfUnityTuple& t);

struct SearchReport {
    std::vector<TorsionCertificate> certificates;
    std::optional<std::string> resume;
    std::size_t tuples = 0, roots = 0, bad_reduction = 0, prescreen_rejected = 0, exact_rejected = 0;
    // Certificates dropped by zeta deduplication: (dropped tuple, kept tuple).
    std::vector<std::pair<std::string, std::string>> collapsed;
    // Largest certified T; the list cannot change for T_max at or above it
    // unless a new order appears.
    std::uint64_t largest_T = 0;
};

// Sorted by (N, exponents, root index). jobs >= 1.
SearchReport run_search(const SearchConfig& cfg, unsigned jobs = 1, const std::string& resume = "");

struct CertifyResult {
    bool pass = true;
    std::vector<std::string> failures;
};

// Re-checks every field exactly; the Betti rationals are re-derived at twice
// the recorded precision.
CertifyResult certify(const TorsionCertificate& c);

std::string to_string(const RootOfUnityTuple& t);
std::string to_string(const CyclotomicNumber& z);
std::string to_string(const TowerElement& z);

extern const char* const kCertificateSchema;
extern const char* const kConfigSchema;

nlohmann::json to_json(const TorsionCertificate& c);
TorsionCertificate certificate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchConfig& c);
// Unknown keys are rejected. The scheme is either "legendre", an object with
// a, b, c, section_x strings, or absent (Legendre with section abscissa 2).
SearchConfig search_config_from_json(const nlohmann::json& j);

nlohmann::json scheme_to_json(const EllipticScheme& s);
EllipticScheme scheme_from_json(const nlohmann::json& j);

// Header line plus one row per certificate.
std::string index_csv(const std::vector<TorsionCertificate>& certs);

}  // namespace tors
