#include "cli.hpp"

#include "tors/counting.hpp"
#include "tors/errors.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

namespace tors::cli {

const char* const kToolVersion = "ctorsion 0.1.0";
const char* const kManifestSchema = "ctorsion.manifest.v1";

namespace fs = std::filesystem;
using nlohmann::json;

// Input the user got wrong; exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

namespace {

class ExprParser {
  public:
    ExprParser(const std::string& s, FieldPtr F) : s_(s), F_(std::move(F)) {}

    CyclotomicNumber parse() {
        auto v = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return v;
    }

  private:
    const std::string& s_;
    FieldPtr F_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& m) const {
        throw UsageError("cannot parse \"" + s_ + "\" at offset " + std::to_string(i_) + ": " + m);
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
    std::string digits() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (b == i_) fail("expected a number");
        return s_.substr(b, i_ - b);
    }
    CyclotomicNumber expr() {
        auto v = term();
        for (;;) {
            if (eat('+'))
                v = v + term();
            else if (eat('-'))
                v = v - term();
            else
                return v;
        }
    }
    CyclotomicNumber term() {
        auto v = factor();
        while (eat('*')) v = v * factor();
        return v;
    }
    CyclotomicNumber factor() {
        if (eat('-')) return -factor();
        if (eat('(')) {
            auto v = expr();
            if (!eat(')')) fail("expected ')'");
            return power(v);
        }
        skip();
        if (i_ < s_.size() && s_[i_] == 'z') {
            ++i_;
            std::uint64_t N = std::stoull(digits());
            std::int64_t k = 1;
            if (eat('^')) {
                bool neg = eat('-');
                k = std::stoll(digits());
                if (neg) k = -k;
            }
            std::uint64_t M = F_->N();
            std::int64_t e = ((k % static_cast<std::int64_t>(N)) + static_cast<std::int64_t>(N)) % static_cast<std::int64_t>(N);
            return CyclotomicNumber::zeta(F_, e * static_cast<std::int64_t>(M / N));
        }
        Integer num(digits());
        Integer den(1);
        if (eat('/')) den = Integer(digits());
        if (den == 0) fail("zero denominator");
        Rational q(num, den);
        q.canonicalize();
        return power(CyclotomicNumber::rational(F_, q));
    }
    CyclotomicNumber power(CyclotomicNumber v) {
        if (!eat('^')) return v;
        unsigned long e = std::stoul(digits());
        auto r = CyclotomicNumber::rational(F_, 1);
        for (unsigned long k = 0; k < e; ++k) r = r * v;
        return r;
    }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UsageError("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json(const fs::path& p) {
    try {
        return json::parse(read_file(p));
    } catch (const json::parse_error& e) {
        throw UsageError(p.string() + ": " + e.what());
    }
}

Rational parse_q(const std::string& s) {
    try {
        return parse_rational(s);
    } catch (const std::exception&) {
        throw UsageError("not a rational: \"" + s + "\"");
    }
}

std::optional<unsigned> env_precision() {
    if (std::getenv("TORS_PRECISION_BITS")) return default_precision_bits();
    return std::nullopt;
}

EllipticScheme load_scheme(const fs::path& p) {
    json j = read_json(p);
    if (j.is_object() && j.contains("scheme")) j = j.at("scheme");
    return scheme_from_json(j);
}

// Results and manifest for one invocation. Files are only ever created below dir.
class Run {
  public:
    Run(std::string command, const fs::path& dir) : command_(std::move(command)), dir_(dir), t0_(std::chrono::steady_clock::now()) {
        fs::create_directories(dir_);
    }

    json config = json::object();
    json settings = json::object();

    void input(const fs::path& p) { inputs_.push_back({{"path", p.string()}, {"sha256", sha256_hex(read_file(p))}}); }

    fs::path write(const fs::path& rel, const std::string& content) {
        if (rel.is_absolute() || rel.lexically_normal().string().rfind("..", 0) == 0)
            throw std::logic_error("output path escapes the output directory");
        fs::path p = dir_ / rel;
        fs::create_directories(p.parent_path());
        std::ofstream o(p, std::ios::binary);
        o << content;
        if (!o) throw std::runtime_error("cannot write " + p.string());
        results_.push_back({{"path", rel.generic_string()}, {"sha256", sha256_hex(content)}});
        return p;
    }

    void finish() {
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        json m = {{"schema", kManifestSchema},
                  {"tool_version", kToolVersion},
                  {"command", command_},
                  {"config", config},
                  {"config_hash", sha256_hex(config.dump())},
                  {"inputs", inputs_},
                  {"settings", settings},
                  {"wall_time_s", wall},
                  {"results", results_}};
        std::ofstream o(dir_ / (command_ + ".manifest.json"));
        o << m.dump(2) << "\n";
    }

  private:
    std::string command_;
    fs::path dir_;
    std::chrono::steady_clock::time_point t0_;
    json inputs_ = json::array(), results_ = json::array();
};

std::string dec(const Real& x, int digits = 40) { return decimal(x, digits); }

json complex_json(const Complex& z, int digits = 40) { return {{"re", dec(z.re, digits)}, {"im", dec(z.im, digits)}}; }

std::string cert_name(const TorsionCertificate& c) {
    std::string s = "cert-N" + std::to_string(c.tuple.N) + "-e";
    for (std::size_t i = 0; i < c.tuple.exponents.size(); ++i) s += (i ? "_" : "") + std::to_string(c.tuple.exponents[i]);
    return s + "-r" + std::to_string(c.root_index) + ".json";
}

struct Common {
    std::string out = "ctorsion-out";
    unsigned precision_bits = 0;  // 0: command default
};

void add_common(CLI::App* sub, Common& c, bool precision = true) {
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    if (precision) sub->add_option("--precision-bits", c.precision_bits, "working precision in bits")->check(CLI::Range(64u, 1u << 20));
}

unsigned pick_precision(unsigned flag, unsigned fallback) {
    if (flag) return flag;
    if (auto e = env_precision()) return *e;
    return fallback;
}

int cmd_search(const Common& c, const std::string& config_path, const std::string& resume, unsigned jobs,
               std::ostream& out, std::ostream& err) {
    Run run("search", c.out);
    json j = json::object();
    if (!config_path.empty()) {
        fs::path cp(config_path);
        j = read_json(cp);
        run.input(cp);
        if (j.contains("scheme_file")) {
            fs::path sp = cp.parent_path() / j.at("scheme_file").get<std::string>();
            json s = read_json(sp);
            run.input(sp);
            j.erase("scheme_file");
            j["scheme"] = s.is_object() && s.contains("scheme") ? s.at("scheme") : s;
        }
    }
    SearchConfig cfg;
    try {
        cfg = search_config_from_json(j);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!j.contains("precision_bits")) cfg.precision_bits = pick_precision(c.precision_bits, cfg.precision_bits);
    else if (c.precision_bits) cfg.precision_bits = c.precision_bits;
    cfg.validate();
    run.config = to_json(cfg);
    run.config["resume"] = resume;
    run.settings = {{"jobs", jobs}, {"precision_bits", cfg.precision_bits}, {"prescreen_primes", cfg.prescreen_primes},
                    {"T_max", cfg.T_max}, {"budget", cfg.budget}};

    auto rep = run_search(cfg, jobs, resume);
    for (const auto& cert : rep.certificates) run.write(fs::path("certificates") / cert_name(cert), to_json(cert).dump(2) + "\n");
    run.write("index.csv", index_csv(rep.certificates));
    json collapsed = json::array();
    for (const auto& [a, b] : rep.collapsed) collapsed.push_back({{"dropped", a}, {"kept", b}});
    json report = {{"schema", "ctorsion.search-report.v1"},
                   {"certificates", rep.certificates.size()},
                   {"tuples", rep.tuples},
                   {"roots", rep.roots},
                   {"bad_reduction", rep.bad_reduction},
                   {"prescreen_rejected", rep.prescreen_rejected},
                   {"exact_rejected", rep.exact_rejected},
                   {"collapsed", collapsed},
                   {"largest_T", rep.largest_T},
                   {"completeness",
                    "complete only relative to T_max = " + std::to_string(cfg.T_max) +
                        ": no effective bound ties T_max to (n, N_max), so points of larger order may exist"}};
    if (rep.resume) report["resume"] = *rep.resume;
    run.write("report.json", report.dump(2) + "\n");
    run.finish();

    out << rep.certificates.size() << " certificate(s) from " << rep.tuples << " tuple(s)\n";
    out << "NOTE: complete only relative to T_max = " << cfg.T_max << "\n";
    if (rep.resume) {
        err << "budget exhausted; resume with --resume '" << *rep.resume << "'\n";
        return kExhausted;
    }
    return kOk;
}

int cmd_certify(const Common& c, const std::string& file, std::ostream& out, std::ostream& err) {
    Run run("certify", c.out);
    run.input(file);
    TorsionCertificate cert;
    try {
        cert = certificate_from_json(read_json(file));
    } catch (const json::exception& e) {
        throw UsageError(std::string("certificate: ") + e.what());
    }
    run.config = {{"file", file}};
    auto r = certify(cert);
    json res = {{"schema", "ctorsion.certify.v1"}, {"pass", r.pass}, {"failures", r.failures}};
    run.write("certify.json", res.dump(2) + "\n");
    run.finish();
    if (r.pass) {
        out << "PASS " << file << "\n";
        return kOk;
    }
    err << "FAIL " << file << "\n";
    for (const auto& f : r.failures) err << "  residue: " << f << "\n";
    return kVerificationFailure;
}

int cmd_betti(const Common& c, const std::string& scheme_file, const std::string& f_str, const std::string& lambda_str,
              const std::string& eps_str, std::ostream& out) {
    Run run("betti", c.out);
    EllipticScheme s = EllipticScheme::legendre();
    if (!scheme_file.empty()) {
        s = load_scheme(scheme_file);
        run.input(scheme_file);
    }
    RatFunc f = parse_ratfunc(f_str);
    unsigned bits = pick_precision(c.precision_bits, 128);
    auto lam = parse_cyclotomic(lambda_str);
    std::vector<Rational> a;
    for (const auto& x : split(eps_str, ',')) a.push_back(parse_q(x));
    run.config = {{"scheme", scheme_to_json(s)}, {"f", to_string(f)}, {"lambda", lambda_str}, {"eps", eps_str}};
    run.settings = {{"precision_bits", bits}};

    json res;
    {
        PrecisionScope scope(bits + kGuardBits);
        Complex l0 = complex_embedding(lam, 1, bits + kGuardBits).value;
        if (a.empty()) {
            auto E = fibre_at(s, l0);
            auto P = section_at(s, l0);
            auto L = period_lattice(E, bits);
            auto lg = elliptic_log(E, P, L, bits);
            auto b = betti_coordinates(lg.z, L);
            Real error = b.error + lg.error;
            res = {{"b1", dec(b.b1)}, {"b2", dec(b.b2)}, {"a", json::array()}, {"error", dec(error, 6)}};
        } else {
            std::vector<Complex> eps;
            for (const auto& x : a) eps.push_back(expi2pi(real_from(x)));
            LatticeCache cache;
            auto lp = theta_map(s, f, l0, eps, cache, bits);
            json aj = json::array();
            for (const auto& z : lp.a) aj.push_back(complex_json(z));
            res = {{"b1", dec(lp.b1)}, {"b2", dec(lp.b2)}, {"a", aj}, {"error", dec(lp.error, 6)}};
        }
        res["schema"] = "ctorsion.logpoint.v1";
        res["lambda"] = complex_json(l0);
        res["precision_bits"] = bits;
        for (const char* k : {"b1", "b2"}) {
            auto q = rational_reconstruct(Real(res[k].get<std::string>()), Integer(1000), Real("1e-20"));
            if (q) res[std::string(k) + "_rational"] = to_string(*q);
        }
    }
    run.write("betti.json", res.dump(2) + "\n");
    run.finish();
    out << res.dump(2) << "\n";
    return kOk;
}

int cmd_periods(const Common& c, const std::string& lambda_str, const std::string& curve_str, std::ostream& out) {
    Run run("periods", c.out);
    unsigned bits = pick_precision(c.precision_bits, 128);
    ComplexCurve E;
    PrecisionScope scope(bits + kGuardBits);
    if (!curve_str.empty()) {
        auto parts = split(curve_str, ',');
        if (parts.size() != 3) throw UsageError("--curve wants a,b,c for y^2 = x^3 + a x^2 + b x + c");
        E = {Complex(real_from(parse_q(parts[0]))), Complex(real_from(parse_q(parts[1]))),
             Complex(real_from(parse_q(parts[2])))};
    } else {
        Complex l0 = complex_embedding(parse_cyclotomic(lambda_str), 1, bits + kGuardBits).value;
        E = fibre_at(EllipticScheme::legendre(), l0);
    }
    run.config = {{"lambda", curve_str.empty() ? lambda_str : ""}, {"curve", curve_str}};
    run.settings = {{"precision_bits", bits}};
    auto L = period_lattice(E, bits);
    json res = {{"schema", "ctorsion.periods.v1"},
                {"omega1", complex_json(L.omega1)},
                {"omega2", complex_json(L.omega2)},
                {"tau", complex_json(L.tau())},
                {"error", dec(L.error, 6)},
                {"precision_bits", bits}};
    run.write("periods.json", res.dump(2) + "\n");
    run.finish();
    out << res.dump(2) << "\n";
    return kOk;
}

int cmd_count(const Common& c, unsigned tmax, std::size_t n, const std::string& scheme_file, const std::string& f_str,
              std::ostream& out, std::ostream& err) {
    Run run("count", c.out);
    CountConfig cfg;
    if (!scheme_file.empty()) {
        cfg.scheme = load_scheme(scheme_file);
        run.input(scheme_file);
    }
    cfg.f = parse_ratfunc(f_str);
    cfg.n = n;
    cfg.T_max = tmax;
    cfg.precision_bits = pick_precision(c.precision_bits, cfg.precision_bits);
    run.config = {{"scheme", scheme_to_json(cfg.scheme)}, {"f", to_string(cfg.f)}, {"n", n}, {"T_max", tmax}};
    run.settings = {{"precision_bits", cfg.precision_bits}, {"cap", cfg.cap}};
    auto rep = count_rational_points(cfg);
    run.write("count.csv", count_csv(rep));
    run.write("count.json", to_json(rep).dump(2) + "\n");
    run.finish();
    out << count_csv(rep);
    out << "slope " << rep.slope << (rep.slope_warning ? " (WARNING: at or above 0.7)" : "") << "\n";
    if (rep.slope_warning) err << "warning: empirical slope " << rep.slope << " >= " << kSlopeThreshold << "\n";
    return kOk;
}

int cmd_delta(const Common& c, const std::string& a_str, const std::string& bad_str, unsigned kdeg, std::ostream& out) {
    Run run("delta", c.out);
    unsigned bits = pick_precision(c.precision_bits, 128);
    PrecisionScope scope(bits + kGuardBits);
    Rational a = parse_q(a_str);
    std::vector<Real> heights;
    json bad = json::array();
    for (const auto& b : split(bad_str, ',')) {
        Rational q = parse_q(b);
        heights.push_back(log_height(q));
        bad.push_back({{"beta", to_string(q)}, {"height", dec(heights.back(), 20)}});
    }
    auto d = delta_derivation(real_from(a), heights, kdeg);
    run.config = {{"a", to_string(a)}, {"bad", bad_str}, {"K_degree", kdeg}};
    run.settings = {{"precision_bits", bits}};
    json res = {{"schema", "ctorsion.delta.v1"},
                {"a", to_string(a)},
                {"bad", bad},
                {"l", d.l},
                {"K_degree", d.K_degree},
                {"max_bad_height", dec(d.max_bad_height, 20)},
                {"exponent", dec(d.exponent, 30)},
                {"delta", dec(d.delta, 30)},
                {"formula", "delta = exp(-2 l [K:Q] (a + max h(beta) + log 2)), l = #B + 1"}};
    run.write("delta.json", res.dump(2) + "\n");
    run.finish();
    out << "a = " << to_string(a) << ", #B = " << bad.size() << ", l = " << d.l << ", [K:Q] = " << d.K_degree
        << ", max h(beta) = " << dec(d.max_bad_height, 12) << "\n";
    out << "exponent = 2 l [K:Q] (a + max h + log 2) = " << dec(d.exponent, 20) << "\n";
    out << "delta = " << std::scientific << std::setprecision(6) << d.delta.convert_to<double>() << std::defaultfloat << "\n";
    return kOk;
}

int cmd_sl2(const Common& c, const std::string& lambda_str, std::ostream& out) {
    Run run("sl2", c.out);
    auto lam = parse_cyclotomic(lambda_str);
    auto o = sl2_torsion_order(lam);
    run.config = {{"lambda", lambda_str}};
    json res = {{"schema", "ctorsion.sl2.v1"}, {"lambda", to_string(lam)}, {"order", o ? json(*o) : json("infinite")}};
    run.write("sl2.json", res.dump(2) + "\n");
    run.finish();
    out << "order " << (o ? std::to_string(*o) : std::string("infinite")) << "\n";
    return kOk;
}

int cmd_tuples(const Common& c, std::size_t n, std::uint64_t N_max, bool skip, const std::string& mode, std::size_t budget,
               const std::string& resume, std::ostream& out, std::ostream& err) {
    Run run("tuples", c.out);
    TupleMode m = mode == "orders" ? TupleMode::orders_up_to : TupleMode::roots_of_N_max;
    auto b = enumerate_tuples(n, N_max, skip, m, budget, resume);
    std::ostringstream csv;
    csv << "# ctorsion.tuples.v1\nN,exponents,vanishing_subsum\n";
    for (const auto& t : b.tuples) {
        csv << t.N << ",";
        for (std::size_t i = 0; i < t.exponents.size(); ++i) csv << (i ? " " : "") << t.exponents[i];
        csv << "," << (has_vanishing_subsum(t) ? 1 : 0) << "\n";
    }
    run.config = {{"n", n}, {"N_max", N_max}, {"skip_vanishing_subsums", skip}, {"mode", mode}, {"budget", budget},
                  {"resume", resume}};
    run.write("tuples.csv", csv.str());
    run.finish();
    out << b.tuples.size() << " tuple(s)\n";
    if (b.resume) {
        err << "budget exhausted; resume with --resume '" << *b.resume << "'\n";
        return kExhausted;
    }
    return kOk;
}

}  // namespace

CyclotomicNumber parse_cyclotomic(const std::string& s) {
    std::uint64_t M = 1;
    static const std::regex zre("z([0-9]+)");
    for (auto it = std::sregex_iterator(s.begin(), s.end(), zre); it != std::sregex_iterator(); ++it) {
        std::uint64_t N = std::stoull((*it)[1].str());
        if (N == 0) throw UsageError("z0 is not a root of unity");
        M = lcm_u64(M, N);
    }
    if (s.find_first_not_of(" \t") == std::string::npos) throw UsageError("empty expression");
    return ExprParser(s, CyclotomicField::get(M)).parse();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Torsion points on elliptic schemes over roots-of-unity fibres", "ctorsion"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    unsigned max_bits = max_precision_bits();
    app.add_option("--max-precision-bits", max_bits, "refuse precision requests above this");

    Common common;
    std::string config, resume, file, scheme_file, f_str = "t", lambda, eps, curve, a_str = "1", bad = "0,1", mode = "roots";
    unsigned jobs = 1, tmax = 32, kdeg = 1;
    std::size_t n = 2, budget = 0;
    std::uint64_t nmax = 8;
    bool skip = false;

    auto* search = app.add_subcommand("search", "search roots-of-unity tuples for torsion sections");
    add_common(search, common);
    search->add_option("--config", config, "search config JSON")->check(CLI::ExistingFile);
    search->add_option("--resume", resume, "resume token from an earlier run");
    search->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 256u));

    auto* cert = app.add_subcommand("certify", "re-check a certificate exactly");
    add_common(cert, common, false);
    cert->add_option("--file", file, "certificate JSON")->required()->check(CLI::ExistingFile);

    auto* betti = app.add_subcommand("betti", "Betti and a-coordinates of a point");
    add_common(betti, common);
    betti->add_option("--scheme", scheme_file, "scheme JSON (default Legendre, section x = 2)")->check(CLI::ExistingFile);
    betti->add_option("--f", f_str, "base map f(t)")->capture_default_str();
    betti->add_option("--lambda", lambda, "parameter, e.g. 2 or \"-4 + 4*z8 - 4*z8^3\"")->required();
    betti->add_option("--eps", eps, "a-coordinates of eps as rationals, e.g. 0,1/2");

    auto* periods = app.add_subcommand("periods", "period lattice of a fibre");
    add_common(periods, common);
    auto* plam = periods->add_option("--lambda", lambda, "Legendre parameter");
    auto* pcur = periods->add_option("--curve", curve, "a,b,c for y^2 = x^3 + a x^2 + b x + c");
    plam->excludes(pcur);
    periods->callback([&] {
        if (lambda.empty() && curve.empty()) throw CLI::ValidationError("one of --lambda or --curve is required");
    });

    auto* count = app.add_subcommand("count", "count rational points of bounded height");
    add_common(count, common);
    count->add_option("--tmax", tmax, "height bound")->capture_default_str()->check(CLI::Range(1u, 4096u));
    count->add_option("--n", n, "number of roots of unity")->capture_default_str()->check(CLI::Range(1, 8));
    count->add_option("--scheme", scheme_file, "scheme JSON")->check(CLI::ExistingFile);
    count->add_option("--f", f_str, "base map f(t)")->capture_default_str();

    auto* delta = app.add_subcommand("delta", "the delta of the compact set");
    add_common(delta, common);
    delta->add_option("--a", a_str, "height bound a > 0")->capture_default_str();
    delta->add_option("--bad", bad, "bad points (rationals), comma separated")->capture_default_str();
    delta->add_option("--kdeg", kdeg, "[K:Q]")->capture_default_str()->check(CLI::Range(1u, 1u << 16));

    auto* sl2 = app.add_subcommand("sl2", "order of [[0,1],[-1,lambda]]");
    add_common(sl2, common, false);
    sl2->add_option("--lambda", lambda, "cyclotomic expression, e.g. \"z5 + z5^4\"")->required();

    auto* tuples = app.add_subcommand("tuples", "enumerate roots-of-unity tuples");
    add_common(tuples, common, false);
    tuples->add_option("--n", n, "tuple length")->capture_default_str()->check(CLI::Range(1, 8));
    tuples->add_option("--nmax", nmax, "N_max")->capture_default_str()->check(CLI::Range(1, 1000));
    tuples->add_flag("--skip-vanishing", skip, "drop tuples with a vanishing subsum");
    tuples->add_option("--mode", mode, "roots (N_max-th roots) or orders (orders <= N_max)")
        ->capture_default_str()
        ->check(CLI::IsMember({"roots", "orders"}));
    tuples->add_option("--budget", budget, "stop after this many tuples (0: no limit)");
    tuples->add_option("--resume", resume, "resume token");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsage;
    }

    struct Restore {
        unsigned saved = max_precision_bits();
        ~Restore() { set_max_precision_bits(saved); }
    } restore;
    set_max_precision_bits(max_bits);
    try {
        if (*search) return cmd_search(common, config, resume, jobs, out, err);
        if (*cert) return cmd_certify(common, file, out, err);
        if (*betti) return cmd_betti(common, scheme_file, f_str, lambda, eps, out);
        if (*periods) return cmd_periods(common, lambda, curve, out);
        if (*count) return cmd_count(common, tmax, n, scheme_file, f_str, out, err);
        if (*delta) return cmd_delta(common, a_str, bad, kdeg, out);
        if (*sl2) return cmd_sl2(common, lambda, out);
        if (*tuples) return cmd_tuples(common, n, nmax, skip, mode, budget, resume, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const PrecisionError& e) {
        err << "error: " << e.what() << "\n";
        return kExhausted;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        if (!e.token.empty()) err << "resume with --resume '" << e.token << "'\n";
        return kExhausted;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kExhausted;
    } catch (const VerificationFailure& e) {
        err << "verification failure: " << e.what() << "\n";
        return kVerificationFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace tors::cli
