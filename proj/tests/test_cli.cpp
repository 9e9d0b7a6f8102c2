#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cli.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace tors;
using namespace tors::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream o, e;
    int code = dispatch(args, o, e);
    return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("ctorsion-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json load(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::set<std::string> tree(const fs::path& root) {
    std::set<std::string> s;
    for (const auto& e : fs::recursive_directory_iterator(root)) s.insert(fs::relative(e.path(), root).generic_string());
    return s;
}

}  // namespace

TEST_CASE("cyclotomic expressions") {
    auto z5 = CyclotomicField::get(5);
    CHECK(parse_cyclotomic("z5^1 + z5^4") == CyclotomicNumber::zeta(z5, 1) + CyclotomicNumber::zeta(z5, 4));
    CHECK(parse_cyclotomic("z5 + z5^-1") == parse_cyclotomic("z5^1 + z5^4"));
    CHECK(parse_cyclotomic("1").is_rational());
    CHECK(parse_cyclotomic("-3/4").rational_value() == Rational(-3, 4));
    auto s = parse_cyclotomic("z4 + z4^3");
    CHECK(s.is_zero());
    // mixed fields land in the lcm
    auto m = parse_cyclotomic("z3 + z4");
    CHECK(m.N() == 12);
    CHECK(m == CyclotomicNumber::zeta(CyclotomicField::get(12), 4) + CyclotomicNumber::zeta(CyclotomicField::get(12), 3));
    // -4 + 4 sqrt 2 with sqrt 2 = z8 + z8^7
    auto l = parse_cyclotomic("-4 + 4*(z8 + z8^7)");
    auto sq = l * l + CyclotomicNumber::rational(l.field(), 8) * l - CyclotomicNumber::rational(l.field(), 16);
    CHECK(sq.is_zero());
    CHECK(parse_cyclotomic("(z8 + z8^7)^2") == CyclotomicNumber::rational(CyclotomicField::get(8), 2));

    // random sums of roots agree with direct construction
    std::mt19937 rng(7);
    for (int it = 0; it < 200; ++it) {
        std::uint64_t N = 1 + rng() % 12;
        auto F = CyclotomicField::get(N);
        CyclotomicNumber want(F);
        std::string s2;
        int terms = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < terms; ++k) {
            int c = static_cast<int>(rng() % 7) - 3;
            std::int64_t e = static_cast<std::int64_t>(rng() % N);
            want = want + CyclotomicNumber::rational(F, c) * CyclotomicNumber::zeta(F, e);
            s2 += (k ? " + " : "") + std::string("(") + std::to_string(c) + ")*z" + std::to_string(N) + "^" +
                  std::to_string(e);
        }
        auto got = parse_cyclotomic(s2);
        CHECK((got.N() == N || N == 1));
        CHECK(got.lift(CyclotomicField::get(got.N())) == want.lift(CyclotomicField::get(got.N())));
    }
}

TEST_CASE("sl2 and delta subcommands") {
    auto dir = scratch("sl2");
    auto r = run({"sl2", "--lambda", "1", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out == "order 6\n");
    CHECK(run({"sl2", "--lambda", "z5^1 + z5^4", "--out", dir.string()}).out == "order 5\n");
    CHECK(run({"sl2", "--lambda", "0", "--out", dir.string()}).out == "order 4\n");
    CHECK(run({"sl2", "--lambda", "-1", "--out", dir.string()}).out == "order 3\n");
    CHECK(run({"sl2", "--lambda", "2", "--out", dir.string()}).out == "order infinite\n");
    CHECK(load(dir / "sl2.json")["order"] == "infinite");

    auto d = run({"delta", "--a", "1", "--bad", "0,1", "--kdeg", "1", "--out", dir.string()});
    CHECK(d.code == 0);
    CHECK(d.out.find("delta = 3.873050e-05") != std::string::npos);
    CHECK(d.out.find("l = 3") != std::string::npos);
    auto dj = load(dir / "delta.json");
    CHECK(dj["l"] == 3);
    CHECK(std::abs(std::stod(dj["delta"].get<std::string>()) - 3.87305027604e-5) < 1e-15);
    CHECK(run({"delta", "--a", "0", "--out", dir.string()}).code == kUsage);
}

TEST_CASE("usage errors exit 2") {
    auto dir = scratch("usage");
    CHECK(run({}).code == kUsage);
    CHECK(run({"sl2", "--frobnicate", "1"}).code == kUsage);
    auto r = run({"sl2"});
    CHECK(r.code == kUsage);
    CHECK(r.err.find("--lambda") != std::string::npos);
    CHECK(run({"sl2", "--lambda", "z5 +", "--out", dir.string()}).code == kUsage);
    CHECK(run({"certify", "--file", (dir / "missing.json").string()}).code == kUsage);
    CHECK(run({"periods", "--out", dir.string()}).code == kUsage);
    CHECK(run({"periods", "--lambda", "0", "--out", dir.string()}).code == kUsage);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("precision exhaustion exits 3") {
    auto dir = scratch("prec");
    auto r = run({"--max-precision-bits", "100", "periods", "--lambda", "2", "--precision-bits", "256", "--out", dir.string()});
    CHECK(r.code == kExhausted);
    CHECK(r.err.find("exceeds") != std::string::npos);
}

TEST_CASE("search, certify and tampering") {
    auto dir = scratch("search");
    {
        std::ofstream c(dir / "cfg.json");
        c << R"({"n": 2, "N_max": 2, "T_max": 4, "precision_bits": 128})";
    }
    auto out = dir / "out";
    auto r = run({"search", "--config", (dir / "cfg.json").string(), "--out", out.string(), "--jobs", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("complete only relative to T_max = 4") != std::string::npos);
    auto report = load(out / "report.json");
    CHECK(report["certificates"] == 1);
    CHECK(report["completeness"].get<std::string>().find("T_max = 4") != std::string::npos);
    std::ifstream idx(out / "index.csv");
    std::string l1, l2, l3;
    std::getline(idx, l1);
    std::getline(idx, l2);
    std::getline(idx, l3);
    CHECK(l1 == "# ctorsion.index.v1");
    CHECK(l2 == "N,exponents,lambda_minpoly,curve_order,tuple_order,T,degree");
    CHECK(l3 == "1,0 0,\"x - 2\",2,1,2,1");

    auto cert = out / "certificates" / "cert-N1-e0_0-r0.json";
    REQUIRE(fs::exists(cert));
    auto ok = run({"certify", "--file", cert.string(), "--out", (dir / "c1").string()});
    CHECK(ok.code == 0);

    auto j = load(cert);
    j["curve_order"] = 5;
    {
        std::ofstream t(dir / "tampered.json");
        t << j.dump();
    }
    auto bad = run({"certify", "--file", (dir / "tampered.json").string(), "--out", (dir / "c2").string()});
    CHECK(bad.code == kVerificationFailure);
    CHECK(bad.err.find("residue: psi_5") != std::string::npos);
    CHECK(load(dir / "c2" / "certify.json")["pass"] == false);

    // manifest: identical runs give identical result digests
    auto m1 = load(out / "search.manifest.json");
    auto out2 = dir / "out2";
    REQUIRE(run({"search", "--config", (dir / "cfg.json").string(), "--out", out2.string(), "--jobs", "1"}).code == 0);
    auto m2 = load(out2 / "search.manifest.json");
    CHECK(m1["results"] == m2["results"]);
    CHECK(m1["config_hash"] == m2["config_hash"]);
    CHECK(m1["schema"] == kManifestSchema);
    CHECK(m1["results"].size() == 3);
    for (const auto& res : m1["results"]) {
        std::ifstream in(out / res["path"].get<std::string>(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        CHECK(sha256_hex(ss.str()) == res["sha256"]);
    }
}

TEST_CASE("search budgets exit 3 with a token that resumes") {
    auto dir = scratch("budget");
    {
        std::ofstream c(dir / "cfg.json");
        c << R"({"n": 2, "N_max": 2, "T_max": 4, "precision_bits": 128, "budget": 1})";
    }
    auto r = run({"search", "--config", (dir / "cfg.json").string(), "--out", (dir / "a").string()});
    CHECK(r.code == kExhausted);
    auto tok = load(dir / "a" / "report.json")["resume"].get<std::string>();
    std::size_t total = load(dir / "a" / "report.json")["tuples"].get<std::size_t>();
    for (int guard = 0; guard < 10; ++guard) {
        auto more = run({"search", "--config", (dir / "cfg.json").string(), "--out", (dir / "b").string(), "--resume", tok});
        total += load(dir / "b" / "report.json")["tuples"].get<std::size_t>();
        if (more.code == 0) break;
        REQUIRE(more.code == kExhausted);
        tok = load(dir / "b" / "report.json")["resume"].get<std::string>();
    }
    CHECK(total == 3);
}

TEST_CASE("scheme files and unknown config keys") {
    auto dir = scratch("scheme");
    {
        std::ofstream s(dir / "scheme.json");
        s << R"({"a": "-t - 1", "b": "t", "c": "0", "section_x": "2"})";
        std::ofstream c(dir / "cfg.json");
        c << R"({"scheme_file": "scheme.json", "n": 2, "N_max": 2, "T_max": 4, "precision_bits": 128})";
        std::ofstream b(dir / "bad.json");
        b << R"({"n": 2, "colour": "blue"})";
    }
    auto r = run({"search", "--config", (dir / "cfg.json").string(), "--out", (dir / "o").string()});
    CHECK(r.code == 0);
    auto m = load(dir / "o" / "search.manifest.json");
    CHECK(m["inputs"].size() == 2);
    CHECK(load(dir / "o" / "report.json")["certificates"] == 1);
    CHECK(run({"search", "--config", (dir / "bad.json").string(), "--out", (dir / "o2").string()}).code == kUsage);
}

TEST_CASE("writes stay inside the output directory") {
    auto dir = scratch("confined");
    auto before = tree(dir);
    auto out = dir / "only-here";
    CHECK(run({"tuples", "--n", "2", "--nmax", "4", "--out", out.string()}).code == 0);
    CHECK(run({"periods", "--lambda", "1/2", "--out", out.string()}).code == 0);
    CHECK(run({"betti", "--lambda", "2", "--eps", "0,0", "--out", out.string()}).code == 0);
    CHECK(run({"count", "--tmax", "3", "--n", "1", "--out", out.string()}).code == 0);
    for (const auto& p : tree(dir))
        if (!before.count(p)) CHECK(p.rfind("only-here", 0) == 0);
    std::ifstream t(out / "tuples.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(t, line)) ++rows;
    CHECK(rows == 2 + 10);
    auto b = load(out / "betti.json");
    CHECK(b["b1_rational"] == "1/2");
    CHECK(b["b2_rational"] == "0");
    auto p = load(out / "periods.json");
    CHECK(p["tau"]["re"].get<std::string>().substr(0, 1) == "0");
    std::ifstream cc(out / "count.csv");
    std::getline(cc, line);
    CHECK(line == "# ctorsion.count.v1");
}
