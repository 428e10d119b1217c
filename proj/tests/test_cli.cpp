#include "coha/cli.hpp"

#include "coha/commvar.hpp"
#include "coha/hall.hpp"
#include "coha/series.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace coha;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string text;
    json record;
};

Result dispatch(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    Result r{code, out.str(), json()};
    if (!r.text.empty() && (r.text[0] == '{' || r.text[0] == '[')) r.record = json::parse(r.text);
    return r;
}

}  // namespace

TEST_CASE("count subcommand emits the documented record") {
    auto r = dispatch({"commvar", "count", "--variety", "commuting", "--n", "1", "--p", "2"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.record["command"] == "commvar count");
    CHECK(r.record["outputs"]["count"] == "4");
    CHECK(r.record["outputs"]["variety"] == "commuting");
    CHECK(r.record["tool_version"] == cli::kToolVersion);
    CHECK(r.record.contains("wall_time_ms"));
}

TEST_CASE("repeated runs are byte-identical up to the wall time") {
    std::vector<std::string> args{"series", "pbw", "--betti", "1,0,1,0,1", "--N", "3", "--K", "3"};
    auto a = dispatch(args), b = dispatch(args);
    a.record.erase("wall_time_ms");
    b.record.erase("wall_time_ms");
    CHECK(a.record.dump() == b.record.dump());
}

TEST_CASE("affine-plane consistency between the two series subcommands") {
    auto ff = dispatch({"series", "feitfine", "--N", "2", "--K", "3"});
    auto pbw = dispatch({"series", "pbw", "--betti", "0,0,0,0,1", "--N", "2", "--K", "3"});
    CHECK(ff.code == 0);
    CHECK(pbw.code == 0);
    CHECK(ff.record["outputs"]["series"]["coefficients"] ==
          pbw.record["outputs"]["series"]["coefficients"]);
}

TEST_CASE("series records re-parse into the coefficients that produced them") {
    auto r = dispatch({"series", "feitfine", "--N", "3", "--K", "2"});
    auto s = series::feit_fine_series(3, 2);
    for (const auto& slice : r.record["outputs"]["series"]["coefficients"]) {
        int t = slice["t"].get<int>();
        for (const auto& term : slice["terms"]) {
            BigRat c{BigInt(term["numerator"].get<std::string>()),
                     BigInt(term["denominator"].get<std::string>())};
            CHECK(c == s.coeff(t, term["u_times_2"].get<int>()));
        }
    }
}

TEST_CASE("hall table records re-parse into valid commuting pairs") {
    auto r = dispatch({"hall", "table", "--nmax", "2", "--p", "2"});
    CHECK(r.code == 0);
    PrimeField f(2);
    auto table = hall::enumerate_classes(2, f);
    int seen = 0;
    for (const auto& cls : r.record["outputs"]["classes"]) {
        int len = cls["length"].get<int>();
        Matrix<PrimeField> A(f, len, len), B(f, len, len);
        for (int i = 0; i < len; ++i)
            for (int j = 0; j < len; ++j) {
                A(i, j) = cls["A"][std::size_t(i)][std::size_t(j)].get<std::uint32_t>();
                B(i, j) = cls["B"][std::size_t(i)][std::size_t(j)].get<std::uint32_t>();
            }
        hall::Pair pair(A, B);  // the constructor revalidates commutativity
        auto id = hall::parse_class_name(cls["name"].get<std::string>());
        CHECK(table.at(id).rep == pair);
        CHECK(table.at(id).aut_order == BigInt(cls["aut_order"].get<std::string>()));
        ++seen;
    }
    CHECK(seen == 4 + 28);
}

TEST_CASE("exit code 2 on precondition violations, with an error object") {
    auto r = dispatch({"commvar", "count", "--variety", "nonsense", "--n", "1", "--p", "2"});
    CHECK(r.code == cli::kExitPrecondition);
    CHECK(r.record["error"]["kind"] == "precondition");
    // unknown flags are parse errors
    CHECK(dispatch({"commvar", "count", "--bogus", "1"}).code == cli::kExitPrecondition);
    // non-prime field size
    CHECK(dispatch({"commvar", "count", "--variety", "commuting", "--n", "1", "--p", "6"}).code ==
          cli::kExitPrecondition);
}

TEST_CASE("exit code 4 on infeasible sizes") {
    auto r = dispatch({"commvar", "count", "--variety", "commuting", "--n", "3", "--p", "5",
                       "--method", "brute"});
    CHECK(r.code == cli::kExitInfeasible);
    CHECK(r.record["error"]["kind"] == "infeasible");
}

TEST_CASE("exit code 3 when a mathematical expectation fails") {
    // a degree bound below the true degree must trip the held-out check
    auto r = dispatch({"commvar", "interpolate", "--variety", "commuting", "--n", "2",
                       "--degree", "4"});
    CHECK(r.code == cli::kExitExpectation);
    CHECK(r.record["error"]["kind"] == "expectation");
}

TEST_CASE("csv output for flat tables only") {
    auto csv = dispatch({"--format", "csv", "commvar", "count", "--variety", "commuting",
                         "--n", "2", "--p", "3"});
    CHECK(csv.code == 0);
    CHECK(csv.text == "variety,n,p,count\ncommuting,2,3,945\n");

    auto bad = dispatch({"--format", "csv", "series", "feitfine", "--N", "2", "--K", "2"});
    CHECK(bad.code == cli::kExitPrecondition);
}

TEST_CASE("mc subcommands run against the shipped catalog") {
    auto card = dispatch({"mc", "card", "--catalog-entry", "nilact-120"});
    CHECK(card.code == 0);
    CHECK(card.record["outputs"]["matches_expected"] == true);
    CHECK(card.record["outputs"]["card"]["orbit_count"] == 9);

    auto cmp = dispatch({"mc", "compare", "--lhs", "ab-d0-iso", "--rhs", "zero"});
    CHECK(cmp.code == 0);
    CHECK(cmp.record["outputs"]["match"] == true);

    auto fib = dispatch({"mc", "fibration", "--catalog-entry", "fib-sign-pin"});
    CHECK(fib.code == 0);
    CHECK(fib.record["outputs"]["passing_signs"] == "+");
    CHECK(fib.record["outputs"]["matches_expected"] == true);
}

TEST_CASE("interpolation record carries the audit trail") {
    auto r = dispatch({"commvar", "interpolate", "--variety", "nilcommuting", "--n", "2",
                       "--degree", "3"});
    CHECK(r.code == 0);
    CHECK(r.record["outputs"]["degree"] == 3);
    CHECK(r.record["outputs"]["coefficients"].size() == 4);
    CHECK(r.record["outputs"]["primes_used"].size() == 4);
    CHECK(r.record["outputs"]["holdout_prime"].get<int>() > 2);
}

TEST_CASE("hall product over the CLI") {
    auto r = dispatch({"hall", "product", "--lhs", "n1-0", "--rhs", "n1-0", "--p", "2"});
    CHECK(r.code == 0);
    // [k0]^2 has four summands, one with coefficient 3
    auto coeffs = r.record["outputs"]["coefficients"];
    CHECK(coeffs.size() == 4);
    bool saw_three = false;
    for (const auto& c : coeffs) saw_three |= c["numerator"] == "3";
    CHECK(saw_three);
}

TEST_CASE("associativity over the CLI") {
    auto r = dispatch({"hall", "assoc", "--lmax", "3", "--p", "2"});
    CHECK(r.code == 0);
    CHECK(r.record["outputs"]["violations"].empty());
    CHECK(r.record["outputs"]["triples_checked"] == 64);
}

TEST_CASE("power-structure failure exits with the expectation code") {
    // the identity holds, so the happy path exits 0
    auto r = dispatch({"series", "power-structure", "--q", "2", "--N", "2"});
    CHECK(r.code == 0);
    CHECK(r.record["outputs"]["equal"] == true);
    // and out-of-range parameters are an infeasibility, not a crash
    CHECK(dispatch({"series", "power-structure", "--q", "2", "--N", "5"}).code ==
          cli::kExitInfeasible);
}

TEST_CASE("series evaluations mirror the exact rational coefficients") {
    auto r = dispatch({"series", "feitfine", "--N", "2", "--K", "2", "--eval-at", "3"});
    CHECK(r.code == 0);
    auto evals = r.record["outputs"]["evaluations"];
    REQUIRE(evals.size() == 3);
    // n = 1: q^2/(q-1) = 9/2 at q = 3
    CHECK(evals[1]["numerator"] == "9");
    CHECK(evals[1]["denominator"] == "2");
    // n = 2: |C_2(F_3)|/|GL_2(F_3)| = 945/48 = 315/16
    CHECK(evals[2]["numerator"] == "315");
    CHECK(evals[2]["denominator"] == "16");
}

TEST_CASE("--output duplicates the record; --threads does not change it") {
    std::string path = "build/test_cli_output.json";
    auto a = dispatch({"--output", path, "--threads", "1", "commvar", "count", "--variety",
                       "commuting", "--n", "2", "--p", "2", "--method", "kernel"});
    CHECK(a.code == 0);
    std::ifstream in(path);
    REQUIRE(bool(in));
    json file_record = json::parse(in);
    CHECK(file_record["outputs"] == a.record["outputs"]);

    auto b = dispatch({"--threads", "2", "commvar", "count", "--variety", "commuting", "--n",
                       "2", "--p", "2", "--method", "kernel"});
    CHECK(b.record["outputs"] == a.record["outputs"]);
}

TEST_CASE("mc compare accepts a pair id") {
    auto r = dispatch({"mc", "compare", "--lhs", "qis-acyclic-sum"});
    CHECK(r.code == 0);
    CHECK(r.record["outputs"]["match"] == true);
    CHECK(r.record["outputs"]["pair"] == "qis-acyclic-sum");
}

TEST_CASE("the built binary wires exit codes through to the shell") {
    auto shell = [](const std::string& cmd) {
        int status = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    std::string bin = COHA_BINARY;
    CHECK(shell(bin + " commvar count --variety commuting --n 1 --p 2") == 0);
    CHECK(shell(bin + " commvar count --variety commuting --n 1 --p 6") == 2);
    CHECK(shell(bin + " commvar count --variety commuting --n 3 --p 5 --method brute") == 4);
    CHECK(shell(bin + " commvar interpolate --variety commuting --n 2 --degree 4") == 3);
}

TEST_CASE("help exits cleanly") {
    CHECK(dispatch({"--help"}).code == 0);
}
