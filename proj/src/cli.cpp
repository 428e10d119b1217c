#include "coha/cli.hpp"

#include "coha/commvar.hpp"
#include "coha/hall.hpp"
#include "coha/mc.hpp"
#include "coha/parallel.hpp"
#include "coha/series.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace coha::cli {

namespace {

using nlohmann::json;

std::string str(const BigInt& v) { return v.str(); }

json rat_json(const BigRat& r) {
    return {{"numerator", boost::multiprecision::numerator(r).str()},
            {"denominator", boost::multiprecision::denominator(r).str()}};
}

json series_json(const series::LaurentBiSeries& s) {
    json coeffs = json::array();
    for (int d = 0; d <= s.t_order; ++d) {
        json terms = json::array();
        for (const auto& [e, c] : s.slices[std::size_t(d)]) {
            json term = rat_json(c);
            term["u_times_2"] = e;
            terms.push_back(term);
        }
        coeffs.push_back({{"t", d}, {"terms", terms}});
    }
    int floor = s.u_floor_half();
    json u_floor;
    if (floor != series::LaurentBiSeries::kExact) u_floor = floor;
    return {{"t_order", s.t_order}, {"u_floor_times_2", u_floor}, {"coefficients", coeffs}};
}

json matrix_json(const Matrix<PrimeField>& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json hall_element_json(const hall::HallElement& e) {
    json out = json::array();
    for (const auto& [id, c] : e.coeffs) {
        json entry = rat_json(c);
        entry["class"] = hall::class_name(id);
        out.push_back(entry);
    }
    return out;
}

json card_json(const mc::GroupoidCard& card) {
    json stabs = json::array();
    for (const auto& s : card.stabilizer_orders) stabs.push_back(str(s));
    return {{"object_count", str(card.object_count)},
            {"orbit_count", card.orbit_count},
            {"stabilizer_orders", stabs},
            {"cardinality", rat_json(card.cardinality)}};
}

series::BettiTable parse_betti(const std::string& text) {
    series::BettiTable betti;
    std::stringstream ss(text);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
        if (k >= betti.b.size()) throw PreconditionError("betti: expected 5 entries b0,..,b4");
        betti.b[k++] = std::stol(item);
    }
    if (k != betti.b.size()) throw PreconditionError("betti: expected 5 entries b0,..,b4");
    return betti;
}

struct Run {
    json inputs, outputs;
    std::string csv;             // optional flat rendering
    bool expectation_failed = false;
};

constexpr const char* kDefaultCatalog = "data/mc_catalog.json";

Run run_commvar_count(const std::string& variety, int n, std::uint32_t p,
                      const std::string& method) {
    Run r;
    r.inputs = {{"variety", variety}, {"n", n}, {"p", p}, {"method", method}};
    BigInt count = commvar::count_points(commvar::variety_from_string(variety), n, p,
                                         commvar::method_from_string(method));
    r.outputs = {{"variety", variety}, {"n", n}, {"p", p}, {"count", str(count)}};
    r.csv = "variety,n,p,count\n" + variety + "," + std::to_string(n) + "," +
            std::to_string(p) + "," + str(count) + "\n";
    return r;
}

Run run_commvar_interpolate(const std::string& variety, int n, int degree) {
    Run r;
    r.inputs = {{"variety", variety}, {"n", n}, {"degree", degree}};
    auto poly =
        commvar::interpolate_count_polynomial(commvar::variety_from_string(variety), n, degree);
    json coeffs = json::array();
    for (const auto& c : poly.coeffs) coeffs.push_back(str(c));
    r.outputs = {{"variety", variety},
                 {"n", n},
                 {"degree", poly.degree()},
                 {"coefficients", coeffs},
                 {"primes_used", poly.primes_used},
                 {"holdout_prime", poly.holdout_prime}};
    std::string csv = "q_power,coefficient\n";
    for (std::size_t k = 0; k < poly.coeffs.size(); ++k)
        csv += std::to_string(k) + "," + str(poly.coeffs[k]) + "\n";
    r.csv = csv;
    return r;
}

Run run_series_feitfine(int N, int K, std::int64_t eval_at) {
    Run r;
    r.inputs = {{"N", N}, {"K", K}};
    auto s = series::feit_fine_series(N, K);
    r.outputs = {{"series", series_json(s)}};
    if (eval_at >= 2) {
        r.inputs["eval_at"] = eval_at;
        json evals = json::array();
        for (int n = 0; n <= N; ++n) {
            BigRat v = series::feit_fine_coeff_rational(n).eval(BigRat(eval_at));
            json e = rat_json(v);
            e["n"] = n;
            evals.push_back(e);
        }
        r.outputs["evaluations"] = evals;
    }
    return r;
}

Run run_series_pbw(const std::string& betti_spec, int N, int K) {
    Run r;
    r.inputs = {{"betti", betti_spec}, {"N", N}, {"K", K}};
    auto betti = parse_betti(betti_spec);
    auto s = series::pbw_series(betti, N, K);
    r.outputs = {{"series", series_json(s)}};
    return r;
}

Run run_series_power_structure(std::uint32_t q, int N) {
    Run r;
    r.inputs = {{"q", q}, {"N", N}};
    auto report = series::power_structure_check(q, N);
    json lhs = json::array(), rhs = json::array();
    for (const auto& c : report.lhs) lhs.push_back(rat_json(c));
    for (const auto& c : report.rhs) rhs.push_back(rat_json(c));
    r.outputs = {{"equal", report.equal}, {"lhs", lhs}, {"rhs", rhs}};
    r.expectation_failed = !report.equal;
    return r;
}

json fingerprint_json(const hall::Fingerprint& fp) {
    return json(fp.data);
}

Run run_hall_table(int nmax, std::uint32_t p) {
    Run r;
    r.inputs = {{"nmax", nmax}, {"p", p}};
    auto table = hall::enumerate_classes(nmax, PrimeField(p));

    json classes = json::array();
    std::string csv = "name,length,aut_order\n";
    for (int len = 1; len <= nmax; ++len)
        for (const auto& cls : table.of_length(len)) {
            classes.push_back({{"name", cls.name},
                               {"length", cls.length},
                               {"aut_order", str(cls.aut_order)},
                               {"fingerprint", fingerprint_json(cls.fp)},
                               {"A", matrix_json(cls.rep.A)},
                               {"B", matrix_json(cls.rep.B)}});
            csv += cls.name + "," + std::to_string(cls.length) + "," + str(cls.aut_order) + "\n";
        }

    json tensor = json::array();
    std::string tensor_csv = "M,N,L,value\n";
    for (int m_len = 2; m_len <= nmax; ++m_len)
        for (int m_idx = 0; m_idx < int(table.of_length(m_len).size()); ++m_idx)
            for (const auto& [key, value] : hall::structure_constants(table, {m_len, m_idx})) {
                tensor.push_back({{"M", hall::class_name({m_len, m_idx})},
                                  {"N", hall::class_name(key.first)},
                                  {"L", hall::class_name(key.second)},
                                  {"value", str(value)}});
                tensor_csv += hall::class_name({m_len, m_idx}) + "," +
                              hall::class_name(key.first) + "," +
                              hall::class_name(key.second) + "," + str(value) + "\n";
            }

    r.outputs = {{"p", p}, {"nmax", nmax}, {"classes", classes},
                 {"structure_constants", tensor}};
    r.csv = csv + "\n" + tensor_csv;
    return r;
}

Run run_hall_product(const std::string& lhs, const std::string& rhs, std::uint32_t p) {
    Run r;
    r.inputs = {{"lhs", lhs}, {"rhs", rhs}, {"p", p}};
    auto lhs_id = hall::parse_class_name(lhs), rhs_id = hall::parse_class_name(rhs);
    auto table = hall::enumerate_classes(lhs_id.first + rhs_id.first, PrimeField(p));
    hall::HallElement a, b;
    a.add(lhs_id, 1);
    b.add(rhs_id, 1);
    auto product = hall::hall_product(table, a, b);
    r.outputs = {{"lhs", lhs}, {"rhs", rhs}, {"coefficients", hall_element_json(product)}};
    return r;
}

Run run_hall_assoc(int lmax, std::uint32_t p) {
    Run r;
    r.inputs = {{"lmax", lmax}, {"p", p}};
    auto table = hall::enumerate_classes(lmax, PrimeField(p));
    auto report = hall::check_associativity(table, lmax);
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"n", hall::class_name(v.n)},
                              {"l", hall::class_name(v.l)},
                              {"p", hall::class_name(v.p)}});
    r.outputs = {{"triples_checked", report.triples_checked}, {"violations", violations}};
    r.expectation_failed = !report.violations.empty();
    return r;
}

Run run_hall_commutators(int lmax, std::uint32_t p) {
    Run r;
    r.inputs = {{"lmax", lmax}, {"p", p}};
    auto table = hall::enumerate_classes(lmax, PrimeField(p));
    auto entries = hall::commutator_table(table, lmax);
    json out = json::array();
    std::string csv = "lhs,rhs,defect\n";
    for (const auto& e : entries) {
        json diffs = json::array();
        for (const auto& [id, c] : e.difference) {
            json d = rat_json(c);
            d["class"] = hall::class_name(id);
            diffs.push_back(d);
        }
        out.push_back({{"lhs", hall::class_name(e.lhs)},
                       {"rhs", hall::class_name(e.rhs)},
                       {"defect", str(e.defect)},
                       {"difference", diffs}});
        csv += hall::class_name(e.lhs) + "," + hall::class_name(e.rhs) + "," + str(e.defect) +
               "\n";
    }
    r.outputs = {{"entries", out}};
    r.csv = csv;
    return r;
}

Run run_mc_card(const std::string& entry, const std::string& catalog_path) {
    Run r;
    r.inputs = {{"catalog_entry", entry}, {"catalog", catalog_path}};
    auto catalog = mc::load_catalog(catalog_path);
    const auto& a = catalog.algebra(entry);
    auto card = mc::groupoid_card(a.algebra);
    auto h = mc::cohomology_dims(a.algebra);

    bool matches = card.object_count == a.expected.object_count &&
                   card.orbit_count == a.expected.orbit_count &&
                   card.stabilizer_orders == a.expected.stabilizer_orders;
    r.outputs = {{"id", a.id},
                 {"p", a.algebra.field.p},
                 {"dims", a.algebra.dims},
                 {"abelian", a.algebra.is_abelian()},
                 {"cohomology_dims", h},
                 {"card", card_json(card)},
                 {"matches_expected", matches}};
    r.expectation_failed = !matches;
    return r;
}

Run run_mc_compare(const std::string& lhs, const std::string& rhs,
                   const std::string& catalog_path) {
    Run r;
    r.inputs = {{"lhs", lhs}, {"rhs", rhs}, {"catalog", catalog_path}};
    auto catalog = mc::load_catalog(catalog_path);
    const auto& pair = catalog.qis_pair(lhs, rhs);
    auto report = mc::quasi_iso_compare(pair.lhs, pair.rhs, pair.phi);
    r.outputs = {{"pair", pair.id},
                 {"lhs", {{"id", pair.lhs_id}, {"card", card_json(report.lhs)}}},
                 {"rhs", {{"id", pair.rhs_id}, {"card", card_json(report.rhs)}}},
                 {"match", report.match}};
    return r;
}

json sign_json(const mc::FibrationSignResult& s) {
    return {{"axioms_ok", s.axioms_ok},
            {"set_identity_ok", s.set_identity_ok},
            {"card_identity_ok", s.card_identity_ok},
            {"fiber_sum", str(s.fiber_sum)},
            {"failure", s.failure}};
}

Run run_mc_fibration(const std::string& entry, const std::string& catalog_path) {
    Run r;
    r.inputs = {{"catalog_entry", entry}, {"catalog", catalog_path}};
    auto catalog = mc::load_catalog(catalog_path);
    const auto& fib = catalog.fibration(entry);
    auto report = mc::fibration_count(fib.input);
    std::string passing = report.passing_signs();
    bool matches = passing == fib.expected_sign && report.mc_g == fib.expected_mc_g;
    r.outputs = {{"id", fib.id},
                 {"mc_g", str(report.mc_g)},
                 {"mc_h", str(report.mc_h)},
                 {"plus", sign_json(report.plus)},
                 {"minus", sign_json(report.minus)},
                 {"passing_signs", passing},
                 {"expected_sign", fib.expected_sign},
                 {"matches_expected", matches}};
    r.expectation_failed = passing.empty() || !matches;
    return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"counting workbench for commuting varieties, Hall algebras and "
                 "Maurer-Cartan groupoids"};
    app.require_subcommand(1);

    std::string format = "json";
    std::string output_path;
    unsigned threads = 0;
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output", output_path, "also write the record to this file");
    app.add_option("--threads", threads, "worker thread count (0 = hardware)");
    app.fallthrough();

    std::function<Run()> action;
    std::string command;

    // commvar
    auto* commvar_cmd = app.add_subcommand("commvar", "point counts of matrix varieties");
    {
        auto* count = commvar_cmd->add_subcommand("count", "count F_p-points");
        auto variety = std::make_shared<std::string>();
        auto n = std::make_shared<int>(1);
        auto p = std::make_shared<std::uint32_t>(2);
        auto method = std::make_shared<std::string>("auto");
        count->add_option("--variety", *variety, "commuting | nilcommuting")->required();
        count->add_option("--n", *n, "matrix size")->required();
        count->add_option("--p", *p, "field size (prime, or 4)")->required();
        count->add_option("--method", *method, "brute | kernel | classes | auto");
        count->callback([&, variety, n, p, method] {
            command = "commvar count";
            action = [=] { return run_commvar_count(*variety, *n, *p, *method); };
        });

        auto* interp = commvar_cmd->add_subcommand("interpolate", "recover the count polynomial");
        auto iv = std::make_shared<std::string>();
        auto in_ = std::make_shared<int>(1);
        auto degree = std::make_shared<int>(0);
        interp->add_option("--variety", *iv, "commuting | nilcommuting")->required();
        interp->add_option("--n", *in_, "matrix size")->required();
        interp->add_option("--degree", *degree, "degree bound")->required();
        interp->callback([&, iv, in_, degree] {
            command = "commvar interpolate";
            action = [=] { return run_commvar_interpolate(*iv, *in_, *degree); };
        });
    }

    // series
    auto* series_cmd = app.add_subcommand("series", "bigraded Hilbert series");
    {
        auto* ff = series_cmd->add_subcommand("feitfine", "the product series");
        auto N = std::make_shared<int>(2);
        auto K = std::make_shared<int>(3);
        auto eval_at = std::make_shared<std::int64_t>(0);
        ff->add_option("--N", *N, "t-truncation order")->required();
        ff->add_option("--K", *K, "u-window depth")->required();
        ff->add_option("--eval-at", *eval_at, "also evaluate the exact coefficients at u = q");
        ff->callback([&, N, K, eval_at] {
            command = "series feitfine";
            action = [=] { return run_series_feitfine(*N, *K, *eval_at); };
        });

        auto* pbw = series_cmd->add_subcommand("pbw", "Sym(H_*^BM (x) Theta') series");
        auto betti = std::make_shared<std::string>();
        auto pN = std::make_shared<int>(2);
        auto pK = std::make_shared<int>(3);
        pbw->add_option("--betti", *betti, "b0,b1,b2,b3,b4")->required();
        pbw->add_option("--N", *pN, "t-truncation order")->required();
        pbw->add_option("--K", *pK, "u-window depth")->required();
        pbw->callback([&, betti, pN, pK] {
            command = "series pbw";
            action = [=] { return run_series_pbw(*betti, *pN, *pK); };
        });

        auto* ps = series_cmd->add_subcommand("power-structure",
                                              "global vs punctual factorization of counts");
        auto q = std::make_shared<std::uint32_t>(2);
        auto psN = std::make_shared<int>(2);
        ps->add_option("--q", *q, "base field size");
        ps->add_option("--N", *psN, "length truncation");
        ps->callback([&, q, psN] {
            command = "series power-structure";
            action = [=] { return run_series_power_structure(*q, *psN); };
        });
    }

    // hall
    auto* hall_cmd = app.add_subcommand("hall", "counting Hall algebra of F_p[x,y]-modules");
    {
        auto* table = hall_cmd->add_subcommand("table", "enumerate module classes");
        auto nmax = std::make_shared<int>(2);
        auto p = std::make_shared<std::uint32_t>(2);
        table->add_option("--nmax", *nmax, "largest module length")->required();
        table->add_option("--p", *p, "prime (2 or 3)")->required();
        table->callback([&, nmax, p] {
            command = "hall table";
            action = [=] { return run_hall_table(*nmax, *p); };
        });

        auto* product = hall_cmd->add_subcommand("product", "multiply two classes");
        auto lhs = std::make_shared<std::string>();
        auto rhs = std::make_shared<std::string>();
        auto pp = std::make_shared<std::uint32_t>(2);
        product->add_option("--lhs", *lhs, "class name, e.g. n1-0")->required();
        product->add_option("--rhs", *rhs, "class name")->required();
        product->add_option("--p", *pp, "prime (2 or 3)");
        product->callback([&, lhs, rhs, pp] {
            command = "hall product";
            action = [=] { return run_hall_product(*lhs, *rhs, *pp); };
        });

        auto* assoc = hall_cmd->add_subcommand("assoc", "exhaustive associativity check");
        auto almax = std::make_shared<int>(3);
        auto ap = std::make_shared<std::uint32_t>(2);
        assoc->add_option("--lmax", *almax, "total length bound");
        assoc->add_option("--p", *ap, "prime (2 or 3)");
        assoc->callback([&, almax, ap] {
            command = "hall assoc";
            action = [=] { return run_hall_assoc(*almax, *ap); };
        });

        auto* comm = hall_cmd->add_subcommand("commutators", "commutator defect table");
        auto clmax = std::make_shared<int>(3);
        auto cp = std::make_shared<std::uint32_t>(2);
        comm->add_option("--lmax", *clmax, "total length bound");
        comm->add_option("--p", *cp, "prime (2 or 3)");
        comm->callback([&, clmax, cp] {
            command = "hall commutators";
            action = [=] { return run_hall_commutators(*clmax, *cp); };
        });
    }

    // mc
    auto* mc_cmd = app.add_subcommand("mc", "Maurer-Cartan groupoid calculus");
    {
        auto* card = mc_cmd->add_subcommand("card", "orbit/stabilizer census of a catalog entry");
        auto entry = std::make_shared<std::string>();
        auto catalog = std::make_shared<std::string>(kDefaultCatalog);
        card->add_option("--catalog-entry", *entry, "algebra id")->required();
        card->add_option("--catalog", *catalog, "catalog path");
        card->callback([&, entry, catalog] {
            command = "mc card";
            action = [=] { return run_mc_card(*entry, *catalog); };
        });

        auto* compare = mc_cmd->add_subcommand("compare", "quasi-isomorphism invariance");
        auto lhs = std::make_shared<std::string>();
        auto rhs = std::make_shared<std::string>();
        auto ccatalog = std::make_shared<std::string>(kDefaultCatalog);
        compare->add_option("--lhs", *lhs, "algebra id or pair id")->required();
        compare->add_option("--rhs", *rhs, "algebra id (optional with a pair id)");
        compare->add_option("--catalog", *ccatalog, "catalog path");
        compare->callback([&, lhs, rhs, ccatalog] {
            command = "mc compare";
            action = [=] { return run_mc_compare(*lhs, *rhs, *ccatalog); };
        });

        auto* fib = mc_cmd->add_subcommand("fibration", "semidirect fiber counting");
        auto fentry = std::make_shared<std::string>();
        auto fcatalog = std::make_shared<std::string>(kDefaultCatalog);
        fib->add_option("--catalog-entry", *fentry, "fibration id")->required();
        fib->add_option("--catalog", *fcatalog, "catalog path");
        fib->callback([&, fentry, fcatalog] {
            command = "mc fibration";
            action = [=] { return run_mc_fibration(*fentry, *fcatalog); };
        });
    }

    auto emit_error = [&](const std::string& kind, const std::string& message) {
        json record = {{"error", {{"kind", kind}, {"message", message}}}};
        out << record.dump(2) << "\n";
    };

    try {
        std::vector<const char*> argv;
        argv.push_back("coha");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        emit_error("precondition", e.what());
        return kExitPrecondition;
    }

    if (threads > 0) set_thread_count(threads);

    try {
        auto start = std::chrono::steady_clock::now();
        Run result = action();
        auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();

        if (format == "csv") {
            if (result.csv.empty())
                throw PreconditionError("csv format is only available for flat tables");
            out << result.csv;
            if (!output_path.empty()) {
                std::ofstream f(output_path);
                f << result.csv;
            }
        } else {
            json record = {{"command", command},
                           {"inputs", result.inputs},
                           {"outputs", result.outputs},
                           {"tool_version", kToolVersion},
                           {"wall_time_ms", elapsed}};
            std::string text = record.dump(2) + "\n";
            out << text;
            if (!output_path.empty()) {
                std::ofstream f(output_path);
                f << text;
            }
        }
        return result.expectation_failed ? kExitExpectation : kExitOk;
    } catch (const PreconditionError& e) {
        emit_error("precondition", e.what());
        return kExitPrecondition;
    } catch (const InfeasibleError& e) {
        emit_error("infeasible", e.what());
        return kExitInfeasible;
    } catch (const ExpectationError& e) {
        emit_error("expectation", e.what());
        return kExitExpectation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        emit_error("internal", e.what());
        return 1;
    }
}

}  // namespace coha::cli
