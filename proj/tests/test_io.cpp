#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "specmix/error.hpp"
#include "specmix/io.hpp"

using namespace specmix;

namespace {

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

CoinMeasure geometric_measure() {
    CoinMeasure mu;
    mu.levels.push_back({torus_reduce(Rational(1, 4)), 2});
    mu.levels.push_back({torus_reduce(Rational(1, 8)), 3});
    mu.tail = geometric_tail(Rational(1, 2), Rational(1, 2));
    finalize_measure(mu);
    return mu;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles print with 17 significant digits") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1e-9) == "1.0000000000000001e-09");
    // 17 digits are enough to round-trip any double
    for (double x : {3.141592653589793, 2.2250738585072014e-308, 0.3, 1.0 / 3.0}) {
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("integers travel as decimal strings") {
    CHECK(int_to_decimal(Int(-123)) == "-123");
    CHECK(int_to_decimal(Int(0)) == "0");
    const Int big = (Int(1) << 200) + 7;
    CHECK(int_from_decimal(int_to_decimal(big)) == big);
    CHECK(code_of([] { int_from_decimal("12x"); }) == "parse-error");
    CHECK(code_of([] { int_from_decimal(""); }) == "parse-error");
}

TEST_CASE("geometric measure serializes to the pinned shape") {
    const CoinMeasure mu = geometric_measure();
    const Json j = measure_to_json(mu);
    CHECK(j.dump() ==
          R"({"levels":[{"C":"1/4","A":2},{"C":"1/8","A":3}],)"
          R"("tail":{"kind":"geometric","ratio":"1/2","scale":"1/2"}})");

    const CoinMeasure back = measure_from_json(j);
    CHECK(measure_to_json(back).dump() == j.dump());
    REQUIRE(back.levels.size() == 2);
    CHECK(back.levels[0].C.value == Rational(1, 4));
    CHECK(back.levels[1].A == 3);
}

TEST_CASE("finite tail round-trips as a zero-scale geometric") {
    CoinMeasure mu;
    mu.levels.push_back({torus_reduce(Rational(1, 2)), 2});
    mu.tail = finite_tail();
    finalize_measure(mu);
    const Json j = measure_to_json(mu);
    CHECK(j["tail"]["scale"] == "0/1");
    const CoinMeasure back = measure_from_json(j);
    CHECK(back.tail.kind == TailBound::Kind::Geometric);
    CHECK(sgn(back.tail.scale) == 0);
    CHECK(measure_to_json(back).dump() == j.dump());
}

TEST_CASE("power growth tail round-trips") {
    CoinMeasure mu;
    mu.levels.push_back({torus_reduce(Rational(1, 16)), 2});
    mu.levels.push_back({torus_reduce(Rational(1, 64)), 2});
    mu.tail.kind = TailBound::Kind::PowerGrowth;
    mu.tail.coef = 1;
    mu.tail.growth_factor = 2;
    mu.tail.growth_power = 1;
    mu.tail.n = {Int(16), Int(64), Int(256)};
    finalize_measure(mu);

    const Json j = measure_to_json(mu);
    CHECK(j["tail"].dump() ==
          R"({"kind":"power_growth","coef":"1/1","growth_factor":"2",)"
          R"("growth_power":1,"n":["16","64","256"]})");
    const CoinMeasure back = measure_from_json(j);
    CHECK(back.tail.kind == TailBound::Kind::PowerGrowth);
    CHECK(back.tail.n.size() == 3);
    CHECK(back.tail.n[2] == 256);
    CHECK(measure_to_json(back).dump() == j.dump());
}

TEST_CASE("prime factorial tail round-trips") {
    const PrimeFamilySpec spec = prime_exponents(2, {Int(2), Int(3)});
    const AnchorSequence anchor = prime_anchor(spec, 2);
    const CoinMeasure mu = build_coin_measure_prime(spec, 1, anchor, 2);

    const Json j = measure_to_json(mu);
    CHECK(j["tail"].dump() == R"({"kind":"prime_factorial","p":"2","P":"30"})");
    CHECK(j["levels"][0]["C"] == "1/1800");
    const CoinMeasure back = measure_from_json(j);
    CHECK(back.tail.kind == TailBound::Kind::PrimeFactorial);
    CHECK(back.tail.prime_P == 30);
    CHECK(measure_to_json(back).dump() == j.dump());
}

TEST_CASE("measure parsing rejects malformed input") {
    const Json good = measure_to_json(geometric_measure());

    Json extra = good;
    extra["note"] = "hi";
    CHECK(code_of([&] { measure_from_json(extra); }) == "parse-error");

    Json extra_level = good;
    extra_level["levels"][0]["z"] = 1;
    CHECK(code_of([&] { measure_from_json(extra_level); }) == "parse-error");

    Json bad_kind = good;
    bad_kind["tail"]["kind"] = "linear";
    CHECK(code_of([&] { measure_from_json(bad_kind); }) == "parse-error");

    Json bad_rat = good;
    bad_rat["levels"][0]["C"] = "1//4";
    CHECK(code_of([&] { measure_from_json(bad_rat); }) == "parse-error");

    Json small_alphabet = good;
    small_alphabet["levels"][0]["A"] = 1;
    CHECK(code_of([&] { measure_from_json(small_alphabet); }) == "invalid-level");

    // tail 1/100 * (1/2)^1 sits below dist(1/4)
    Json weak_tail = good;
    weak_tail["tail"]["scale"] = "1/100";
    CHECK(code_of([&] { measure_from_json(weak_tail); }) == "tail-bound-unavailable");
}

TEST_CASE("anchor certificates round-trip") {
    const PrimeFamilySpec spec = prime_exponents(2, {Int(2), Int(3)});
    const AnchorSequence anchor = prime_anchor(spec, 2);
    const Json j = anchor_to_json(anchor);

    CHECK(j["n0"] == "1");
    CHECK(j["kind"] == "prime-product");
    REQUIRE(j["entries"].size() == 2);
    CHECK(j["entries"][0]["n"] == "900");
    const Json& item = j["entries"][0]["certificate"][0];
    CHECK(item.size() == 4);
    CHECK(item.contains("condition"));
    CHECK(item.contains("detail"));
    CHECK(item.contains("witness"));
    CHECK(item["ok"] == true);

    const AnchorSequence back = anchor_from_json(j);
    CHECK(anchor_to_json(back).dump() == j.dump());
    CHECK(back.entries[1].n == anchor.entries[1].n);
}

TEST_CASE("polynomial families use a0-first coefficient lists") {
    const SequenceFamily fam = family_of_polynomials({{Int(0), Int(1)}, {Int(0), Int(0), Int(1)}});
    const Json j = family_to_json(fam);
    CHECK(j.dump() == R"({"polys":[["0","1"],["0","0","1"]]})");

    const SequenceFamily back = family_from_json(j);
    CHECK(back.size() == 2);
    CHECK(eval_member(back, 2, Int(3)) == 9);
    CHECK(family_to_json(back).dump() == j.dump());

    // plain JSON integers are accepted on the way in
    const SequenceFamily lenient = family_from_json(Json::parse(R"({"polys":[[0,1,5]]})"));
    CHECK(eval_member(lenient, 1, Int(2)) == 22);
}

TEST_CASE("tabulated families round-trip") {
    SequenceFamily fam;
    fam.members.push_back(TabulatedSequence{{Int(4), Int(9), Int(25)}});
    const Json j = family_to_json(fam);
    CHECK(j.dump() == R"({"tables":[["4","9","25"]]})");
    const SequenceFamily back = family_from_json(j);
    CHECK(eval_member(back, 1, Int(3)) == 25);
}

TEST_CASE("family serialization rejects mixed and ambiguous forms") {
    SequenceFamily mixed;
    mixed.members.push_back(make_polynomial({Int(0), Int(1)}));
    mixed.members.push_back(TabulatedSequence{{Int(1)}});
    CHECK(code_of([&] { family_to_json(mixed); }) == "unsupported-family");

    CHECK(code_of([] { family_from_json(Json::parse(R"({})")); }) == "parse-error");
    CHECK(code_of([] {
              family_from_json(Json::parse(R"({"polys":[[0,1]],"tables":[[1]]})"));
          }) == "parse-error");
    CHECK(code_of([] { family_from_json(Json::parse(R"({"polys":[]})")); }) == "parse-error");
}

TEST_CASE("rational vectors and alpha maps round-trip") {
    const std::vector<Rational> v = {Rational(1, 3), Rational(7, 2)};
    const Json j = rational_vector_to_json(v);
    CHECK(j.dump() == R"(["1/3","7/2"])");
    CHECK(rational_vector_from_json(j) == v);
    CHECK(code_of([] { rational_vector_from_json(Json::parse("[1]")); }) == "parse-error");

    AlphaMap m;
    m["01"] = {Rational(1, 8), Rational(3, 16)};
    m["10"] = {Rational(1, 2)};
    const Json mj = alpha_map_to_json(m);
    CHECK(alpha_map_from_json(mj) == m);
    CHECK(mj.dump() == R"({"01":["1/8","3/16"],"10":["1/2"]})");
}

TEST_CASE("automorphisms serialize as index arrays") {
    const GridAutomorphism T = cyclic_permutation(2, 3);
    const Json j = automorphism_to_json(T);
    REQUIRE(j.size() == 8);
    const GridAutomorphism back = automorphism_from_json(j);
    CHECK(back.G == 3);
    CHECK(back.fwd == T.fwd);
    CHECK(back.inv == T.inv);

    CHECK(code_of([] { automorphism_from_json(Json::parse("[0,1,2]")); }) == "parse-error");
    CHECK(code_of([] { automorphism_from_json(Json::parse("[0,0,1,1]")); }) ==
          "invalid-permutation");
    CHECK(code_of([] { automorphism_from_json(Json::parse("[]")); }) == "parse-error");
}

TEST_CASE("prime family specs export their derived data") {
    const PrimeFamilySpec spec = prime_exponents(2, {Int(2), Int(3)});
    const Json j = prime_spec_to_json(spec);
    CHECK(j["N"] == 2);
    CHECK(j["M"] == "5");
    CHECK(j["primes"].dump() == R"(["2","3"])");
    CHECK(j["q"].dump() == R"(["2","3"])");
    CHECK(j["subsets"].dump() == "[1,2]");
}

TEST_CASE("correlation tables print as CSV") {
    CorrelationTable table;
    table.rows.push_back({1, 2, Int(-3), 0.5, 0.25, 0.25, 1e-9});
    CHECK(correlation_table_csv(table) ==
          "j,k,m,sigma_shifted,sigma_target,error,radius\n"
          "1,2,-3,0.5,0.25,0.25,1.0000000000000001e-09\n");
    CHECK(correlation_table_csv(CorrelationTable{}) ==
          "j,k,m,sigma_shifted,sigma_target,error,radius\n");
}

TEST_CASE("plot data keeps the worst error per member and depth") {
    CorrelationTable table;
    table.rows.push_back({1, 1, Int(0), 0.0, 0.0, 0.5, 0.125});
    table.rows.push_back({1, 1, Int(1), 0.0, 0.0, 0.25, 0.125});
    // the certified radius floors an error that is numerically zero
    table.rows.push_back({2, 1, Int(0), 0.0, 0.0, 0.0, 0.125});
    table.rows.push_back({1, 2, Int(0), 0.0, 0.0, 0.0, 0.0625});
    CHECK(plotdata_csv(table) ==
          "k,j,max_error\n"
          "1,1,0.5\n"
          "1,2,0.125\n"
          "2,1,0.0625\n");
    CHECK(code_of([] { plotdata_csv(CorrelationTable{}); }) == "empty-table");
}

TEST_CASE("files round-trip through disk") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "specmix_io_test.txt").string();
    write_file(path, "line1\nline2\n");
    CHECK(read_file(path) == "line1\nline2\n");
    std::filesystem::remove(path);
    CHECK(code_of([&] { read_file(path); }) == "io-error");
    CHECK(code_of([] { write_file("/nonexistent-dir/x.txt", "y"); }) == "io-error");
}

}
