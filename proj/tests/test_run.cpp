#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "specmix/error.hpp"
#include "specmix/run.hpp"

using namespace specmix;
namespace fs = std::filesystem;

namespace {

std::string parse_code(const Json& config, const std::string& cmd = "") {
    try {
        parse_config(config, cmd);
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("specmix_run_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_quiet(const RunConfig& cfg, std::string* err_out = nullptr) {
    std::ostringstream err;
    const int rc = run(cfg, err);
    if (err_out) *err_out = err.str();
    return rc;
}

}  // namespace

TEST_SUITE("run") {

TEST_CASE("minimal poly config fills documented defaults") {
    const Json config = {{"polys", {{0, 1}}}, {"xi", {1}}, {"K", 2}};
    const RunConfig cfg = parse_config(config, "construct-poly");
    CHECK(cfg.command == "construct-poly");
    CHECK(cfg.eps == 1e-9);
    CHECK(cfg.jobs == 1);
    CHECK(cfg.params.at("n0") == 2);
    CHECK(cfg.params.at("T") == 7);  // K + 5
    CHECK(cfg.params.at("m_lo") == -4);
    CHECK(cfg.params.at("m_hi") == 4);
}

TEST_CASE("config validation rejects malformed input") {
    const Json base = {{"polys", {{0, 1}}}, {"K", 2}};

    Json unknown = base;
    unknown["frobnicate"] = 1;
    CHECK(parse_code(unknown, "construct-poly") == "parse-error");

    Json bad_xi = base;
    bad_xi["xi"] = {1, 0};  // family has one member
    CHECK(parse_code(bad_xi, "construct-poly") == "validation-error");

    Json bad_eps = base;
    bad_eps["eps"] = -1e-9;
    CHECK(parse_code(bad_eps, "construct-poly") == "validation-error");

    Json bad_k = base;
    bad_k["K"] = 0;
    CHECK(parse_code(bad_k, "construct-poly") == "validation-error");

    Json clash = base;
    clash["command"] = "weyl";
    CHECK(parse_code(clash, "construct-poly") == "validation-error");

    CHECK(parse_code(base) == "validation-error");  // no command at all
    CHECK(parse_code(base, "no-such-command") == "validation-error");
}

TEST_CASE("SPECMIX_MAX_LEVELS caps the level count") {
    const Json config = {{"polys", {{0, 1}}}, {"xi", {1}}, {"K", 3}};
    setenv("SPECMIX_MAX_LEVELS", "4", 1);
    CHECK(parse_config(config, "construct-poly").params.at("T") == 4);
    setenv("SPECMIX_MAX_LEVELS", "banana", 1);
    CHECK(parse_code(config, "construct-poly") == "validation-error");
    unsetenv("SPECMIX_MAX_LEVELS");
    CHECK(parse_config(config, "construct-poly").params.at("T") == 8);
}

TEST_CASE("construct-poly writes the full artifact bundle") {
    TempDir dir("poly");
    // three levels leave a visible certified tail, so the radius budget is coarse
    Json config = {{"polys", {{0, 1}}}, {"K", 2}, {"T", 3}, {"eps", 1e-6},
                   {"m_lo", -2}, {"m_hi", 2}, {"out", dir.str()}};
    RunConfig cfg = parse_config(config, "construct-poly");
    std::string err;
    REQUIRE(run_quiet(cfg, &err) == 0);
    CHECK(err.empty());

    for (const char* name : {"summary.json", "anchor.json", "solutions.json",
                             "measure_0.json", "measure_1.json", "table_0.csv",
                             "table_1.csv", "plot_0.csv", "plot_1.csv"})
        CHECK(fs::exists(dir.file(name)));

    const Json summary = Json::parse(read_file(dir.file("summary.json")));
    CHECK(summary.at("command") == "construct-poly");
    CHECK(summary.at("params").at("T") == 3);
    CHECK(summary.at("profiles") == Json::array({"0", "1"}));

    const CoinMeasure mu = measure_from_json(Json::parse(read_file(dir.file("measure_1.json"))));
    CHECK(mu.levels.size() == 3);

    const std::string table = read_file(dir.file("table_1.csv"));
    CHECK(table.rfind("j,k,m,sigma_shifted,sigma_target,error,radius\n", 0) == 0);

    // identical config and seed reproduce every artifact byte for byte
    TempDir dir2("poly_again");
    cfg.out_dir = dir2.str();
    REQUIRE(run_quiet(cfg) == 0);
    for (const char* name : {"summary.json", "anchor.json", "solutions.json",
                             "measure_0.json", "table_0.csv", "plot_0.csv"}) {
        INFO(name);
        // summaries differ only if config leaks the out dir; they must not
        if (std::string(name) == "summary.json") {
            Json a = Json::parse(read_file(dir.file(name)));
            Json b = Json::parse(read_file(dir2.file(name)));
            CHECK(a == b);
        } else {
            CHECK(read_file(dir.file(name)) == read_file(dir2.file(name)));
        }
    }
}

TEST_CASE("verify reproduces a finished run and flags tampering") {
    TempDir dir("verified");
    Json config = {{"polys", {{0, 1}}}, {"xi", {1}}, {"K", 2}, {"T", 3},
                   {"eps", 1e-6}, {"m_lo", -1}, {"m_hi", 1}, {"out", dir.str()}};
    REQUIRE(run_quiet(parse_config(config, "construct-poly")) == 0);

    TempDir report("report");
    Json vconfig = {{"dir", dir.str()}, {"out", report.str()}};
    CHECK(run_quiet(parse_config(vconfig, "verify")) == 0);
    const Json rep = Json::parse(read_file(report.file("report.json")));
    CHECK(rep.at("match") == true);

    // flip one byte in a measure artifact
    std::string text = read_file(dir.file("measure_1.json"));
    text[text.find("1/") + 1] = '9';
    write_file(dir.file("measure_1.json"), text);
    std::string err;
    CHECK(run_quiet(parse_config(vconfig, "verify"), &err) == 2);
    CHECK(err.find("certified-bound-violation") != std::string::npos);
    const Json rep2 = Json::parse(read_file(report.file("report.json")));
    CHECK(rep2.at("match") == false);
}

TEST_CASE("construct-primes emits measures and the profile table") {
    TempDir dir("primes");
    Json config = {{"N", 2}, {"primes", {2, 3}}, {"K", 2}, {"T", 3},
                   {"eps", 1e-4}, {"m_lo", -1}, {"m_hi", 1}, {"out", dir.str()}};
    REQUIRE(run_quiet(parse_config(config, "construct-primes")) == 0);

    const Json profiles = Json::parse(read_file(dir.file("profiles.json")));
    REQUIRE(profiles.size() == 4);
    CHECK(profiles[0].at("xi") == "00");
    CHECK(profiles[0].at("subset") == Json::array({1, 2}));
    CHECK(profiles[3].at("xi") == "11");
    CHECK(profiles[3].at("subset") == Json::array());

    std::set<std::string> keys;
    for (const Json& row : profiles) keys.insert(row.at("xi").get<std::string>());
    CHECK(keys.size() == 4);

    for (const char* name : {"spec.json", "anchor.json", "measure_0_00.json",
                             "measure_3_11.json", "table_1_01.csv", "plot_2_10.csv"})
        CHECK(fs::exists(dir.file(name)));

    const Json spec = Json::parse(read_file(dir.file("spec.json")));
    CHECK(spec.at("M") == "5");
    CHECK(spec.at("q") == Json::array({"2", "3"}));
}

TEST_CASE("construct-general searches, certifies, and serializes frequencies") {
    TempDir dir("general");
    Json config = {{"family", {{"polys", {{0, 1}}}}}, {"profiles", {"0", "1"}},
                   {"K", 2}, {"scan_bound", 20000}, {"seed", 11},
                   {"m_lo", -1}, {"m_hi", 1}, {"out", dir.str()}};
    REQUIRE(run_quiet(parse_config(config, "construct-general")) == 0);

    const Json alphas = Json::parse(read_file(dir.file("alphas.json")));
    REQUIRE(alphas.contains("0"));
    REQUIRE(alphas.contains("1"));
    CHECK(alphas.at("0").size() == 2);

    const Json anchor = Json::parse(read_file(dir.file("anchor.json")));
    CHECK(anchor.at("entries").size() == 2);
    CHECK(fs::exists(dir.file("measure_0.json")));
    CHECK(fs::exists(dir.file("table_1.csv")));

    const CoinMeasure mu = measure_from_json(Json::parse(read_file(dir.file("measure_1.json"))));
    CHECK(mu.levels.size() == 2);
    CHECK(mu.tail.kind == TailBound::Kind::PowerGrowth);

    Json wide = config;
    wide["family"] = {{"polys", {{0, 1}, {0, 0, 1}, {0, 0, 0, 1}, {0, 0, 0, 0, 1}}}};
    wide["profiles"] = {"0000"};
    CHECK(parse_code(wide, "construct-general") == "validation-error");
}

TEST_CASE("weyl survey reports exact cancellations") {
    TempDir dir("weyl");
    Json config = {{"family", {{"polys", {{0, 1}}}}}, {"alphas", {"1/4"}},
                   {"M", 4}, {"box", 1}, {"out", dir.str()}};
    REQUIRE(run_quiet(parse_config(config, "weyl")) == 0);

    const Json rep = Json::parse(read_file(dir.file("weyl.json")));
    REQUIRE(rep.at("reports").size() == 1);
    const Json& sums = rep.at("reports")[0].at("sums");
    REQUIRE(sums.size() == 2);  // a = -1 and a = +1
    for (const Json& s : sums) CHECK(s.at("abs") == "0");

    Json both = config;
    both["count"] = 3;
    CHECK(parse_code(both, "weyl") == "validation-error");

    Json seeded = {{"family", {{"polys", {{0, 1}}}}}, {"count", 2}, {"M", 50},
                   {"box", 1}, {"seed", 5}, {"out", dir.str()}};
    REQUIRE(run_quiet(parse_config(seeded, "weyl")) == 0);
    const Json rep2 = Json::parse(read_file(dir.file("weyl.json")));
    CHECK(rep2.at("reports").size() == 2);
}

TEST_CASE("interpolate reports an exactly zero residual") {
    TempDir dir("interp");
    Json config = {{"lambda", {"1/2"}}, {"rank", 1}, {"L", 3},
                   {"n_list", {1, 2, 5}}, {"seed", 9}, {"out", dir.str()}};
    REQUIRE(run_quiet(parse_config(config, "interpolate")) == 0);

    const Json rep = Json::parse(read_file(dir.file("interpolation.json")));
    CHECK(rep.at("residual") == "0/1");
    CHECK(rep.at("residual_exact") == true);
    CHECK(rep.at("metric_bound").at("ok") == true);
    CHECK(rep.at("glued_resolution") == 4);  // L=3 plus one lambda bit

    const Json pieces = Json::parse(read_file(dir.file("pieces.json")));
    REQUIRE(pieces.size() == 2);
    CHECK(pieces[0].size() == 8);

    Json bad = config;
    bad["pieces"] = {Json::array({0, 1})};  // one piece, need two
    CHECK(parse_code(bad, "interpolate") == "validation-error");
}

TEST_CASE("wiener reports the M=0 average exactly") {
    TempDir dir("wiener");
    const Json inline_measure = {
        {"levels", {{{"C", "1/2"}, {"A", 2}}}},
        {"tail", {{"kind", "geometric"}, {"ratio", "1/2"}, {"scale", "0/1"}}}};
    Json config = {{"measure", inline_measure}, {"M_list", {0, 4}}, {"out", dir.str()}};
    REQUIRE(run_quiet(parse_config(config, "wiener")) == 0);

    const Json rep = Json::parse(read_file(dir.file("wiener.json")));
    REQUIRE(rep.at("values").size() == 2);
    CHECK(rep.at("values")[0].at("value") == "1");
    // single level at C=1/2: sigma is 1 on even m, 0 on odd; the average over
    // |m| <= 4 is 5/9
    const double v4 = std::strtod(rep.at("values")[1].at("value").get<std::string>().c_str(),
                                  nullptr);
    CHECK(v4 == doctest::Approx(5.0 / 9.0).epsilon(1e-12));

    // same measure from a file path
    const std::string mpath = dir.file("m.json");
    write_file(mpath, inline_measure.dump());
    Json fileconf = {{"measure", mpath}, {"M_list", {0}}, {"out", dir.str()}};
    CHECK(run_quiet(parse_config(fileconf, "wiener")) == 0);
}

TEST_CASE("operational failures exit 1 with a structured record") {
    TempDir dir("fail");
    Json config = {{"polys", {{0, 1}, {0, 2}}}, {"xi", {1, 0}}, {"K", 2},
                   {"out", dir.str()}};
    // {n, 2n} is linearly dependent: rank-deficient system
    RunConfig cfg = parse_config(config, "construct-poly");
    std::string err;
    CHECK(run_quiet(cfg, &err) == 1);
    const Json rec = Json::parse(err);
    CHECK(rec.at("error").contains("code"));
    CHECK(rec.at("error").contains("message"));
}

}
