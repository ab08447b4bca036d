#include "specmix/run.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <set>

#include "specmix/error.hpp"
#include "specmix/poly.hpp"
#include "specmix/rng.hpp"

namespace specmix {

namespace fs = std::filesystem;

namespace {

// a certified claim (certificate, exact identity, derived bound) failed;
// distinct from operational errors so run() can map it to exit code 2
struct CertViolation {
    std::string message;
};

std::string error_record(const std::string& code, const std::string& message) {
    Json rec = {{"error", {{"code", code}, {"message", message}}}};
    return rec.dump();
}

// ---------- parameter helpers ----------

void require_keys(const Json& obj, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) fail("parse-error", "unknown key '" + key + "'");
    }
}

const Json& require(const Json& p, const char* key) {
    if (!p.contains(key)) fail("validation-error", std::string("'") + key + "' is required");
    return p.at(key);
}

long long as_int(const Json& v, const char* key) {
    if (!v.is_number_integer())
        fail("parse-error", std::string("'") + key + "' must be an integer");
    return v.get<long long>();
}

long long int_or(const Json& p, const char* key, long long def) {
    return p.contains(key) ? as_int(p.at(key), key) : def;
}

std::vector<Int> int_list(const Json& arr, const char* key) {
    if (!arr.is_array()) fail("parse-error", std::string("'") + key + "' must be an array");
    std::vector<Int> out;
    for (const Json& v : arr) {
        if (v.is_number_integer())
            out.push_back(Int(v.get<long>()));
        else if (v.is_string())
            out.push_back(int_from_decimal(v.get<std::string>()));
        else
            fail("parse-error", std::string("'") + key + "' entries must be integers");
    }
    return out;
}

SequenceFamily family_from_params(const Json& p) {
    if (p.contains("polys")) return family_from_json(Json{{"polys", p.at("polys")}});
    return family_from_json(require(p, "family"));
}

std::vector<int> xi_from_json(const Json& v, unsigned N) {
    if (!v.is_array()) fail("parse-error", "'xi' must be an array of bits");
    if (v.size() != N)
        fail("validation-error", "xi length must match the number of family members");
    std::vector<int> xi;
    for (const Json& b : v) {
        if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1))
            fail("validation-error", "xi entries must be 0 or 1");
        xi.push_back(b.get<int>());
    }
    return xi;
}

// ---------- per-command validation (defaults filled in place) ----------

void cap_levels(Json& p, const RunConfig& cfg) {
    if (cfg.max_levels && p.at("T").get<long long>() > cfg.max_levels)
        p["T"] = cfg.max_levels;
}

void fill_m_range(Json& p, long long lo_def, long long hi_def) {
    const long long lo = int_or(p, "m_lo", lo_def);
    const long long hi = int_or(p, "m_hi", hi_def);
    if (hi < lo) fail("validation-error", "m_hi is below m_lo");
    p["m_lo"] = lo;
    p["m_hi"] = hi;
}

void validate_construct_poly(Json& p, const RunConfig& cfg) {
    require_keys(p, {"polys", "xi", "K", "n0", "T", "m_lo", "m_hi", "scan_bound"});
    const SequenceFamily fam = family_from_json(Json{{"polys", require(p, "polys")}});
    if (p.contains("xi"))
        xi_from_json(p.at("xi"), fam.size());
    else if (fam.size() > 10)
        fail("validation-error", "give an explicit xi for families with more than 10 members");
    const long long K = as_int(require(p, "K"), "K");
    if (K < 1) fail("validation-error", "K must be positive");
    const long long n0 = int_or(p, "n0", 2);
    if (n0 < 2) fail("validation-error", "n0 must exceed 1");
    const long long T = int_or(p, "T", K + 5);
    if (T < 1) fail("validation-error", "T must be positive");
    const long long scan = int_or(p, "scan_bound", 1000000);
    if (scan < 1) fail("validation-error", "scan_bound must be positive");
    p["K"] = K;
    p["n0"] = n0;
    p["T"] = T;
    p["scan_bound"] = scan;
    fill_m_range(p, -4, 4);
    cap_levels(p, cfg);
}

void validate_construct_general(Json& p, const RunConfig& cfg) {
    require_keys(p, {"family", "profiles", "K", "T", "scan_bound", "m_lo", "m_hi",
                     "max_members"});
    const SequenceFamily fam = family_from_json(require(p, "family"));
    const long long max_members = int_or(p, "max_members", 3);
    if (max_members < 1) fail("validation-error", "max_members must be positive");
    if (fam.size() > max_members)
        fail("validation-error", "family has " + std::to_string(fam.size()) +
                                     " members; raise max_members to search this wide");
    const Json& profs = require(p, "profiles");
    if (!profs.is_array() || profs.empty())
        fail("validation-error", "'profiles' must be a nonempty array");
    std::set<std::string> seen;
    for (const Json& v : profs) {
        if (!v.is_string()) fail("parse-error", "profiles are bit strings like \"01\"");
        const std::string key = v.get<std::string>();
        if (key.size() != fam.size())
            fail("validation-error", "profile '" + key + "' length must match the family size");
        for (char c : key)
            if (c != '0' && c != '1')
                fail("validation-error", "profile '" + key + "' must contain only 0 and 1");
        if (!seen.insert(key).second)
            fail("validation-error", "duplicate profile '" + key + "'");
    }
    const long long K = as_int(require(p, "K"), "K");
    if (K < 1) fail("validation-error", "K must be positive");
    const long long T = int_or(p, "T", K);
    if (T < 1 || T > K) fail("validation-error", "T must lie in 1..K");
    const long long scan = int_or(p, "scan_bound", 100000);
    if (scan < 1) fail("validation-error", "scan_bound must be positive");
    p["K"] = K;
    p["T"] = T;
    p["scan_bound"] = scan;
    p["max_members"] = max_members;
    fill_m_range(p, -2, 2);
    cap_levels(p, cfg);
}

void validate_construct_primes(Json& p, const RunConfig& cfg) {
    require_keys(p, {"N", "primes", "K", "T", "m_lo", "m_hi", "indices"});
    const long long N = as_int(require(p, "N"), "N");
    if (N < 2 || N > 20) fail("validation-error", "N must lie in 2..20");
    int_list(require(p, "primes"), "primes");  // count/primality checked at run
    const long long K = as_int(require(p, "K"), "K");
    if (K < 1) fail("validation-error", "K must be positive");
    const long long T = int_or(p, "T", K + 3);
    if (T < 1) fail("validation-error", "T must be positive");
    if (p.contains("indices")) {
        const Json& idx = p.at("indices");
        if (!idx.is_array() || idx.empty())
            fail("validation-error", "'indices' must be a nonempty array");
        for (const Json& v : idx) {
            const long long i = as_int(v, "indices");
            if (i < 0 || i >= (1ll << N))
                fail("validation-error", "index " + std::to_string(i) + " is out of range");
        }
    } else {
        Json idx = Json::array();
        for (long long i = 0; i < (1ll << N); ++i) idx.push_back(i);
        p["indices"] = idx;
    }
    p["K"] = K;
    p["T"] = T;
    fill_m_range(p, -2, 2);
    cap_levels(p, cfg);
}

void validate_verify(Json& p, const RunConfig&) {
    require_keys(p, {"dir"});
    if (!require(p, "dir").is_string()) fail("parse-error", "'dir' must be a string");
}

void validate_weyl(Json& p, const RunConfig&) {
    require_keys(p, {"family", "alphas", "count", "M", "box"});
    const SequenceFamily fam = family_from_json(require(p, "family"));
    if (p.contains("alphas") && p.contains("count"))
        fail("validation-error", "give either explicit alphas or a draw count, not both");
    if (p.contains("alphas")) {
        const std::vector<Rational> a = rational_vector_from_json(p.at("alphas"));
        if (a.size() != fam.size())
            fail("validation-error", "alphas length must match the family size");
    } else {
        const long long count = int_or(p, "count", 1);
        if (count < 1) fail("validation-error", "count must be positive");
        p["count"] = count;
    }
    const long long M = int_or(p, "M", 10000);
    if (M < 1) fail("validation-error", "M must be positive");
    const long long box = int_or(p, "box", 3);
    if (box < 1) fail("validation-error", "box must be positive");
    p["M"] = M;
    p["box"] = box;
}

void validate_interpolate(Json& p, const RunConfig&) {
    require_keys(p, {"lambda", "rank", "L", "pieces", "n_list"});
    const std::vector<Rational> lambda = rational_vector_from_json(require(p, "lambda"));
    if (lambda.empty()) fail("validation-error", "'lambda' must be nonempty");
    const long long rank = int_or(p, "rank", 2);
    const long long L = int_or(p, "L", 6);
    if (rank < 1) fail("validation-error", "rank must be positive");
    if (L < rank) fail("validation-error", "piece resolution L must be at least the rank");
    if (p.contains("pieces")) {
        const Json& pieces = p.at("pieces");
        if (!pieces.is_array() || pieces.size() != lambda.size() + 1)
            fail("validation-error", "'pieces' must hold exactly N+1 permutations");
    }
    if (p.contains("n_list")) {
        int_list(p.at("n_list"), "n_list");
    } else {
        p["n_list"] = Json::array({1, 2, 4, 8});
    }
    p["rank"] = rank;
    p["L"] = L;
}

void validate_wiener(Json& p, const RunConfig&) {
    require_keys(p, {"measure", "M_list"});
    const Json& m = require(p, "measure");
    if (!m.is_string() && !m.is_object())
        fail("parse-error", "'measure' must be a file path or an inline measure object");
    if (p.contains("M_list")) {
        const Json& ms = p.at("M_list");
        if (!ms.is_array() || ms.empty())
            fail("validation-error", "'M_list' must be a nonempty array");
        for (const Json& v : ms)
            if (as_int(v, "M_list") < 0) fail("validation-error", "M values must be nonnegative");
    } else {
        p["M_list"] = Json::array({16, 64, 256});
    }
}

// ---------- artifact helpers ----------

void write_json(const std::string& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

std::string opath(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

void ensure_out(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) fail("io-error", "cannot create output directory '" + cfg.out_dir + "'");
}

Json base_summary(const RunConfig& cfg) {
    return {{"command", cfg.command},
            {"eps", format_double(cfg.eps)},
            {"jobs", cfg.jobs},
            {"seed", cfg.seed},
            {"params", cfg.params}};
}

// exact comparison of a float row error against a rational certified bound
bool exceeds(double value, const Rational& bound) { return Rational(value) > bound; }

GridAutomorphism random_piece(unsigned G, SplitMix64& rng) {
    std::vector<std::uint32_t> perm(1ul << G);
    for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size() - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(i + 1)]);
    return make_automorphism(G, std::move(perm));
}

// ---------- command handlers ----------

void run_construct_poly(const RunConfig& cfg) {
    const Json& p = cfg.params;
    const SequenceFamily fam = family_from_json(Json{{"polys", p.at("polys")}});
    const unsigned N = fam.size();
    const unsigned K = p.at("K").get<unsigned>();
    const unsigned T = p.at("T").get<unsigned>();
    const Int n0(p.at("n0").get<long>());
    const Int m_lo(p.at("m_lo").get<long>());
    const Int m_hi(p.at("m_hi").get<long>());
    const unsigned long scan = p.at("scan_bound").get<unsigned long>();

    std::vector<std::vector<int>> profiles;
    if (p.contains("xi")) {
        profiles.push_back(xi_from_json(p.at("xi"), N));
    } else {
        for (unsigned long mask = 0; mask < (1ul << N); ++mask) {
            std::vector<int> xi(N);
            for (unsigned j = 0; j < N; ++j) xi[j] = static_cast<int>((mask >> (N - 1 - j)) & 1);
            profiles.push_back(std::move(xi));
        }
    }

    const IntMatrix D = coefficient_matrix(fam);
    SolutionsMap sols;
    for (const auto& xi : profiles) sols[xi_key(xi)] = solve_rational(D, make_profile(xi).b);

    const AnchorSequence anchor = choose_anchor_poly(fam, sols, std::max(K, T), n0, scan);

    ensure_out(cfg);
    Json summary = base_summary(cfg);
    Json keys = Json::array();
    for (const auto& xi : profiles) keys.push_back(xi_key(xi));
    summary["profiles"] = keys;
    write_json(opath(cfg, "summary.json"), summary);
    write_json(opath(cfg, "anchor.json"), anchor_to_json(anchor));
    write_json(opath(cfg, "solutions.json"), alpha_map_to_json(sols));

    const Rational radius_budget = Rational(2) * Rational(cfg.eps);
    for (const auto& xi : profiles) {
        const std::string key = xi_key(xi);
        const CoinMeasure mu = build_coin_measure_poly(sols.at(key), anchor, T);
        write_json(opath(cfg, "measure_" + key + ".json"), measure_to_json(mu));
        const CorrelationTable table =
            verify_profile(mu, fam, anchor, xi, K, m_lo, m_hi, cfg.eps, cfg.jobs);
        write_file(opath(cfg, "table_" + key + ".csv"), correlation_table_csv(table));
        emit_plotdata(table, opath(cfg, "plot_" + key + ".csv"));
        for (const CorrelationRow& row : table.rows) {
            const Rational bound =
                Rational(2) * chain_bound_poly(fam, row.j, anchor, row.k) + radius_budget;
            if (exceeds(row.error, bound))
                throw CertViolation{"profile " + key + ": error at j=" + std::to_string(row.j) +
                                    " k=" + std::to_string(row.k) + " m=" + int_to_decimal(row.m) +
                                    " exceeds the certified bound"};
        }
    }
}

void run_construct_general(const RunConfig& cfg) {
    const Json& p = cfg.params;
    const SequenceFamily fam = family_from_json(p.at("family"));
    const unsigned N = fam.size();
    const unsigned K = p.at("K").get<unsigned>();
    const unsigned T = p.at("T").get<unsigned>();
    const Int m_lo(p.at("m_lo").get<long>());
    const Int m_hi(p.at("m_hi").get<long>());
    const unsigned long scan = p.at("scan_bound").get<unsigned long>();
    const std::vector<std::string> profiles = p.at("profiles").get<std::vector<std::string>>();

    auto [anchor, alphas] = search_alpha_anchor(fam, profiles, K, scan, cfg.seed);

    ensure_out(cfg);
    write_json(opath(cfg, "summary.json"), base_summary(cfg));
    write_json(opath(cfg, "anchor.json"), anchor_to_json(anchor));
    write_json(opath(cfg, "alphas.json"), alpha_map_to_json(alphas));

    if (!verify_alpha_anchor(fam, anchor, alphas))
        throw CertViolation{"search certificate failed to re-verify"};

    const unsigned chain_T = std::min(T, 12u);
    for (const std::string& key : profiles) {
        const std::vector<int> xi = xi_from_key(key);
        const std::vector<Rational>& alpha = alphas.at(key);
        const std::vector<Rational> prefix(alpha.begin(), alpha.begin() + T);
        // serialize levels with the growth envelope; correlations are checked
        // on the depth-T truncation, which is exactly a finite convolution
        const CoinMeasure mu = build_coin_measure_general(fam, prefix, anchor);
        write_json(opath(cfg, "measure_" + key + ".json"), measure_to_json(mu));
        const CoinMeasure finite = build_coin_measure_general(prefix);
        const CorrelationTable table =
            verify_profile(finite, fam, anchor, xi, K, m_lo, m_hi, cfg.eps, cfg.jobs);
        write_file(opath(cfg, "table_" + key + ".csv"), correlation_table_csv(table));
        emit_plotdata(table, opath(cfg, "plot_" + key + ".csv"));
        for (unsigned l = 1; l <= N; ++l)
            for (unsigned k = 1; k <= std::min(K, chain_T); ++k) {
                const Rational dev = chain_deviation_general(fam, alpha, xi, anchor, l, k, chain_T);
                const Rational bnd = chain_bound_general(fam, alpha, anchor, l, k, chain_T);
                if (dev > bnd)
                    throw CertViolation{"profile " + key +
                                        ": digit-average deviation exceeds its bound at l=" +
                                        std::to_string(l) + " k=" + std::to_string(k)};
            }
    }
}

void run_construct_primes(const RunConfig& cfg) {
    const Json& p = cfg.params;
    const unsigned N = p.at("N").get<unsigned>();
    const unsigned K = p.at("K").get<unsigned>();
    const unsigned T = p.at("T").get<unsigned>();
    const Int m_lo(p.at("m_lo").get<long>());
    const Int m_hi(p.at("m_hi").get<long>());

    const PrimeFamilySpec spec = prime_exponents(N, int_list(p.at("primes"), "primes"));
    const AnchorSequence anchor = prime_anchor(spec, std::max(K, T));
    const SequenceFamily fam = prime_family(spec);

    ensure_out(cfg);
    write_json(opath(cfg, "summary.json"), base_summary(cfg));
    write_json(opath(cfg, "spec.json"), prime_spec_to_json(spec));
    write_json(opath(cfg, "anchor.json"), anchor_to_json(anchor));

    // profile table: subset <-> profile correspondence over the whole range
    Json rows = Json::array();
    std::set<std::string> keys_seen;
    for (unsigned long idx = 0; idx < (1ul << N); ++idx) {
        const Int prime = index_prime(spec, idx);
        const std::vector<int> xi = xi_profile(spec, idx);
        Json subset = Json::array();
        for (unsigned j = 1; j <= N; ++j)
            if (xi[j - 1] == 0) subset.push_back(j);
        rows.push_back({{"index", idx},
                        {"p", int_to_decimal(prime)},
                        {"subset", subset},
                        {"xi", xi_key(xi)}});
        keys_seen.insert(xi_key(xi));
    }
    write_json(opath(cfg, "profiles.json"), rows);
    if (keys_seen.size() != (1ul << N))
        throw CertViolation{"profiles do not cover all of {0,1}^N"};

    for (const Json& iv : p.at("indices")) {
        const unsigned long idx = iv.get<unsigned long>();
        const Int prime = index_prime(spec, idx);
        const std::vector<int> xi = xi_profile(spec, idx);
        const std::string key = xi_key(xi);

        Int c_int = prime - 1;
        if (c_int < 1) c_int = 1;
        if (!mpz_fits_ulong_p(c_int.get_mpz_t()))
            fail("table-bound-exceeded", "character table too large at index " +
                                             std::to_string(idx));
        const unsigned long c = mpz_get_ui(c_int.get_mpz_t());
        for (unsigned j = 1; j <= N; ++j) {
            const double avg = character_average(spec.q[j - 1], prime, c);
            const double want = xi[j - 1] ? 0.0 : 1.0;
            if (std::abs(avg - want) > 1e-12)
                throw CertViolation{"character average at index " + std::to_string(idx) +
                                    ", j=" + std::to_string(j) +
                                    " misses its indicator value"};
        }

        const std::string tag = std::to_string(idx) + "_" + key;
        const CoinMeasure mu = build_coin_measure_prime(spec, idx, anchor, T);
        write_json(opath(cfg, "measure_" + tag + ".json"), measure_to_json(mu));
        const CorrelationTable table =
            verify_profile(mu, fam, anchor, xi, K, m_lo, m_hi, cfg.eps, cfg.jobs);
        write_file(opath(cfg, "table_" + tag + ".csv"), correlation_table_csv(table));
        emit_plotdata(table, opath(cfg, "plot_" + tag + ".csv"));
    }
}

void dispatch(const RunConfig& cfg);

void run_verify(const RunConfig& cfg) {
    const std::string dir = cfg.params.at("dir").get<std::string>();
    Json summary;
    try {
        summary = Json::parse(read_file((fs::path(dir) / "summary.json").string()));
    } catch (const Json::parse_error& e) {
        fail("parse-error", std::string("summary.json: ") + e.what());
    }

    // source snapshot before any writing (out_dir may equal dir)
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());

    RunConfig sub;
    sub.command = summary.at("command").get<std::string>();
    if (sub.command == "verify") fail("validation-error", "cannot verify a verify run");
    sub.params = summary.at("params");
    sub.eps = std::strtod(summary.at("eps").get<std::string>().c_str(), nullptr);
    sub.jobs = summary.at("jobs").get<unsigned>();
    sub.seed = summary.at("seed").get<std::uint64_t>();

    static std::atomic<unsigned> counter{0};
    const fs::path tmp = fs::temp_directory_path() /
                         ("specmix-verify-" + std::to_string(::getpid()) + "-" +
                          std::to_string(counter.fetch_add(1)));
    sub.out_dir = tmp.string();

    bool all = true;
    Json files = Json::array();
    try {
        dispatch(sub);
        for (const auto& entry : fs::directory_iterator(tmp)) {
            const std::string name = entry.path().filename().string();
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                names.push_back(name);
            }
        }
        std::sort(names.begin(), names.end());
        for (const std::string& name : names) {
            const fs::path a = fs::path(dir) / name;
            const fs::path b = tmp / name;
            bool match = fs::exists(a) && fs::exists(b) &&
                         read_file(a.string()) == read_file(b.string());
            files.push_back({{"name", name}, {"match", match}});
            all = all && match;
        }
    } catch (...) {
        std::error_code ec;
        fs::remove_all(tmp, ec);
        throw;
    }
    std::error_code ec;
    fs::remove_all(tmp, ec);

    ensure_out(cfg);
    write_json(opath(cfg, "report.json"),
               Json{{"command", "verify"}, {"source", dir}, {"match", all}, {"files", files}});
    if (!all) throw CertViolation{"regenerated artifacts differ from '" + dir + "'"};
}

void run_weyl(const RunConfig& cfg) {
    const Json& p = cfg.params;
    const SequenceFamily fam = family_from_json(p.at("family"));
    const unsigned N = fam.size();
    const unsigned long M = p.at("M").get<unsigned long>();
    const unsigned box = p.at("box").get<unsigned>();

    std::vector<std::vector<Rational>> alpha_sets;
    if (p.contains("alphas")) {
        alpha_sets.push_back(rational_vector_from_json(p.at("alphas")));
    } else {
        const unsigned count = p.at("count").get<unsigned>();
        SplitMix64 rng(cfg.seed);
        const Int den = Int(1) << 64;
        for (unsigned i = 0; i < count; ++i) {
            std::vector<Rational> vec;
            for (unsigned j = 0; j < N; ++j) {
                // odd numerator keeps the denominator at exactly 2^64
                Int num(rng.next() | 1);
                vec.push_back(Rational(num) / den);
            }
            alpha_sets.push_back(std::move(vec));
        }
    }

    Json reports = Json::array();
    double worst = 0.0;
    for (const std::vector<Rational>& alphas : alpha_sets) {
        const WeylReport rep = equidistribution_report(fam, alphas, M, box, cfg.jobs);
        Json sums = Json::array();
        for (const auto& [a, value] : rep.sums) {
            Json avec = Json::array();
            for (const Int& ai : a) avec.push_back(static_cast<long>(ai.get_si()));
            sums.push_back({{"a", avec},
                            {"re", format_double(value.real())},
                            {"im", format_double(value.imag())},
                            {"abs", format_double(std::abs(value))}});
        }
        reports.push_back({{"alphas", rational_vector_to_json(alphas)},
                           {"max_abs", format_double(rep.max_abs)},
                           {"discrepancy", format_double(rep.discrepancy)},
                           {"sums", sums}});
        worst = std::max(worst, rep.max_abs);
    }

    ensure_out(cfg);
    write_json(opath(cfg, "summary.json"), base_summary(cfg));
    write_json(opath(cfg, "weyl.json"), Json{{"command", "weyl"},
                                             {"M", M},
                                             {"box", box},
                                             {"reports", reports}});
    if (worst > 1.0 + 1e-9) throw CertViolation{"a normalized exponential sum exceeds 1"};
}

void run_interpolate(const RunConfig& cfg) {
    const Json& p = cfg.params;
    const std::vector<Rational> lambda = rational_vector_from_json(p.at("lambda"));
    const MixingProfile profile = make_lambda_profile(lambda);
    const unsigned rank = p.at("rank").get<unsigned>();
    const unsigned L = p.at("L").get<unsigned>();
    const std::vector<Int> n_list = int_list(p.at("n_list"), "n_list");

    std::vector<GridAutomorphism> pieces;
    if (p.contains("pieces")) {
        for (const Json& pj : p.at("pieces")) pieces.push_back(automorphism_from_json(pj));
    } else {
        SplitMix64 rng(cfg.seed);
        for (size_t t = 0; t <= lambda.size(); ++t) pieces.push_back(random_piece(L, rng));
    }

    const GridAutomorphism glued = glue(profile, pieces, rank);
    const Rational residual = verify_convex_identity(glued, pieces, profile, rank, rank, n_list);
    const GridAutomorphism R = cyclic_permutation(rank, glued.G);
    const MetricBoundReport mb = verify_metric_bound(R, glued, pieces, profile, rank);

    ensure_out(cfg);
    write_json(opath(cfg, "summary.json"), base_summary(cfg));
    Json pj = Json::array();
    for (const GridAutomorphism& piece : pieces) pj.push_back(automorphism_to_json(piece));
    write_json(opath(cfg, "pieces.json"), pj);
    write_json(opath(cfg, "glued.json"), automorphism_to_json(glued));
    Json nj = Json::array();
    for (const Int& n : n_list) nj.push_back(int_to_decimal(n));
    write_json(opath(cfg, "interpolation.json"),
               Json{{"command", "interpolate"},
                    {"lambda", rational_vector_to_json(lambda)},
                    {"rank", rank},
                    {"L", L},
                    {"n_list", nj},
                    {"glued_resolution", glued.G},
                    {"residual", rational_to_string(residual)},
                    {"residual_exact", sgn(residual) == 0},
                    {"metric_bound",
                     {{"ok", mb.ok},
                      {"lhs", rational_to_string(mb.lhs)},
                      {"rhs", rational_to_string(mb.rhs)},
                      {"slack", rational_to_string(mb.slack)}}}});
    if (sgn(residual) != 0)
        throw CertViolation{"convex identity residual " + rational_to_string(residual) +
                            " is nonzero"};
    if (!mb.ok) throw CertViolation{"metric bound failed with slack " +
                                    rational_to_string(mb.slack)};
}

void run_wiener(const RunConfig& cfg) {
    const Json& p = cfg.params;
    const Json& mref = p.at("measure");
    CoinMeasure mu;
    if (mref.is_string()) {
        try {
            mu = measure_from_json(Json::parse(read_file(mref.get<std::string>())));
        } catch (const Json::parse_error& e) {
            fail("parse-error", std::string("measure file: ") + e.what());
        }
    } else {
        mu = measure_from_json(mref);
    }
    Json values = Json::array();
    double prev = 0.0;
    bool first = true, decreasing = true;
    for (const Json& mv : p.at("M_list")) {
        const unsigned M = mv.get<unsigned>();
        const double w = wiener_average(mu, M, cfg.eps, cfg.jobs);
        values.push_back({{"M", M}, {"value", format_double(w)}});
        if (!first && !(w < prev)) decreasing = false;
        prev = w;
        first = false;
    }
    ensure_out(cfg);
    write_json(opath(cfg, "summary.json"), base_summary(cfg));
    write_json(opath(cfg, "wiener.json"), Json{{"command", "wiener"},
                                               {"values", values},
                                               {"decreasing", decreasing}});
}

void dispatch(const RunConfig& cfg) {
    if (cfg.command == "construct-poly")
        run_construct_poly(cfg);
    else if (cfg.command == "construct-general")
        run_construct_general(cfg);
    else if (cfg.command == "construct-primes")
        run_construct_primes(cfg);
    else if (cfg.command == "verify")
        run_verify(cfg);
    else if (cfg.command == "weyl")
        run_weyl(cfg);
    else if (cfg.command == "interpolate")
        run_interpolate(cfg);
    else if (cfg.command == "wiener")
        run_wiener(cfg);
    else
        fail("validation-error", "unknown command '" + cfg.command + "'");
}

}  // namespace

RunConfig parse_config(const Json& config, const std::string& command_override) {
    if (!config.is_object()) fail("parse-error", "config must be a JSON object");
    RunConfig cfg;

    std::string file_cmd;
    if (config.contains("command")) {
        if (!config.at("command").is_string()) fail("parse-error", "'command' must be a string");
        file_cmd = config.at("command").get<std::string>();
    }
    if (!command_override.empty() && !file_cmd.empty() && command_override != file_cmd)
        fail("validation-error", "config names command '" + file_cmd +
                                     "' but the subcommand is '" + command_override + "'");
    cfg.command = command_override.empty() ? file_cmd : command_override;
    if (cfg.command.empty()) fail("validation-error", "no command given");

    if (config.contains("out")) {
        if (!config.at("out").is_string()) fail("parse-error", "'out' must be a string");
        cfg.out_dir = config.at("out").get<std::string>();
    }
    if (config.contains("eps")) {
        if (!config.at("eps").is_number()) fail("parse-error", "'eps' must be a number");
        cfg.eps = config.at("eps").get<double>();
    }
    if (cfg.eps <= 0) fail("validation-error", "eps must be positive");
    if (config.contains("jobs")) {
        const long long j = as_int(config.at("jobs"), "jobs");
        if (j < 1) fail("validation-error", "parallelism must be at least 1");
        cfg.jobs = static_cast<unsigned>(j);
    }
    if (config.contains("seed")) {
        const Json& s = config.at("seed");
        if (!s.is_number_integer()) fail("parse-error", "'seed' must be an integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (const char* cap = std::getenv("SPECMIX_MAX_LEVELS")) {
        char* end = nullptr;
        const long v = std::strtol(cap, &end, 10);
        if (end == cap || *end != '\0' || v < 1)
            fail("validation-error", "SPECMIX_MAX_LEVELS must be a positive integer");
        cfg.max_levels = static_cast<unsigned>(v);
    }

    Json p = Json::object();
    for (const auto& [key, value] : config.items())
        if (key != "command" && key != "out" && key != "eps" && key != "jobs" && key != "seed")
            p[key] = value;

    if (cfg.command == "construct-poly")
        validate_construct_poly(p, cfg);
    else if (cfg.command == "construct-general")
        validate_construct_general(p, cfg);
    else if (cfg.command == "construct-primes")
        validate_construct_primes(p, cfg);
    else if (cfg.command == "verify")
        validate_verify(p, cfg);
    else if (cfg.command == "weyl")
        validate_weyl(p, cfg);
    else if (cfg.command == "interpolate")
        validate_interpolate(p, cfg);
    else if (cfg.command == "wiener")
        validate_wiener(p, cfg);
    else
        fail("validation-error", "unknown command '" + cfg.command + "'");

    cfg.params = std::move(p);
    return cfg;
}

RunConfig load_config(const std::string& path, const std::string& command_override) {
    Json config;
    try {
        config = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        fail("parse-error", path + ": " + e.what());
    }
    return parse_config(config, command_override);
}

int run(const RunConfig& config, std::ostream& err) {
    try {
        dispatch(config);
        return 0;
    } catch (const CertViolation& v) {
        err << error_record("certified-bound-violation", v.message) << "\n";
        return 2;
    } catch (const Error& e) {
        err << error_record(e.code(), e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << error_record("internal-error", e.what()) << "\n";
        return 1;
    }
}

void emit_plotdata(const CorrelationTable& table, const std::string& path) {
    write_file(path, plotdata_csv(table));
}

}  // namespace specmix
