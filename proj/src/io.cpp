#include "specmix/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "specmix/error.hpp"

namespace specmix {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        fail("parse-error", std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string str_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string()) fail("parse-error", std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) fail("parse-error", "unknown field '" + key + "'");
    }
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string int_to_decimal(const Int& n) { return n.get_str(); }

Int int_from_decimal(const std::string& s) {
    try {
        return Int(s);
    } catch (const std::invalid_argument&) {
        fail("parse-error", "bad integer literal '" + s + "'");
    }
}

Json measure_to_json(const CoinMeasure& mu) {
    Json levels = Json::array();
    for (const CoinLevel& level : mu.levels)
        levels.push_back({{"C", rational_to_string(level.C.value)}, {"A", level.A}});
    Json tail;
    switch (mu.tail.kind) {
        case TailBound::Kind::Geometric:
            tail = {{"kind", "geometric"},
                    {"ratio", rational_to_string(mu.tail.ratio)},
                    {"scale", rational_to_string(mu.tail.scale)}};
            break;
        case TailBound::Kind::PowerGrowth: {
            Json ns = Json::array();
            for (const Int& n : mu.tail.n) ns.push_back(int_to_decimal(n));
            tail = {{"kind", "power_growth"},
                    {"coef", rational_to_string(mu.tail.coef)},
                    {"growth_factor", int_to_decimal(mu.tail.growth_factor)},
                    {"growth_power", mu.tail.growth_power},
                    {"n", ns}};
            break;
        }
        case TailBound::Kind::PrimeFactorial:
            tail = {{"kind", "prime_factorial"},
                    {"p", int_to_decimal(mu.tail.prime_p)},
                    {"P", int_to_decimal(mu.tail.prime_P)}};
            break;
    }
    return {{"levels", levels}, {"tail", tail}};
}

CoinMeasure measure_from_json(const Json& j) {
    reject_unknown(j, {"levels", "tail"});
    CoinMeasure mu;
    const Json& levels = field(j, "levels");
    if (!levels.is_array()) fail("parse-error", "'levels' must be an array");
    for (const Json& lj : levels) {
        reject_unknown(lj, {"C", "A"});
        CoinLevel level;
        level.C = torus_reduce(rational_from_string(str_field(lj, "C")));
        const Json& a = field(lj, "A");
        if (!a.is_number_integer() || a.get<long long>() < 0)
            fail("parse-error", "'A' must be a nonnegative integer");
        level.A = a.get<unsigned>();
        mu.levels.push_back(level);
    }
    const Json& tail = field(j, "tail");
    const std::string kind = str_field(tail, "kind");
    if (kind == "geometric") {
        reject_unknown(tail, {"kind", "ratio", "scale"});
        mu.tail.kind = TailBound::Kind::Geometric;
        mu.tail.ratio = rational_from_string(str_field(tail, "ratio"));
        mu.tail.scale = rational_from_string(str_field(tail, "scale"));
    } else if (kind == "power_growth") {
        reject_unknown(tail, {"kind", "coef", "growth_factor", "growth_power", "n"});
        mu.tail.kind = TailBound::Kind::PowerGrowth;
        mu.tail.coef = rational_from_string(str_field(tail, "coef"));
        mu.tail.growth_factor = int_from_decimal(str_field(tail, "growth_factor"));
        const Json& gp = field(tail, "growth_power");
        if (!gp.is_number_integer() || gp.get<long long>() < 0)
            fail("parse-error", "'growth_power' must be a nonnegative integer");
        mu.tail.growth_power = gp.get<unsigned>();
        const Json& ns = field(tail, "n");
        if (!ns.is_array()) fail("parse-error", "'n' must be an array");
        for (const Json& nj : ns) {
            if (!nj.is_string()) fail("parse-error", "'n' entries must be decimal strings");
            mu.tail.n.push_back(int_from_decimal(nj.get<std::string>()));
        }
    } else if (kind == "prime_factorial") {
        reject_unknown(tail, {"kind", "p", "P"});
        mu.tail.kind = TailBound::Kind::PrimeFactorial;
        mu.tail.prime_p = int_from_decimal(str_field(tail, "p"));
        mu.tail.prime_P = int_from_decimal(str_field(tail, "P"));
    } else {
        fail("parse-error", "unknown tail kind '" + kind + "'");
    }
    finalize_measure(mu);
    return mu;
}

Json anchor_to_json(const AnchorSequence& anchor) {
    Json entries = Json::array();
    for (const AnchorEntry& e : anchor.entries) {
        Json cert = Json::array();
        for (const CertItem& item : e.certificate)
            cert.push_back({{"condition", item.condition},
                            {"detail", item.detail},
                            {"witness", rational_to_string(item.witness)},
                            {"ok", item.ok}});
        entries.push_back({{"n", int_to_decimal(e.n)}, {"certificate", cert}});
    }
    return {{"n0", int_to_decimal(anchor.n0)}, {"kind", anchor.kind}, {"entries", entries}};
}

AnchorSequence anchor_from_json(const Json& j) {
    reject_unknown(j, {"n0", "kind", "entries"});
    AnchorSequence anchor;
    anchor.n0 = int_from_decimal(str_field(j, "n0"));
    anchor.kind = str_field(j, "kind");
    const Json& entries = field(j, "entries");
    if (!entries.is_array()) fail("parse-error", "'entries' must be an array");
    for (const Json& ej : entries) {
        reject_unknown(ej, {"n", "certificate"});
        AnchorEntry entry;
        entry.n = int_from_decimal(str_field(ej, "n"));
        const Json& cert = field(ej, "certificate");
        if (!cert.is_array()) fail("parse-error", "'certificate' must be an array");
        for (const Json& ij : cert) {
            reject_unknown(ij, {"condition", "detail", "witness", "ok"});
            CertItem item;
            item.condition = str_field(ij, "condition");
            item.detail = str_field(ij, "detail");
            item.witness = rational_from_string(str_field(ij, "witness"));
            const Json& ok = field(ij, "ok");
            if (!ok.is_boolean()) fail("parse-error", "'ok' must be a boolean");
            item.ok = ok.get<bool>();
            entry.certificate.push_back(std::move(item));
        }
        anchor.entries.push_back(std::move(entry));
    }
    return anchor;
}

Json family_to_json(const SequenceFamily& family) {
    if (family.size() == 0) fail("unsupported-family", "empty family");
    bool all_poly = family.all_polynomial();
    bool all_table = true;
    for (const auto& member : family.members)
        if (!std::holds_alternative<TabulatedSequence>(member)) all_table = false;
    if (all_poly) {
        Json polys = Json::array();
        for (const auto& member : family.members) {
            const auto& poly = std::get<IntPolynomial>(member);
            Json coeffs = Json::array();
            coeffs.push_back(int_to_decimal(poly.constant));
            for (const Int& a : poly.coeffs) coeffs.push_back(int_to_decimal(a));
            polys.push_back(coeffs);
        }
        return {{"polys", polys}};
    }
    if (all_table) {
        Json tables = Json::array();
        for (const auto& member : family.members) {
            const auto& table = std::get<TabulatedSequence>(member);
            Json vals = Json::array();
            for (const Int& v : table.values) vals.push_back(int_to_decimal(v));
            tables.push_back(vals);
        }
        return {{"tables", tables}};
    }
    fail("unsupported-family", "mixed polynomial and tabulated members");
}

SequenceFamily family_from_json(const Json& j) {
    reject_unknown(j, {"polys", "tables"});
    const bool has_polys = j.is_object() && j.contains("polys");
    const bool has_tables = j.is_object() && j.contains("tables");
    if (has_polys == has_tables)
        fail("parse-error", "family needs exactly one of 'polys' or 'tables'");
    auto int_list = [](const Json& arr) {
        std::vector<Int> out;
        for (const Json& v : arr) {
            if (v.is_number_integer())
                out.push_back(Int(v.get<long>()));
            else if (v.is_string())
                out.push_back(int_from_decimal(v.get<std::string>()));
            else
                fail("parse-error", "coefficients must be integers or decimal strings");
        }
        return out;
    };
    if (has_polys) {
        const Json& polys = j.at("polys");
        if (!polys.is_array() || polys.empty()) fail("parse-error", "'polys' must be nonempty");
        std::vector<std::vector<Int>> coeffs;
        for (const Json& pj : polys) {
            if (!pj.is_array()) fail("parse-error", "each polynomial is a coefficient list");
            coeffs.push_back(int_list(pj));
        }
        return family_of_polynomials(coeffs);
    }
    const Json& tables = j.at("tables");
    if (!tables.is_array() || tables.empty()) fail("parse-error", "'tables' must be nonempty");
    SequenceFamily family;
    for (const Json& tj : tables) {
        if (!tj.is_array()) fail("parse-error", "each table is an integer list");
        family.members.push_back(TabulatedSequence{int_list(tj)});
    }
    return family;
}

Json rational_vector_to_json(const std::vector<Rational>& v) {
    Json out = Json::array();
    for (const Rational& r : v) out.push_back(rational_to_string(r));
    return out;
}

std::vector<Rational> rational_vector_from_json(const Json& j) {
    if (!j.is_array()) fail("parse-error", "expected an array of rationals");
    std::vector<Rational> out;
    for (const Json& v : j) {
        if (!v.is_string()) fail("parse-error", "rationals must be 'p/q' strings");
        out.push_back(rational_from_string(v.get<std::string>()));
    }
    return out;
}

Json alpha_map_to_json(const AlphaMap& m) {
    Json out = Json::object();
    for (const auto& [key, vec] : m) out[key] = rational_vector_to_json(vec);
    return out;
}

AlphaMap alpha_map_from_json(const Json& j) {
    if (!j.is_object()) fail("parse-error", "expected a profile -> rationals map");
    AlphaMap out;
    for (const auto& [key, vec] : j.items()) out[key] = rational_vector_from_json(vec);
    return out;
}

Json automorphism_to_json(const GridAutomorphism& T) {
    Json out = Json::array();
    for (std::uint32_t y : T.fwd) out.push_back(y);
    return out;
}

GridAutomorphism automorphism_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) fail("parse-error", "permutation must be a nonempty array");
    unsigned G = 0;
    while ((1ul << G) < j.size()) ++G;
    if ((1ul << G) != j.size()) fail("parse-error", "permutation length must be a power of two");
    std::vector<std::uint32_t> perm;
    perm.reserve(j.size());
    for (const Json& v : j) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            fail("parse-error", "permutation entries must be indices");
        perm.push_back(v.get<std::uint32_t>());
    }
    return make_automorphism(G, std::move(perm));
}

Json prime_spec_to_json(const PrimeFamilySpec& spec) {
    Json primes = Json::array();
    for (size_t i = 0; i + 1 < spec.primes.size(); ++i)
        primes.push_back(int_to_decimal(spec.primes[i]));
    Json q = Json::array();
    for (const Int& qj : spec.q) q.push_back(int_to_decimal(qj));
    Json subsets = Json::array();
    for (unsigned long mask : spec.subsets) subsets.push_back(mask);
    return {{"N", spec.N},
            {"primes", primes},
            {"M", int_to_decimal(spec.primes.back())},
            {"q", q},
            {"subsets", subsets}};
}

std::string correlation_table_csv(const CorrelationTable& table) {
    std::ostringstream out;
    out << "j,k,m,sigma_shifted,sigma_target,error,radius\n";
    for (const CorrelationRow& row : table.rows)
        out << row.j << ',' << row.k << ',' << int_to_decimal(row.m) << ','
            << format_double(row.sigma_shifted) << ',' << format_double(row.sigma_target) << ','
            << format_double(row.error) << ',' << format_double(row.radius) << '\n';
    return out.str();
}

std::string plotdata_csv(const CorrelationTable& table) {
    if (table.rows.empty()) fail("empty-table", "no rows to plot");
    std::map<std::pair<unsigned, unsigned>, double> peak;  // (k, j) -> max floored error
    for (const CorrelationRow& row : table.rows) {
        double value = std::max(row.error, row.radius);
        auto key = std::make_pair(row.k, row.j);
        auto it = peak.find(key);
        if (it == peak.end() || it->second < value) peak[key] = value;
    }
    std::ostringstream out;
    out << "k,j,max_error\n";
    for (const auto& [key, value] : peak)
        out << key.first << ',' << key.second << ',' << format_double(value) << '\n';
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("io-error", "cannot open '" + path + "' for writing");
    out << content;
    if (!out) fail("io-error", "short write to '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("io-error", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace specmix
