#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "specmix/anchor.hpp"
#include "specmix/coin.hpp"
#include "specmix/generic.hpp"
#include "specmix/grid.hpp"
#include "specmix/primes.hpp"
#include "specmix/sequences.hpp"

namespace specmix {

using Json = nlohmann::ordered_json;

// %.17g, the precision used by every CSV artifact
std::string format_double(double x);

std::string int_to_decimal(const Int& n);
Int int_from_decimal(const std::string& s);

// rationals travel as "p/q" strings, integers as decimal strings
Json measure_to_json(const CoinMeasure& mu);
CoinMeasure measure_from_json(const Json& j);

Json anchor_to_json(const AnchorSequence& anchor);
AnchorSequence anchor_from_json(const Json& j);

// {"polys":[[a0,a1,...],...]} or {"tables":[[v1,v2,...],...]}
Json family_to_json(const SequenceFamily& family);
SequenceFamily family_from_json(const Json& j);

Json rational_vector_to_json(const std::vector<Rational>& v);
std::vector<Rational> rational_vector_from_json(const Json& j);

Json alpha_map_to_json(const AlphaMap& m);
AlphaMap alpha_map_from_json(const Json& j);

// permutations as index arrays; resolution recovered from the length
Json automorphism_to_json(const GridAutomorphism& T);
GridAutomorphism automorphism_from_json(const Json& j);

Json prime_spec_to_json(const PrimeFamilySpec& spec);

std::string correlation_table_csv(const CorrelationTable& table);
// long-format decay data: per (k, j), the largest error over m with the
// certified radius as a visual floor
std::string plotdata_csv(const CorrelationTable& table);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace specmix
