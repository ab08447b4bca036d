#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "specmix/coin.hpp"
#include "specmix/error.hpp"
#include "specmix/generic.hpp"
#include "specmix/grid.hpp"
#include "specmix/io.hpp"
#include "specmix/poly.hpp"
#include "specmix/primes.hpp"
#include "specmix/run.hpp"
#include "specmix/sequences.hpp"

namespace py = pybind11;

// GMP integers travel as Python ints, rationals as fractions.Fraction.
namespace pybind11 {
namespace detail {

template <>
struct type_caster<specmix::Int> {
    PYBIND11_TYPE_CASTER(specmix::Int, const_name("int"));

    bool load(handle src, bool) {
        if (!PyLong_Check(src.ptr())) return false;
        try {
            value = specmix::Int(static_cast<std::string>(py::str(src)), 10);
        } catch (...) {
            return false;
        }
        return true;
    }

    static handle cast(const specmix::Int& v, return_value_policy, handle) {
        return PyLong_FromString(v.get_str().c_str(), nullptr, 10);
    }
};

template <>
struct type_caster<specmix::Rational> {
    PYBIND11_TYPE_CASTER(specmix::Rational, const_name("Fraction"));

    bool load(handle src, bool) {
        try {
            if (PyLong_Check(src.ptr())) {
                value = specmix::Rational(
                    specmix::Int(static_cast<std::string>(py::str(src)), 10));
                return true;
            }
            if (py::isinstance<py::str>(src)) {
                value = specmix::rational_from_string(
                    static_cast<std::string>(py::reinterpret_borrow<py::str>(src)));
                return true;
            }
            // fractions.Fraction and friends
            if (py::hasattr(src, "numerator") && py::hasattr(src, "denominator")) {
                const std::string num =
                    static_cast<std::string>(py::str(src.attr("numerator")));
                const std::string den =
                    static_cast<std::string>(py::str(src.attr("denominator")));
                value = specmix::rational_from_string(num + "/" + den);
                return true;
            }
        } catch (...) {
            return false;
        }
        return false;
    }

    static handle cast(const specmix::Rational& v, return_value_policy, handle) {
        py::object f = py::module_::import("fractions").attr("Fraction")(
            specmix::rational_to_string(v));
        return f.release();
    }
};

}  // namespace detail
}  // namespace pybind11

namespace {

using namespace specmix;

// profile argument: "0101" or [0,1,0,1]
std::vector<int> xi_arg(const py::object& xi) {
    if (py::isinstance<py::str>(xi)) return xi_from_key(xi.cast<std::string>());
    return xi.cast<std::vector<int>>();
}

std::string dump_artifact(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

PYBIND11_MODULE(specmix, m) {
    m.doc() =
        "exact-arithmetic construction and verification of mixing/rigidity "
        "spectral measures";

    py::register_exception<Error>(m, "Error");

    py::class_<SequenceFamily>(m, "Family", "integer sequence family phi_1..phi_N")
        .def("__len__", &SequenceFamily::size)
        .def_property_readonly("all_polynomial", &SequenceFamily::all_polynomial)
        .def("eval", &eval_member, py::arg("j"), py::arg("n"), "phi_j(n), 1-based j")
        .def("independent",
             [](const SequenceFamily& f) {
                 const IndependenceReport rep = is_asymptotically_independent(f);
                 return py::make_tuple(rep.independent, rep.conclusive);
             },
             "(verdict, conclusive); tabulated members only get an empirical verdict")
        .def("to_json", [](const SequenceFamily& f) { return family_to_json(f).dump(); })
        .def("__repr__",
             [](const SequenceFamily& f) { return "Family(" + family_to_json(f).dump() + ")"; });

    m.def("polynomial_family", &family_of_polynomials, py::arg("coeffs"),
          "family from a0-first integer coefficient lists");
    m.def("family_from_json",
          [](const std::string& s) { return family_from_json(Json::parse(s)); },
          py::arg("text"));

    py::class_<AnchorSequence>(m, "Anchor", "certified anchor sequence n_1 < n_2 < ...")
        .def("__len__", [](const AnchorSequence& a) { return a.entries.size(); })
        .def_property_readonly("n0", [](const AnchorSequence& a) { return a.n0; })
        .def_property_readonly("kind", [](const AnchorSequence& a) { return a.kind; })
        .def_property_readonly("n",
                               [](const AnchorSequence& a) {
                                   std::vector<Int> v;
                                   for (const AnchorEntry& e : a.entries) v.push_back(e.n);
                                   return v;
                               })
        .def("to_json", [](const AnchorSequence& a) { return dump_artifact(anchor_to_json(a)); })
        .def("__repr__", [](const AnchorSequence& a) {
            return "Anchor(kind=" + a.kind + ", K=" + std::to_string(a.entries.size()) + ")";
        });

    m.def("anchor_from_json",
          [](const std::string& s) { return anchor_from_json(Json::parse(s)); },
          py::arg("text"));

    py::class_<CoinMeasure>(m, "Measure",
                            "infinite convolution of uniform digit distributions")
        .def("__len__", [](const CoinMeasure& mu) { return mu.levels.size(); })
        .def("sigma",
             [](const CoinMeasure& mu, const Int& mm, double eps) {
                 const FourierValue fv = fourier_sigma(mu, mm, eps);
                 return py::make_tuple(fv.value, fv.error_radius);
             },
             py::arg("m"), py::arg("eps") = 1e-9,
             "spectral coefficient |rho-hat|^2 with a certified radius: (value, radius)")
        .def("rho",
             [](const CoinMeasure& mu, const Int& mm, double eps) {
                 const FourierValue fv = fourier_rho(mu, mm, eps);
                 return py::make_tuple(fv.value, fv.error_radius);
             },
             py::arg("m"), py::arg("eps") = 1e-9)
        .def("sigma_exact",
             [](const CoinMeasure& mu, const Int& mm) { return sigma_by_enumeration(mu, mm); },
             py::arg("m"), "reference digit-space enumeration; finite measures only")
        .def("wiener", &wiener_average, py::arg("M"), py::arg("eps") = 1e-9,
             py::arg("jobs") = 1, "average of sigma-hat over |m| <= M")
        .def("to_json", [](const CoinMeasure& mu) { return dump_artifact(measure_to_json(mu)); },
             "byte-identical to the measure_*.json artifacts")
        .def("__repr__", [](const CoinMeasure& mu) {
            return "Measure(levels=" + std::to_string(mu.levels.size()) + ")";
        });

    m.def("measure_from_json",
          [](const std::string& s) { return measure_from_json(Json::parse(s)); },
          py::arg("text"));

    py::class_<CorrelationTable>(m, "Table", "shifted-coefficient verification rows")
        .def("__len__", [](const CorrelationTable& t) { return t.rows.size(); })
        .def("to_csv", &correlation_table_csv)
        .def("plot_csv", &plotdata_csv, "per (k, j) decay data with the radius as floor")
        .def("rows",
             [](const CorrelationTable& t) {
                 py::list out;
                 for (const CorrelationRow& r : t.rows) {
                     py::dict d;
                     d["j"] = r.j;
                     d["k"] = r.k;
                     d["m"] = py::cast(r.m);
                     d["sigma_shifted"] = r.sigma_shifted;
                     d["sigma_target"] = r.sigma_target;
                     d["error"] = r.error;
                     d["radius"] = r.radius;
                     out.append(d);
                 }
                 return out;
             })
        .def("max_error", [](const CorrelationTable& t) {
            double worst = 0.0;
            for (const CorrelationRow& r : t.rows) worst = std::max(worst, r.error);
            return worst;
        });

    // digit frequencies with rational targets, solved profile by profile
    m.def("solve_profile",
          [](const SequenceFamily& fam, const py::object& xi) {
              return solve_rational(coefficient_matrix(fam), make_profile(xi_arg(xi)).b);
          },
          py::arg("family"), py::arg("xi"),
          "digit-frequency vector x with D x = b(xi), zero-filled free variables");
    m.def("poly_anchor",
          [](const SequenceFamily& fam, const SolutionsMap& solutions, unsigned K,
             const Int& n0, unsigned long scan_bound) {
              return choose_anchor_poly(fam, solutions, K, n0, scan_bound);
          },
          py::arg("family"), py::arg("solutions"), py::arg("K"), py::arg("n0") = 2,
          py::arg("scan_bound") = 1000000);
    m.def("verify_poly_anchor", &verify_anchor_poly, py::arg("family"),
          py::arg("solutions"), py::arg("anchor"),
          "recompute every certificate item and compare exactly");
    m.def("poly_measure", &build_coin_measure_poly, py::arg("x"), py::arg("anchor"),
          py::arg("T"));
    m.def("poly_chain_deviation", &chain_deviation_poly, py::arg("family"), py::arg("x"),
          py::arg("anchor"), py::arg("j"), py::arg("k"), py::arg("T"),
          "exact worst-case digit-average deviation over all 2^T digit vectors");
    m.def("poly_chain_bound", &chain_bound_poly, py::arg("family"), py::arg("j"),
          py::arg("anchor"), py::arg("k"));

    // searched frequencies for families that are only asymptotically independent
    m.def("search_general", &search_alpha_anchor, py::arg("family"), py::arg("profiles"),
          py::arg("K"), py::arg("scan_bound") = 100000, py::arg("seed") = 0,
          "seed-pinned search: (anchor, {profile: [alpha_1..alpha_K]})");
    m.def("verify_general", &verify_alpha_anchor, py::arg("family"), py::arg("anchor"),
          py::arg("alphas"));
    m.def("general_measure",
          [](const std::vector<Rational>& alphas) { return build_coin_measure_general(alphas); },
          py::arg("alphas"), "the frequency list as a complete finite measure");
    m.def("general_envelope_measure",
          [](const SequenceFamily& fam, const std::vector<Rational>& alphas,
             const AnchorSequence& anchor) {
              return build_coin_measure_general(fam, alphas, anchor);
          },
          py::arg("family"), py::arg("alphas"), py::arg("anchor"),
          "levels plus the growth-envelope tail certificate");
    m.def("general_chain_deviation", &chain_deviation_general, py::arg("family"),
          py::arg("alphas"), py::arg("xi"), py::arg("anchor"), py::arg("l"), py::arg("k"),
          py::arg("T"));
    m.def("general_chain_bound", &chain_bound_general, py::arg("family"), py::arg("alphas"),
          py::arg("anchor"), py::arg("l"), py::arg("k"), py::arg("T"));

    // one prime per proper subset; every profile realized by one measure family
    py::class_<PrimeFamilySpec>(m, "PrimeSpec")
        .def_readonly("N", &PrimeFamilySpec::N)
        .def_readonly("subsets", &PrimeFamilySpec::subsets)
        .def_readonly("primes", &PrimeFamilySpec::primes)
        .def_readonly("q", &PrimeFamilySpec::q)
        .def_property_readonly("M",
                               [](const PrimeFamilySpec& s) { return s.primes.back(); })
        .def("xi", [](const PrimeFamilySpec& s, unsigned long idx) {
                 return xi_key(xi_profile(s, idx));
             },
             py::arg("index"), "mixing profile attached to subset index")
        .def("prime", &index_prime, py::arg("index"))
        .def("to_json", [](const PrimeFamilySpec& s) { return prime_spec_to_json(s).dump(); })
        .def("__repr__", [](const PrimeFamilySpec& s) {
            return "PrimeSpec(N=" + std::to_string(s.N) + ")";
        });

    m.def("prime_spec", &prime_exponents, py::arg("N"), py::arg("primes"));
    m.def("prime_anchor", &prime_anchor, py::arg("spec"), py::arg("K"),
          "n_k = P^(2k) k! with certificate");
    m.def("prime_family", &prime_family, py::arg("spec"), "phi_j(n) = q_j n");
    m.def("prime_measure", &build_coin_measure_prime, py::arg("spec"), py::arg("index"),
          py::arg("anchor"), py::arg("T"));
    m.def("character_average", &character_average, py::arg("q"), py::arg("p"), py::arg("c"),
          "|(1/(c+1)) sum_r e(2 pi i q r / p)|^2");

    m.def("verify_profile",
          [](const CoinMeasure& mu, const SequenceFamily& fam, const AnchorSequence& anchor,
             const py::object& xi, unsigned K, const Int& m_lo, const Int& m_hi, double eps,
             unsigned jobs) {
              return verify_profile(mu, fam, anchor, xi_arg(xi), K, m_lo, m_hi, eps, jobs);
          },
          py::arg("measure"), py::arg("family"), py::arg("anchor"), py::arg("xi"),
          py::arg("K"), py::arg("m_lo") = -4, py::arg("m_hi") = 4, py::arg("eps") = 1e-9,
          py::arg("jobs") = 1,
          "sigma-hat at shifted arguments phi_j(n_k) + m against the profile targets");

    m.def("weyl_sum", &weyl_sum, py::arg("family"), py::arg("a"), py::arg("alpha"),
          py::arg("M"), "(1/M) sum_r e(2 pi i (sum_j a_j phi_j(r)) alpha)");
    m.def("equidistribution",
          [](const SequenceFamily& fam, const std::vector<Rational>& alphas, unsigned long M,
             unsigned box, unsigned jobs) {
              const WeylReport rep = equidistribution_report(fam, alphas, M, box, jobs);
              py::dict d;
              d["M"] = rep.M;
              py::list sums;
              for (const auto& [a, value] : rep.sums) {
                  sums.append(py::make_tuple(py::cast(a), value));
              }
              d["sums"] = sums;
              d["discrepancy"] = rep.discrepancy;
              d["max_abs"] = rep.max_abs;
              return d;
          },
          py::arg("family"), py::arg("alphas"), py::arg("M"), py::arg("box") = 3,
          py::arg("jobs") = 1);

    // dyadic-grid automorphisms and the gluing construction
    py::class_<GridAutomorphism>(m, "Automorphism",
                                 "cell permutation of [0,1) at resolution 2^-G")
        .def("__len__", [](const GridAutomorphism& t) { return t.fwd.size(); })
        .def_readonly("G", &GridAutomorphism::G)
        .def_readonly("perm", &GridAutomorphism::fwd)
        .def("to_json", [](const GridAutomorphism& t) { return automorphism_to_json(t).dump(); })
        .def("__repr__", [](const GridAutomorphism& t) {
            return "Automorphism(G=" + std::to_string(t.G) + ")";
        });

    m.def("automorphism",
          [](const std::vector<std::uint32_t>& perm) {
              return automorphism_from_json(Json(perm));
          },
          py::arg("perm"), "from a permutation of 0..2^G-1");
    m.def("identity_automorphism", &identity_automorphism, py::arg("G"));
    m.def("cyclic_automorphism", &cyclic_permutation, py::arg("rank"), py::arg("G"),
          "x -> x + 2^-rank");
    m.def("dyadic_distance", &dyadic_metric, py::arg("T"), py::arg("S"), py::arg("L"),
          "rank-truncated symmetric-difference metric, exact");
    m.def("glue_pieces",
          [](const std::vector<Rational>& lambdas, const std::vector<GridAutomorphism>& pieces,
             unsigned rank) {
              return glue(make_lambda_profile(lambdas), pieces, rank);
          },
          py::arg("lambdas"), py::arg("pieces"), py::arg("rank"),
          "blend N+1 pieces over the slab decomposition of every rank interval");
    m.def("convex_identity_residual",
          [](const GridAutomorphism& glued, const std::vector<GridAutomorphism>& pieces,
             const std::vector<Rational>& lambdas, unsigned rank, unsigned test_rank,
             const std::vector<Int>& n_list) {
              return verify_convex_identity(glued, pieces, make_lambda_profile(lambdas), rank,
                                            test_rank, n_list);
          },
          py::arg("glued"), py::arg("pieces"), py::arg("lambdas"), py::arg("rank"),
          py::arg("test_rank"), py::arg("n_list"),
          "max deviation of glued correlations from the convex combination, exact");
    m.def("metric_bound_check",
          [](const GridAutomorphism& R, const GridAutomorphism& glued,
             const std::vector<GridAutomorphism>& pieces, const std::vector<Rational>& lambdas,
             unsigned rank) {
              const MetricBoundReport rep =
                  verify_metric_bound(R, glued, pieces, make_lambda_profile(lambdas), rank);
              py::dict d;
              d["ok"] = rep.ok;
              d["lhs"] = py::cast(rep.lhs);
              d["rhs"] = py::cast(rep.rhs);
              d["slack"] = py::cast(rep.slack);
              return d;
          },
          py::arg("R"), py::arg("glued"), py::arg("pieces"), py::arg("lambdas"),
          py::arg("rank"));

    // full command pipelines, identical to the command-line tool
    m.def("run_config",
          [](const std::string& config, const std::string& command) {
              const RunConfig cfg = parse_config(Json::parse(config), command);
              std::ostringstream err;
              const int rc = run(cfg, err);
              return py::make_tuple(rc, err.str());
          },
          py::arg("config"), py::arg("command") = std::string(),
          "execute a JSON config; returns (exit_code, error_record_or_empty)");
}
