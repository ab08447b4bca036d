#include <doctest.h>

#include "specmix/generic.hpp"
#include "specmix/poly.hpp"
#include "specmix/rng.hpp"

using namespace specmix;

namespace {

std::string thrown_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

SequenceFamily linear_family() { return family_of_polynomials({{0, 1}}); }

SequenceFamily quadratic_pair() { return family_of_polynomials({{0, 1}, {0, 0, 1}}); }

// members phi(R t + c) of the given family, for the residue-class identity
SequenceFamily shifted_quadratic(unsigned R, long c) {
    Int Rc(R), cc(c);
    return family_of_polynomials(
        {{cc, Rc}, {cc * cc, 2 * Rc * cc, Rc * Rc}});
}

}  // namespace

TEST_SUITE("generic") {

TEST_CASE("exponential sums at simple rational frequencies") {
    SequenceFamily fam = linear_family();
    CHECK(std::abs(weyl_sum(fam, {Int(1)}, Rational(1, 2), 2)) < 1e-15);
    CHECK(std::abs(weyl_sum(fam, {Int(1)}, Rational(0), 10) - 1.0) < 1e-15);
    CHECK(std::abs(weyl_sum(fam, {Int(1)}, Rational(1, 4), 4)) < 1e-15);

    // full periods cancel exactly when the coefficient misses the modulus
    CHECK(std::abs(weyl_sum(fam, {Int(3)}, Rational(1, 7), 7 * 13)) < 1e-12);

    CHECK(thrown_code([&] { weyl_sum(fam, {Int(1), Int(2)}, Rational(1, 2), 4); }) ==
          "coefficient-length-mismatch");
    CHECK(thrown_code([&] { weyl_sum(fam, {Int(1)}, Rational(1, 2), 0); }) == "empty-range");
}

TEST_CASE("averaging over residue classes reproduces the full sum") {
    SequenceFamily fam = quadratic_pair();
    const unsigned R = 4;
    const unsigned long B = 50;
    Rational alpha(22, 701);
    std::vector<Int> a = {Int(1), Int(2)};

    std::complex<double> lhs = weyl_sum(fam, a, alpha, R * B);
    std::complex<double> rhs{0.0, 0.0};
    for (unsigned r = 1; r <= R; ++r)
        rhs += weyl_sum(shifted_quadratic(R, static_cast<long>(r) - static_cast<long>(R)), a,
                        alpha, B);
    rhs /= static_cast<double>(R);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("orbit reports flag degenerate and periodic frequencies") {
    SequenceFamily fam = linear_family();
    {
        WeylReport rep = equidistribution_report(fam, {Rational(0)}, 100, 2);
        REQUIRE(rep.sums.size() == 4);
        for (const auto& [a, s] : rep.sums) CHECK(std::abs(s - std::complex<double>(1, 0)) < 1e-15);
        CHECK(rep.discrepancy > 0.9);
        CHECK(rep.max_abs > 0.99);
    }
    {
        // denominator 5 never divides a coefficient in a box of 3
        WeylReport rep = equidistribution_report(fam, {Rational(1, 5)}, 200, 3);
        CHECK(rep.max_abs < 1e-12);
        CHECK(rep.discrepancy < 0.25);
    }
    CHECK(thrown_code([&] {
              equidistribution_report(fam, {Rational(1, 2), Rational(1, 3)}, 10, 1);
          }) == "alpha-length-mismatch");
    CHECK(thrown_code([&] { equidistribution_report(fam, {Rational(1, 2)}, 10, 0); }) ==
          "invalid-box");
}

TEST_CASE("orbit reports are independent of the worker count") {
    SequenceFamily fam = quadratic_pair();
    std::vector<Rational> alphas = {Rational(13, 97), Rational(5, 89)};
    WeylReport one = equidistribution_report(fam, alphas, 2000, 2, 1);
    WeylReport four = equidistribution_report(fam, alphas, 2000, 2, 4);
    REQUIRE(one.sums.size() == four.sums.size());
    for (size_t i = 0; i < one.sums.size(); ++i) {
        CHECK(one.sums[i].first == four.sums[i].first);
        CHECK(one.sums[i].second == four.sums[i].second);
    }
    CHECK(one.discrepancy == four.discrepancy);
}

TEST_CASE("random 64-bit frequencies average out over long orbits") {
    SequenceFamily fam = quadratic_pair();
    SplitMix64 rng(11);
    const Int d64 = Int(1) << 64;
    std::vector<Rational> alphas = {make_rational(Int(rng.next()) + 1, d64),
                                    make_rational(Int(rng.next()) + 1, d64)};
    WeylReport rep = equidistribution_report(fam, alphas, 10000, 3, 4);
    CHECK(rep.max_abs < 0.05);
    CHECK(rep.discrepancy < 0.05);

    // the squared sample length decays as well (single-frequency probe)
    std::complex<double> small = weyl_sum(fam, {Int(1), Int(1)}, alphas[0], 100);
    std::complex<double> big = weyl_sum(fam, {Int(1), Int(1)}, alphas[0], 10000);
    CHECK(std::abs(big) < 0.05);
    CHECK(std::abs(big) < std::abs(small) + 0.05);
}

TEST_CASE("phase search returns exact certificates for the linear family") {
    SequenceFamily fam = linear_family();
    auto [anchor, amap] = search_alpha_anchor(fam, {"0", "1"}, 3, 100000, 7);

    REQUIRE(anchor.entries.size() == 3);
    CHECK(anchor.n0 == 1);
    CHECK(anchor.kind == "phase-search");
    REQUIRE(amap.size() == 2);
    for (const auto& [key, avec] : amap) REQUIRE(avec.size() == 3);
    for (size_t i = 0; i + 1 < anchor.entries.size(); ++i)
        CHECK(anchor.entries[i].n < anchor.entries[i + 1].n);

    // recheck all three conditions directly, independent of the certificates
    for (const auto& [key, avec] : amap) {
        auto b = make_profile(xi_from_key(key)).b;
        for (unsigned k = 1; k <= 3; ++k) {
            const Int& nk = anchor.entries[k - 1].n;
            Int nprev = (k >= 2) ? anchor.entries[k - 2].n : Int(1);
            CHECK(sgn(avec[k - 1]) > 0);
            CHECK(avec[k - 1] * (Int(1) << k) * phi_bound(fam, nprev) <= 1);
            for (unsigned l = 1; l <= fam.size(); ++l) {
                Int phi = eval_member(fam, l, nk);
                Rational t2 =
                    dist_to_int(torus_scale(phi, avec[k - 1] / 2).value - b[l - 1] / 2);
                CHECK(t2 * k < 1);
                for (unsigned k0 = 1; k0 < k; ++k0) {
                    Rational t3 = dist_to_int(torus_scale(phi, avec[k0 - 1] / 2).value);
                    CHECK(t3 * (k * k) < 1);
                }
            }
        }
    }
    CHECK(verify_alpha_anchor(fam, anchor, amap));

    SUBCASE("the same seed reproduces the run, another seed does not") {
        auto [anchor2, amap2] = search_alpha_anchor(fam, {"0", "1"}, 3, 100000, 7);
        REQUIRE(anchor2.entries.size() == anchor.entries.size());
        for (size_t i = 0; i < anchor.entries.size(); ++i)
            CHECK(anchor.entries[i].n == anchor2.entries[i].n);
        CHECK(amap2 == amap);
        auto [anchor3, amap3] = search_alpha_anchor(fam, {"0", "1"}, 3, 100000, 8);
        CHECK(amap3.at("0")[0] != amap.at("0")[0]);
    }
    SUBCASE("tampering breaks verification") {
        AnchorSequence bad = anchor;
        bad.entries[1].n += 1;
        CHECK_FALSE(verify_alpha_anchor(fam, bad, amap));

        bad = anchor;
        bad.entries[2].certificate[0].witness += Rational(1, 1000);
        CHECK_FALSE(verify_alpha_anchor(fam, bad, amap));

        bad = anchor;
        bad.n0 = 2;
        CHECK_FALSE(verify_alpha_anchor(fam, bad, amap));

        bad = anchor;
        bad.entries[0].certificate.pop_back();
        CHECK_FALSE(verify_alpha_anchor(fam, bad, amap));

        AlphaMap worse = amap;
        worse["1"][2] += Rational(1, 1000000);
        CHECK_FALSE(verify_alpha_anchor(fam, anchor, worse));
    }
}

TEST_CASE("phase search handles the quadratic pair with two profiles") {
    SequenceFamily fam = quadratic_pair();
    auto [anchor, amap] = search_alpha_anchor(fam, {"01", "10"}, 3, 20000, 0xC0FFEE);
    REQUIRE(anchor.entries.size() == 3);
    CHECK(verify_alpha_anchor(fam, anchor, amap));

    // deviation stays within the certified envelope for every profile
    for (const auto& [key, avec] : amap) {
        std::vector<int> xi = xi_from_key(key);
        for (unsigned l = 1; l <= 2; ++l)
            for (unsigned k = 1; k <= 3; ++k) {
                Rational dev = chain_deviation_general(fam, avec, xi, anchor, l, k, 3);
                Rational bound = chain_bound_general(fam, avec, anchor, l, k, 3);
                CHECK(dev <= bound);
            }
    }

    // the anchored measure carries the interval envelope: the unmaterialized
    // tail shrinks with Phi(n_K), so tight budgets stay feasible
    for (const auto& [key, avec] : amap) {
        CoinMeasure mu = build_coin_measure_general(fam, avec, anchor);
        REQUIRE(mu.tail.n.size() == 4);
        CHECK(mu.tail.n[0] == 2 * phi_bound(fam, Int(1)));
        FourierValue s = fourier_sigma(mu, Int(3), 1e-9);
        CHECK(s.error_radius <= 1e-9);
        CHECK(std::abs(s.value) <= 1.0 + 1e-9);
    }
}

TEST_CASE("phase search rejects unsuitable inputs") {
    SequenceFamily dep = family_of_polynomials({{0, 2}, {0, 3}});
    CHECK(thrown_code([&] { search_alpha_anchor(dep, {"00"}, 2, 100, 1); }) ==
          "dependent-family");
    SequenceFamily fam = linear_family();
    CHECK(thrown_code([&] { search_alpha_anchor(fam, {"0"}, 0, 100, 1); }) == "invalid-depth");
    CHECK(thrown_code([&] { search_alpha_anchor(fam, {}, 2, 100, 1); }) == "empty-profile");
    CHECK(thrown_code([&] { search_alpha_anchor(fam, {"2"}, 2, 100, 1); }) == "invalid-profile");
    CHECK(thrown_code([&] { search_alpha_anchor(fam, {"01"}, 2, 100, 1); }) ==
          "profile-length-mismatch");
    CHECK(thrown_code([&] { search_alpha_anchor(fam, {"0"}, 2, 0, 1); }) == "scan-exhausted");
}

TEST_CASE("measures from frequency lists") {
    {
        CoinMeasure mu = build_coin_measure_general({Rational(1, 4)});
        FourierValue s = fourier_sigma(mu, Int(1), 1e-9);
        CHECK(std::abs(s.value.real() - 0.5) < 1e-12);
        CHECK(std::abs(s.value.imag()) < 1e-12);
        CHECK(mu.tail.kind == TailBound::Kind::Geometric);
        CHECK(mu.tail.scale == Rational(0));  // the level list is the whole measure
    }
    {
        CoinMeasure mu = build_coin_measure_general({Rational(1, 2), Rational(1, 4)});
        FourierValue s = fourier_sigma(mu, Int(2), 1e-9);
        CHECK(s.value == std::complex<double>(0.0, 0.0));
        CHECK(s.error_radius == 0.0);
    }
    {
        CoinMeasure mu = build_coin_measure_general({});
        FourierValue s = fourier_sigma(mu, Int(5), 1e-9);
        CHECK(s.value == std::complex<double>(1.0, 0.0));
    }
    CHECK(thrown_code([] { build_coin_measure_general({Rational(0)}); }) == "invalid-level");
    CHECK(thrown_code([] { build_coin_measure_general({Rational(3, 2)}); }) == "invalid-level");
}

TEST_CASE("digit chains for frequency lists") {
    // hand case: single entry n=4, alpha=(1/4), profile (1): the only digit
    // vector with a nonzero deviation gives dist(4/8 - 1/4) = 1/4
    AnchorSequence a;
    a.n0 = 1;
    a.kind = "phase-search";
    a.entries.push_back({Int(4), {}});
    SequenceFamily fam = linear_family();
    Rational dev = chain_deviation_general(fam, {Rational(1, 4)}, {1}, a, 1, 1, 1);
    CHECK(dev == Rational(1, 4));
    Rational bound = chain_bound_general(fam, {Rational(1, 4)}, a, 1, 1, 1);
    CHECK(bound == Rational(1));

    CHECK(thrown_code([&] {
              chain_deviation_general(fam, {Rational(1, 4)}, {1}, a, 1, 1, 2);
          }) == "anchor-too-short");
    CHECK(thrown_code([&] {
              chain_deviation_general(fam, {Rational(1, 4)}, {1, 0}, a, 1, 1, 1);
          }) == "profile-length-mismatch");
    CHECK(thrown_code([&] {
              chain_deviation_general(fam, {Rational(1, 4)}, {1}, a, 2, 1, 1);
          }) == "index-out-of-range");
}

}  // TEST_SUITE
