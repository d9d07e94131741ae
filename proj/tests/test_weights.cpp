#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "jnkit/weights.hpp"
#include "oracle.hpp"

using namespace jnkit;
using testing::weight_fn;

namespace {

std::vector<double> random_weight(std::mt19937_64& rng, std::size_t count) {
    std::lognormal_distribution<double> d(0.0, 0.8);
    std::vector<double> v(count);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST_CASE("bump examples") {
    const auto one = weight_fn(std::vector<double>(16, 1.0));
    for (double r : {1.0, 1.5, 3.0}) {
        CHECK_REL(bump(one, DyadicCube::root(), r), 1.0);
        CHECK_REL(bump(one, DyadicCube{2, {1, 0}}, r), 0.25);
    }
    const auto w = weight_fn({1, 1, 1, 4});
    CHECK_REL(bump(w, DyadicCube::root(), 2.0), std::sqrt(19.0) / 2);
    CHECK_REL(bump(w, DyadicCube::root(), 1.0), 7.0 / 4);
}

TEST_CASE("A_p examples") {
    CHECK(ap_constant(weight_fn(std::vector<double>(8, 1.0)), 2.0).value == 1.0);
    const auto w = weight_fn({1, 1, 1, 4});
    const auto a2 = ap_constant(w, 2.0);
    CHECK_REL(a2.value, 25.0 / 16);
    CHECK(a2.witness.level == 1);
    CHECK(a2.witness.index[0] == 1);
    CHECK_REL(ap_bump_constant(w, 2.0, 1.0).value, 25.0 / 16);
}

TEST_CASE("A_2 of sqrt(x) increases towards 4/3 with the depth") {
    double previous = 0.0;
    for (int J : {2, 4, 6, 8, 10}) {
        const auto w = testing::spec_fn("power alpha=0.5 center=0 weight=1", 1, J);
        const auto a = ap_constant(w, 2.0);
        CHECK(a.value < 4.0 / 3);
        CHECK(a.value > previous);
        CHECK(a.witness.index[0] == 0);
        CHECK_REL(a.value, oracle::ap(1, J, testing::values(w), 2.0));
        previous = a.value;
    }
    CHECK(previous > 1.32);
}

TEST_CASE("A_infinity and C_p examples") {
    CHECK(ainfty_constant(weight_fn(std::vector<double>(8, 1.0))).value == 1.0);
    CHECK(cp_constant(weight_fn(std::vector<double>(8, 1.0)), 2.0).value == 1.0);
    const auto w = weight_fn({1, 1, 1, 4});
    const auto ai = ainfty_constant(w);
    CHECK_REL(ai.value, 10.0 / 7);
    CHECK(ai.witness.level == 0);
    const auto cp = cp_constant(w, 2.0);
    CHECK_REL(cp.value, 10.0 / 7);
    CHECK(cp.witness.level == 0);
    // The other cubes, by hand.
    const DyadicSums sums(w.config(), w.values());
    auto ratio = [&](const DyadicCube& q) {
        const auto m = oracle::local_maximal(1, 2, testing::values(w), oracle::from_lib(q));
        double num = 0;
        for (double v : m) num += v / 4;
        return num / cp_denominator(w, q, 2.0, sums);
    };
    CHECK_REL(ratio(DyadicCube{2, {3, 0}}), 32.0 / 35);
    CHECK_REL(ratio(DyadicCube{1, {1, 0}}), 13.0 / 11);
    CHECK_REL(ratio(DyadicCube{2, {0, 0}}), 16.0 / 25);
    CHECK_REL(ratio(DyadicCube{1, {0, 0}}), 8.0 / 13);
}

TEST_CASE("weight constants agree with exhaustive scans") {
    std::mt19937_64 rng(41);
    for (int n : {1, 2}) {
        const int J = n == 1 ? 6 : 3;
        for (int trial = 0; trial < 4; ++trial) {
            const auto v = random_weight(rng, std::size_t{1} << (n * J));
            const auto w = weight_fn(v, n);
            for (double p : {1.5, 2.0, 3.0}) {
                CHECK_REL_TOL(ap_constant(w, p).value, oracle::ap(n, J, v, p), 1e-11);
                CHECK_REL_TOL(ap_bump_constant(w, p, 1.5).value, oracle::ap_bump(n, J, v, p, 1.5), 1e-11);
                CHECK_REL_TOL(cp_constant(w, p).value, oracle::cp(n, J, v, p), 1e-11);
            }
            CHECK_REL_TOL(ainfty_constant(w).value, oracle::ainfty(n, J, v), 1e-11);
        }
    }
}

TEST_CASE("witness cubes reproduce the reported constants") {
    std::mt19937_64 rng(42);
    const int J = 6;
    const auto v = random_weight(rng, 64);
    const auto w = weight_fn(v);
    const auto a = ap_constant(w, 2.0);
    const auto idx = oracle::cells(1, J, oracle::from_lib(a.witness));
    double s1 = 0, s2 = 0;
    for (auto i : idx) {
        s1 += v[i];
        s2 += 1 / v[i];
    }
    CHECK_REL(a.value, (s1 / idx.size()) * (s2 / idx.size()));

    const auto ai = ainfty_constant(w);
    const auto m = oracle::local_maximal(1, J, v, oracle::from_lib(ai.witness));
    double num = 0, den = 0;
    for (auto i : oracle::cells(1, J, oracle::from_lib(ai.witness))) {
        num += m[i];
        den += v[i];
    }
    CHECK_REL(ai.value, num / den);
}

TEST_CASE("constants are invariant under scaling of the weight") {
    std::mt19937_64 rng(43);
    const auto v = random_weight(rng, 256);
    std::vector<double> scaled(v);
    for (auto& x : scaled) x *= 8.0;
    const auto w = weight_fn(v), ws = weight_fn(scaled);
    CHECK_REL_TOL(ap_constant(w, 2.0).value, ap_constant(ws, 2.0).value, 1e-12);
    CHECK_REL_TOL(ainfty_constant(w).value, ainfty_constant(ws).value, 1e-12);
    CHECK_REL_TOL(cp_constant(w, 3.0).value, cp_constant(ws, 3.0).value, 1e-12);
}

TEST_CASE("A_1 dominates A_p and A_infinity ordering") {
    std::mt19937_64 rng(44);
    const auto w = weight_fn(random_weight(rng, 256));
    const double a1 = ap_constant(w, 1.0).value;
    for (double p : {1.5, 2.0, 4.0}) CHECK(ap_constant(w, p).value <= a1 * (1 + 1e-12));
    CHECK(ainfty_constant(w, Scope::shifted).value >= ainfty_constant(w, Scope::dyadic).value);
}

TEST_CASE("reverse Hoelder checks") {
    const auto one = weight_fn(std::vector<double>(16, 1.0));
    const auto r1 = reverse_holder_check(one, 0.3, RhiMode::ainfty);
    CHECK_REL(r1.max_ratio, 0.5);
    CHECK(r1.pass);
    const auto w = weight_fn({1, 1, 1, 4});
    const double delta = rhi_delta(RhiMode::ainfty, 10.0 / 7, kRhiCalibrationAinfty);
    CHECK_REL(delta, 7.0 / (kRhiCalibrationAinfty * 10));
    CHECK(reverse_holder_check(w, delta, RhiMode::ainfty).pass);
    const auto blow = testing::spec_fn("power alpha=-0.9 center=0 weight=1", 1, 10);
    CHECK_FALSE(reverse_holder_check(blow, 1.0, RhiMode::ainfty).pass);
    CHECK_THROWS_AS(rhi_delta(RhiMode::cp, 0.5, 1.0), DomainError);
}
