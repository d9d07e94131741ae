#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "jnkit/grid.hpp"
#include "oracle.hpp"

using namespace jnkit;
using testing::grid_fn;
using testing::spec_fn;
using testing::weight_fn;

TEST_CASE("explicit construction keeps values") {
    const auto f = grid_fn({0, 0, 0, 8});
    CHECK(f.config().depth == 2);
    CHECK(testing::values(f) == std::vector<double>{0, 0, 0, 8});
    const auto w = weight_fn({1, 1, 1, 4});
    CHECK(w.is_weight());
    CHECK_THROWS_AS(weight_fn({1, 0, 1, 4}), DomainError);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(GridConfig::make(3, 2), DomainError);
    CHECK_THROWS_AS(GridConfig::make(1, 0), DomainError);
    CHECK_THROWS_AS(FunctionSpec::parse_entry("martingale amplitude=1"), DomainError);
    CHECK_THROWS_AS(FunctionSpec::parse_entry("step values=1,2 colour=red"), DomainError);
}

TEST_CASE("power weight cells are exact means of sqrt") {
    const auto f = spec_fn("power alpha=0.5 center=0", 1, 8);
    const double h = 1.0 / 256;
    for (std::size_t k = 0; k < 256; ++k) {
        const double a = k * h, b = (k + 1) * h;
        const double expect = (2.0 / 3.0) * (std::pow(b, 1.5) - std::pow(a, 1.5)) / (b - a);
        CHECK_REL(f[k], expect);
    }
}

TEST_CASE("exact polynomial cells integrate the polynomial") {
    // 9x - 5/2 on quarters.
    const auto f = spec_fn("poly_exact coeffs=-2.5,9", 1, 2);
    const std::vector<double> expect{-11.0 / 8, 7.0 / 8, 25.0 / 8, 43.0 / 8};
    for (std::size_t i = 0; i < 4; ++i) CHECK_REL(f[i], expect[i]);
}

TEST_CASE("averages") {
    const auto f = grid_fn({0, 0, 0, 8});
    CHECK(average(f, DyadicCube::root()) == 2.0);
    CHECK(average(f, DyadicCube{1, {1, 0}}) == 4.0);
    const auto c = grid_fn(std::vector<double>(64, 3.25), 2);
    for_each_cube(c.config(), DyadicCube::root(), [&](const DyadicCube& q) { CHECK(average(c, q) == 3.25); });
}

TEST_CASE("parent average is the mean of the children") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int n : {1, 2}) {
        const int J = n == 1 ? 8 : 4;
        std::vector<double> v(std::size_t{1} << (n * J));
        for (auto& x : v) x = u(rng);
        const auto f = grid_fn(v, n);
        for_each_cube(f.config(), DyadicCube::root(), [&](const DyadicCube& q) {
            CHECK_REL(average(f, q), oracle::mean(v, oracle::cells(n, J, oracle::from_lib(q))));
            if (q.level == J) return;
            double s = 0;
            for (unsigned c = 0; c < f.config().children_per_cube(); ++c) s += average(f, q.child(n, c));
            CHECK_REL(average(f, q), s / f.config().children_per_cube());
        });
    }
}

TEST_CASE("shifted systems") {
    const auto s1 = shifted_systems(GridConfig::make(1, 4));
    CHECK(s1.systems() == 2);
    CHECK(s1.denominator == 3);
    CHECK(s1.shifts[0] == 0.0);
    CHECK_REL(s1.shifts[1], 1.0 / 3);
    const auto s2 = shifted_systems(GridConfig::make(2, 3));
    CHECK(s2.systems() == 3);
    CHECK_REL(s2.shifts[1], 1.0 / 3);
    CHECK_REL(s2.shifts[2], 2.0 / 3);
    CHECK(shift_denominator(1) == 3);
    CHECK(shift_denominator(2) == 3);
}

TEST_CASE("refine then coarsen_min is the identity") {
    const auto f = spec_fn("martingale seed=3 amplitude=1", 2, 3);
    const auto back = coarsen_min(refine(f, 3), f.config(), 3);
    CHECK(testing::values(back) == testing::values(f));
}

TEST_CASE("spec entries and binary round-trip") {
    for (const std::string e : {"martingale seed=9 amplitude=0.5", "step values=1,2,3,4", "power alpha=-0.3 center=0.3,0.6",
                                "poly_midpoint coeffs=1,2,3"}) {
        const auto spec = FunctionSpec::parse_entry(e);
        CHECK(FunctionSpec::parse_entry(spec.to_entry()) == spec);
    }
    const auto f = spec_fn("martingale seed=11 amplitude=1", 2, 4);
    const auto g = from_binary(to_binary(f));
    CHECK(g.config() == f.config());
    CHECK(testing::values(g) == testing::values(f));
}

TEST_CASE("martingales are seeded and mean zero on every cube's children") {
    const auto a = spec_fn("martingale seed=17 amplitude=1", 1, 10);
    const auto b = spec_fn("martingale seed=17 amplitude=1", 1, 10);
    CHECK(testing::values(a) == testing::values(b));
    CHECK(average(a, DyadicCube::root()) == 0.0);
    const auto c = spec_fn("martingale seed=18 amplitude=1", 1, 10);
    CHECK(testing::values(a) != testing::values(c));
}
