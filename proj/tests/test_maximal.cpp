#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "jnkit/maximal.hpp"
#include "oracle.hpp"

using namespace jnkit;
using testing::grid_fn;
using testing::weight_fn;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t count, double spread = 4.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<double> v(count);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<std::tuple<int, long, long>> sorted_labels(const std::vector<DyadicCube>& cubes) {
    std::vector<std::tuple<int, long, long>> out;
    for (const auto& c : cubes) out.emplace_back(c.level, c.index[0], c.index[1]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::tuple<int, long, long>> sorted_labels(const std::vector<oracle::Cube>& cubes) {
    std::vector<std::tuple<int, long, long>> out;
    for (const auto& c : cubes) out.emplace_back(c.level, c.x, c.y);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("local maximal function of f - f_Q") {
    const auto h = grid_fn({-2, -2, -2, 6});
    CHECK(testing::values(local_dyadic_maximal(h, DyadicCube::root())) == std::vector<double>{3, 3, 4, 6});
    const auto c = grid_fn(std::vector<double>(16, -1.5));
    const auto mc = local_dyadic_maximal(c, DyadicCube{2, {1, 0}});
    for (double v : mc.values()) CHECK((v == 1.5 || v == 0.0));
}

TEST_CASE("sharp maximal function examples") {
    const auto f = grid_fn({0, 0, 0, 8});
    CHECK(testing::values(sharp_maximal(f, DyadicCube::root(), 0, Scope::dyadic)) == std::vector<double>{3, 3, 4, 4});
    const auto c = grid_fn(std::vector<double>(64, 2.5));
    const auto sc = sharp_maximal(c, DyadicCube::root(), 0, Scope::dyadic);
    for (double v : sc.values()) CHECK(v == 0.0);
}

TEST_CASE("sharp function of a cell-averaged polynomial decays with the cell size") {
    // Cell averages of a polynomial are a step function, not the polynomial, so
    // the residual is O(2^-J) rather than zero.
    auto peak = [](int J, int k) {
        const auto p = testing::spec_fn("poly_exact coeffs=1,-2,0.5", 1, J);
        const auto s = sharp_maximal(p, DyadicCube::root(), k, Scope::dyadic);
        return *std::max_element(s.values().begin(), s.values().end());
    };
    for (int k : {2, 3})
        for (int J : {4, 6, 8}) CHECK(peak(J + 2, k) <= 0.3 * peak(J, k));
}

TEST_CASE("local maximal and sharp functions agree with exhaustive enumeration") {
    std::mt19937_64 rng(21);
    for (int n : {1, 2}) {
        const int J = n == 1 ? 7 : 4;
        for (int trial = 0; trial < 5; ++trial) {
            const auto v = random_values(rng, std::size_t{1} << (n * J));
            const auto f = grid_fn(v, n);
            for (const DyadicCube q : {DyadicCube::root(), DyadicCube{1, {1, n == 2 ? 1u : 0u}}}) {
                const auto m = local_dyadic_maximal(f, q);
                const auto s = sharp_maximal(f, q, 0, Scope::dyadic);
                const auto mo = oracle::local_maximal(n, J, v, oracle::from_lib(q));
                const auto so = oracle::sharp(n, J, v, oracle::from_lib(q));
                for (std::size_t i = 0; i < v.size(); ++i) {
                    CHECK_REL(m[i], mo[i]);
                    CHECK_REL(s[i], so[i]);
                }
            }
        }
    }
}

TEST_CASE("weak (1,1) bound for the local maximal function") {
    std::mt19937_64 rng(8);
    for (int n : {1, 2}) {
        const int J = n == 1 ? 10 : 5;
        const auto f = grid_fn(random_values(rng, std::size_t{1} << (n * J)), n);
        const auto m = local_dyadic_maximal(f, DyadicCube::root());
        const double l1 = lp_norm(f, DyadicCube::root(), nullptr, 1.0, false);
        for (double lambda : {0.5, 1.0, 2.0, 3.0, 3.9}) CHECK(superlevel_measure(m, DyadicCube::root(), lambda) <= l1 / lambda);
    }
}

TEST_CASE("Kolmogorov: avg (M_Q h)^s bounded via the weak (1,1) bound") {
    // For 0 < s < 1, avg_Q (M_Q h)^s <= (1/(1-s)) (avg_Q |h|)^s.
    std::mt19937_64 rng(9);
    const auto f = grid_fn(random_values(rng, 1024), 1);
    const auto m = local_dyadic_maximal(f, DyadicCube::root());
    const double avg = lp_norm(f, DyadicCube::root(), nullptr, 1.0);
    for (double s : {0.25, 0.5, 0.75}) {
        const double lhs = std::pow(lp_norm(m, DyadicCube::root(), nullptr, s), s);
        CHECK(lhs <= std::pow(avg, s) / (1 - s));
    }
}

TEST_CASE("Calderon-Zygmund examples") {
    const auto h = grid_fn({2, 2, 2, 6});
    const auto a = cz_decompose(h, DyadicCube::root(), 4.0);
    REQUIRE(a.cubes.size() == 1);
    CHECK(a.cubes[0].level == 2);
    CHECK(a.cubes[0].index[0] == 3);
    CHECK(a.cube_averages[0] == 6.0);
    CHECK(a.all_checked_hold());

    const auto b = cz_decompose(h, DyadicCube::root(), 3.5);
    REQUIRE(b.cubes.size() == 1);
    CHECK(b.cubes[0].level == 1);
    CHECK(b.cubes[0].index[0] == 1);
    CHECK(b.cube_averages[0] == 4.0);
    CHECK(b.all_checked_hold());

    CHECK(cz_decompose(h, DyadicCube::root(), 10.0).cubes.empty());
}

TEST_CASE("bump-weighted stopping cubes") {
    const auto f = grid_fn({0, 0, 0, 8});
    const auto one = weight_fn({1, 1, 1, 1});
    CHECK(cz_decompose_bump(f, DyadicCube::root(), one, 2.0, 100.0).cubes.empty());
    const auto cz = cz_decompose_bump(f, DyadicCube::root(), one, 2.0, 2.0);
    REQUIRE(cz.cubes.size() == 1);
    CHECK(cz.cubes[0].level == 1);
    CHECK(cz.cubes[0].index[0] == 1);
    CHECK_REL(cz.cube_averages[0], 4.0);
    CHECK(cz.all_checked_hold());
    const auto [lhs, rhs] = bump_sum_holder(cz, one, 2.0);
    CHECK(lhs <= rhs * (1 + 1e-12));
}

TEST_CASE("CZ cubes match the exhaustive scan and certificates hold") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> scale(0.5, 4.0);
    for (int n : {1, 2}) {
        const int J = n == 1 ? 7 : 4;
        for (int trial = 0; trial < 20; ++trial) {
            const auto v = random_values(rng, std::size_t{1} << (n * J));
            const auto h = grid_fn(v, n);
            const double lambda = scale(rng);
            const auto cz = cz_decompose(h, DyadicCube::root(), lambda);
            CHECK(sorted_labels(cz.cubes) == sorted_labels(oracle::cz_cubes(n, J, v, {}, lambda)));
            CHECK(cz.all_checked_hold());
        }
    }
}

TEST_CASE("ratio field and distribution functions") {
    const auto f = grid_fn({0, 0, 0, 8});
    const auto F = ratio_field(f, DyadicCube::root(), 0, Scope::dyadic);
    CHECK(testing::values(F.values) == std::vector<double>{1, 1, 1, 1.5});
    CHECK(lp_norm(F.values, DyadicCube::root(), nullptr, 1.0) == 9.0 / 8);
    const auto flat = ratio_field(grid_fn({5, 5, 5, 5}), DyadicCube::root(), 0, Scope::dyadic);
    for (double v : flat.values.values()) CHECK(v == 0.0);

    const auto M = grid_fn({3, 3, 4, 6});
    const auto w = weight_fn({1, 1, 1, 4});
    CHECK(superlevel_measure(M, DyadicCube::root(), 3.5) == 0.5);
    CHECK(superlevel_measure(M, DyadicCube::root(), 3.5, &w) == 1.25);
    CHECK(superlevel_measure(M, DyadicCube::root(), 6.0) == 0.0);
    CHECK(weak_lorentz_norm(grid_fn({0, 0, 0, 1}), DyadicCube::root(), nullptr, 1.0) == 0.25);
}

TEST_CASE("survival function is non-increasing and starts at mass of {F > 0}") {
    std::mt19937_64 rng(4);
    const auto v = random_values(rng, 256);
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
    const auto s = survival_function(grid_fn(a), DyadicCube::root());
    REQUIRE(!s.empty());
    CHECK(s.front().t == 0.0);
    CHECK(s.front().mass == 1.0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i].t > s[i - 1].t);
        CHECK(s[i].mass <= s[i - 1].mass);
    }
    CHECK(s.back().mass == 0.0);
}

TEST_CASE("shifted scope dominates dyadic and is dominated by all lattice cubes") {
    std::mt19937_64 rng(12);
    for (int n : {1, 2}) {
        const int J = n == 1 ? 6 : 4;
        const auto f = grid_fn(random_values(rng, std::size_t{1} << (n * J)), n);
        const auto dy = sharp_maximal(f, DyadicCube::root(), 0, Scope::dyadic);
        const auto sh = sharp_maximal(f, DyadicCube::root(), 0, Scope::shifted);
        for (std::size_t i = 0; i < dy.size(); ++i) CHECK(dy[i] <= sh[i]);
        const auto lat = shifted_sharp_field(f, DyadicCube::root(), 0);
        const auto brute = brute_force_sharp(f, DyadicCube::root(), 0);
        REQUIRE(lat.values.size() == brute.values.size());
        for (std::size_t i = 0; i < lat.values.size(); ++i) CHECK(lat.values[i] <= brute.values[i] * (1 + 1e-12));

        const auto mh = shifted_maximal_field(f);
        const auto mb = brute_force_maximal(f);
        for (std::size_t i = 0; i < mh.values.size(); ++i) CHECK(mh.values[i] <= mb.values[i] * (1 + 1e-12));
    }
}

TEST_CASE("all-cube maximal function is controlled by the shifted systems") {
    std::mt19937_64 rng(13);
    for (int n : {1, 2}) {
        const int J = n == 1 ? 6 : 4;
        const auto sys = shifted_systems(GridConfig::make(n, J));
        const double c = std::pow(lattice_covering_ratio(sys), n);
        for (int trial = 0; trial < 3; ++trial) {
            const auto f = grid_fn(random_values(rng, std::size_t{1} << (n * J)), n);
            const auto brute = brute_force_maximal(f);
            const auto parts = system_maximal_fields(f);
            for (std::size_t i = 0; i < brute.values.size(); ++i) {
                double sum = 0;
                for (const auto& p : parts) sum += p.values[i];
                CHECK(brute.values[i] <= c * sum * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("brute-force oracles refuse large grids") {
    CHECK_THROWS(brute_force_maximal(grid_fn(std::vector<double>(256, 1.0))));
    CHECK_THROWS(brute_force_sharp(grid_fn(std::vector<double>(1024, 1.0), 2), DyadicCube::root(), 0));
}

TEST_CASE("repeated evaluation is bit-identical") {
    const auto f = testing::spec_fn("martingale seed=77 amplitude=1", 2, 5);
    const auto a = ratio_field(f, DyadicCube::root(), 1, Scope::shifted);
    const auto b = ratio_field(f, DyadicCube::root(), 1, Scope::shifted);
    CHECK(testing::values(a.values) == testing::values(b.values));
}
