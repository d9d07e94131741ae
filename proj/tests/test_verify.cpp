#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "jnkit/verify.hpp"
#include "oracle.hpp"

using namespace jnkit;
using testing::grid_fn;
using testing::weight_fn;

namespace {

const VerificationRecord& find(const std::vector<VerificationRecord>& rs, const std::string& theorem, double p) {
    for (const auto& r : rs)
        for (const auto& [k, v] : r.inputs)
            if (r.theorem == theorem && k == "p" && std::stod(v) == p) return r;
    FAIL("no record " << theorem << " p=" << p);
    return rs.front();
}

}  // namespace

TEST_CASE("maximal over sharp on the spike") {
    const auto f = grid_fn({0, 0, 0, 8});
    const auto w = weight_fn({1, 1, 1, 1});
    const auto F = ratio_field(f, DyadicCube::root(), 0, Scope::dyadic);
    const std::vector<double> expect{1, 1, 1, 1.5};
    for (std::size_t i = 0; i < 4; ++i) CHECK_REL(F.values[i], expect[i]);
    const auto recs = check_jn_ratio(F, w, {1.0, 2.0}, 2.0, DyadicCube::root());
    const auto& one = find(recs, "jn_ratio_bump", 1.0);
    CHECK_REL(one.lhs, 9.0 / 8);
    CHECK_REL(one.constant, 9.0 / 16);
    const auto& two = find(recs, "jn_ratio_bump", 2.0);
    CHECK_REL(two.lhs, std::sqrt((3 + 2.25) / 4));
    CHECK_REL(two.constant, std::sqrt(5.25 / 4) / 4);
    // A_inf form for w = 1: [w]_{A_inf} = 1.
    CHECK_REL(find(recs, "jn_ratio_ainfty", 1.0).constant, 9.0 / 8);
}

TEST_CASE("constant functions give zero left sides") {
    const auto f = grid_fn(std::vector<double>(16, 2.5));
    const auto w = weight_fn(std::vector<double>(16, 1.0));
    const auto F = ratio_field(f, DyadicCube::root(), 0, Scope::dyadic);
    for (const auto& r : check_jn_ratio(F, w, {1.0, 4.0}, 2.0, DyadicCube::root())) CHECK(r.lhs == 0.0);
    const auto tails = check_exponential_tails(F, w, DyadicCube::root(), {1.0}, {0.5});
    CHECK(tails.fit.degenerate);
    CHECK(tails.records.front().status == RecordStatus::skipped);
    CHECK(check_weighted_bmo(f, w, 2.0, 2.0, DyadicCube::root()).lhs == 0.0);
    CHECK_THROWS_AS(check_bmo_lp(f, 2.0, DyadicCube::root()), DomainError);
    CHECK_THROWS_AS(check_bmo_tail(f, DyadicCube::root()), DomainError);
    CHECK_THROWS_AS(check_sharp_norm_inequality(f, w, 2.0, 3.0), DomainError);
}

TEST_CASE("BMO to L^p on the spike") {
    const auto f = grid_fn({0, 0, 0, 8});
    const auto one = check_bmo_lp(f, 1.0, DyadicCube::root());
    CHECK_REL(one.lhs, 3.0);
    CHECK_REL(one.constant, 0.75);
    // sqrt((4 + 4 + 4 + 36) / 4) / (2 * 4)
    CHECK_REL(check_bmo_lp(f, 2.0, DyadicCube::root()).constant, std::sqrt(3.0) / 4);
    // |f - 2| / 4 = [1/2, 1/2, 1/2, 3/2]: survival 1/4 beyond 1/2.
    CHECK_REL(check_bmo_tail(f, DyadicCube::root()).lhs, 0.5 / std::log(8.0));
    CHECK_THROWS_AS(check_bmo_lp(f, 0.5, DyadicCube::root()), DomainError);
}

TEST_CASE("weighted BMO on the spike") {
    const auto f = grid_fn({0, 0, 0, 8});
    const std::vector<double> wv{1, 1, 1, 4};
    const auto w = weight_fn(wv);
    const auto rec = check_weighted_bmo(f, w, 2.0, 2.0, DyadicCube::root());
    // (|f - 2| / w)^2 w = [4, 4, 4, 9]; w_2(Q) = sqrt(19) / 2.
    CHECK_REL(rec.lhs, std::sqrt(21.0 / 4 / (std::sqrt(19.0) / 2)));
    REQUIRE(rec.factors.size() == 4);
    CHECK_REL(rec.factors[0].value, 2.0);
    CHECK_REL(rec.factors[1].value, std::sqrt(oracle::ap_bump(1, 2, wv, 2.0, 2.0)));
    CHECK_REL(rec.factors[2].value, std::sqrt(2.0));
    CHECK_REL(rec.factors[3].value, 6 / std::sqrt(19.0));
    CHECK_REL(rec.constant, rec.lhs / rec.factor_product());
    CHECK_THROWS_AS(check_weighted_bmo(f, w, 1.0, 2.0, DyadicCube::root()), DomainError);
    CHECK_THROWS_AS(check_weighted_bmo(f, w, 2.0, 1.0, DyadicCube::root()), DomainError);

    const auto ap = check_weighted_bmo_ap(f, w, 2.0, DyadicCube::root());
    CHECK_REL(ap.factors[1].value, std::sqrt(25.0 / 16));
    CHECK_REL(ap.factors[2].value, std::sqrt(10.0 / 7));
}

TEST_CASE("unweighted weighted-BMO reduces to the L^2 deviation") {
    const auto f = testing::spec_fn("martingale seed=4 amplitude=1", 1, 8);
    const auto w = weight_fn(std::vector<double>(256, 1.0));
    const auto rec = check_weighted_bmo(f, w, 2.0, 3.0, DyadicCube::root());
    CHECK_REL(rec.lhs, check_bmo_lp(f, 2.0, DyadicCube::root()).lhs);
}

TEST_CASE("norm inequality factors") {
    const auto f = grid_fn({0, 0, 0, 8});
    const auto w = weight_fn({1, 1, 1, 1});
    const auto rec = check_sharp_norm_inequality(f, w, 2.0, 3.0);
    REQUIRE(rec.factors.size() == 3);
    CHECK_REL(rec.factors[0].value, 6.0);
    CHECK_REL(rec.factors[1].value, 1.0);
    // Shifted M dominates the dyadic one.
    const auto dyadic = local_dyadic_maximal(f, DyadicCube::root());
    CHECK(rec.lhs >= lp_norm(dyadic, DyadicCube::root(), nullptr, 2.0, false) * (1 - 1e-12));
    CHECK_THROWS_AS(check_sharp_norm_inequality(f, w, 3.0, 3.0), DomainError);
    CHECK_THROWS_AS(check_sharp_norm_inequality(f, w, 1.0, 3.0), DomainError);
}

TEST_CASE("power ratio minimum") {
    const auto a1 = minimize_power_ratio(1.0);
    CHECK_REL(a1.t_star, 2.0);
    CHECK_REL(a1.min, 4.0);
    CHECK_REL(a1.bound, 2 * std::exp(1.0));
    CHECK(a1.pass);
    const auto a2 = minimize_power_ratio(2.0);
    CHECK_REL(a2.t_star, std::sqrt(3.0));
    CHECK_REL(a2.min, 3 * std::sqrt(3.0) / 2);
    CHECK(a2.pass);
    // Grid search oracle.
    for (double alpha : {0.1, 0.5, 3.0}) {
        double best = INFINITY;
        for (int i = 1; i <= 200000; ++i) {
            const double t = 1 + i * 1e-4;
            best = std::min(best, std::pow(t, 1 + alpha) / (std::pow(t, alpha) - 1));
        }
        const auto m = minimize_power_ratio(alpha);
        CHECK_REL_TOL(m.min, best, 1e-6);
        CHECK(m.pass);
    }
    double previous = INFINITY;
    for (double alpha : {10.0, 100.0, 1000.0}) {
        const auto m = minimize_power_ratio(alpha);
        CHECK(m.min < previous);
        CHECK(m.min > 1.0);
        previous = m.min;
    }
    CHECK(previous < 1.01);
    CHECK_REL_TOL(minimize_power_ratio(1000.0).bound, std::exp(1.0), 2e-3);
    CHECK_THROWS_AS(minimize_power_ratio(0.0), DomainError);
    CHECK_THROWS_AS(minimize_power_ratio(-1.0), DomainError);
}

TEST_CASE("tail fits recover exact exponentials") {
    std::vector<SurvivalPoint> s;
    for (int i = 0; i <= 80; ++i) s.push_back({i * 0.1, 0.8 * std::exp(-1.5 * i * 0.1)});
    const auto fit = fit_tail(s);
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.monotone);
    CHECK_REL_TOL(fit.c, 1.5, 1e-10);
    CHECK_REL_TOL(fit.C, 0.8, 1e-10);
    CHECK(fit.residual < 1e-10);
    // Only masses in [0.01, 0.5] enter the fit.
    std::size_t inside = 0;
    for (const auto& p : s) inside += p.mass >= 0.01 && p.mass <= 0.5;
    CHECK(fit.used == inside);
    double rate = INFINITY;
    for (const auto& p : s)
        if (p.t > 0) rate = std::min(rate, std::log(2.0 / p.mass) / p.t);
    CHECK_REL(admissible_rate(s, 2.0), rate);
    CHECK(fit_tail({{0.0, 1.0}, {1.0, 0.5}}).degenerate);
}

TEST_CASE("L^p to exponential tail bridge") {
    // Exponential law: ||F||_p = Gamma(p + 1)^{1/p} <= p.
    std::vector<double> vals, masses;
    const int N = 4000;
    for (int i = 0; i < N; ++i) {
        vals.push_back(-std::log(1 - (i + 0.5) / N));
        masses.push_back(1.0 / N);
    }
    const auto b = tail_bridge(vals, masses);
    CHECK(b.hypothesis_holds);
    CHECK(b.holds);
    CHECK(b.gamma_tilde <= 1.0 + 1e-9);

    std::mt19937_64 rng(81);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 30;
        std::vector<double> v(n), m(n);
        double total = 0;
        for (int i = 0; i < n; ++i) {
            v[i] = std::pow(u(rng), -1.0 + u(rng)) * (1 + trial % 7);
            m[i] = u(rng) + 1e-3;
            total += m[i];
        }
        for (auto& x : m) x /= total;
        const auto r = tail_bridge(v, m);
        // gamma~ dominates a coarse scan of ||F||_p / p.
        for (double p = 1; p <= 64; p += 0.5) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += m[i] * std::pow(v[i], p);
            CHECK(r.gamma_tilde >= std::pow(s, 1 / p) / p * (1 - 1e-9));
        }
        if (r.hypothesis_holds) CHECK(r.holds);
        // Tail at every value against 2 exp(-t / (4 gamma~)).
        for (int i = 0; i < n; ++i) {
            double above = 0;
            for (int j = 0; j < n; ++j)
                if (v[j] > v[i]) above += m[j];
            CHECK(above <= 2 * std::exp(-v[i] / (4 * r.gamma_tilde)) * (1 + 1e-12));
        }
    }
    CHECK_THROWS_AS(tail_bridge(std::vector<double>{-1.0}, std::vector<double>{1.0}), DomainError);
}

TEST_CASE("exponential tails and good-lambda table on a martingale") {
    const auto f = testing::spec_fn("martingale seed=12 amplitude=1", 1, 10);
    const auto w = testing::spec_fn("step values=1,2,4,8 weight=1", 1, 10);
    const auto wv = testing::values(w);
    const auto F = ratio_field(f, DyadicCube::root(), 0, Scope::dyadic);
    const std::vector<double> lambdas{1, 2}, gammas{0.1, 0.4};
    const auto rep = check_exponential_tails(F, w, DyadicCube::root(), lambdas, gammas);
    CHECK_FALSE(rep.fit.degenerate);
    CHECK(rep.fit.monotone);
    CHECK(rep.fit.c > 0.0);
    CHECK(rep.bridge.holds);
    REQUIRE(rep.table.size() == 4);
    // Direct evaluation of one row.
    double scale = 0;
    for (std::size_t i = 0; i < wv.size(); ++i) scale += F.numerator[i];
    scale /= wv.size();
    double mass = 0, total = 0;
    for (std::size_t i = 0; i < wv.size(); ++i) {
        total += wv[i];
        if (F.numerator[i] > 2 * scale && F.denominator[i] <= 0.4 * 2 * scale) mass += wv[i];
    }
    CHECK_REL_TOL(rep.table[3].mass, mass / total, 1e-12);
    for (const auto& row : rep.table) CHECK(row.mass <= 2 * std::exp(-rep.good_lambda_rate / (row.gamma * oracle::ainfty(1, 10, wv))) * (1 + 1e-9));
}

TEST_CASE("non-dyadic tail and Whitney table") {
    const auto f = testing::spec_fn("martingale seed=13 amplitude=1", 1, 8);
    const std::vector<double> lambdas{0.25, 0.5, 1.0}, gammas{0.5, 1, 2, 4, 8};
    const auto rep = check_nondyadic_jn(f, lambdas, gammas);
    CHECK(rep.table.size() == lambdas.size() * gammas.size());
    CHECK(rep.monotone);
    for (const auto& row : rep.table) {
        CHECK(row.worst >= 0.0);
        CHECK(row.worst <= 1.0);
    }
    CHECK_FALSE(rep.fit.degenerate);
    CHECK(rep.records.size() == 2);
}

TEST_CASE("polynomial records carry the basis constant") {
    const auto f = grid_fn({0, 0, 0, 8});
    const auto w = weight_fn({1, 1, 1, 1});
    const auto F = ratio_field(f, DyadicCube::root(), 1, Scope::dyadic);
    const auto recs = check_polynomial_jn(F, w, {1.0, 2.0}, 2.0, DyadicCube::root());
    REQUIRE(recs.size() == 2);
    for (const auto& r : recs) {
        CHECK(r.theorem == "polynomial_jn");
        double gamma = 0;
        for (const auto& fac : r.factors)
            if (fac.name == "gamma") gamma = fac.value;
        CHECK_REL(gamma, 4.0);
        CHECK_REL(r.constant, r.lhs / r.factor_product());
    }
    CHECK_REL(recs[0].lhs, weighted_ratio_norm(F.values, w, 1.0, 2.0, DyadicCube::root()));
    const auto wb = check_polynomial_weighted_bmo(f, weight_fn({1, 1, 1, 4}), 2.0, 2.0, 1, DyadicCube::root());
    CHECK(wb.theorem == "polynomial_weighted_bmo");
    CHECK(wb.factors.size() == 5);
    CHECK(std::isfinite(wb.constant));
}
