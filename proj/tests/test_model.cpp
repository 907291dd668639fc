#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "kge/model.hpp"
#include "support.hpp"

using namespace kge;

namespace {

using Vec = std::vector<double>;

Vec random_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

// Complex row layout: real half then imaginary half.
double complex_oracle(const Vec& h, const Vec& r, const Vec& t) {
    const auto k = h.size() / 2;
    double acc = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double hr = h[i], hi = h[k + i], rr = r[i], ri = r[k + i], tr = t[i], ti = t[k + i];
        // Re(r * h * conj(t))
        const double pr = rr * hr - ri * hi, pi = rr * hi + ri * hr;
        acc += pr * tr + pi * ti;
    }
    return acc;
}

}  // namespace

TEST_CASE("TransE worked values") {
    CHECK(transe_score(Vec{1, 0}, Vec{0, 1}, Vec{1, 1}, 1) == 0.0);
    CHECK(transe_score(Vec{1, 0}, Vec{0, 0}, Vec{0, 0}, 1) == -1.0);
    CHECK(transe_score(Vec{3, 4}, Vec{0, 0}, Vec{0, 0}, 2) == -5.0);
}

TEST_CASE("DistMult worked values and symmetry") {
    CHECK(distmult_score(Vec{1, 2}, Vec{3, 4}, Vec{5, 6}) == 63.0);
    CHECK(distmult_score(Vec{1, 2}, Vec{0, 0}, Vec{5, 6}) == 0.0);
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
        auto h = random_vec(rng, 8), r = random_vec(rng, 8), t = random_vec(rng, 8);
        CHECK(distmult_score(h, r, t) == distmult_score(t, r, h));
    }
}

TEST_CASE("ComplEx worked value, real reduction and antisymmetry") {
    CHECK(complex_score(Vec{0, 1}, Vec{1, 0}, Vec{0, 1}) == 1.0);
    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        auto h = random_vec(rng, 12), r = random_vec(rng, 12), t = random_vec(rng, 12);
        CHECK(complex_score(h, r, t) == doctest::Approx(complex_oracle(h, r, t)).epsilon(1e-12));

        auto hr = h, rr = r, tr = t;
        for (std::size_t j = 6; j < 12; ++j) hr[j] = rr[j] = tr[j] = 0;
        const Vec h6(h.begin(), h.begin() + 6), r6(r.begin(), r.begin() + 6), t6(t.begin(), t.begin() + 6);
        CHECK(std::abs(complex_score(hr, rr, tr) - distmult_score(h6, r6, t6)) <= 1e-12);

        auto ri = r;
        for (std::size_t j = 0; j < 6; ++j) ri[j] = 0;
        CHECK(std::abs(complex_score(h, ri, t) + complex_score(t, ri, h)) <= 1e-12);
    }
}

TEST_CASE("HolE worked values and FFT agreement") {
    CHECK(hole_score(Vec{1, 2, 3}, Vec{1, 0, 0}, Vec{4, 5, 6}) == 32.0);
    CHECK(hole_score(Vec{1, 2, 3}, Vec{0, 0, 0}, Vec{4, 5, 6}) == 0.0);
    CHECK(hole_score(Vec{1, 0}, Vec{0, 1}, Vec{0, 1}) == 1.0);

    Vec corr(3);
    circular_correlation(Vec{1, 2, 3}, Vec{4, 5, 6}, corr);
    CHECK(corr == Vec{32, 29, 29});

    std::mt19937_64 rng(43);
    for (std::size_t k : {1u, 2u, 3u, 8u, 17u, 64u}) {
        for (int i = 0; i < 20; ++i) {
            auto h = random_vec(rng, k), w = random_vec(rng, k), t = random_vec(rng, k);
            double direct = 0;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t j = 0; j < k; ++j) direct += w[a] * h[j] * t[(j + a) % k];
            CHECK(hole_score(h, w, t) == doctest::Approx(direct).epsilon(1e-12));
            CHECK(std::abs(hole_score_fft(h, w, t) - hole_score(h, w, t)) <= 1e-9);
        }
    }
}

TEST_CASE("ConvKB worked values") {
    CHECK(convkb_score(Vec{2}, Vec{3}, Vec{1}, Vec{1, 1, -2, 0}, Vec{1}) == 3.0);
    CHECK(convkb_score(Vec{2}, Vec{3}, Vec{1}, Vec{1, 1, -2, 0}, Vec{0}) == 0.0);
    CHECK(convkb_score(Vec{2, 1}, Vec{3, 1}, Vec{1, 1}, Vec{-1, -1, 0, -1}, Vec{5, 5}) == 0.0);
}

TEST_CASE("gradient worked values and conventions") {
    auto p = init_params(ModelKind::distmult, 2, 0, 2, 1);
    p.entities = {1, 2, 5, 6};
    p.relations = {3, 4};
    auto g = gradient(p, {0, 0, 1});
    CHECK(g.head == Vec{15, 24});
    CHECK(g.tail == Vec{3, 8});
    CHECK(g.relation == Vec{5, 12});

    auto q = init_params(ModelKind::transe, 2, 0, 2, 1);
    q.entities = {1, 0, 1, 1};
    q.relations = {0, 1};
    auto z = gradient(q, {0, 0, 1});
    CHECK(z.head == Vec{0, 0});
    CHECK(z.tail == Vec{0, 0});
    CHECK(z.relation == Vec{0, 0});
}

TEST_CASE("analytic gradients match finite differences") {
    for (auto kind : {ModelKind::transe, ModelKind::distmult, ModelKind::complex, ModelKind::hole, ModelKind::convkb}) {
        CAPTURE(to_string(kind));
        auto check = testing::check_gradients(kind, 100, 44);
        CHECK(check.instances == 100);
        CHECK(check.worst < 1e-4);
    }
}

TEST_CASE("initialisation is seeded, bounded and normalised for TransE") {
    auto a = init_params(ModelKind::complex, 8, 5, 10, 3);
    auto b = init_params(ModelKind::complex, 8, 5, 10, 3);
    auto c = init_params(ModelKind::complex, 8, 6, 10, 3);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.width == 16);
    CHECK(a.entities.size() == 160);
    const double bound = 6.0 / std::sqrt(8.0);
    for (double x : a.entities) CHECK(std::abs(x) <= bound);

    auto t = init_params(ModelKind::transe, 8, 5, 10, 3);
    for (EntityId e = 0; e < 10; ++e) {
        double n = 0;
        for (double x : t.entity(e)) n += x * x;
        CHECK(std::abs(std::sqrt(n) - 1.0) <= 1e-12);
    }

    auto k = init_params(ModelKind::convkb, 4, 1, 3, 2, {1, 24});
    CHECK(k.filters.size() == 96);
    CHECK(k.dense.size() == 96);

    CHECK_THROWS_AS(init_params(ModelKind::hole, 0, 0, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_params(ModelKind::transe, 4, 0, 3, 1, {3, 24}), std::invalid_argument);
    CHECK_THROWS_AS(parse_model_kind("rescal"), std::invalid_argument);
    CHECK(parse_model_kind("convkb") == ModelKind::convkb);
}

TEST_CASE("scoring is pure") {
    for (auto kind : {ModelKind::transe, ModelKind::distmult, ModelKind::complex, ModelKind::hole, ModelKind::convkb}) {
        auto p = init_params(kind, 8, 9, 5, 2);
        const auto before = p;
        const Triple t{1, 1, 3};
        const double first = score(p, t);
        for (int i = 0; i < 10; ++i) CHECK(score(p, t) == first);
        CHECK(p == before);
    }
}
