#include "oracles.hpp"

#include "preyclass/error.hpp"
#include "preyclass/features.hpp"
#include "preyclass/rng.hpp"

#include <doctest.h>

using namespace preyclass;

namespace {

Window fixture() {
    // 10 samples per channel, channel-major.
    Window w;
    w.values = {0.12, -0.4, 0.33, 1.7, -0.05, 0.9, 0.0, -1.25, 0.61, 0.48,   // heave
                1.0, 1.1, 0.7, -0.3, 0.25, 0.2, 2.4, -0.9, 0.05, 0.5,        // surge
                -2.0, -1.5, 0.75, 0.3, 0.3, 1.25, -0.6, 0.1, 0.9, -0.2,      // sway
                12.0, 12.5, 13.25, 14.0, 14.6, 15.1, 15.0, 14.2, 13.3, 12.8}; // depth
    w.label = Label::positive;
    return w;
}

Window random_window(Rng& rng, std::size_t per) {
    Window w;
    for (std::size_t c = 0; c < 4; ++c) {
        const double offset = rng.uniform(-30, 30), scale = rng.uniform(0.01, 5);
        for (std::size_t i = 0; i < per; ++i) w.values.push_back(offset + scale * rng.normal());
    }
    return w;
}

} // namespace

TEST_CASE("extract: fixed 10-sample fixture matches the brute-force oracle") {
    const auto w = fixture();
    const auto f = extract(w);
    const auto want = oracle::features(w.values);
    REQUIRE(f.values.size() == kFeatureCount);
    CHECK(f.label == Label::positive);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        INFO("feature " << i);
        CHECK(oracle::rel_err(f.values[i], want[i]) < 1e-12);
    }
}

TEST_CASE("extract: output length is always 30") {
    Rng rng(5);
    for (std::size_t per : {2u, 3u, 10u, 25u, 100u}) CHECK(extract(random_window(rng, per)).values.size() == 30);
}

TEST_CASE("extract: constant channel convention") {
    Window w = fixture();
    std::fill(w.values.begin() + 10, w.values.begin() + 20, 5.0); // surge constant
    const auto f = extract(w).values;
    CHECK(f[6] == 5.0);
    CHECK(f[7] == 0.0);
    CHECK(f[8] == 5.0);
    CHECK(f[9] == 5.0);
    CHECK(f[10] == 0.0);
    CHECK(f[11] == 0.0);
    // correlations involving surge: heave-surge, surge-sway, surge-depth
    CHECK(f[24] == 0.0);
    CHECK(f[27] == 0.0);
    CHECK(f[28] == 0.0);
    for (double v : f) CHECK(std::isfinite(v));
}

TEST_CASE("extract: length errors") {
    CHECK_THROWS_AS(extract(Window{{1, 2, 3}, Label::positive}), ArgumentError);
    CHECK_THROWS_AS(extract(Window{{1, 2, 3, 4}, Label::positive}), ArgumentError);
}

TEST_CASE("features: shift invariance") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        Window w = random_window(rng, 25);
        const std::size_t c = static_cast<std::size_t>(rng.below(4));
        const double shift = rng.uniform(-10, 10);
        Window s = w;
        for (std::size_t i = 0; i < 25; ++i) s.values[c * 25 + i] += shift;
        const auto a = extract(w).values, b = extract(s).values;
        for (std::size_t k = 0; k < 4; ++k) {
            const double d = k == c ? shift : 0.0;
            CHECK(b[6 * k + 0] == doctest::Approx(a[6 * k + 0] + d).epsilon(1e-9));
            CHECK(b[6 * k + 2] == doctest::Approx(a[6 * k + 2] + d).epsilon(1e-9));
            CHECK(b[6 * k + 3] == doctest::Approx(a[6 * k + 3] + d).epsilon(1e-9));
            CHECK(std::abs(b[6 * k + 1] - a[6 * k + 1]) < 1e-9);
            CHECK(std::abs(b[6 * k + 4] - a[6 * k + 4]) < 1e-9);
            CHECK(std::abs(b[6 * k + 5] - a[6 * k + 5]) < 1e-9);
        }
        for (std::size_t k = 24; k < 30; ++k) CHECK(std::abs(b[k] - a[k]) < 1e-9);
    }
}

TEST_CASE("features: positive scale invariance of shape statistics") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        Window w = random_window(rng, 25);
        const std::size_t c = static_cast<std::size_t>(rng.below(4));
        const double a = rng.uniform(0.1, 20);
        Window s = w;
        for (std::size_t i = 0; i < 25; ++i) s.values[c * 25 + i] *= a;
        const auto x = extract(w).values, y = extract(s).values;
        CHECK(std::abs(y[6 * c + 4] - x[6 * c + 4]) < 1e-9);
        CHECK(std::abs(y[6 * c + 5] - x[6 * c + 5]) < 1e-9);
        for (std::size_t k = 24; k < 30; ++k) CHECK(std::abs(y[k] - x[k]) < 1e-9);
    }
}

TEST_CASE("pearson: self-correlation is 1 and values stay in [-1, 1]") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(12), y(12);
        for (auto& v : x) v = rng.normal();
        for (auto& v : y) v = rng.normal();
        CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));
        const double r = pearson(x, y);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("Standardizer: zero mean, unit std on the fitted rows") {
    Rng rng(8);
    std::vector<LabeledVector> rows;
    for (int i = 0; i < 40; ++i) rows.push_back({{rng.normal() * 3 + 7, rng.uniform(), 4.0}, Label::positive});
    const auto s = Standardizer::fit(rows);
    CHECK(s.scale[2] == 1.0);
    const auto z = s.apply(std::span<const LabeledVector>(rows));
    for (std::size_t d = 0; d < 2; ++d) {
        double m = 0, v = 0;
        for (const auto& r : z) m += r.values[d];
        m /= 40;
        for (const auto& r : z) v += (r.values[d] - m) * (r.values[d] - m);
        CHECK(std::abs(m) < 1e-12);
        CHECK(v / 40 == doctest::Approx(1.0).epsilon(1e-12));
    }
}
