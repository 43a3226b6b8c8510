#include "preyclass/error.hpp"
#include "preyclass/windowing.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

using namespace preyclass;

namespace {

TimeSeries ramp(std::size_t n, double rate = 25.0) {
    std::vector<SensorSample> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<double>(i);
        s[i] = {v / rate, v, 100 + v, 200 + v, 300 + v, i % 3 == 0 ? Label::positive : Label::negative};
    }
    return TimeSeries(rate, std::move(s));
}

// Brute-force enumeration of complete window starts.
std::size_t count_by_enumeration(std::size_t n, std::size_t w, std::size_t hop) {
    std::size_t c = 0;
    for (std::size_t start = 0; start + w <= n; start += hop) ++c;
    return c;
}

} // namespace

TEST_CASE("window sizes for the two reference configurations") {
    WindowConfig one{1.0, 0.5, 25.0};
    CHECK(one.window_samples() == 25);
    CHECK(one.overlap_samples() == 12);
    CHECK(one.hop_samples() == 13);
    WindowConfig short_cfg{0.4, 0.2, 25.0};
    CHECK(short_cfg.window_samples() == 10);
    CHECK(short_cfg.overlap_samples() == 5);
    CHECK(short_cfg.hop_samples() == 5);
}

TEST_CASE("segment: 1 s windows at 25 Hz carry 100 values, 0.4 s carry 40") {
    const auto ts = ramp(200);
    for (const auto& w : segment(ts, {1.0, 0.5, 25.0})) CHECK(w.values.size() == 100);
    for (const auto& w : segment(ts, {0.4, 0.2, 25.0})) CHECK(w.values.size() == 40);
}

TEST_CASE("segment: too-short input gives no windows") {
    CHECK(segment(ramp(20), {1.0, 0.5, 25.0}).empty());
}

TEST_CASE("window count formula agrees with enumeration") {
    CHECK(window_count(100, 25, 13) == 6);
    CHECK(window_count(100, 10, 5) == 19);
    for (std::size_t n = 0; n < 120; ++n)
        for (std::size_t w = 1; w < 30; w += 3)
            for (std::size_t hop = 1; hop <= w; hop += 2) CHECK(window_count(n, w, hop) == count_by_enumeration(n, w, hop));
    // Through segment() as well.
    CHECK(segment(ramp(100), {1.0, 0.5, 25.0}).size() == 6);
    CHECK(segment(ramp(100), {0.4, 0.2, 25.0}).size() == 19);
}

TEST_CASE("segment: channel-major layout and shared overlap") {
    const auto ts = ramp(100);
    const auto wins = segment(ts, {1.0, 0.5, 25.0});
    REQUIRE(wins.size() == 6);
    // Window 1 starts at sample 13.
    CHECK(wins[1].values[0] == 13);
    CHECK(wins[1].values[25] == 113);
    CHECK(wins[1].values[50] == 213);
    CHECK(wins[1].values[75] == 313);
    // Consecutive windows share exactly 12 samples per channel.
    for (std::size_t k = 1; k < wins.size(); ++k)
        for (std::size_t c = 0; c < 4; ++c)
            for (std::size_t i = 0; i < 12; ++i)
                CHECK(wins[k].values[c * 25 + i] == wins[k - 1].values[c * 25 + 13 + i]);
}

TEST_CASE("segment: rate mismatch is a configuration error") {
    CHECK_THROWS_AS(segment(ramp(100, 50.0), {1.0, 0.5, 25.0}), ConfigError);
    CHECK_THROWS_AS(segment(ramp(100), {1.0, 1.0, 25.0}), ConfigError);
}

TEST_CASE("label_window: majority with ties to positive") {
    std::vector<Label> all_pos(25, Label::positive), all_neg(25, Label::negative);
    CHECK(label_window(all_pos) == Label::positive);
    CHECK(label_window(all_neg) == Label::negative);
    std::vector<Label> mixed(25, Label::negative);
    std::fill_n(mixed.begin(), 13, Label::positive);
    CHECK(label_window(mixed) == Label::positive);
    std::fill_n(mixed.begin(), 25, Label::negative);
    std::fill_n(mixed.begin(), 12, Label::positive);
    CHECK(label_window(mixed) == Label::negative);
    std::vector<Label> tie{Label::positive, Label::negative};
    CHECK(label_window(tie) == Label::positive);
    CHECK_THROWS_AS(label_window(std::vector<Label>{}), ArgumentError);
}

namespace {

std::vector<Window> make_windows(std::size_t neg, std::size_t pos) {
    std::vector<Window> w;
    for (std::size_t i = 0; i < neg; ++i) w.push_back({{static_cast<double>(i)}, Label::negative});
    for (std::size_t i = 0; i < pos; ++i) w.push_back({{1000.0 + static_cast<double>(i)}, Label::positive});
    return w;
}

std::map<double, int> multiset(const std::vector<Window>& w) {
    std::map<double, int> m;
    for (const auto& x : w) m[x.values[0]]++;
    return m;
}

} // namespace

TEST_CASE("balance: undersamples to the minority count") {
    const auto in = make_windows(10, 4);
    const auto out = balance(in, 3);
    CHECK(out.size() == 8);
    CHECK(std::count_if(out.begin(), out.end(), [](auto& w) { return w.label == Label::positive; }) == 4);
    // Sub-multiset of the input.
    const auto mi = multiset(in);
    for (auto [k, c] : multiset(out)) CHECK(c <= mi.at(k));
}

TEST_CASE("balance: already balanced input keeps the same multiset") {
    const auto in = make_windows(6, 6);
    CHECK(multiset(balance(in, 9)) == multiset(in));
}

TEST_CASE("balance: deterministic per seed, single class rejected") {
    const auto in = make_windows(50, 20);
    CHECK(balance(in, 77) == balance(in, 77));
    CHECK_FALSE(balance(in, 77) == balance(in, 78));
    CHECK_THROWS_AS(balance(make_windows(5, 0), 1), BalanceError);
}

TEST_CASE("balance property: equal classes, sub-multiset, for random inputs") {
    for (std::size_t seed = 0; seed < 30; ++seed) {
        const auto in = make_windows(1 + seed * 3 % 17, 1 + seed * 5 % 13);
        const auto out = balance(in, seed);
        const auto pos = std::count_if(out.begin(), out.end(), [](auto& w) { return w.label == Label::positive; });
        CHECK(static_cast<std::size_t>(pos) * 2 == out.size());
        const auto mi = multiset(in);
        for (auto [k, c] : multiset(out)) CHECK(c <= mi.at(k));
    }
}

TEST_CASE("vector CSV round trip and parse errors") {
    std::vector<LabeledVector> rows{{{0.1, -2.5, 1e-300}, Label::positive}, {{3, 4, 5}, Label::negative}};
    std::ostringstream out;
    write_vectors_csv(rows, "v", out);
    CHECK(out.str().substr(0, 15) == "label,v1,v2,v3\n");
    std::istringstream in(out.str());
    const auto t = read_vectors_csv(in);
    CHECK(t.prefix == "v");
    CHECK(t.rows == rows);

    std::istringstream bad("label,f1,f2\n1,0.5\n");
    CHECK_THROWS_AS(read_vectors_csv(bad), ParseError);
    std::istringstream bad_label("label,f1\n2,0.5\n");
    CHECK_THROWS_AS(read_vectors_csv(bad_label), ParseError);
}
