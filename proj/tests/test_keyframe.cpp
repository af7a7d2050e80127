#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "vqvsc/keyframe.hpp"

using namespace vqvsc;

namespace {

Frame random_frame(int w, int h, std::uint64_t seed) {
    Frame f(w, h);
    GaussianRng rng(seed);
    for (auto& b : f.data) b = static_cast<std::uint8_t>(rng.next() & 0xFF);
    return f;
}

ImportanceScores scores_of(std::vector<double> beta) {
    ImportanceScores s;
    s.beta = std::move(beta);
    return s;
}

}  // namespace

TEST_CASE("identical frames score zero in the interior") {
    VideoSequence seq;
    Frame f = random_frame(16, 16, 1);
    for (int i = 0; i < 5; ++i) seq.frames.push_back(f);
    auto beta = importance_scores(seq, {InterpVariant::linear_blend}, ImportanceMetric::one_minus_ssim);
    REQUIRE(beta.size() == 5);
    CHECK(beta.beta.front() == MAX_SCORE);
    CHECK(beta.beta.back() == MAX_SCORE);
    for (std::size_t i = 1; i + 1 < 5; ++i) CHECK(beta.beta[i] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("two frames give only sentinels") {
    VideoSequence seq;
    seq.frames.push_back(random_frame(16, 16, 2));
    seq.frames.push_back(random_frame(16, 16, 3));
    auto beta = importance_scores(seq, {InterpVariant::linear_blend}, ImportanceMetric::mse);
    REQUIRE(beta.size() == 2);
    CHECK(beta.beta[0] == MAX_SCORE);
    CHECK(beta.beta[1] == MAX_SCORE);
}

TEST_CASE("a frame equal to its neighbors' blend scores near zero") {
    Frame a = random_frame(16, 16, 4);
    Frame c = random_frame(16, 16, 5);
    Frame b = reconstruct_midframe(a, c, {InterpVariant::linear_blend});
    VideoSequence seq;
    seq.frames = {a, b, c};
    auto beta = importance_scores(seq, {InterpVariant::linear_blend}, ImportanceMetric::one_minus_ssim);
    CHECK(beta.beta[1] < 1e-6);
}

TEST_CASE("rate model recovers a noise-free line in ln gamma") {
    std::vector<std::pair<double, double>> samples;
    for (double g : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
        samples.emplace_back(g, 0.2 + 0.1 * std::log(g));
    auto m = fit_rate_model(samples, 1, RegKind::none, 0.0);
    REQUIRE(m.a.size() == 2);
    CHECK(m.a[0] == Catch::Approx(0.2).margin(1e-6));
    CHECK(m.a[1] == Catch::Approx(0.1).margin(1e-6));
}

TEST_CASE("single sample constant fit") {
    auto m = fit_rate_model({{3.0, 0.42}}, 0, RegKind::none, 0.0);
    REQUIRE(m.a.size() == 1);
    CHECK(m.a[0] == Catch::Approx(0.42).margin(1e-12));
}

TEST_CASE("huge L2 weight shrinks coefficients to zero") {
    std::vector<std::pair<double, double>> samples;
    for (double g : {1.0, 2.0, 4.0, 8.0}) samples.emplace_back(g, 0.5 + 0.05 * std::log(g));
    auto m = fit_rate_model(samples, 1, RegKind::L2, 1e9);
    for (double c : m.a) CHECK(std::abs(c) < 1e-3);
}

TEST_CASE("L1 fit matches least squares when upsilon is tiny") {
    std::vector<std::pair<double, double>> samples;
    for (double g : {1.0, 2.0, 4.0, 8.0, 16.0}) samples.emplace_back(g, 0.3 + 0.07 * std::log(g));
    auto m = fit_rate_model(samples, 1, RegKind::L1, 1e-12);
    CHECK(m.a[0] == Catch::Approx(0.3).margin(1e-5));
    CHECK(m.a[1] == Catch::Approx(0.07).margin(1e-5));
}

TEST_CASE("L1 with a large weight zeroes small coefficients") {
    std::vector<std::pair<double, double>> samples;
    for (double g : {1.0, 2.0, 4.0, 8.0, 16.0}) samples.emplace_back(g, 0.3 + 0.001 * std::log(g));
    auto m = fit_rate_model(samples, 1, RegKind::L1, 100.0);
    CHECK(m.a[1] == 0.0);
}

TEST_CASE("fit rejects bad inputs") {
    REQUIRE_THROWS_AS(fit_rate_model({{1.0, 0.5}}, 1, RegKind::none, 0.0), TooFewSamples);
    REQUIRE_THROWS_AS(fit_rate_model({{-1.0, 0.5}}, 0, RegKind::none, 0.0), NonPositiveSnr);
    // Duplicate gamma makes a degree-1 design matrix rank deficient.
    REQUIRE_THROWS_AS(fit_rate_model({{2.0, 0.5}, {2.0, 0.6}}, 1, RegKind::none, 0.0),
                      SingularSystem);
}

TEST_CASE("predict_rho evaluates and clamps") {
    RateModel m;
    m.a = {0.2, 0.1};
    m.degree = 1;
    CHECK(predict_rho(m, std::exp(2.0), 100) == Catch::Approx(0.4).margin(1e-12));
    m.a = {1.7};
    CHECK(predict_rho(m, 1.0, 10) == 1.0);
    m.a = {0.01};
    CHECK(predict_rho(m, 1.0, 10) == Catch::Approx(0.2).margin(1e-15));
    REQUIRE_THROWS_AS(predict_rho(m, 0.0, 10), NonPositiveSnr);
}

TEST_CASE("select_keyframes picks the documented top-3 mask") {
    auto beta = scores_of({MAX_SCORE, 0.1, 0.4, 0.2, 0.3, MAX_SCORE});
    auto v = select_keyframes(beta, 0.5);
    CHECK(v.v == std::vector<std::uint8_t>{1, 0, 1, 0, 0, 1});
}

TEST_CASE("rho 1 selects everything, rho 0 only the endpoints") {
    auto beta = scores_of({MAX_SCORE, 0.1, 0.2, 0.3, MAX_SCORE});
    auto all = select_keyframes(beta, 1.0);
    CHECK(all.popcount() == 5);
    auto ends = select_keyframes(beta, 0.0);
    CHECK(ends.v == std::vector<std::uint8_t>{1, 0, 0, 0, 1});
}

TEST_CASE("popcount follows clamp(round(rho N), 2, N) across a rho sweep") {
    GaussianRng rng(6);
    for (std::size_t n : {4u, 7u, 16u}) {
        std::vector<double> b(n);
        for (auto& x : b) x = rng.uniform();
        b.front() = b.back() = MAX_SCORE;
        for (int r = 0; r <= 10; ++r) {
            double rho = r / 10.0;
            auto v = select_keyframes(scores_of(b), rho);
            auto want = static_cast<std::size_t>(
                std::clamp(round_half_up(rho * static_cast<double>(n)), 2.0,
                           static_cast<double>(n)));
            CHECK(v.popcount() == want);
            CHECK(v.v.front() == 1);
            CHECK(v.v.back() == 1);
        }
    }
}

TEST_CASE("scaling interior scores leaves the mask unchanged") {
    auto beta = scores_of({MAX_SCORE, 0.1, 0.4, 0.2, 0.3, MAX_SCORE});
    auto scaled = beta;
    for (std::size_t i = 1; i + 1 < scaled.size(); ++i) scaled.beta[i] *= 7.5;
    CHECK(select_keyframes(beta, 0.5).v == select_keyframes(scaled, 0.5).v);
}

TEST_CASE("gaps_from_mask cases") {
    KeyFrameMask v;
    v.v = {1, 0, 1, 0, 0, 1};
    CHECK(gaps_from_mask(v).g == std::vector<int>{1, 2});
    v.v = {1, 1, 1, 1};
    CHECK(gaps_from_mask(v).g == std::vector<int>{0, 0, 0});
    v.v = {1, 0, 0, 0, 0, 0, 1};
    CHECK(gaps_from_mask(v).g == std::vector<int>{5});
}

TEST_CASE("gap sum equals N minus M for random masks") {
    GaussianRng rng(7);
    for (int t = 0; t < 20; ++t) {
        std::size_t n = 4 + rng.below(12);
        KeyFrameMask v;
        v.v.assign(n, 0);
        v.v.front() = v.v.back() = 1;
        for (std::size_t i = 1; i + 1 < n; ++i) v.v[i] = rng.below(2) ? 1 : 0;
        long sum = 0;
        for (int g : gaps_from_mask(v).g) sum += g;
        CHECK(static_cast<std::size_t>(sum) == n - v.popcount());
    }
}

TEST_CASE("seam basic cases") {
    Frame A = random_frame(8, 8, 8), B = random_frame(8, 8, 9), X = random_frame(8, 8, 10);
    KeyFrameMask v;
    v.v = {1, 0, 1};
    auto out = seam({A, B}, {X}, v);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == A);
    CHECK(out[1] == X);
    CHECK(out[2] == B);

    v.v = {1, 1};
    auto keys_only = seam({A, B}, {}, v);
    CHECK(keys_only[0] == A);
    CHECK(keys_only[1] == B);

    REQUIRE_THROWS_AS(seam({A}, {X}, v), CountMismatch);
}

TEST_CASE("seam of extract plus fills preserves key positions") {
    GaussianRng rng(11);
    for (int t = 0; t < 10; ++t) {
        std::size_t n = 5 + rng.below(8);
        VideoSequence seq;
        for (std::size_t i = 0; i < n; ++i)
            seq.frames.push_back(random_frame(8, 8, 1000 + t * 100 + i));
        KeyFrameMask v;
        v.v.assign(n, 0);
        v.v.front() = v.v.back() = 1;
        for (std::size_t i = 1; i + 1 < n; ++i) v.v[i] = rng.below(2) ? 1 : 0;
        auto keys = extract_keyframes(seq, v);
        std::vector<Frame> fills(n - keys.size(), Frame(8, 8, 0));
        auto out = seam(keys, fills, v);
        REQUIRE(out.size() == n);
        for (std::size_t i = 0; i < n; ++i)
            if (v.v[i]) CHECK(out[i] == seq[i]);
    }
}

TEST_CASE("retransmission counts are all 1 when rho matches the reference") {
    RateModel m;
    m.a = {0.5};
    auto beta = scores_of({MAX_SCORE, 0.3, 0.1, MAX_SCORE});
    KeyFrameMask v;
    v.v = {1, 1, 0, 1};
    auto counts = schedule_retransmissions(beta, v, 1.0, 0.5, m);
    CHECK(counts == std::vector<int>{1, 1, 1});
}

TEST_CASE("half-rate rho doubles both key frames") {
    // N = 8 so the 2/N floor in predict_rho stays below the requested 0.25.
    RateModel m;
    m.a = {0.25};
    auto beta = scores_of({MAX_SCORE, 0, 0, 0, 0, 0, 0, MAX_SCORE});
    KeyFrameMask v;
    v.v = {1, 0, 0, 0, 0, 0, 0, 1};
    auto counts = schedule_retransmissions(beta, v, 1.0, 0.5, m);
    CHECK(counts == std::vector<int>{2, 2});
}

TEST_CASE("extras go round-robin to the highest-beta key frames first") {
    // rho = 0.3, rho_ref = 0.8: R_total = 2, slots = floor(0.8/0.3*3) = 8... but
    // capped at 2 each, so only 3 extras land and one slot goes unused.
    RateModel m;
    m.a = {0.3};
    auto beta = scores_of({MAX_SCORE, 0.7, 0.2, 0.5, MAX_SCORE});
    KeyFrameMask v;
    v.v = {1, 1, 0, 1, 1};
    auto counts = schedule_retransmissions(beta, v, 1.0, 0.8, m);
    REQUIRE(counts.size() == 4);
    int r_total = static_cast<int>(std::floor(0.8 / 0.3));
    for (int c : counts) {
        CHECK(c >= 1);
        CHECK(c <= r_total);
    }
    long total = 0;
    for (int c : counts) total += c;
    CHECK(total <= static_cast<long>(std::floor(0.8 / 0.3 * 4.0)));
}

TEST_CASE("budget underflow keeps all counts at 1") {
    RateModel m;
    m.a = {0.9};
    auto beta = scores_of({MAX_SCORE, MAX_SCORE});
    KeyFrameMask v;
    v.v = {1, 1};
    auto counts = schedule_retransmissions(beta, v, 1.0, 0.5, m);
    CHECK(counts == std::vector<int>{1, 1});
}

TEST_CASE("rate model persistence round trip") {
    RateModel m;
    m.degree = 2;
    m.reg = RegKind::L2;
    m.upsilon = 0.125;
    m.a = {0.2, 0.1, -0.003};
    std::stringstream s;
    save_rate_model(m, s);
    auto back = load_rate_model(s);
    CHECK(back.degree == 2);
    CHECK(back.reg == RegKind::L2);
    CHECK(back.upsilon == 0.125);
    REQUIRE(back.a.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.a[i] == m.a[i]);
}

TEST_CASE("rate model load rejects garbage") {
    std::istringstream bad("x y z");
    REQUIRE_THROWS_AS(load_rate_model(bad), BadConfig);
    std::istringstream trunc("1 none 0\n0.5\n");
    REQUIRE_THROWS_AS(load_rate_model(trunc), BadConfig);
}
