#include <catch2/catch_amalgamated.hpp>

#include "vqvsc/index_select.hpp"

using namespace vqvsc;

namespace {

Codebook make_codebook(std::vector<std::vector<double>> rows) {
    Codebook cb;
    cb.size = static_cast<int>(rows.size());
    cb.dim = static_cast<int>(rows[0].size());
    for (auto& r : rows) cb.entries.insert(cb.entries.end(), r.begin(), r.end());
    cb.id = codebook_id(cb.entries, cb.size, cb.dim);
    return cb;
}

Codebook random_codebook(int l, int dim, std::uint64_t seed) {
    GaussianRng rng(seed);
    Codebook cb;
    cb.size = l;
    cb.dim = dim;
    cb.entries.resize(static_cast<std::size_t>(l) * dim);
    for (auto& v : cb.entries) v = rng.gaussian();
    cb.id = codebook_id(cb.entries, cb.size, cb.dim);
    return cb;
}

IndexSequence seq(std::vector<std::uint32_t> s) {
    IndexSequence out;
    out.s = std::move(s);
    return out;
}

}  // namespace

TEST_CASE("embed_rows looks up codebook rows in order") {
    auto cb = make_codebook({{1, 2}, {3, 4}});
    auto rows = embed_rows(seq({0, 0}), cb);
    CHECK(rows == std::vector<double>{1, 2, 1, 2});
    CHECK(embed_rows(seq({1, 0, 1}), cb).size() == 6);
    REQUIRE_THROWS_AS(embed_rows(seq({2}), cb), IndexOutOfRange);
}

TEST_CASE("single frame passes through untouched") {
    auto cb = random_codebook(8, 3, 1);
    auto [sel, p] = select_indices({seq({3, 1, 4, 1})}, cb, 1.0);
    CHECK(sel.s_eta == std::vector<std::uint32_t>{3, 1, 4, 1});
    CHECK(p.p.empty());
}

TEST_CASE("eta above 1 transmits every position") {
    auto cb = random_codebook(8, 3, 2);
    std::vector<IndexSequence> all = {seq({0, 1}), seq({2, 3}), seq({4, 5})};
    auto [sel, p] = select_indices(all, cb, 1.5);
    CHECK(sel.size() == 6);
    CHECK(p.p == std::vector<std::uint8_t>{1, 1, 1, 1});
    CHECK(sel.size() == 2 + p.popcount());
}

TEST_CASE("colinear rows are dropped at eta = 1") {
    auto cb = make_codebook({{1, 0}, {2, 0}, {0, 1}});
    auto [sel, p] = select_indices({seq({0}), seq({1})}, cb, 1.0);
    CHECK(p.p == std::vector<std::uint8_t>{0});
    CHECK(sel.s_eta == std::vector<std::uint32_t>{0});
    auto restored = restore_indices(sel, p, 2, 1);
    CHECK(restored[1].s == std::vector<std::uint32_t>{0});  // lossy substitution
}

TEST_CASE("identical indices never retransmit regardless of eta") {
    auto cb = random_codebook(4, 2, 3);
    auto [sel, p] = select_indices({seq({2, 2}), seq({2, 2})}, cb, 1.0);
    CHECK(p.p == std::vector<std::uint8_t>{0, 0});
    CHECK(sel.size() == 2);
}

TEST_CASE("documented restore trace") {
    SelectedIndices sel;
    sel.s_eta = {5, 7, 2, 9, 3};
    PositionBitmap p;
    p.p = {0, 1, 0, 0};
    auto out = restore_indices(sel, p, 2, 4);
    REQUIRE(out.size() == 2);
    CHECK(out[0].s == std::vector<std::uint32_t>{5, 7, 2, 9});
    CHECK(out[1].s == std::vector<std::uint32_t>{5, 3, 2, 9});
}

TEST_CASE("all-ones bitmap yields consecutive chunks, all-zeros repeats frame 1") {
    SelectedIndices sel;
    sel.s_eta = {1, 2, 3, 4, 5, 6};
    PositionBitmap ones;
    ones.p = {1, 1, 1, 1};
    auto chunked = restore_indices(sel, ones, 3, 2);
    CHECK(chunked[0].s == std::vector<std::uint32_t>{1, 2});
    CHECK(chunked[1].s == std::vector<std::uint32_t>{3, 4});
    CHECK(chunked[2].s == std::vector<std::uint32_t>{5, 6});

    SelectedIndices first_only;
    first_only.s_eta = {9, 8};
    PositionBitmap zeros;
    zeros.p = {0, 0, 0, 0};
    auto held = restore_indices(first_only, zeros, 3, 2);
    for (const auto& s : held) CHECK(s.s == std::vector<std::uint32_t>{9, 8});
}

TEST_CASE("restore validates lengths") {
    SelectedIndices sel;
    sel.s_eta = {1, 2, 3};
    PositionBitmap p;
    p.p = {1, 1};
    REQUIRE_THROWS_AS(restore_indices(sel, p, 2, 2), LengthMismatch);  // needs 4 entries
    REQUIRE_THROWS_AS(restore_indices(sel, p, 0, 2), EmptyInput);
}

TEST_CASE("restore inverts select when nothing is dropped") {
    GaussianRng rng(4);
    for (int t = 0; t < 100; ++t) {
        auto cb = random_codebook(16, 4, 100 + t);
        std::size_t ls = 3 + rng.below(10);
        std::size_t m = 1 + rng.below(5);
        std::vector<IndexSequence> all(m);
        for (auto& s : all) {
            s.s.resize(ls);
            for (auto& v : s.s) v = static_cast<std::uint32_t>(rng.below(16));
        }
        auto [sel, p] = select_indices(all, cb, 1.5);
        CHECK(sel.size() == ls + p.popcount());
        auto back = restore_indices(sel, p, m, ls);
        REQUIRE(back.size() == m);
        for (std::size_t i = 0; i < m; ++i) CHECK(back[i].s == all[i].s);
    }
}

TEST_CASE("restore differs from the input only at dropped positions") {
    // Reference simulation of the chain rule, independent of select's internals.
    GaussianRng rng(5);
    for (int t = 0; t < 30; ++t) {
        auto cb = random_codebook(8, 3, 200 + t);
        std::size_t ls = 6;
        std::size_t m = 4;
        std::vector<IndexSequence> all(m);
        for (auto& s : all) {
            s.s.resize(ls);
            for (auto& v : s.s) v = static_cast<std::uint32_t>(rng.below(8));
        }
        double eta = 0.5;
        auto [sel, p] = select_indices(all, cb, eta);
        auto back = restore_indices(sel, p, m, ls);

        std::vector<std::uint32_t> ref = all[0].s;
        for (std::size_t k = 1; k < m; ++k)
            for (std::size_t i = 0; i < ls; ++i) {
                std::uint32_t cur = all[k].s[i];
                double sim = (cur == ref[i]) ? 1.0
                                             : detail::cosine(cb.row(ref[i]), cb.row(cur), 3);
                if (sim < eta) ref[i] = cur;
                CHECK(back[k].s[i] == ref[i]);
            }
    }
}

TEST_CASE("mismatched sequence lengths and empty input are rejected") {
    auto cb = random_codebook(4, 2, 6);
    REQUIRE_THROWS_AS(select_indices({}, cb, 1.0), EmptyInput);
    REQUIRE_THROWS_AS(select_indices({seq({1, 2}), seq({1})}, cb, 1.0), LengthMismatch);
}

TEST_CASE("bcr matches the hand-computed case") {
    CHECK(compute_bcr(10, 3, 384, 128, 8, 64, 64) ==
          Catch::Approx(3338.0 / 983040.0).margin(1e-12));
}

TEST_CASE("bcr with one key frame has no bitmap term") {
    CHECK(compute_bcr(4, 1, 10, 10, 2, 8, 8) ==
          Catch::Approx((4.0 + 20.0) / (3.0 * 8 * 8 * 8 * 4)).margin(1e-15));
    REQUIRE_THROWS_AS(compute_bcr(0, 1, 10, 10, 2, 8, 8), ZeroDenominator);
}

TEST_CASE("zero-vector cosine convention") {
    double z[2] = {0, 0};
    double a[2] = {1, 0};
    CHECK(detail::cosine(z, z, 2) == 1.0);
    CHECK(detail::cosine(z, a, 2) == 0.0);
    CHECK(detail::cosine(a, z, 2) == 0.0);
    CHECK(detail::cosine(a, a, 2) == Catch::Approx(1.0).margin(1e-12));
}
