#include <catch2/catch_amalgamated.hpp>

#include "vqvsc/bitstream.hpp"

using namespace vqvsc;

namespace {

// Smallest geometry: W=H=P=4 gives L_s = 1*1*3 = 3.
ContainerMeta tiny_meta(int bits = 2) {
    ContainerMeta m;
    m.width = 4;
    m.height = 4;
    m.patch = 4;
    m.bits = bits;
    m.codebook_id = 0x1122334455667788ull;
    return m;
}

KeyFrameMask mask(std::vector<std::uint8_t> v) {
    KeyFrameMask out;
    out.v = std::move(v);
    return out;
}

}  // namespace

TEST_CASE("hand-traced payload bytes") {
    // v=101, p=100, s = 11 01 10 01 -> 10110011 01100100.
    SelectedIndices sel;
    sel.s_eta = {3, 1, 2, 1};
    PositionBitmap p;
    p.p = {1, 0, 0};
    auto bs = pack(mask({1, 0, 1}), sel, p, tiny_meta());
    REQUIRE(bs.bytes.size() == ContainerHeader::byte_size + 2);
    CHECK(bs.bytes[ContainerHeader::byte_size] == 0xB3);
    CHECK(bs.bytes[ContainerHeader::byte_size + 1] == 0x64);
    CHECK(bs.payload_bits(sel.size()) == 3 + 3 + 4 * 2);

    auto back = unpack(bs.bytes);
    CHECK(back.v.v == std::vector<std::uint8_t>{1, 0, 1});
    CHECK(back.bitmap.p == p.p);
    CHECK(back.sel.s_eta == sel.s_eta);
    CHECK(back.header.codebook_id == 0x1122334455667788ull);
}

TEST_CASE("single key frame has an empty bitmap segment") {
    SelectedIndices sel;
    sel.s_eta = {0, 1, 2};
    auto bs = pack(mask({0, 1, 0}), sel, PositionBitmap{}, tiny_meta());
    auto back = unpack(bs.bytes);
    CHECK(back.header.m_keyframes == 1);
    CHECK(back.bitmap.p.empty());
    CHECK(back.sel.s_eta == sel.s_eta);
}

TEST_CASE("pack validates its inputs") {
    SelectedIndices sel;
    sel.s_eta = {0, 1, 2};
    REQUIRE_THROWS_AS(pack(mask({0, 0, 0}), sel, PositionBitmap{}, tiny_meta()), Inconsistent);

    PositionBitmap short_p;
    short_p.p = {1};
    REQUIRE_THROWS_AS(pack(mask({1, 0, 1}), sel, short_p, tiny_meta()), Inconsistent);

    PositionBitmap p;
    p.p = {0, 0, 0};
    SelectedIndices wrong_len;
    wrong_len.s_eta = {0, 1};
    REQUIRE_THROWS_AS(pack(mask({1, 0, 1}), wrong_len, p, tiny_meta()), Inconsistent);

    SelectedIndices too_big;
    too_big.s_eta = {0, 1, 4};  // 4 needs 3 bits
    REQUIRE_THROWS_AS(pack(mask({1, 0, 1}), too_big, p, tiny_meta(2)), Overflow);

    auto bad_bits = tiny_meta(0);
    REQUIRE_THROWS_AS(pack(mask({1, 0, 1}), sel, p, bad_bits), BadConfig);
}

TEST_CASE("unpack rejects corrupted streams") {
    SelectedIndices sel;
    sel.s_eta = {3, 1, 2};
    PositionBitmap p;
    p.p = {0, 0, 0};
    auto good = pack(mask({1, 1, 0}), sel, p, tiny_meta());

    auto bad_magic = good.bytes;
    bad_magic[0] = 'X';
    REQUIRE_THROWS_AS(unpack(bad_magic), BadMagic);

    auto bad_version = good.bytes;
    bad_version[4] = 9;
    REQUIRE_THROWS_AS(unpack(bad_version), BadVersion);

    auto flipped = good.bytes;
    flipped[ContainerHeader::byte_size] ^= 0x10;
    REQUIRE_THROWS_AS(unpack(flipped), CrcMismatch);

    std::vector<std::uint8_t> stub(good.bytes.begin(), good.bytes.begin() + 10);
    REQUIRE_THROWS_AS(unpack(stub), Truncated);
}

TEST_CASE("mask with M=2 over exactly two frames parses") {
    SelectedIndices sel;
    sel.s_eta = {1, 2, 3, 0, 0, 0};
    PositionBitmap p;
    p.p = {1, 1, 1};
    auto bs = pack(mask({1, 1}), sel, p, tiny_meta());
    auto back = unpack(bs.bytes);
    CHECK(back.header.n_frames == 2);
    CHECK(back.header.m_keyframes == 2);
    CHECK(back.sel.s_eta == sel.s_eta);
}

TEST_CASE("round trip on random valid containers") {
    GaussianRng rng(1);
    for (int t = 0; t < 50; ++t) {
        ContainerMeta meta;
        meta.patch = 4;
        meta.width = 4 * static_cast<int>(1 + rng.below(4));
        meta.height = 4 * static_cast<int>(1 + rng.below(4));
        meta.bits = 1 + static_cast<int>(rng.below(10));
        meta.codebook_id = rng.next();
        std::size_t ls = static_cast<std::size_t>(meta.width / 4) * (meta.height / 4) * 3;

        std::size_t n = 2 + rng.below(10);
        KeyFrameMask v;
        v.v.assign(n, 0);
        v.v.front() = v.v.back() = 1;
        for (std::size_t i = 1; i + 1 < n; ++i) v.v[i] = rng.below(2) ? 1 : 0;
        std::size_t m = v.popcount();

        PositionBitmap p;
        p.p.resize(ls * (m - 1));
        for (auto& b : p.p) b = rng.below(2) ? 1 : 0;
        SelectedIndices sel;
        sel.s_eta.resize(ls + p.popcount());
        for (auto& s : sel.s_eta)
            s = static_cast<std::uint32_t>(rng.below(1ull << meta.bits));

        auto bs = pack(v, sel, p, meta);
        CHECK(bs.payload_bits(sel.size()) == n + ls * (m - 1) + sel.size() * meta.bits);
        auto back = unpack(bs.bytes);
        CHECK(back.v.v == v.v);
        CHECK(back.bitmap.p == p.p);
        CHECK(back.sel.s_eta == sel.s_eta);
        CHECK(back.header.codebook_id == meta.codebook_id);
    }
}

TEST_CASE("payload byte count matches the padded bit count") {
    SelectedIndices sel;
    sel.s_eta = {3, 1, 2, 1};
    PositionBitmap p;
    p.p = {1, 0, 0};
    auto bs = pack(mask({1, 0, 1}), sel, p, tiny_meta());
    std::size_t bits = bs.payload_bits(sel.size());
    CHECK(bs.bytes.size() - ContainerHeader::byte_size == (bits + 7) / 8);
}
