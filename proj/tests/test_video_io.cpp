#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "vqvsc/common.hpp"
#include "vqvsc/video_io.hpp"

using namespace vqvsc;

namespace {

std::string random_bytes(std::size_t n, std::uint64_t seed) {
    GaussianRng rng(seed);
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(rng.next() & 0xFF);
    return s;
}

}  // namespace

TEST_CASE("single frame is rejected") {
    std::istringstream in(random_bytes(2 * 2 * 3, 1));
    REQUIRE_THROWS_AS(read_raw_video(in, 2, 2), InsufficientFrames);
}

TEST_CASE("empty stream is rejected") {
    std::istringstream in("");
    REQUIRE_THROWS_AS(read_raw_video(in, 2, 2), EmptySequence);
}

TEST_CASE("truncated stream is rejected") {
    std::istringstream in(random_bytes(25, 2));
    REQUIRE_THROWS_AS(read_raw_video(in, 2, 2), TruncatedStream);
}

TEST_CASE("plane-major layout: byte 0 is R of pixel (0,0)") {
    std::string bytes = random_bytes(24, 3);
    std::istringstream in(bytes);
    auto seq = read_raw_video(in, 2, 2);
    REQUIRE(seq.size() == 2);
    CHECK(seq[0].at(0, 0, 0) == static_cast<std::uint8_t>(bytes[0]));
    CHECK(seq[0].at(1, 0, 0) == static_cast<std::uint8_t>(bytes[4]));
    CHECK(seq[1].at(0, 0, 0) == static_cast<std::uint8_t>(bytes[12]));
}

TEST_CASE("write size formula") {
    std::istringstream in(random_bytes(24, 4));
    auto seq = read_raw_video(in, 2, 2);
    std::ostringstream out;
    CHECK(write_raw_video(seq, out) == 24);
}

TEST_CASE("write rejects empty sequence") {
    VideoSequence seq;
    std::ostringstream out;
    REQUIRE_THROWS_AS(write_raw_video(seq, out), EmptySequence);
}

TEST_CASE("read/write round trips on random data") {
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        std::string bytes = random_bytes(3 * 4 * 4 * 3, seed);
        std::istringstream in(bytes);
        auto seq = read_raw_video(in, 4, 4);
        std::ostringstream out;
        write_raw_video(seq, out);
        CHECK(out.str() == bytes);

        std::istringstream in2(out.str());
        auto seq2 = read_raw_video(in2, 4, 4);
        CHECK(seq2 == seq);
    }
}
