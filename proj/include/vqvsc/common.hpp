#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace vqvsc {

// ---------------------------------------------------------------------------
// Error types. One exception class per failure category; the message carries
// the offending values.
// ---------------------------------------------------------------------------
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct BadConfig : Error { using Error::Error; };
struct TruncatedStream : Error { using Error::Error; };
struct InsufficientFrames : Error { using Error::Error; };
struct EmptySequence : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct TooSmall : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct NotPowerOfTwo : Error { using Error::Error; };
struct TooFewSamples : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };
struct NonPositiveSnr : Error { using Error::Error; };
struct CountMismatch : Error { using Error::Error; };
struct BadBlockSize : Error { using Error::Error; };
struct ZeroGap : Error { using Error::Error; };
struct BudgetUnderflow : Error { using Error::Error; };
struct Inconsistent : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };
struct BadMagic : Error { using Error::Error; };
struct BadVersion : Error { using Error::Error; };
struct CrcMismatch : Error { using Error::Error; };
struct Truncated : Error { using Error::Error; };
struct BadLength : Error { using Error::Error; };
struct NonPositiveNoise : Error { using Error::Error; };
struct ZeroReference : Error { using Error::Error; };
struct BadProfile : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Small numeric helpers shared across modules.
// ---------------------------------------------------------------------------

// Round half away from zero, clamp to [0,255].
inline std::uint8_t to_u8(double x) {
    double r = (x >= 0.0) ? std::floor(x + 0.5) : std::ceil(x - 0.5);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

inline double round_half_up(double x) { return std::floor(x + 0.5); }

// FNV-1a 64-bit.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

// CRC-32 (IEEE polynomial, reflected, init/xorout 0xFFFFFFFF).
inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    static const auto table = [] {
        std::vector<std::uint32_t> t(256);
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i)
        crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

inline std::uint32_t crc32(const std::vector<std::uint8_t>& v) {
    return crc32(v.data(), v.size());
}

// Deterministic Gaussian draws: xoshiro-free, fully specified mt19937_64
// uniforms fed through Box-Muller. Avoids std::normal_distribution, whose
// sequence is implementation defined.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    // Uniform in (0,1].
    double uniform() {
        return (static_cast<double>(next() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t next() {
        // splitmix64-seeded xorshift-star free: use the raw splitmix64 stream,
        // which is trivially portable and fully specified.
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace vqvsc
