#pragma once

#include <cstdint>
#include <vector>

#include "vqvsc/common.hpp"

namespace vqvsc {

/// 8-bit RGB frame, plane-major (all R, all G, all B), row-major per plane.
struct Frame {
    int width = 0;
    int height = 0;
    static constexpr int channels = 3;
    std::vector<std::uint8_t> data;

    Frame() = default;
    Frame(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * channels, fill) {}

    std::size_t plane_size() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t at(int plane, int y, int x) const {
        return data[plane * plane_size() + static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int plane, int y, int x) {
        return data[plane * plane_size() + static_cast<std::size_t>(y) * width + x];
    }

    bool same_dims(const Frame& o) const { return width == o.width && height == o.height; }

    bool operator==(const Frame& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

struct VideoSequence {
    std::vector<Frame> frames;

    std::size_t size() const { return frames.size(); }
    bool empty() const { return frames.empty(); }
    const Frame& operator[](std::size_t i) const { return frames[i]; }
    Frame& operator[](std::size_t i) { return frames[i]; }

    bool operator==(const VideoSequence& o) const { return frames == o.frames; }
};

inline void require_same_dims(const Frame& a, const Frame& b) {
    if (!a.same_dims(b))
        throw DimensionMismatch("frame dimensions differ: " + std::to_string(a.width) + "x" +
                                std::to_string(a.height) + " vs " + std::to_string(b.width) +
                                "x" + std::to_string(b.height));
}

}  // namespace vqvsc
