#pragma once

#include <istream>
#include <ostream>

#include "vqvsc/frame.hpp"

namespace vqvsc {

/// Parse a raw plane-major RGB stream into frames. The stream must hold a
/// whole number of frames and at least two of them (the scheduler pins the
/// first and last frame).
inline VideoSequence read_raw_video(std::istream& in, int width, int height) {
    if (width <= 0 || height <= 0) throw BadConfig("non-positive frame dimensions");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    const std::size_t frame_size = static_cast<std::size_t>(width) * height * 3;
    if (bytes.empty()) throw EmptySequence("empty input stream");
    if (bytes.size() % frame_size != 0)
        throw TruncatedStream("stream length " + std::to_string(bytes.size()) +
                              " is not a multiple of frame size " + std::to_string(frame_size));
    const std::size_t n = bytes.size() / frame_size;
    if (n < 2) throw InsufficientFrames("need at least 2 frames, got " + std::to_string(n));
    VideoSequence seq;
    seq.frames.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Frame f(width, height);
        std::copy_n(bytes.begin() + i * frame_size, frame_size, f.data.begin());
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

/// Inverse of read_raw_video. Returns the byte count written.
inline std::size_t write_raw_video(const VideoSequence& seq, std::ostream& out) {
    if (seq.empty()) throw EmptySequence("refusing to write an empty sequence");
    std::size_t total = 0;
    for (const Frame& f : seq.frames) {
        out.write(reinterpret_cast<const char*>(f.data.data()),
                  static_cast<std::streamsize>(f.data.size()));
        if (!out) throw Error("sink write failure");
        total += f.data.size();
    }
    return total;
}

}  // namespace vqvsc
