#pragma once

#include <vector>

#include "vqvsc/index_select.hpp"
#include "vqvsc/keyframe.hpp"

namespace vqvsc {

/// Self-describing container header; every multi-byte field is big-endian.
struct ContainerHeader {
    static constexpr char magic[4] = {'V', 'Q', 'V', 'S'};
    static constexpr std::uint8_t version = 1;
    static constexpr std::size_t byte_size = 36;

    std::uint32_t n_frames = 0;    // N
    std::uint32_t m_keyframes = 0; // M
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::uint8_t patch = 0;
    std::uint8_t channels = 3;
    std::uint8_t bits_per_index = 0;  // B
    std::uint32_t ls = 0;             // L_s
    std::uint64_t codebook_id = 0;
    std::uint32_t crc = 0;            // over everything after the header
};

namespace detail {

class BitWriter {
public:
    void put_bit(int b) {
        if (pos_ == 0) bytes_.push_back(0);
        if (b) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - pos_));
        pos_ = (pos_ + 1) & 7;
    }
    void put_bits(std::uint64_t value, int width) {
        for (int i = width - 1; i >= 0; --i) put_bit(static_cast<int>((value >> i) & 1u));
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    int pos_ = 0;
};

class BitReader {
public:
    BitReader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}
    int get_bit() {
        if (byte_ >= len_) throw Truncated("bit stream exhausted");
        int b = (data_[byte_] >> (7 - pos_)) & 1;
        if (++pos_ == 8) {
            pos_ = 0;
            ++byte_;
        }
        return b;
    }
    std::uint64_t get_bits(int width) {
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
        return v;
    }

private:
    const std::uint8_t* data_;
    std::size_t len_;
    std::size_t byte_ = 0;
    int pos_ = 0;
};

inline void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = bytes - 1; i >= 0; --i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFu));
}

inline std::uint64_t get_be(const std::uint8_t* p, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v = (v << 8) | p[i];
    return v;
}

}  // namespace detail

struct Bitstream {
    ContainerHeader header;
    std::vector<std::uint8_t> bytes;  // header + payload

    /// Payload bit count before padding: N + L_s(M-1) + L_eta*B.
    std::size_t payload_bits(std::size_t l_eta) const {
        return header.n_frames +
               static_cast<std::size_t>(header.ls) * (header.m_keyframes - 1) +
               l_eta * header.bits_per_index;
    }
};

struct ContainerMeta {
    int width = 0;
    int height = 0;
    int patch = 0;
    int bits = 0;  // B
    std::uint64_t codebook_id = 0;
};

/// Serialize [header | v | p | s_eta], MSB-first, B-bit big-endian index
/// fields, zero-padded to a byte boundary. CRC-32 covers the payload bytes.
inline Bitstream pack(const KeyFrameMask& v, const SelectedIndices& sel,
                      const PositionBitmap& bitmap, const ContainerMeta& meta) {
    const std::size_t n = v.size();
    const std::size_t m = v.popcount();
    if (meta.patch <= 0 || meta.width % meta.patch != 0 || meta.height % meta.patch != 0)
        throw BadConfig("patch does not divide frame dimensions");
    const std::size_t ls =
        static_cast<std::size_t>(meta.width / meta.patch) * (meta.height / meta.patch) * 3;
    if (meta.bits < 1 || meta.bits > 16) throw BadConfig("B out of [1,16]");
    if (m < 1) throw Inconsistent("mask selects no key frames");
    if (bitmap.p.size() != ls * (m - 1))
        throw Inconsistent("bitmap length != L_s*(M-1)");
    if (sel.size() != ls + bitmap.popcount())
        throw Inconsistent("L_eta != L_s + popcount(p)");
    for (std::uint32_t s : sel.s_eta)
        if (s >= (1u << meta.bits)) throw Overflow("index does not fit in B bits");

    detail::BitWriter bw;
    for (auto bit : v.v) bw.put_bit(bit);
    for (auto bit : bitmap.p) bw.put_bit(bit);
    for (std::uint32_t s : sel.s_eta) bw.put_bits(s, meta.bits);
    std::vector<std::uint8_t> payload = bw.take();

    Bitstream bs;
    bs.header.n_frames = static_cast<std::uint32_t>(n);
    bs.header.m_keyframes = static_cast<std::uint32_t>(m);
    bs.header.width = static_cast<std::uint16_t>(meta.width);
    bs.header.height = static_cast<std::uint16_t>(meta.height);
    bs.header.patch = static_cast<std::uint8_t>(meta.patch);
    bs.header.channels = 3;
    bs.header.bits_per_index = static_cast<std::uint8_t>(meta.bits);
    bs.header.ls = static_cast<std::uint32_t>(ls);
    bs.header.codebook_id = meta.codebook_id;
    bs.header.crc = crc32(payload);

    auto& out = bs.bytes;
    out.reserve(ContainerHeader::byte_size + payload.size());
    out.insert(out.end(), std::begin(ContainerHeader::magic), std::end(ContainerHeader::magic));
    out.push_back(ContainerHeader::version);
    detail::put_be(out, bs.header.n_frames, 4);
    detail::put_be(out, bs.header.m_keyframes, 4);
    detail::put_be(out, bs.header.width, 2);
    detail::put_be(out, bs.header.height, 2);
    out.push_back(bs.header.patch);
    out.push_back(bs.header.channels);
    out.push_back(bs.header.bits_per_index);
    detail::put_be(out, bs.header.ls, 4);
    detail::put_be(out, bs.header.codebook_id, 8);
    detail::put_be(out, bs.header.crc, 4);
    out.insert(out.end(), payload.begin(), payload.end());
    return bs;
}

struct UnpackedContainer {
    ContainerHeader header;
    KeyFrameMask v;
    SelectedIndices sel;
    PositionBitmap bitmap;
};

/// Parse and verify a container byte stream; exact inverse of pack.
inline UnpackedContainer unpack(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < ContainerHeader::byte_size) throw Truncated("container shorter than header");
    if (!std::equal(std::begin(ContainerHeader::magic), std::end(ContainerHeader::magic),
                    bytes.begin()))
        throw BadMagic("bad container magic");
    if (bytes[4] != ContainerHeader::version)
        throw BadVersion("unsupported container version " + std::to_string(bytes[4]));

    UnpackedContainer out;
    const std::uint8_t* p = bytes.data() + 5;
    out.header.n_frames = static_cast<std::uint32_t>(detail::get_be(p, 4)); p += 4;
    out.header.m_keyframes = static_cast<std::uint32_t>(detail::get_be(p, 4)); p += 4;
    out.header.width = static_cast<std::uint16_t>(detail::get_be(p, 2)); p += 2;
    out.header.height = static_cast<std::uint16_t>(detail::get_be(p, 2)); p += 2;
    out.header.patch = *p++;
    out.header.channels = *p++;
    out.header.bits_per_index = *p++;
    out.header.ls = static_cast<std::uint32_t>(detail::get_be(p, 4)); p += 4;
    out.header.codebook_id = detail::get_be(p, 8); p += 8;
    out.header.crc = static_cast<std::uint32_t>(detail::get_be(p, 4)); p += 4;

    const auto& h = out.header;
    if (h.m_keyframes > h.n_frames || h.m_keyframes < 1)
        throw Truncated("inconsistent header counts");
    if (h.bits_per_index < 1 || h.bits_per_index > 16) throw Truncated("B out of [1,16]");
    if (h.patch == 0 || h.width % h.patch != 0 || h.height % h.patch != 0 ||
        h.ls != static_cast<std::uint32_t>(h.width / h.patch) * (h.height / h.patch) * h.channels)
        throw Truncated("inconsistent header geometry");

    std::uint32_t want = crc32(bytes.data() + ContainerHeader::byte_size,
                               bytes.size() - ContainerHeader::byte_size);
    if (want != h.crc) throw CrcMismatch("payload CRC mismatch");

    detail::BitReader br(bytes.data() + ContainerHeader::byte_size,
                         bytes.size() - ContainerHeader::byte_size);
    out.v.v.resize(h.n_frames);
    for (auto& b : out.v.v) b = static_cast<std::uint8_t>(br.get_bit());
    if (out.v.popcount() != h.m_keyframes) throw Truncated("mask popcount != M");
    out.bitmap.p.resize(static_cast<std::size_t>(h.ls) * (h.m_keyframes - 1));
    for (auto& b : out.bitmap.p) b = static_cast<std::uint8_t>(br.get_bit());
    std::size_t l_eta = h.ls + out.bitmap.popcount();
    out.sel.s_eta.resize(l_eta);
    for (auto& s : out.sel.s_eta)
        s = static_cast<std::uint32_t>(br.get_bits(h.bits_per_index));
    return out;
}

}  // namespace vqvsc
