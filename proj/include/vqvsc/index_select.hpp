#pragma once

#include <vector>

#include "vqvsc/msvq.hpp"

namespace vqvsc {

struct SelectedIndices {
    std::vector<std::uint32_t> s_eta;
    std::size_t size() const { return s_eta.size(); }
};

struct PositionBitmap {
    std::vector<std::uint8_t> p;  // blocks p_2..p_M, each of length L_s
    std::size_t popcount() const {
        std::size_t n = 0;
        for (auto b : p) n += b;
        return n;
    }
};

/// Embedding lookup for a whole index sequence: row i = codebook row s(i).
inline std::vector<double> embed_rows(const IndexSequence& s, const Codebook& cb) {
    std::vector<double> out(s.size() * static_cast<std::size_t>(cb.dim));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.s[i] >= static_cast<std::uint32_t>(cb.size))
            throw IndexOutOfRange("index " + std::to_string(s.s[i]) + " out of range");
        std::copy(cb.row(s.s[i]), cb.row(s.s[i]) + cb.dim, out.begin() + i * cb.dim);
    }
    return out;
}

namespace detail {

// Cosine similarity with an explicit zero-vector rule: both zero -> 1,
// exactly one zero -> 0.
inline double cosine(const double* a, const double* b, int dim) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int k = 0; k < dim; ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (na == 0.0 && nb == 0.0) return 1.0;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace detail

/// Cross-key-frame index compressor. Frame 1 is sent whole; each later frame
/// sends only positions whose embedded vector differs (cosine below eta) from
/// the restored predecessor at that position. Identical indices take a
/// float-free sim := 1 shortcut. Comparing against the restored chain rather
/// than the raw predecessor keeps transmitter and receiver references equal.
inline std::pair<SelectedIndices, PositionBitmap> select_indices(
    const std::vector<IndexSequence>& all_s, const Codebook& cb, double eta) {
    if (all_s.empty()) throw EmptyInput("no index sequences");
    const std::size_t ls = all_s[0].size();
    for (const auto& s : all_s)
        if (s.size() != ls) throw LengthMismatch("index sequences differ in length");

    SelectedIndices sel;
    PositionBitmap bitmap;
    sel.s_eta = all_s[0].s;
    bitmap.p.reserve(ls * (all_s.size() - 1));

    std::vector<std::uint32_t> ref = all_s[0].s;  // restored predecessor
    for (std::size_t m = 1; m < all_s.size(); ++m) {
        for (std::size_t i = 0; i < ls; ++i) {
            std::uint32_t cur = all_s[m].s[i];
            double sim;
            if (cur == ref[i]) {
                sim = 1.0;
            } else {
                if (cur >= static_cast<std::uint32_t>(cb.size) ||
                    ref[i] >= static_cast<std::uint32_t>(cb.size))
                    throw IndexOutOfRange("index out of codebook range");
                sim = detail::cosine(cb.row(ref[i]), cb.row(cur), cb.dim);
            }
            if (sim < eta) {
                bitmap.p.push_back(1);
                sel.s_eta.push_back(cur);
                ref[i] = cur;
            } else {
                bitmap.p.push_back(0);
            }
        }
    }
    return {std::move(sel), std::move(bitmap)};
}

/// Receiver-side inverse: rebuild the M index sequences by consuming s_eta at
/// set bitmap positions and holding the predecessor elsewhere.
inline std::vector<IndexSequence> restore_indices(const SelectedIndices& sel,
                                                  const PositionBitmap& bitmap, std::size_t m,
                                                  std::size_t ls) {
    if (m == 0) throw EmptyInput("M must be >= 1");
    if (bitmap.p.size() != ls * (m - 1))
        throw LengthMismatch("bitmap length != L_s*(M-1)");
    if (sel.size() != ls + bitmap.popcount())
        throw LengthMismatch("selected index count != L_s + popcount(p)");

    std::vector<IndexSequence> out(m);
    out[0].s.assign(sel.s_eta.begin(), sel.s_eta.begin() + static_cast<long>(ls));
    std::size_t next = ls;
    for (std::size_t k = 1; k < m; ++k) {
        out[k].s = out[k - 1].s;
        for (std::size_t i = 0; i < ls; ++i)
            if (bitmap.p[(k - 1) * ls + i]) out[k].s[i] = sel.s_eta[next++];
    }
    return out;
}

/// Bit compression ratio: transmitted bits (mask + selected indices + bitmap)
/// over raw video bits.
inline double compute_bcr(std::size_t n, std::size_t m, std::size_t l_eta, std::size_t ls, int b,
                          int width, int height) {
    double denom = 3.0 * height * width * 8.0 * static_cast<double>(n);
    if (denom == 0.0) throw ZeroDenominator("zero-size video");
    double num = static_cast<double>(n) + static_cast<double>(l_eta) * b +
                 static_cast<double>(ls) * (static_cast<double>(m) - 1.0);
    return num / denom;
}

}  // namespace vqvsc
