#pragma once

#include <complex>
#include <vector>

#include "vqvsc/common.hpp"

namespace vqvsc::phy {

using cplx = std::complex<double>;

enum class ModulationKind { QPSK, QAM16 };

inline int bits_per_symbol(ModulationKind kind) {
    return kind == ModulationKind::QPSK ? 2 : 4;
}

inline constexpr double kLlrClamp = 30.0;

namespace detail {

// Gray axis levels for 16QAM: (b_hi, b_lo) -> {00:+3, 01:+1, 11:-1, 10:-3}.
inline double qam16_level(int b_hi, int b_lo) {
    static const double lut[4] = {3.0, 1.0, -3.0, -1.0};  // index b_hi*2 + b_lo
    return lut[b_hi * 2 + b_lo];
}

}  // namespace detail

/// Gray-mapped unit-average-energy constellation mapping.
inline std::vector<cplx> map_symbols(const std::vector<std::uint8_t>& bits, ModulationKind kind) {
    const int bps = bits_per_symbol(kind);
    if (bits.size() % static_cast<std::size_t>(bps) != 0)
        throw BadLength("bit count not a multiple of bits/symbol");
    std::vector<cplx> out;
    out.reserve(bits.size() / static_cast<std::size_t>(bps));
    if (kind == ModulationKind::QPSK) {
        const double s = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < bits.size(); i += 2)
            out.emplace_back((1 - 2 * bits[i]) * s, (1 - 2 * bits[i + 1]) * s);
    } else {
        const double s = 1.0 / std::sqrt(10.0);
        for (std::size_t i = 0; i < bits.size(); i += 4)
            out.emplace_back(detail::qam16_level(bits[i], bits[i + 1]) * s,
                             detail::qam16_level(bits[i + 2], bits[i + 3]) * s);
    }
    return out;
}

/// Max-log soft demapper on gain-compensated symbols. `noise_var` is the
/// complex noise variance E|n|^2 before equalization; `gains` are the channel
/// estimates used for equalization, so the effective noise on symbol i is
/// noise_var/|gains[i]|^2. Gain 0 marks an unusable bin: its LLRs are 0.
inline std::vector<double> demap_llr(const std::vector<cplx>& symbols, ModulationKind kind,
                                     double noise_var, const std::vector<cplx>& gains) {
    if (noise_var <= 0.0) throw NonPositiveNoise("noise variance must be positive");
    if (symbols.size() != gains.size()) throw BadLength("symbol/gain length mismatch");
    const int bps = bits_per_symbol(kind);

    // Full constellation with bit labels.
    std::vector<cplx> points;
    std::vector<int> labels;
    const int npts = 1 << bps;
    for (int lbl = 0; lbl < npts; ++lbl) {
        std::vector<std::uint8_t> b(static_cast<std::size_t>(bps));
        for (int i = 0; i < bps; ++i) b[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((lbl >> (bps - 1 - i)) & 1);
        points.push_back(map_symbols(b, kind)[0]);
        labels.push_back(lbl);
    }

    std::vector<double> llr(symbols.size() * static_cast<std::size_t>(bps), 0.0);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        double g2 = std::norm(gains[i]);
        if (g2 == 0.0) continue;  // flagged bin, LLR 0
        for (int bit = 0; bit < bps; ++bit) {
            double d0 = std::numeric_limits<double>::infinity();
            double d1 = d0;
            for (int p = 0; p < npts; ++p) {
                double d = std::norm(symbols[i] - points[static_cast<std::size_t>(p)]);
                if ((labels[static_cast<std::size_t>(p)] >> (bps - 1 - bit)) & 1)
                    d1 = std::min(d1, d);
                else
                    d0 = std::min(d0, d);
            }
            double v = (d1 - d0) * g2 / noise_var;
            llr[i * static_cast<std::size_t>(bps) + static_cast<std::size_t>(bit)] =
                std::clamp(v, -kLlrClamp, kLlrClamp);
        }
    }
    return llr;
}

/// Hard-decision demapping (nearest constellation point).
inline std::vector<std::uint8_t> demap_hard(const std::vector<cplx>& symbols,
                                            ModulationKind kind) {
    const int bps = bits_per_symbol(kind);
    const int npts = 1 << bps;
    std::vector<cplx> points;
    for (int lbl = 0; lbl < npts; ++lbl) {
        std::vector<std::uint8_t> b(static_cast<std::size_t>(bps));
        for (int i = 0; i < bps; ++i) b[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((lbl >> (bps - 1 - i)) & 1);
        points.push_back(map_symbols(b, kind)[0]);
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(bps));
    for (const cplx& y : symbols) {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int p = 0; p < npts; ++p) {
            double d = std::norm(y - points[static_cast<std::size_t>(p)]);
            if (d < bd) {
                bd = d;
                best = p;
            }
        }
        for (int i = 0; i < bps; ++i)
            bits.push_back(static_cast<std::uint8_t>((best >> (bps - 1 - i)) & 1));
    }
    return bits;
}

}  // namespace vqvsc::phy
