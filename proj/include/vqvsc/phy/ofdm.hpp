#pragma once

#include <array>
#include <complex>
#include <vector>

#include "vqvsc/phy/modulation.hpp"

namespace vqvsc::phy {

/// 802.11a-like numerology: 64-point FFT, 16-sample cyclic prefix, 48 data
/// subcarriers, 4 BPSK pilots at logical bins {-21,-7,7,21}, one full-known
/// preamble symbol per packet for LS channel estimation.
struct OfdmConfig {
    static constexpr int fft_size = 64;
    static constexpr int cp_len = 16;
    static constexpr int n_data = 48;
    static constexpr int n_pilot = 4;
    static constexpr int n_used = n_data + n_pilot;  // 52
    static constexpr std::array<int, 4> pilot_bins = {-21, -7, 7, 21};
    static constexpr std::array<double, 4> pilot_values = {1.0, 1.0, 1.0, -1.0};
};

namespace detail {

inline int bin_index(int k) { return k >= 0 ? k : OfdmConfig::fft_size + k; }

inline const std::vector<int>& data_bins() {
    static const std::vector<int> bins = [] {
        std::vector<int> v;
        for (int k = -26; k <= 26; ++k) {
            if (k == 0) continue;
            bool pilot = false;
            for (int p : OfdmConfig::pilot_bins) pilot |= (p == k);
            if (!pilot) v.push_back(k);
        }
        return v;
    }();
    return bins;
}

inline const std::vector<int>& used_bins() {
    static const std::vector<int> bins = [] {
        std::vector<int> v;
        for (int k = -26; k <= 26; ++k)
            if (k != 0) v.push_back(k);
        return v;
    }();
    return bins;
}

// Fixed known BPSK preamble over the 52 used bins, in used_bins() order.
inline const std::vector<double>& preamble_pattern() {
    static const std::vector<double> pat = [] {
        std::vector<double> v;
        GaussianRng rng(0x0FD3A11Cu);
        for (int i = 0; i < OfdmConfig::n_used; ++i)
            v.push_back((rng.next() & 1) ? 1.0 : -1.0);
        return v;
    }();
    return pat;
}

// Orthonormal radix-2 FFT, in place. invert=true gives the inverse transform.
inline void fft(std::vector<cplx>& a, bool invert) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * 3.14159265358979323846 / static_cast<double>(len) *
                     (invert ? 1.0 : -1.0);
        cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (cplx& x : a) x *= scale;
}

inline std::vector<cplx> symbol_to_time(const std::vector<cplx>& bins64) {
    std::vector<cplx> t = bins64;
    fft(t, true);
    std::vector<cplx> out;
    out.reserve(OfdmConfig::fft_size + OfdmConfig::cp_len);
    out.insert(out.end(), t.end() - OfdmConfig::cp_len, t.end());
    out.insert(out.end(), t.begin(), t.end());
    return out;
}

}  // namespace detail

/// One packet: preamble symbol followed by ceil-free len/48 data symbols,
/// each 80 samples (CP + body).
inline std::vector<cplx> ofdm_modulate(const std::vector<cplx>& symbols, const OfdmConfig& cfg) {
    (void)cfg;
    if (symbols.size() % OfdmConfig::n_data != 0)
        throw BadLength("symbol count not a multiple of 48");
    std::vector<cplx> out;

    std::vector<cplx> bins(OfdmConfig::fft_size, cplx(0.0, 0.0));
    const auto& used = detail::used_bins();
    const auto& pre = detail::preamble_pattern();
    for (std::size_t i = 0; i < used.size(); ++i)
        bins[static_cast<std::size_t>(detail::bin_index(used[i]))] = cplx(pre[i], 0.0);
    auto t = detail::symbol_to_time(bins);
    out.insert(out.end(), t.begin(), t.end());

    const auto& data = detail::data_bins();
    for (std::size_t s = 0; s < symbols.size(); s += OfdmConfig::n_data) {
        std::fill(bins.begin(), bins.end(), cplx(0.0, 0.0));
        for (int i = 0; i < OfdmConfig::n_pilot; ++i)
            bins[static_cast<std::size_t>(detail::bin_index(OfdmConfig::pilot_bins[
                static_cast<std::size_t>(i)]))] =
                cplx(OfdmConfig::pilot_values[static_cast<std::size_t>(i)], 0.0);
        for (int i = 0; i < OfdmConfig::n_data; ++i)
            bins[static_cast<std::size_t>(detail::bin_index(data[static_cast<std::size_t>(i)]))] =
                symbols[s + static_cast<std::size_t>(i)];
        t = detail::symbol_to_time(bins);
        out.insert(out.end(), t.begin(), t.end());
    }
    return out;
}

struct OfdmRx {
    std::vector<cplx> data;      // n_data per data symbol, concatenated
    std::vector<cplx> pilots;    // n_pilot per data symbol, concatenated
    std::vector<cplx> preamble;  // 52 used bins of the preamble symbol
};

/// Strip CP, forward FFT, split bins. First 80-sample symbol is the preamble.
inline OfdmRx ofdm_demodulate(const std::vector<cplx>& samples, const OfdmConfig& cfg) {
    (void)cfg;
    constexpr int sym_len = OfdmConfig::fft_size + OfdmConfig::cp_len;
    if (samples.size() % sym_len != 0 || samples.empty())
        throw BadLength("sample count not a positive multiple of 80");
    const std::size_t n_sym = samples.size() / sym_len;

    OfdmRx rx;
    const auto& data = detail::data_bins();
    const auto& used = detail::used_bins();
    std::vector<cplx> body(OfdmConfig::fft_size);
    for (std::size_t s = 0; s < n_sym; ++s) {
        std::copy(samples.begin() + static_cast<long>(s * sym_len + OfdmConfig::cp_len),
                  samples.begin() + static_cast<long>((s + 1) * sym_len), body.begin());
        detail::fft(body, false);
        if (s == 0) {
            for (int k : used)
                rx.preamble.push_back(body[static_cast<std::size_t>(detail::bin_index(k))]);
        } else {
            for (int k : data)
                rx.data.push_back(body[static_cast<std::size_t>(detail::bin_index(k))]);
            for (int k : OfdmConfig::pilot_bins)
                rx.pilots.push_back(body[static_cast<std::size_t>(detail::bin_index(k))]);
        }
    }
    return rx;
}

/// Per-bin least-squares estimate from one known symbol: H(k) = Y(k)/X(k).
inline std::vector<cplx> estimate_channel_ls(const std::vector<cplx>& rx_preamble,
                                             const std::vector<cplx>& tx_preamble) {
    if (rx_preamble.size() != tx_preamble.size())
        throw BadLength("preamble length mismatch");
    std::vector<cplx> gains(rx_preamble.size());
    for (std::size_t i = 0; i < gains.size(); ++i) {
        if (std::norm(tx_preamble[i]) == 0.0) throw ZeroReference("zero tx preamble bin");
        gains[i] = rx_preamble[i] / tx_preamble[i];
    }
    return gains;
}

/// The transmitted preamble bins, in used_bins order.
inline std::vector<cplx> tx_preamble_bins() {
    std::vector<cplx> out;
    for (double v : detail::preamble_pattern()) out.emplace_back(v, 0.0);
    return out;
}

/// Least-squares projection of per-bin gains onto the subspace of channels
/// whose impulse response fits inside the cyclic prefix. Unbiased for any
/// channel the CP can absorb; cuts estimation noise by ~n_used/cp_len.
inline std::vector<cplx> denoise_gains(const std::vector<cplx>& used_gains) {
    if (used_gains.size() != OfdmConfig::n_used) throw BadLength("expected 52 used-bin gains");
    constexpr int nt = OfdmConfig::cp_len;  // modeled tap count
    const auto& used = detail::used_bins();

    // Precompute G = (F^H F)^{-1} F^H for F[i][d] = exp(-j 2 pi k_i d / 64).
    static const std::vector<cplx> pinv = [] {
        const auto& bins = detail::used_bins();
        const int nu = OfdmConfig::n_used;
        std::vector<cplx> f(static_cast<std::size_t>(nu) * nt);
        for (int i = 0; i < nu; ++i)
            for (int d = 0; d < nt; ++d) {
                double ang = -2.0 * 3.14159265358979323846 * bins[static_cast<std::size_t>(i)] *
                             d / OfdmConfig::fft_size;
                f[static_cast<std::size_t>(i) * nt + d] = cplx(std::cos(ang), std::sin(ang));
            }
        // a = F^H F (nt x nt), then invert by Gauss-Jordan.
        std::vector<cplx> a(static_cast<std::size_t>(nt) * nt, cplx(0, 0));
        for (int r = 0; r < nt; ++r)
            for (int c = 0; c < nt; ++c)
                for (int i = 0; i < nu; ++i)
                    a[static_cast<std::size_t>(r) * nt + c] +=
                        std::conj(f[static_cast<std::size_t>(i) * nt + r]) *
                        f[static_cast<std::size_t>(i) * nt + c];
        std::vector<cplx> inv(static_cast<std::size_t>(nt) * nt, cplx(0, 0));
        for (int i = 0; i < nt; ++i) inv[static_cast<std::size_t>(i) * nt + i] = cplx(1, 0);
        for (int col = 0; col < nt; ++col) {
            int piv = col;
            for (int r = col + 1; r < nt; ++r)
                if (std::abs(a[static_cast<std::size_t>(r) * nt + col]) >
                    std::abs(a[static_cast<std::size_t>(piv) * nt + col]))
                    piv = r;
            for (int c = 0; c < nt; ++c) {
                std::swap(a[static_cast<std::size_t>(col) * nt + c],
                          a[static_cast<std::size_t>(piv) * nt + c]);
                std::swap(inv[static_cast<std::size_t>(col) * nt + c],
                          inv[static_cast<std::size_t>(piv) * nt + c]);
            }
            cplx d = a[static_cast<std::size_t>(col) * nt + col];
            for (int c = 0; c < nt; ++c) {
                a[static_cast<std::size_t>(col) * nt + c] /= d;
                inv[static_cast<std::size_t>(col) * nt + c] /= d;
            }
            for (int r = 0; r < nt; ++r) {
                if (r == col) continue;
                cplx fac = a[static_cast<std::size_t>(r) * nt + col];
                if (fac == cplx(0, 0)) continue;
                for (int c = 0; c < nt; ++c) {
                    a[static_cast<std::size_t>(r) * nt + c] -=
                        fac * a[static_cast<std::size_t>(col) * nt + c];
                    inv[static_cast<std::size_t>(r) * nt + c] -=
                        fac * inv[static_cast<std::size_t>(col) * nt + c];
                }
            }
        }
        // G = inv * F^H  (nt x nu)
        std::vector<cplx> g(static_cast<std::size_t>(nt) * nu, cplx(0, 0));
        for (int r = 0; r < nt; ++r)
            for (int i = 0; i < nu; ++i)
                for (int c = 0; c < nt; ++c)
                    g[static_cast<std::size_t>(r) * nu + i] +=
                        inv[static_cast<std::size_t>(r) * nt + c] *
                        std::conj(f[static_cast<std::size_t>(i) * nt + c]);
        return g;
    }();

    std::vector<cplx> taps(nt, cplx(0, 0));
    for (int d = 0; d < nt; ++d)
        for (int i = 0; i < OfdmConfig::n_used; ++i)
            taps[static_cast<std::size_t>(d)] +=
                pinv[static_cast<std::size_t>(d) * OfdmConfig::n_used + i] *
                used_gains[static_cast<std::size_t>(i)];

    std::vector<cplx> out(used_gains.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        cplx h(0, 0);
        for (int d = 0; d < nt; ++d) {
            double ang = -2.0 * 3.14159265358979323846 * used[i] * d / OfdmConfig::fft_size;
            h += taps[static_cast<std::size_t>(d)] * cplx(std::cos(ang), std::sin(ang));
        }
        out[i] = h;
    }
    return out;
}

/// Gains estimated on the 52 used bins, reordered to the 48 data bins.
inline std::vector<cplx> data_bin_gains(const std::vector<cplx>& used_gains) {
    if (used_gains.size() != OfdmConfig::n_used) throw BadLength("expected 52 used-bin gains");
    const auto& used = detail::used_bins();
    const auto& data = detail::data_bins();
    std::vector<cplx> out;
    out.reserve(data.size());
    for (int k : data) {
        auto it = std::find(used.begin(), used.end(), k);
        out.push_back(used_gains[static_cast<std::size_t>(it - used.begin())]);
    }
    return out;
}

struct EqualizedSymbols {
    std::vector<cplx> symbols;
    std::vector<cplx> gains;  // per symbol; 0 marks a flagged near-zero bin
};

/// Zero-forcing equalization; bins with |H| < 1e-6 are flagged with gain 0 so
/// the demapper emits zero LLRs for them.
inline EqualizedSymbols equalize(const std::vector<cplx>& data_syms,
                                 const std::vector<cplx>& gains) {
    if (data_syms.size() != gains.size()) throw BadLength("symbol/gain length mismatch");
    EqualizedSymbols out;
    out.symbols.resize(data_syms.size());
    out.gains.resize(data_syms.size());
    for (std::size_t i = 0; i < data_syms.size(); ++i) {
        if (std::abs(gains[i]) < 1e-6) {
            out.symbols[i] = cplx(0.0, 0.0);
            out.gains[i] = cplx(0.0, 0.0);
        } else {
            out.symbols[i] = data_syms[i] / gains[i];
            out.gains[i] = gains[i];
        }
    }
    return out;
}

}  // namespace vqvsc::phy
