#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "vqvsc/frame.hpp"

namespace vqvsc {
namespace detail {

inline std::array<double, 11> ssim_window() {
    std::array<double, 11> w{};
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        double x = i - 5.0;
        w[i] = std::exp(-x * x / (2.0 * 1.5 * 1.5));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable 11-tap convolution, valid region only: output (h-10) x (w-10).
inline std::vector<double> conv_valid(const std::vector<double>& img, int w, int h) {
    static const std::array<double, 11> k = ssim_window();
    const int ow = w - 10, oh = h - 10;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < 11; ++i) s += k[i] * img[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < 11; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    return out;
}

struct SsimTerms {
    double ssim;  // mean of full SSIM map
    double cs;    // mean of contrast-structure map
};

// Single-plane SSIM over real-valued samples in [0,255].
inline SsimTerms ssim_plane(const std::vector<double>& a, const std::vector<double>& b, int w,
                            int h) {
    constexpr double C1 = (0.01 * 255) * (0.01 * 255);
    constexpr double C2 = (0.03 * 255) * (0.03 * 255);
    std::vector<double> aa(a.size()), bb(b.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    auto mu_a = conv_valid(a, w, h);
    auto mu_b = conv_valid(b, w, h);
    auto m_aa = conv_valid(aa, w, h);
    auto m_bb = conv_valid(bb, w, h);
    auto m_ab = conv_valid(ab, w, h);
    double sum_ssim = 0.0, sum_cs = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        double ma = mu_a[i], mb = mu_b[i];
        double va = m_aa[i] - ma * ma;
        double vb = m_bb[i] - mb * mb;
        double cov = m_ab[i] - ma * mb;
        double lum = (2 * ma * mb + C1) / (ma * ma + mb * mb + C1);
        double cs = (2 * cov + C2) / (va + vb + C2);
        sum_ssim += lum * cs;
        sum_cs += cs;
    }
    double n = static_cast<double>(mu_a.size());
    return {sum_ssim / n, sum_cs / n};
}

inline std::vector<double> plane_as_double(const Frame& f, int plane) {
    std::vector<double> out(f.plane_size());
    const std::uint8_t* p = f.data.data() + plane * f.plane_size();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(p[i]);
    return out;
}

inline SsimTerms ssim_terms(const Frame& a, const Frame& b) {
    require_same_dims(a, b);
    if (a.width < 11 || a.height < 11)
        throw TooSmall("SSIM needs at least 11x11 frames, got " + std::to_string(a.width) + "x" +
                       std::to_string(a.height));
    SsimTerms acc{0.0, 0.0};
    for (int p = 0; p < 3; ++p) {
        SsimTerms t = ssim_plane(plane_as_double(a, p), plane_as_double(b, p), a.width, a.height);
        acc.ssim += t.ssim;
        acc.cs += t.cs;
    }
    return {acc.ssim / 3.0, acc.cs / 3.0};
}

// 2x2 mean downsampling of a real-valued plane; odd trailing row/col dropped.
inline std::vector<double> downsample2(const std::vector<double>& img, int w, int h, int& ow,
                                       int& oh) {
    ow = w / 2;
    oh = h / 2;
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            const std::size_t i0 = static_cast<std::size_t>(2 * y) * w + 2 * x;
            out[static_cast<std::size_t>(y) * ow + x] =
                0.25 * (img[i0] + img[i0 + 1] + img[i0 + w] + img[i0 + w + 1]);
        }
    return out;
}

inline double signed_pow(double x, double e) {
    return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

}  // namespace detail

/// Mean SSIM (Wang et al. parameters: 11x11 Gaussian window, sigma 1.5),
/// averaged over the three color planes.
inline double ssim(const Frame& a, const Frame& b) { return detail::ssim_terms(a, b).ssim; }

/// Multi-scale SSIM with the standard 5-scale weights. Frames too small for
/// all five scales use as many scales as fit, with weights renormalized.
inline double ms_ssim(const Frame& a, const Frame& b) {
    require_same_dims(a, b);
    static const std::array<double, 5> weights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
    int min_dim = std::min(a.width, a.height);
    int scales = 0;
    for (int s = 1; s <= 5; ++s)
        if (min_dim >= 11 * (1 << (s - 1))) scales = s;
    if (scales == 0)
        throw TooSmall("MS-SSIM needs at least 11x11 frames, got " + std::to_string(a.width) +
                       "x" + std::to_string(a.height));
    double wsum = 0.0;
    for (int s = 0; s < scales; ++s) wsum += weights[s];

    // Planes averaged at each scale, as in the single-scale metric.
    double score = 1.0;
    std::array<std::vector<double>, 3> pa, pb;
    for (int p = 0; p < 3; ++p) {
        pa[p] = detail::plane_as_double(a, p);
        pb[p] = detail::plane_as_double(b, p);
    }
    int w = a.width, h = a.height;
    for (int s = 0; s < scales; ++s) {
        double term = 0.0;
        for (int p = 0; p < 3; ++p) {
            detail::SsimTerms t = detail::ssim_plane(pa[p], pb[p], w, h);
            term += (s == scales - 1) ? t.ssim : t.cs;
        }
        term /= 3.0;
        score *= detail::signed_pow(term, weights[s] / wsum);
        if (s + 1 < scales) {
            int nw = 0, nh = 0;
            for (int p = 0; p < 3; ++p) {
                pa[p] = detail::downsample2(pa[p], w, h, nw, nh);
                pb[p] = detail::downsample2(pb[p], w, h, nw, nh);
            }
            w = nw;
            h = nh;
        }
    }
    return score;
}

/// Peak signal-to-noise ratio in dB over all samples; +inf for identical frames.
inline double psnr(const Frame& a, const Frame& b) {
    require_same_dims(a, b);
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        se += d * d;
    }
    double mse = se / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// Mean squared error over all samples, used as an importance-score option.
inline double mse(const Frame& a, const Frame& b) {
    require_same_dims(a, b);
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        se += d * d;
    }
    return se / static_cast<double>(a.data.size());
}

}  // namespace vqvsc
