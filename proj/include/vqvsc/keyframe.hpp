#pragma once

#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "vqvsc/interp.hpp"
#include "vqvsc/metrics.hpp"

namespace vqvsc {

/// Sentinel for the pinned first/last frames; interior scores are bounded by
/// 2 (1-SSIM) or 255^2 (MSE), so this always wins selection.
constexpr double MAX_SCORE = 1e9;

enum class ImportanceMetric { one_minus_ssim, mse };

struct ImportanceScores {
    std::vector<double> beta;  // length N
    std::size_t size() const { return beta.size(); }
};

struct KeyFrameMask {
    std::vector<std::uint8_t> v;  // length N, 0/1
    std::size_t size() const { return v.size(); }
    std::size_t popcount() const {
        return static_cast<std::size_t>(std::accumulate(v.begin(), v.end(), 0L));
    }
};

struct GapSequence {
    std::vector<int> g;  // length M-1
};

enum class RegKind { none, L1, L2 };

struct RateModel {
    std::vector<double> a;  // length I+1
    int degree = 0;
    RegKind reg = RegKind::none;
    double upsilon = 0.0;
};

/// Per-frame reconstruction difficulty: score of frame n is the metric
/// between frame n and its mid-frame reconstruction from neighbors n-1, n+1.
/// Endpoints get the sentinel.
inline ImportanceScores importance_scores(const VideoSequence& seq, const InterpolatorKind& kind,
                                          ImportanceMetric metric) {
    const std::size_t n = seq.size();
    if (n < 2) throw InsufficientFrames("importance scoring needs at least 2 frames");
    ImportanceScores out;
    out.beta.assign(n, 0.0);
    out.beta.front() = MAX_SCORE;
    out.beta.back() = MAX_SCORE;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        Frame rec = reconstruct_midframe(seq[i - 1], seq[i + 1], kind);
        out.beta[i] = (metric == ImportanceMetric::one_minus_ssim) ? 1.0 - ssim(rec, seq[i])
                                                                   : mse(rec, seq[i]);
    }
    return out;
}

namespace detail {

// Solve the dense symmetric system M x = b by Gaussian elimination with
// partial pivoting; throws SingularSystem on rank deficiency.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> m,
                                        std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-12) throw SingularSystem("rank-deficient design matrix");
        std::swap(m[col], m[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
    return x;
}

}  // namespace detail

/// Fit rho = sum_i a_i (ln gamma)^i to (gamma, rho) samples; gamma is linear
/// SNR. L2/none solved in closed form, L1 by coordinate descent.
inline RateModel fit_rate_model(const std::vector<std::pair<double, double>>& samples, int degree,
                                RegKind reg, double upsilon) {
    if (degree < 0) throw BadConfig("negative polynomial degree");
    const std::size_t n = samples.size();
    const std::size_t p = static_cast<std::size_t>(degree) + 1;
    if (n < p) throw TooFewSamples("need at least degree+1 samples");
    for (auto& s : samples)
        if (s.first <= 0.0) throw NonPositiveSnr("sample SNR must be positive (linear)");

    // Design matrix rows: [1, ln g, (ln g)^2, ...].
    std::vector<std::vector<double>> X(n, std::vector<double>(p));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lg = std::log(samples[i].first);
        double v = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            X[i][j] = v;
            v *= lg;
        }
        y[i] = samples[i].second;
    }

    RateModel model;
    model.degree = degree;
    model.reg = reg;
    model.upsilon = upsilon;

    if (reg == RegKind::L1 && upsilon > 0.0) {
        std::vector<double> a(p, 0.0);
        std::vector<double> colsq(p, 0.0);
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t i = 0; i < n; ++i) colsq[j] += X[i][j] * X[i][j];
        std::vector<double> resid = y;  // y - X a, with a = 0
        for (int iter = 0; iter < 10000; ++iter) {
            double max_shift = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                if (colsq[j] == 0.0) continue;
                double rho_j = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    rho_j += X[i][j] * (resid[i] + X[i][j] * a[j]);
                double thr = upsilon / 2.0;
                double new_a;
                if (rho_j > thr)
                    new_a = (rho_j - thr) / colsq[j];
                else if (rho_j < -thr)
                    new_a = (rho_j + thr) / colsq[j];
                else
                    new_a = 0.0;
                double shift = new_a - a[j];
                if (shift != 0.0) {
                    for (std::size_t i = 0; i < n; ++i) resid[i] -= X[i][j] * shift;
                    a[j] = new_a;
                }
                max_shift = std::max(max_shift, std::abs(shift));
            }
            if (max_shift < 1e-10) break;
        }
        model.a = a;
        return model;
    }

    // Ridge / plain least squares: (X'X + u I) a = X'y.
    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            xty[j] += X[i][j] * y[i];
            for (std::size_t k = 0; k < p; ++k) xtx[j][k] += X[i][j] * X[i][k];
        }
    double ridge = (reg == RegKind::L2) ? upsilon : 0.0;
    for (std::size_t j = 0; j < p; ++j) xtx[j][j] += ridge;
    model.a = detail::solve_linear(std::move(xtx), std::move(xty));
    return model;
}

/// Evaluate the rate model, clamped to [2/N, 1].
inline double predict_rho(const RateModel& model, double gamma_linear, std::size_t n_frames) {
    if (gamma_linear <= 0.0) throw NonPositiveSnr("SNR must be positive (linear)");
    double lg = std::log(gamma_linear);
    double rho = 0.0, v = 1.0;
    for (double c : model.a) {
        rho += c * v;
        v *= lg;
    }
    double lo = 2.0 / static_cast<double>(n_frames);
    return std::clamp(rho, lo, 1.0);
}

/// Mark the M = clamp(round(rho N), 2, N) largest-beta frames; ties go to the
/// smaller index. Endpoint sentinels guarantee v(1)=v(N)=1.
inline KeyFrameMask select_keyframes(const ImportanceScores& beta, double rho) {
    const std::size_t n = beta.size();
    if (n < 2) throw InsufficientFrames("mask needs at least 2 frames");
    std::size_t m = static_cast<std::size_t>(std::clamp(
        round_half_up(rho * static_cast<double>(n)), 2.0, static_cast<double>(n)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return beta.beta[a] > beta.beta[b];
    });
    KeyFrameMask mask;
    mask.v.assign(n, 0);
    for (std::size_t i = 0; i < m; ++i) mask.v[idx[i]] = 1;
    return mask;
}

/// Non-key-frame run lengths between consecutive key frames.
inline GapSequence gaps_from_mask(const KeyFrameMask& v) {
    GapSequence out;
    long last = -1;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v.v[i]) continue;
        if (last >= 0) out.g.push_back(static_cast<int>(i) - static_cast<int>(last) - 1);
        last = static_cast<long>(i);
    }
    return out;
}

/// Extract the key frames of a sequence in order.
inline std::vector<Frame> extract_keyframes(const VideoSequence& seq, const KeyFrameMask& v) {
    if (seq.size() != v.size()) throw CountMismatch("mask length != sequence length");
    std::vector<Frame> keys;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.v[i]) keys.push_back(seq[i]);
    return keys;
}

/// Stitch key frames and interpolated fills back into frame order.
inline VideoSequence seam(const std::vector<Frame>& keys, const std::vector<Frame>& fills,
                          const KeyFrameMask& v) {
    if (keys.size() != v.popcount() || fills.size() != v.size() - v.popcount())
        throw CountMismatch("key/fill counts do not match the mask");
    VideoSequence out;
    out.frames.reserve(v.size());
    std::size_t ki = 0, fi = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.frames.push_back(v.v[i] ? keys[ki++] : fills[fi++]);
    return out;
}

/// Per-key-frame transmission counts. The slot budget keeps the transmitted
/// volume at the level of a fixed rho_ref scheme: R_total = floor(rho_ref /
/// rho(gamma)) caps any single frame; extra slots beyond one per frame go
/// round-robin to the highest-beta key frames first.
inline std::vector<int> schedule_retransmissions(const ImportanceScores& beta,
                                                 const KeyFrameMask& v, double gamma_linear,
                                                 double rho_ref, const RateModel& model) {
    if (beta.size() != v.size()) throw CountMismatch("beta length != mask length");
    const std::size_t m = v.popcount();
    double rho = predict_rho(model, gamma_linear, v.size());
    std::vector<int> counts(m, 1);
    if (rho_ref < rho) return counts;  // BudgetUnderflow: no room for repeats
    int r_total = static_cast<int>(std::floor(rho_ref / rho));
    long slots = static_cast<long>(std::floor(rho_ref / rho * static_cast<double>(m)));
    long extras = slots - static_cast<long>(m);

    // Key frames ordered by descending beta, lowest index first on ties.
    std::vector<std::size_t> key_idx;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.v[i]) key_idx.push_back(i);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return beta.beta[key_idx[a]] > beta.beta[key_idx[b]];
    });

    while (extras > 0) {
        bool any = false;
        for (std::size_t o : order) {
            if (extras == 0) break;
            if (counts[o] < r_total) {
                ++counts[o];
                --extras;
                any = true;
            }
        }
        if (!any) break;  // everyone at cap; leftover slots unused
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Rate-model persistence: header "degree reg upsilon", then one coefficient
// per line.
// ---------------------------------------------------------------------------

inline const char* to_string(RegKind r) {
    switch (r) {
        case RegKind::L1: return "L1";
        case RegKind::L2: return "L2";
        default: return "none";
    }
}

inline RegKind reg_from_string(const std::string& s) {
    if (s == "L1") return RegKind::L1;
    if (s == "L2") return RegKind::L2;
    if (s == "none") return RegKind::none;
    throw BadConfig("unknown regularization kind: " + s);
}

inline void save_rate_model(const RateModel& m, std::ostream& out) {
    out.precision(17);
    out << m.degree << ' ' << to_string(m.reg) << ' ' << m.upsilon << '\n';
    for (double c : m.a) out << c << '\n';
}

inline RateModel load_rate_model(std::istream& in) {
    RateModel m;
    std::string reg;
    if (!(in >> m.degree >> reg >> m.upsilon)) throw BadConfig("bad rate-model header");
    m.reg = reg_from_string(reg);
    m.a.resize(static_cast<std::size_t>(m.degree) + 1);
    for (double& c : m.a)
        if (!(in >> c)) throw BadConfig("truncated rate-model coefficient list");
    return m;
}

}  // namespace vqvsc
