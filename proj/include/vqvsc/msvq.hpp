#pragma once

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "vqvsc/frame.hpp"

namespace vqvsc {

enum class PatchTransform { identity_patch, dct_patch };

struct VqConfig {
    int patch = 4;                                          // P
    static constexpr int channels = 3;                      // c, one per color plane
    int dim = 16;                                           // d
    PatchTransform transform = PatchTransform::identity_patch;
    int codebook_size = 256;                                // L

    void validate(int width, int height) const {
        if (patch <= 0 || width % patch != 0 || height % patch != 0)
            throw BadConfig("patch size " + std::to_string(patch) + " does not divide " +
                            std::to_string(width) + "x" + std::to_string(height));
        if (transform == PatchTransform::identity_patch && dim != patch * patch)
            throw BadConfig("identity_patch requires d = P^2");
        if (dim <= 0) throw BadConfig("non-positive feature dimension");
    }
};

/// Per-key-frame feature tensor, h x w x d x c, stored channel-major: row
/// (j*U + u) is the d-vector of channel j at grid cell u.
struct FeatureTensor {
    int grid_h = 0;
    int grid_w = 0;
    int dim = 0;
    std::vector<double> rows;  // (c * U) * dim

    std::size_t cells() const { return static_cast<std::size_t>(grid_h) * grid_w; }
    std::size_t row_count() const { return cells() * VqConfig::channels; }
    const double* row(std::size_t i) const { return rows.data() + i * dim; }
    double* row(std::size_t i) { return rows.data() + i * dim; }
};

struct IndexSequence {
    std::vector<std::uint32_t> s;
    std::size_t size() const { return s.size(); }
    bool operator==(const IndexSequence& o) const { return s == o.s; }
};

struct Codebook {
    std::vector<double> entries;  // L * d, row-major
    int size = 0;                 // L
    int dim = 0;                  // d
    std::uint64_t id = 0;

    const double* row(std::size_t l) const { return entries.data() + l * dim; }
};

inline int bits_per_index(int codebook_size) {
    if (codebook_size < 2 || (codebook_size & (codebook_size - 1)) != 0)
        throw NotPowerOfTwo("codebook size must be a power of 2 >= 2, got " +
                            std::to_string(codebook_size));
    int b = 0;
    while ((1 << b) < codebook_size) ++b;
    return b;
}

namespace detail {

// Unnormalized DCT-II basis, M[u][x] = cos(pi (2x+1) u / 2P). Satisfies
// M M^T = diag(P, P/2, ..., P/2).
inline std::vector<double> dct_basis(int p) {
    std::vector<double> m(static_cast<std::size_t>(p) * p);
    for (int u = 0; u < p; ++u)
        for (int x = 0; x < p; ++x)
            m[static_cast<std::size_t>(u) * p + x] =
                std::cos(3.14159265358979323846 * (2 * x + 1) * u / (2.0 * p));
    return m;
}

inline std::vector<std::pair<int, int>> zigzag(int p) {
    std::vector<std::pair<int, int>> order;
    order.reserve(static_cast<std::size_t>(p) * p);
    for (int s = 0; s <= 2 * (p - 1); ++s) {
        if (s % 2 == 0) {
            for (int y = std::min(s, p - 1); y >= std::max(0, s - p + 1); --y)
                order.emplace_back(y, s - y);
        } else {
            for (int y = std::max(0, s - p + 1); y <= std::min(s, p - 1); ++y)
                order.emplace_back(y, s - y);
        }
    }
    return order;
}

}  // namespace detail

/// Classical stand-in for the learned feature extractor: per color plane, each
/// P x P patch becomes one d-vector (flattened samples mapped to [-1,1], or
/// scaled DCT-II coefficients in zig-zag order).
inline FeatureTensor extract_features(const Frame& frame, const VqConfig& cfg) {
    cfg.validate(frame.width, frame.height);
    const int p = cfg.patch;
    FeatureTensor z;
    z.grid_h = frame.height / p;
    z.grid_w = frame.width / p;
    z.dim = cfg.dim;
    z.rows.assign(z.row_count() * cfg.dim, 0.0);

    const auto basis = detail::dct_basis(p);
    const auto zz = detail::zigzag(p);
    std::vector<double> patch(static_cast<std::size_t>(p) * p);
    std::vector<double> tmp(static_cast<std::size_t>(p) * p);
    std::vector<double> coef(static_cast<std::size_t>(p) * p);

    for (int ch = 0; ch < 3; ++ch)
        for (int gy = 0; gy < z.grid_h; ++gy)
            for (int gx = 0; gx < z.grid_w; ++gx) {
                for (int y = 0; y < p; ++y)
                    for (int x = 0; x < p; ++x)
                        patch[static_cast<std::size_t>(y) * p + x] =
                            (frame.at(ch, gy * p + y, gx * p + x) - 127.5) / 127.5;
                std::size_t u = static_cast<std::size_t>(gy) * z.grid_w + gx;
                double* row = z.row(static_cast<std::size_t>(ch) * z.cells() + u);
                if (cfg.transform == PatchTransform::identity_patch) {
                    std::copy(patch.begin(), patch.end(), row);
                } else {
                    // X = (1/P) M patch M^T, then zig-zag scan.
                    for (int u1 = 0; u1 < p; ++u1)
                        for (int x = 0; x < p; ++x) {
                            double s = 0.0;
                            for (int y = 0; y < p; ++y)
                                s += basis[static_cast<std::size_t>(u1) * p + y] *
                                     patch[static_cast<std::size_t>(y) * p + x];
                            tmp[static_cast<std::size_t>(u1) * p + x] = s;
                        }
                    for (int u1 = 0; u1 < p; ++u1)
                        for (int u2 = 0; u2 < p; ++u2) {
                            double s = 0.0;
                            for (int x = 0; x < p; ++x)
                                s += tmp[static_cast<std::size_t>(u1) * p + x] *
                                     basis[static_cast<std::size_t>(u2) * p + x];
                            coef[static_cast<std::size_t>(u1) * p + u2] = s / p;
                        }
                    for (int k = 0; k < cfg.dim; ++k) {
                        if (k < p * p)
                            row[k] = coef[static_cast<std::size_t>(zz[k].first) * p +
                                          zz[k].second];
                        else
                            row[k] = 0.0;
                    }
                }
            }
    return z;
}

/// Inverse of extract_features up to rounding; exact for identity_patch and
/// for dct_patch with d = P^2.
inline Frame reconstruct_frame(const FeatureTensor& z, const VqConfig& cfg) {
    const int p = cfg.patch;
    Frame frame(z.grid_w * p, z.grid_h * p);
    const auto basis = detail::dct_basis(p);
    const auto zz = detail::zigzag(p);
    std::vector<double> coef(static_cast<std::size_t>(p) * p);
    std::vector<double> tmp(static_cast<std::size_t>(p) * p);
    std::vector<double> patch(static_cast<std::size_t>(p) * p);

    // Inverse weights: M^{-1} = M^T S^{-1}, S = diag(P, P/2, ..., P/2).
    std::vector<double> sinv(p, 2.0 / p);
    sinv[0] = 1.0 / p;

    for (int ch = 0; ch < 3; ++ch)
        for (int gy = 0; gy < z.grid_h; ++gy)
            for (int gx = 0; gx < z.grid_w; ++gx) {
                std::size_t u = static_cast<std::size_t>(gy) * z.grid_w + gx;
                const double* row = z.row(static_cast<std::size_t>(ch) * z.cells() + u);
                if (cfg.transform == PatchTransform::identity_patch) {
                    std::copy(row, row + p * p, patch.begin());
                } else {
                    std::fill(coef.begin(), coef.end(), 0.0);
                    for (int k = 0; k < std::min(cfg.dim, p * p); ++k)
                        coef[static_cast<std::size_t>(zz[k].first) * p + zz[k].second] = row[k];
                    // patch = P * M^T S^{-1} X S^{-1} M
                    for (int y = 0; y < p; ++y)
                        for (int u2 = 0; u2 < p; ++u2) {
                            double s = 0.0;
                            for (int u1 = 0; u1 < p; ++u1)
                                s += basis[static_cast<std::size_t>(u1) * p + y] * sinv[u1] *
                                     coef[static_cast<std::size_t>(u1) * p + u2];
                            tmp[static_cast<std::size_t>(y) * p + u2] = s;
                        }
                    for (int y = 0; y < p; ++y)
                        for (int x = 0; x < p; ++x) {
                            double s = 0.0;
                            for (int u2 = 0; u2 < p; ++u2)
                                s += tmp[static_cast<std::size_t>(y) * p + u2] * sinv[u2] *
                                     basis[static_cast<std::size_t>(u2) * p + x];
                            patch[static_cast<std::size_t>(y) * p + x] = s * p;
                        }
                }
                for (int y = 0; y < p; ++y)
                    for (int x = 0; x < p; ++x)
                        frame.at(ch, gy * p + y, gx * p + x) =
                            to_u8(patch[static_cast<std::size_t>(y) * p + x] * 127.5 + 127.5);
            }
    return frame;
}

/// Nearest-codeword index per feature row (Euclidean, ties to the lowest
/// index), concatenated channel-major.
inline IndexSequence quantize(const FeatureTensor& z, const Codebook& cb) {
    if (z.dim != cb.dim) throw DimensionMismatch("feature dim != codebook dim");
    IndexSequence out;
    out.s.resize(z.row_count());
    for (std::size_t i = 0; i < z.row_count(); ++i) {
        const double* f = z.row(i);
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_l = 0;
        for (int l = 0; l < cb.size; ++l) {
            const double* e = cb.row(static_cast<std::size_t>(l));
            double d2 = 0.0;
            for (int k = 0; k < cb.dim; ++k) {
                double diff = f[k] - e[k];
                d2 += diff * diff;
            }
            if (d2 < best) {
                best = d2;
                best_l = static_cast<std::uint32_t>(l);
            }
        }
        out.s[i] = best_l;
    }
    return out;
}

/// Embedding lookup: row i of the result is codebook row s(i).
inline FeatureTensor dequantize(const IndexSequence& s, const Codebook& cb, const VqConfig& cfg,
                                int grid_h, int grid_w) {
    FeatureTensor z;
    z.grid_h = grid_h;
    z.grid_w = grid_w;
    z.dim = cb.dim;
    if (s.size() != z.row_count())
        throw DimensionMismatch("index count != c*U for the given grid");
    z.rows.resize(s.size() * static_cast<std::size_t>(cb.dim));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.s[i] >= static_cast<std::uint32_t>(cb.size))
            throw IndexOutOfRange("index " + std::to_string(s.s[i]) + " >= L=" +
                                  std::to_string(cb.size));
        std::copy(cb.row(s.s[i]), cb.row(s.s[i]) + cb.dim, z.row(i));
    }
    (void)cfg;
    return z;
}

namespace detail {

inline std::string serialize_entries(const std::vector<double>& entries, int size, int dim) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (int l = 0; l < size; ++l) {
        for (int k = 0; k < dim; ++k) {
            if (k) os << ' ';
            os << entries[static_cast<std::size_t>(l) * dim + k];
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace detail

inline std::uint64_t codebook_id(const std::vector<double>& entries, int size, int dim) {
    std::string s = detail::serialize_entries(entries, size, dim);
    return fnv1a64(s.data(), s.size());
}

/// k-means with k-means++ seeding over the pooled feature rows of the sample
/// frames. Deterministic given the seed. Optional distortion history (mean
/// squared quantization error after each assignment step).
inline Codebook train_codebook(const std::vector<FeatureTensor>& samples, int codebook_size,
                               std::uint64_t seed, int max_iters = 100,
                               std::vector<double>* history = nullptr) {
    bits_per_index(codebook_size);  // validates power of 2
    if (samples.empty()) throw TooFewSamples("no training samples");
    const int dim = samples[0].dim;
    std::vector<double> points;
    for (const auto& z : samples) {
        if (z.dim != dim) throw DimensionMismatch("inconsistent feature dims across samples");
        points.insert(points.end(), z.rows.begin(), z.rows.end());
    }
    const std::size_t n = points.size() / static_cast<std::size_t>(dim);
    if (n < static_cast<std::size_t>(codebook_size))
        throw TooFewSamples("fewer feature rows than codebook entries");

    auto pt = [&](std::size_t i) { return points.data() + i * dim; };
    auto dist2 = [&](const double* a, const double* b) {
        double d = 0.0;
        for (int k = 0; k < dim; ++k) {
            double t = a[k] - b[k];
            d += t * t;
        }
        return d;
    };

    GaussianRng rng(seed);
    const int L = codebook_size;
    std::vector<double> centers(static_cast<std::size_t>(L) * dim);

    // k-means++ seeding.
    std::size_t first = rng.below(n);
    std::copy(pt(first), pt(first) + dim, centers.begin());
    std::vector<double> mind(n);
    for (std::size_t i = 0; i < n; ++i) mind[i] = dist2(pt(i), centers.data());
    for (int c = 1; c < L; ++c) {
        double total = 0.0;
        for (double d : mind) total += d;
        std::size_t chosen;
        if (total <= 0.0) {
            chosen = rng.below(n);
        } else {
            double r = rng.uniform() * total;
            double acc = 0.0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += mind[i];
                if (acc >= r) {
                    chosen = i;
                    break;
                }
            }
        }
        double* cc = centers.data() + static_cast<std::size_t>(c) * dim;
        std::copy(pt(chosen), pt(chosen) + dim, cc);
        for (std::size_t i = 0; i < n; ++i) mind[i] = std::min(mind[i], dist2(pt(i), cc));
    }

    // Lloyd iterations.
    std::vector<int> assign(n, 0);
    std::vector<double> sums(static_cast<std::size_t>(L) * dim);
    std::vector<std::size_t> counts(static_cast<std::size_t>(L));
    for (int iter = 0; iter < max_iters; ++iter) {
        double distortion = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (int c = 0; c < L; ++c) {
                double d = dist2(pt(i), centers.data() + static_cast<std::size_t>(c) * dim);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            assign[i] = best_c;
            distortion += best;
        }
        if (history) history->push_back(distortion / static_cast<double>(n));

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            double* s = sums.data() + static_cast<std::size_t>(assign[i]) * dim;
            for (int k = 0; k < dim; ++k) s[k] += pt(i)[k];
            ++counts[static_cast<std::size_t>(assign[i])];
        }
        double shift = 0.0;
        for (int c = 0; c < L; ++c) {
            double* cc = centers.data() + static_cast<std::size_t>(c) * dim;
            if (counts[static_cast<std::size_t>(c)] == 0) {
                // Re-seed to the point farthest from its center.
                std::size_t far = 0;
                double fard = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = dist2(pt(i), centers.data() +
                                                static_cast<std::size_t>(assign[i]) * dim);
                    if (d > fard) {
                        fard = d;
                        far = i;
                    }
                }
                std::copy(pt(far), pt(far) + dim, cc);
                shift += fard;
                continue;
            }
            for (int k = 0; k < dim; ++k) {
                double nc = sums[static_cast<std::size_t>(c) * dim + k] /
                            static_cast<double>(counts[static_cast<std::size_t>(c)]);
                double d = nc - cc[k];
                shift += d * d;
                cc[k] = nc;
            }
        }
        if (shift < 1e-9) break;
    }

    // Codebook invariant: no two identical rows.
    for (int a = 0; a < L; ++a)
        for (int b = a + 1; b < L; ++b) {
            double* ra = centers.data() + static_cast<std::size_t>(a) * dim;
            double* rb = centers.data() + static_cast<std::size_t>(b) * dim;
            if (std::equal(ra, ra + dim, rb)) rb[b % dim] += 1e-6 * (b + 1);
        }

    Codebook cb;
    cb.entries = std::move(centers);
    cb.size = L;
    cb.dim = dim;
    cb.id = codebook_id(cb.entries, cb.size, cb.dim);
    return cb;
}

// ---------------------------------------------------------------------------
// Codebook file: header "L d id", then L lines of d decimal reals. The id is
// FNV-1a 64 over the serialized entry lines, so byte-identical files share it.
// ---------------------------------------------------------------------------

inline void save_codebook(const Codebook& cb, std::ostream& out) {
    out << cb.size << ' ' << cb.dim << ' ' << cb.id << '\n';
    out << detail::serialize_entries(cb.entries, cb.size, cb.dim);
}

inline Codebook load_codebook(std::istream& in) {
    Codebook cb;
    if (!(in >> cb.size >> cb.dim >> cb.id)) throw BadConfig("bad codebook header");
    if (cb.size < 2 || cb.dim < 1) throw BadConfig("bad codebook dimensions");
    cb.entries.resize(static_cast<std::size_t>(cb.size) * cb.dim);
    for (double& v : cb.entries)
        if (!(in >> v)) throw BadConfig("truncated codebook entries");
    std::uint64_t want = codebook_id(cb.entries, cb.size, cb.dim);
    if (want != cb.id)
        throw BadConfig("codebook id mismatch: file says " + std::to_string(cb.id) +
                        ", contents hash to " + std::to_string(want));
    return cb;
}

}  // namespace vqvsc
