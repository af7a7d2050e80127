#pragma once

#include <cstdlib>
#include <vector>

#include "vqvsc/frame.hpp"

namespace vqvsc {

enum class InterpVariant { hold, linear_blend, block_flow };

struct InterpolatorKind {
    InterpVariant variant = InterpVariant::linear_blend;
    int block_size = 8;    // block_flow only
    int search_range = 4;  // block_flow only
};

struct MotionField {
    int grid_w = 0;
    int grid_h = 0;
    std::vector<int> dx;  // grid_h * grid_w, row-major
    std::vector<int> dy;
};

namespace detail {

inline std::uint8_t clamped_at(const Frame& f, int plane, int y, int x) {
    y = std::clamp(y, 0, f.height - 1);
    x = std::clamp(x, 0, f.width - 1);
    return f.at(plane, y, x);
}

// SAD of the block of `a` anchored at (by,bx) against `b` displaced by (dy,dx).
// Out-of-frame source samples in b are border-clamped.
inline long block_sad(const Frame& a, const Frame& b, int by, int bx, int blk, int dy, int dx) {
    long sad = 0;
    for (int p = 0; p < 3; ++p)
        for (int y = 0; y < blk; ++y)
            for (int x = 0; x < blk; ++x) {
                int av = a.at(p, by + y, bx + x);
                int bv = clamped_at(b, p, by + y + dy, bx + x + dx);
                sad += std::abs(av - bv);
            }
    return sad;
}

}  // namespace detail

/// Exhaustive block matching: per block of `a`, the displacement into `b`
/// minimizing SAD within the search window. Ties broken by smallest
/// |dx|+|dy|, then smallest dy, then smallest dx.
inline MotionField estimate_block_motion(const Frame& a, const Frame& b,
                                         const InterpolatorKind& kind) {
    require_same_dims(a, b);
    if (kind.variant != InterpVariant::block_flow)
        throw BadConfig("estimate_block_motion requires the block_flow interpolator");
    const int blk = kind.block_size;
    if (blk <= 0 || a.width % blk != 0 || a.height % blk != 0)
        throw BadBlockSize("block size " + std::to_string(blk) + " does not divide " +
                           std::to_string(a.width) + "x" + std::to_string(a.height));
    if (kind.search_range < 0) throw BadConfig("negative search range");

    MotionField mf;
    mf.grid_w = a.width / blk;
    mf.grid_h = a.height / blk;
    mf.dx.assign(static_cast<std::size_t>(mf.grid_w) * mf.grid_h, 0);
    mf.dy.assign(static_cast<std::size_t>(mf.grid_w) * mf.grid_h, 0);
    const int r = kind.search_range;
    for (int gy = 0; gy < mf.grid_h; ++gy)
        for (int gx = 0; gx < mf.grid_w; ++gx) {
            long best = -1;
            int best_dx = 0, best_dy = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    long sad = detail::block_sad(a, b, gy * blk, gx * blk, blk, dy, dx);
                    bool better = false;
                    if (best < 0 || sad < best) {
                        better = true;
                    } else if (sad == best) {
                        int cand = std::abs(dx) + std::abs(dy);
                        int cur = std::abs(best_dx) + std::abs(best_dy);
                        if (cand < cur || (cand == cur && (dy < best_dy ||
                                                           (dy == best_dy && dx < best_dx))))
                            better = true;
                    }
                    if (better) {
                        best = sad;
                        best_dx = dx;
                        best_dy = dy;
                    }
                }
            mf.dx[static_cast<std::size_t>(gy) * mf.grid_w + gx] = best_dx;
            mf.dy[static_cast<std::size_t>(gy) * mf.grid_w + gx] = best_dy;
        }
    return mf;
}

/// Synthesize g intermediate frames between two key frames. Frame j (1-based)
/// sits at fraction t = j/(g+1).
inline std::vector<Frame> interpolate_between(const Frame& k_a, const Frame& k_b, int g,
                                              const InterpolatorKind& kind) {
    require_same_dims(k_a, k_b);
    if (g == 0) throw ZeroGap("zero-gap interpolation request; caller should skip");
    if (g < 0) throw BadConfig("negative gap");

    std::vector<Frame> out;
    out.reserve(static_cast<std::size_t>(g));

    MotionField mf;
    if (kind.variant == InterpVariant::block_flow) mf = estimate_block_motion(k_a, k_b, kind);

    for (int j = 1; j <= g; ++j) {
        double t = static_cast<double>(j) / (g + 1);
        Frame f(k_a.width, k_a.height);
        switch (kind.variant) {
            case InterpVariant::hold:
                f = k_a;
                break;
            case InterpVariant::linear_blend:
                for (std::size_t i = 0; i < f.data.size(); ++i)
                    f.data[i] = to_u8((1.0 - t) * k_a.data[i] + t * k_b.data[i]);
                break;
            case InterpVariant::block_flow: {
                const int blk = kind.block_size;
                for (int gy = 0; gy < mf.grid_h; ++gy)
                    for (int gx = 0; gx < mf.grid_w; ++gx) {
                        int vx = mf.dx[static_cast<std::size_t>(gy) * mf.grid_w + gx];
                        int vy = mf.dy[static_cast<std::size_t>(gy) * mf.grid_w + gx];
                        int ax = static_cast<int>(round_half_up(t * vx));
                        int ay = static_cast<int>(round_half_up(t * vy));
                        int bx = static_cast<int>(round_half_up(-(1.0 - t) * vx));
                        int by = static_cast<int>(round_half_up(-(1.0 - t) * vy));
                        for (int p = 0; p < 3; ++p)
                            for (int y = 0; y < blk; ++y)
                                for (int x = 0; x < blk; ++x) {
                                    int py = gy * blk + y, px = gx * blk + x;
                                    double va = detail::clamped_at(k_a, p, py + ay, px + ax);
                                    double vb = detail::clamped_at(k_b, p, py + by, px + bx);
                                    f.at(p, py, px) = to_u8((1.0 - t) * va + t * vb);
                                }
                    }
                break;
            }
        }
        out.push_back(std::move(f));
    }
    return out;
}

/// Single mid-frame reconstruction from the two neighbors (t = 1/2).
inline Frame reconstruct_midframe(const Frame& f_prev, const Frame& f_next,
                                  const InterpolatorKind& kind) {
    return interpolate_between(f_prev, f_next, 1, kind)[0];
}

}  // namespace vqvsc
