#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <vector>

#include "vqvsc/common.hpp"

namespace vqvsc::phy {

/// IEEE 802.11n LDPC, n=648, rate 3/4, lifting factor Z=27. Entry >= 0 is a
/// cyclic shift of the ZxZ identity, -1 an all-zero block.
inline constexpr int kLiftingFactor = 27;
inline constexpr std::array<std::array<int, 24>, 6> kBaseMatrix648R34 = {{
    {16, 17, 22, 24,  9,  3, 14, -1,  4,  2,  7, -1, 26, -1,  2, -1, 21, -1,  1,  0, -1, -1, -1, -1},
    {25, 12, 12,  3,  3, 26,  6, 21, -1, 15, 22, -1, 15, -1,  4, -1, -1, 16, -1,  0,  0, -1, -1, -1},
    {25, 18, 26, 16, 22, 23,  9, -1,  0, -1,  4, -1,  4, -1,  8, 23, 11, -1, -1, -1,  0,  0, -1, -1},
    { 9,  7,  0,  1, 17, -1, -1,  7,  3, -1,  3, 23, -1, 16, -1, -1, 21, -1,  0, -1, -1,  0,  0, -1},
    {24,  5, 26,  7,  1, -1, -1, 15, 24, 15, -1,  8, -1, 13, -1, 13, -1, 11, -1, -1, -1, -1,  0,  0},
    { 2,  2, 19, 14, 24,  1, 15, 19, -1, 21, -1,  2, -1, 24, -1,  3, -1,  2,  1, -1, -1, -1, -1,  0},
}};

struct LdpcDecodeResult {
    std::vector<std::uint8_t> info;  // 486 bits
    bool parity_ok = false;
    int iterations = 0;
};

/// Systematic LDPC(648, 486). The generator's parity part is derived once by
/// GF(2) Gaussian elimination of the parity columns.
class LdpcCode {
public:
    static constexpr int n = 648;
    static constexpr int k = 486;
    static constexpr int m = 162;

    /// Build from an explicit check adjacency (per check row, sorted variable
    /// indices).
    explicit LdpcCode(std::vector<std::vector<int>> check_vars)
        : check_vars_(std::move(check_vars)) {
        if (static_cast<int>(check_vars_.size()) != m)
            throw BadConfig("expected 162 parity checks");
        var_checks_.assign(n, {});
        for (int c = 0; c < m; ++c)
            for (int v : check_vars_[c]) {
                if (v < 0 || v >= n) throw BadConfig("variable index out of range");
                var_checks_[static_cast<std::size_t>(v)].push_back(c);
            }
        derive_generator();
    }

    /// The shipped 802.11n n=648 rate-3/4 code.
    static const LdpcCode& wifi_648_r34() {
        static const LdpcCode code(expand_base());
        return code;
    }

    static std::vector<std::vector<int>> expand_base() {
        std::vector<std::vector<int>> rows(m);
        for (int br = 0; br < 6; ++br)
            for (int z = 0; z < kLiftingFactor; ++z) {
                auto& row = rows[static_cast<std::size_t>(br) * kLiftingFactor + z];
                for (int bc = 0; bc < 24; ++bc) {
                    int shift = kBaseMatrix648R34[static_cast<std::size_t>(br)]
                                                 [static_cast<std::size_t>(bc)];
                    if (shift < 0) continue;
                    row.push_back(bc * kLiftingFactor + (z + shift) % kLiftingFactor);
                }
                std::sort(row.begin(), row.end());
            }
        return rows;
    }

    std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& info) const {
        if (static_cast<int>(info.size()) != k)
            throw BadLength("expected 486 info bits, got " + std::to_string(info.size()));
        std::vector<std::uint8_t> cw(n, 0);
        std::copy(info.begin(), info.end(), cw.begin());
        for (int r = 0; r < m; ++r) {
            std::uint64_t acc = 0;
            const std::uint64_t* row = parity_gen_.data() + static_cast<std::size_t>(r) * kWords;
            for (int w = 0; w < kWords; ++w) acc ^= row[w] & info_words(info, w);
            cw[static_cast<std::size_t>(k + r)] =
                static_cast<std::uint8_t>(__builtin_popcountll(acc) & 1);
        }
        return cw;
    }

    bool parity_check(const std::vector<std::uint8_t>& cw) const {
        for (const auto& row : check_vars_) {
            int acc = 0;
            for (int v : row) acc ^= cw[static_cast<std::size_t>(v)];
            if (acc) return false;
        }
        return true;
    }

    /// Normalized min-sum (factor 0.8), layered schedule, up to max_iters
    /// iterations with early exit on parity satisfaction. LLR > 0 means bit 0.
    ///
    /// When min-sum fails to converge the result is taken from a sum-product
    /// pass instead: below the waterfall min-sum drifts away from the channel
    /// decisions, while the exact tanh rule still tracks the bit posteriors
    /// and keeps the output BER at or under the raw channel BER.
    LdpcDecodeResult decode(const std::vector<double>& llr, int max_iters = 50) const {
        if (static_cast<int>(llr.size()) != n)
            throw BadLength("expected 648 LLRs, got " + std::to_string(llr.size()));
        std::vector<double> posterior = llr;
        // One stored check-to-variable message per edge, laid out per check.
        std::vector<double> c2v(edge_count(), 0.0);
        std::vector<std::size_t> check_edge_base(check_vars_.size());
        std::size_t base = 0;
        for (std::size_t c = 0; c < check_vars_.size(); ++c) {
            check_edge_base[c] = base;
            base += check_vars_[c].size();
        }

        LdpcDecodeResult res;
        std::vector<std::uint8_t> hard(n);
        for (int iter = 1; iter <= max_iters; ++iter) {
            for (std::size_t c = 0; c < check_vars_.size(); ++c) {
                const auto& vars = check_vars_[c];
                const std::size_t eb = check_edge_base[c];
                double min1 = std::numeric_limits<double>::infinity();
                double min2 = min1;
                std::size_t min_pos = 0;
                int sign = 1;
                for (std::size_t e = 0; e < vars.size(); ++e) {
                    double q = posterior[static_cast<std::size_t>(vars[e])] - c2v[eb + e];
                    c2v[eb + e] = q;  // stash q temporarily
                    double a = std::abs(q);
                    if (q < 0) sign = -sign;
                    if (a < min1) {
                        min2 = min1;
                        min1 = a;
                        min_pos = e;
                    } else if (a < min2) {
                        min2 = a;
                    }
                }
                for (std::size_t e = 0; e < vars.size(); ++e) {
                    double q = c2v[eb + e];
                    double mag = (e == min_pos) ? min2 : min1;
                    double s = (q < 0 ? -1.0 : 1.0) * sign;
                    double r = 0.8 * s * mag;
                    c2v[eb + e] = r;
                    posterior[static_cast<std::size_t>(vars[e])] = q + r;
                }
            }
            for (int v = 0; v < n; ++v) hard[static_cast<std::size_t>(v)] = posterior[v] < 0;
            res.iterations = iter;
            if (parity_check(hard)) {
                res.parity_ok = true;
                break;
            }
        }
        if (!res.parity_ok) res.parity_ok = sum_product_pass(llr, max_iters, hard);
        res.info.assign(hard.begin(), hard.begin() + k);
        return res;
    }

    /// Layered sum-product decode from the original channel LLRs. Writes the
    /// final hard decisions into `hard` and reports parity satisfaction.
    bool sum_product_pass(const std::vector<double>& llr, int max_iters,
                          std::vector<std::uint8_t>& hard) const {
        auto phi = [](double x) {
            return -std::log(std::tanh(std::clamp(x, 1e-12, 40.0) / 2.0));
        };
        std::vector<double> posterior = llr;
        std::vector<double> c2v(edge_count(), 0.0);
        std::vector<double> ph;
        std::vector<int> sg;
        for (int iter = 1; iter <= max_iters; ++iter) {
            std::size_t eb = 0;
            for (const auto& vars : check_vars_) {
                ph.resize(vars.size());
                sg.resize(vars.size());
                double sum_phi = 0.0;
                int sign = 1;
                for (std::size_t e = 0; e < vars.size(); ++e) {
                    double q = posterior[static_cast<std::size_t>(vars[e])] - c2v[eb + e];
                    c2v[eb + e] = q;  // stash q temporarily
                    ph[e] = phi(std::abs(q));
                    sg[e] = q < 0 ? -1 : 1;
                    sum_phi += ph[e];
                    sign *= sg[e];
                }
                for (std::size_t e = 0; e < vars.size(); ++e) {
                    double q = c2v[eb + e];
                    double r = sign * sg[e] * phi(sum_phi - ph[e]);
                    c2v[eb + e] = r;
                    posterior[static_cast<std::size_t>(vars[e])] = q + r;
                }
                eb += vars.size();
            }
            for (int v = 0; v < n; ++v) hard[static_cast<std::size_t>(v)] = posterior[v] < 0;
            if (parity_check(hard)) return true;
        }
        return false;
    }

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& row : check_vars_) e += row.size();
        return e;
    }

    const std::vector<std::vector<int>>& checks() const { return check_vars_; }

    // -----------------------------------------------------------------------
    // alist asset format (n m / max degrees / per-column and per-row degree
    // lists / 1-based adjacency, zero padded).
    // -----------------------------------------------------------------------

    void write_alist(std::ostream& out) const {
        std::size_t max_col = 0, max_row = 0;
        for (const auto& col : var_checks_) max_col = std::max(max_col, col.size());
        for (const auto& row : check_vars_) max_row = std::max(max_row, row.size());
        out << n << ' ' << m << '\n' << max_col << ' ' << max_row << '\n';
        for (int v = 0; v < n; ++v) out << var_checks_[static_cast<std::size_t>(v)].size()
                                        << (v + 1 == n ? '\n' : ' ');
        for (int c = 0; c < m; ++c) out << check_vars_[static_cast<std::size_t>(c)].size()
                                        << (c + 1 == m ? '\n' : ' ');
        for (const auto& col : var_checks_) {
            for (std::size_t i = 0; i < max_col; ++i)
                out << (i < col.size() ? col[i] + 1 : 0) << (i + 1 == max_col ? '\n' : ' ');
        }
        for (const auto& row : check_vars_) {
            for (std::size_t i = 0; i < max_row; ++i)
                out << (i < row.size() ? row[i] + 1 : 0) << (i + 1 == max_row ? '\n' : ' ');
        }
    }

    static LdpcCode read_alist(std::istream& in) {
        int nn = 0, mm = 0, max_col = 0, max_row = 0;
        if (!(in >> nn >> mm >> max_col >> max_row)) throw BadConfig("bad alist header");
        if (nn != n || mm != m) throw BadConfig("alist dimensions are not 648x162");
        std::vector<int> col_deg(static_cast<std::size_t>(nn)), row_deg(static_cast<std::size_t>(mm));
        for (auto& d : col_deg) in >> d;
        for (auto& d : row_deg) in >> d;
        std::vector<std::vector<int>> rows(static_cast<std::size_t>(mm));
        // Skip the per-column adjacency; rows are authoritative.
        for (int v = 0; v < nn; ++v)
            for (int i = 0; i < max_col; ++i) {
                int dummy;
                in >> dummy;
            }
        for (int c = 0; c < mm; ++c)
            for (int i = 0; i < max_row; ++i) {
                int v;
                if (!(in >> v)) throw BadConfig("truncated alist");
                if (v > 0) rows[static_cast<std::size_t>(c)].push_back(v - 1);
            }
        for (auto& r : rows) std::sort(r.begin(), r.end());
        return LdpcCode(std::move(rows));
    }

    static LdpcCode read_alist_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw BadConfig("cannot open alist file: " + path);
        return read_alist(f);
    }

private:
    static constexpr int kWords = (k + 63) / 64;  // 8

    static std::uint64_t info_words(const std::vector<std::uint8_t>& info, int w) {
        std::uint64_t acc = 0;
        int lo = w * 64, hi = std::min(k, lo + 64);
        for (int i = lo; i < hi; ++i)
            if (info[static_cast<std::size_t>(i)]) acc |= 1ull << (i - lo);
        return acc;
    }

    // parity = H2^{-1} H1 info, with H = [H1 (m x k) | H2 (m x m)].
    void derive_generator() {
        // Augmented rows: k info-column bits plus m identity bits, tracked as
        // we invert H2 in place.
        struct Row {
            std::array<std::uint64_t, 8> info{};
            std::array<std::uint64_t, 3> par{};   // H2 part, 162 bits
            std::array<std::uint64_t, 3> inv{};   // running inverse
        };
        std::vector<Row> rows(m);
        for (int c = 0; c < m; ++c) {
            for (int v : check_vars_[static_cast<std::size_t>(c)]) {
                if (v < k)
                    rows[static_cast<std::size_t>(c)].info[static_cast<std::size_t>(v / 64)] ^=
                        1ull << (v % 64);
                else {
                    int pv = v - k;
                    rows[static_cast<std::size_t>(c)].par[static_cast<std::size_t>(pv / 64)] ^=
                        1ull << (pv % 64);
                }
            }
            rows[static_cast<std::size_t>(c)].inv[static_cast<std::size_t>(c / 64)] ^=
                1ull << (c % 64);
        }
        auto par_bit = [](const Row& r, int b) {
            return (r.par[static_cast<std::size_t>(b / 64)] >> (b % 64)) & 1ull;
        };
        auto xor_row = [](Row& dst, const Row& src) {
            for (int i = 0; i < 8; ++i) dst.info[static_cast<std::size_t>(i)] ^=
                src.info[static_cast<std::size_t>(i)];
            for (int i = 0; i < 3; ++i) {
                dst.par[static_cast<std::size_t>(i)] ^= src.par[static_cast<std::size_t>(i)];
                dst.inv[static_cast<std::size_t>(i)] ^= src.inv[static_cast<std::size_t>(i)];
            }
        };
        for (int col = 0; col < m; ++col) {
            int piv = -1;
            for (int r = col; r < m; ++r)
                if (par_bit(rows[static_cast<std::size_t>(r)], col)) {
                    piv = r;
                    break;
                }
            if (piv < 0)
                throw SingularSystem("parity sub-matrix is singular; not a valid code");
            std::swap(rows[static_cast<std::size_t>(col)], rows[static_cast<std::size_t>(piv)]);
            for (int r = 0; r < m; ++r)
                if (r != col && par_bit(rows[static_cast<std::size_t>(r)], col))
                    xor_row(rows[static_cast<std::size_t>(r)], rows[static_cast<std::size_t>(col)]);
        }
        // After elimination, row r holds parity row r of the generator.
        parity_gen_.assign(static_cast<std::size_t>(m) * kWords, 0);
        for (int r = 0; r < m; ++r)
            for (int w = 0; w < kWords; ++w)
                parity_gen_[static_cast<std::size_t>(r) * kWords + w] =
                    rows[static_cast<std::size_t>(r)].info[static_cast<std::size_t>(w)];
    }

    std::vector<std::vector<int>> check_vars_;
    std::vector<std::vector<int>> var_checks_;
    std::vector<std::uint64_t> parity_gen_;  // m x kWords
};

}  // namespace vqvsc::phy
