#pragma once

#include <chrono>
#include <map>
#include <sstream>

#include "vqvsc/bitstream.hpp"
#include "vqvsc/channel.hpp"
#include "vqvsc/index_select.hpp"
#include "vqvsc/keyframe.hpp"
#include "vqvsc/metrics.hpp"
#include "vqvsc/msvq.hpp"
#include "vqvsc/phy/ldpc.hpp"
#include "vqvsc/phy/ofdm.hpp"
#include "vqvsc/video_io.hpp"

namespace vqvsc {

struct ExperimentConfig {
    std::string video_path;
    int width = 64;
    int height = 64;
    VqConfig vq;
    InterpolatorKind interp;
    ImportanceMetric metric = ImportanceMetric::one_minus_ssim;
    std::string codebook_path;
    std::string rate_model_path;
    double eta = 1.0;
    phy::ModulationKind modulation = phy::ModulationKind::QPSK;
    ChannelModel channel;
    double rho_ref = 1.0;
    bool retransmit = true;
    std::uint64_t seed = 0;
    int gop = 16;
    std::string report_path;
};

struct ReportRow {
    double gamma_db = 0.0;
    int trial = 0;
    double rho = 0.0;
    std::size_t m_keyframes = 0;
    std::string repeats;        // per-key-frame counts joined by '|'
    double bcr = 0.0;
    std::size_t payload_bits = 0;
    std::size_t transmitted_bits = 0;  // all LDPC codeword bits incl. repeats
    std::size_t bit_errors = 0;
    bool crc_ok = true;
    double mean_ssim = 0.0;
    double mean_ms_ssim = 0.0;
    double mean_psnr = 0.0;
    double wall_ms = 0.0;  // not written to CSV: rows must be reproducible
};

// ---------------------------------------------------------------------------
// Transmitter front end shared by the PHY path and the codec-only local
// decode, so both see the identical schedule and container.
// ---------------------------------------------------------------------------

struct GopEncoding {
    KeyFrameMask mask;
    std::vector<int> key_positions;
    std::vector<IndexSequence> key_indices;
    SelectedIndices sel;
    PositionBitmap bitmap;
    Bitstream container;
    double rho = 0.0;
    ImportanceScores beta;
};

inline GopEncoding encode_gop(const VideoSequence& gop, const ExperimentConfig& cfg,
                              const Codebook& cb, const RateModel& model) {
    GopEncoding enc;
    enc.beta = importance_scores(gop, cfg.interp, cfg.metric);
    double gamma_linear = std::pow(10.0, cfg.channel.snr_db / 10.0);
    enc.rho = predict_rho(model, gamma_linear, gop.size());
    enc.mask = select_keyframes(enc.beta, enc.rho);
    for (std::size_t i = 0; i < enc.mask.size(); ++i)
        if (enc.mask.v[i]) enc.key_positions.push_back(static_cast<int>(i));
    for (int pos : enc.key_positions)
        enc.key_indices.push_back(
            quantize(extract_features(gop[static_cast<std::size_t>(pos)], cfg.vq), cb));
    std::tie(enc.sel, enc.bitmap) = select_indices(enc.key_indices, cb, cfg.eta);
    ContainerMeta meta{cfg.width, cfg.height, cfg.vq.patch, bits_per_index(cfg.vq.codebook_size),
                       cb.id};
    enc.container = pack(enc.mask, enc.sel, enc.bitmap, meta);
    return enc;
}

/// Receiver back end: parsed container -> reconstructed GOP. `fallback` is
/// the last intact key frame (or a mid-gray frame) used when the container is
/// unusable.
inline VideoSequence decode_gop(const UnpackedContainer& uc, const ExperimentConfig& cfg,
                                const Codebook& cb) {
    const auto& h = uc.header;
    auto restored = restore_indices(uc.sel, uc.bitmap, h.m_keyframes, h.ls);
    const int grid_h = h.height / h.patch;
    const int grid_w = h.width / h.patch;
    std::vector<Frame> keys;
    keys.reserve(restored.size());
    for (const auto& s : restored)
        keys.push_back(reconstruct_frame(dequantize(s, cb, cfg.vq, grid_h, grid_w), cfg.vq));

    KeyFrameMask mask;
    mask.v = uc.v.v;
    GapSequence gaps = gaps_from_mask(mask);
    std::vector<Frame> fills;
    for (std::size_t j = 0; j + 1 < keys.size(); ++j) {
        if (gaps.g[j] == 0) continue;
        auto f = interpolate_between(keys[j], keys[j + 1], gaps.g[j], cfg.interp);
        fills.insert(fills.end(), f.begin(), f.end());
    }
    return seam(keys, fills, mask);
}

inline VideoSequence hold_fallback(std::size_t n, const Frame& last_intact) {
    VideoSequence out;
    out.frames.assign(n, last_intact);
    return out;
}

// ---------------------------------------------------------------------------
// PHY transport of one container with per-block retransmission and LLR-sum
// combining.
// ---------------------------------------------------------------------------

namespace detail_pipeline {

constexpr int kInfoBits = phy::LdpcCode::k;
constexpr int kCodeBits = phy::LdpcCode::n;

inline std::vector<std::uint8_t> bytes_to_bits(const std::vector<std::uint8_t>& bytes) {
    std::vector<std::uint8_t> bits;
    bits.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes)
        for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1);
    return bits;
}

inline std::vector<std::uint8_t> bits_to_bytes(const std::vector<std::uint8_t>& bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
    return bytes;
}

// Per-LDPC-block repeat counts: a block inherits the maximum repeat count of
// any key frame whose payload bits it carries; header/mask/bitmap bits count
// as belonging to every key frame (they gate the whole container).
inline std::vector<int> block_repeat_counts(const GopEncoding& enc,
                                            const std::vector<int>& frame_repeats,
                                            std::size_t n_blocks) {
    int max_rep = 1;
    for (int r : frame_repeats) max_rep = std::max(max_rep, r);

    const auto& h = enc.container.header;
    const std::size_t control_bits = ContainerHeader::byte_size * 8 + h.n_frames +
                                     static_cast<std::size_t>(h.ls) * (h.m_keyframes - 1);
    // Owner of each index in s_eta, in transmission order.
    std::vector<int> index_owner;
    index_owner.assign(h.ls, 0);  // frame 1 full sequence
    std::size_t bit_pos = 0;
    for (std::size_t m = 1; m < h.m_keyframes; ++m)
        for (std::size_t i = 0; i < h.ls; ++i, ++bit_pos)
            if (enc.bitmap.p[bit_pos]) index_owner.push_back(static_cast<int>(m));

    std::vector<int> reps(n_blocks, 1);
    const int b = h.bits_per_index;
    for (std::size_t blk = 0; blk < n_blocks; ++blk) {
        std::size_t lo = blk * kInfoBits;
        std::size_t hi = lo + kInfoBits;
        int r = 1;
        if (lo < control_bits) r = max_rep;
        // Index range overlapping [lo, hi).
        if (hi > control_bits) {
            std::size_t ilo = (lo > control_bits ? lo - control_bits : 0) / b;
            std::size_t ihi = (hi - control_bits + b - 1) / b;
            for (std::size_t i = ilo; i < std::min(ihi, index_owner.size()); ++i)
                r = std::max(r, frame_repeats[static_cast<std::size_t>(index_owner[i])]);
        }
        reps[blk] = std::min(r, max_rep);
    }
    return reps;
}

struct PhyResult {
    std::vector<std::uint8_t> bytes;  // decoded container bytes
    std::size_t bit_errors = 0;
    std::size_t transmitted_bits = 0;
    bool all_parity_ok = true;
};

inline PhyResult transport(const std::vector<std::uint8_t>& container_bytes,
                           const std::vector<int>& block_reps, const ExperimentConfig& cfg,
                           std::uint64_t seed) {
    const auto& code = phy::LdpcCode::wifi_648_r34();
    auto bits = bytes_to_bits(container_bytes);
    const std::size_t true_bits = bits.size();
    while (bits.size() % kInfoBits != 0) bits.push_back(0);
    const std::size_t n_blocks = bits.size() / kInfoBits;

    std::vector<std::vector<std::uint8_t>> codewords(n_blocks);
    for (std::size_t blk = 0; blk < n_blocks; ++blk) {
        std::vector<std::uint8_t> info(bits.begin() + static_cast<long>(blk * kInfoBits),
                                       bits.begin() + static_cast<long>((blk + 1) * kInfoBits));
        codewords[blk] = code.encode(info);
    }

    int max_rep = 1;
    for (int r : block_reps) max_rep = std::max(max_rep, r);

    const int bps = phy::bits_per_symbol(cfg.modulation);
    std::vector<std::vector<double>> llr_acc(n_blocks, std::vector<double>(kCodeBits, 0.0));
    PhyResult res;

    phy::OfdmConfig ofdm_cfg;
    for (int round = 1; round <= max_rep; ++round) {
        std::vector<std::size_t> round_blocks;
        std::vector<std::uint8_t> round_bits;
        for (std::size_t blk = 0; blk < n_blocks; ++blk)
            if (block_reps[blk] >= round) {
                round_blocks.push_back(blk);
                round_bits.insert(round_bits.end(), codewords[blk].begin(),
                                  codewords[blk].end());
            }
        if (round_blocks.empty()) break;
        res.transmitted_bits += round_bits.size();

        auto symbols = phy::map_symbols(round_bits, cfg.modulation);
        const std::size_t n_code_syms = symbols.size();
        while (symbols.size() % phy::OfdmConfig::n_data != 0)
            symbols.emplace_back(0.0, 0.0);
        auto tx = phy::ofdm_modulate(symbols, ofdm_cfg);

        ChannelModel ch = cfg.channel;
        ch.seed = seed ^ fnv1a64(&round, sizeof(round));
        auto rx_full = apply_channel(tx, ch);
        rx_full.resize(tx.size());  // perfect timing; multipath tail discarded

        auto rx = phy::ofdm_demodulate(rx_full, ofdm_cfg);
        auto used_gains =
            phy::denoise_gains(phy::estimate_channel_ls(rx.preamble, phy::tx_preamble_bins()));
        auto dgains = phy::data_bin_gains(used_gains);
        std::vector<cplx> tiled_gains;
        tiled_gains.reserve(rx.data.size());
        for (std::size_t i = 0; i < rx.data.size(); ++i)
            tiled_gains.push_back(dgains[i % dgains.size()]);
        auto eq = phy::equalize(rx.data, tiled_gains);

        // Receiver-side noise power from the configured SNR and the measured
        // receive power: P_n = P_rx * g/(1+g), g = 10^(-snr/10).
        double noise_var = 1e-12;
        if (ch.variant != ChannelVariant::bypass) {
            double prx = 0.0;
            for (const cplx& v : rx_full) prx += std::norm(v);
            prx /= static_cast<double>(rx_full.size());
            double g = std::pow(10.0, -ch.snr_db / 10.0);
            noise_var = std::max(prx * g / (1.0 + g), 1e-12);
        }
        auto llr = phy::demap_llr(eq.symbols, cfg.modulation, noise_var, eq.gains);
        llr.resize(n_code_syms * static_cast<std::size_t>(bps));

        for (std::size_t i = 0; i < round_blocks.size(); ++i) {
            auto& acc = llr_acc[round_blocks[i]];
            for (int b = 0; b < kCodeBits; ++b)
                acc[static_cast<std::size_t>(b)] +=
                    llr[i * kCodeBits + static_cast<std::size_t>(b)];
        }
    }

    std::vector<std::uint8_t> out_bits;
    out_bits.reserve(n_blocks * kInfoBits);
    for (std::size_t blk = 0; blk < n_blocks; ++blk) {
        auto dec = code.decode(llr_acc[blk]);
        res.all_parity_ok = res.all_parity_ok && dec.parity_ok;
        out_bits.insert(out_bits.end(), dec.info.begin(), dec.info.end());
    }
    for (std::size_t i = 0; i < out_bits.size(); ++i)
        if (out_bits[i] != bits[i]) ++res.bit_errors;
    out_bits.resize(true_bits);
    res.bytes = bits_to_bytes(out_bits);
    return res;
}

}  // namespace detail_pipeline

// ---------------------------------------------------------------------------
// End-to-end runs.
// ---------------------------------------------------------------------------

/// Codec-only reconstruction (no PHY, no channel): what the transmitter can
/// compute locally. The bypass-channel end-to-end run must match this
/// bit-exactly.
inline VideoSequence codec_reconstruct(const VideoSequence& seq, const ExperimentConfig& cfg,
                                       const Codebook& cb, const RateModel& model) {
    VideoSequence out;
    std::size_t start = 0;
    while (start < seq.size()) {
        std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(cfg.gop),
                                                seq.size() - start);
        if (seq.size() - start - len == 1) ++len;  // avoid a trailing 1-frame GOP
        VideoSequence gop;
        gop.frames.assign(seq.frames.begin() + static_cast<long>(start),
                          seq.frames.begin() + static_cast<long>(start + len));
        auto enc = encode_gop(gop, cfg, cb, model);
        auto uc = unpack(enc.container.bytes);
        auto rec = decode_gop(uc, cfg, cb);
        out.frames.insert(out.frames.end(), rec.frames.begin(), rec.frames.end());
        start += len;
    }
    return out;
}

/// Full transmitter -> channel -> receiver chain over GOPs of cfg.gop frames.
inline std::pair<VideoSequence, ReportRow> transmit_video(const VideoSequence& seq,
                                                          const ExperimentConfig& cfg,
                                                          const Codebook& cb,
                                                          const RateModel& model) {
    if (cb.id == 0) throw BadConfig("codebook has no id");
    auto t0 = std::chrono::steady_clock::now();
    ReportRow row;
    row.gamma_db = cfg.channel.snr_db;

    VideoSequence received;
    Frame last_intact(cfg.width, cfg.height, 128);
    bool have_intact = false;

    double gamma_linear = std::pow(10.0, cfg.channel.snr_db / 10.0);
    std::size_t start = 0;
    std::size_t gop_count = 0;
    double rho_sum = 0.0;
    while (start < seq.size()) {
        std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(cfg.gop),
                                                seq.size() - start);
        if (seq.size() - start - len == 1) ++len;
        VideoSequence gop;
        gop.frames.assign(seq.frames.begin() + static_cast<long>(start),
                          seq.frames.begin() + static_cast<long>(start + len));

        auto enc = encode_gop(gop, cfg, cb, model);
        rho_sum += enc.rho;
        ++gop_count;
        row.m_keyframes += enc.mask.popcount();

        std::vector<int> frame_reps(enc.mask.popcount(), 1);
        if (cfg.retransmit)
            frame_reps =
                schedule_retransmissions(enc.beta, enc.mask, gamma_linear, cfg.rho_ref, model);
        {
            std::ostringstream os;
            for (std::size_t i = 0; i < frame_reps.size(); ++i)
                os << (i ? "|" : "") << frame_reps[i];
            if (!row.repeats.empty()) row.repeats += ";";
            row.repeats += os.str();
        }

        std::size_t padded_bits = enc.container.bytes.size() * 8;
        std::size_t n_blocks =
            (padded_bits + detail_pipeline::kInfoBits - 1) / detail_pipeline::kInfoBits;
        auto block_reps = detail_pipeline::block_repeat_counts(enc, frame_reps, n_blocks);

        std::uint64_t gop_seed = cfg.seed ^ fnv1a64(&start, sizeof(start));
        auto phy_res =
            detail_pipeline::transport(enc.container.bytes, block_reps, cfg, gop_seed);
        row.bit_errors += phy_res.bit_errors;
        row.transmitted_bits += phy_res.transmitted_bits;
        row.payload_bits += enc.container.payload_bits(enc.sel.size());
        row.bcr += compute_bcr(gop.size(), enc.mask.popcount(), enc.sel.size(),
                               enc.container.header.ls, enc.container.header.bits_per_index,
                               cfg.width, cfg.height) *
                   static_cast<double>(gop.size());

        VideoSequence rec;
        bool ok = false;
        try {
            auto uc = unpack(phy_res.bytes);
            if (uc.header.codebook_id != cb.id)
                throw BadConfig("receiver codebook does not match container");
            rec = decode_gop(uc, cfg, cb);
            ok = true;
        } catch (const Error&) {
            rec = hold_fallback(gop.size(), have_intact ? last_intact
                                                        : Frame(cfg.width, cfg.height, 128));
        }
        row.crc_ok = row.crc_ok && ok;
        if (ok) {
            last_intact = rec.frames.back();
            have_intact = true;
        }
        received.frames.insert(received.frames.end(), rec.frames.begin(), rec.frames.end());
        start += len;
    }

    row.rho = rho_sum / static_cast<double>(gop_count);
    row.bcr /= static_cast<double>(seq.size());
    double ssim_sum = 0.0, ms_sum = 0.0, psnr_sum = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        ssim_sum += ssim(seq[i], received[i]);
        ms_sum += ms_ssim(seq[i], received[i]);
        double p = psnr(seq[i], received[i]);
        psnr_sum += std::isfinite(p) ? p : 100.0;  // cap identical frames at 100 dB
    }
    row.mean_ssim = ssim_sum / static_cast<double>(seq.size());
    row.mean_ms_ssim = ms_sum / static_cast<double>(seq.size());
    row.mean_psnr = psnr_sum / static_cast<double>(seq.size());
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return {std::move(received), std::move(row)};
}

// ---------------------------------------------------------------------------
// Sweeps and reporting.
// ---------------------------------------------------------------------------

inline std::string csv_header() {
    return "gamma_db,trial,rho,M,repeats,bcr,payload_bits,transmitted_bits,bit_errors,crc_ok,"
           "mean_ssim,mean_ms_ssim,mean_psnr";
}

inline std::string csv_row(const ReportRow& r) {
    std::ostringstream os;
    os.precision(12);
    os << r.gamma_db << ',' << r.trial << ',' << r.rho << ',' << r.m_keyframes << ','
       << r.repeats << ',' << r.bcr << ',' << r.payload_bits << ',' << r.transmitted_bits << ','
       << r.bit_errors << ',' << (r.crc_ok ? 1 : 0) << ',' << r.mean_ssim << ','
       << r.mean_ms_ssim << ',' << r.mean_psnr;
    return os.str();
}

/// One row per (SNR, trial), trial seeds derived from the base seed.
inline std::vector<ReportRow> sweep(const VideoSequence& seq, const ExperimentConfig& cfg,
                                    const Codebook& cb, const RateModel& model,
                                    const std::vector<double>& snr_list_db, int trials) {
    if (snr_list_db.empty()) throw EmptyInput("empty SNR list");
    if (trials < 1) throw BadConfig("trials must be >= 1");
    std::vector<ReportRow> rows;
    for (double snr : snr_list_db)
        for (int trial = 0; trial < trials; ++trial) {
            ExperimentConfig c = cfg;
            c.channel.snr_db = snr;
            std::uint64_t h = fnv1a64(&snr, sizeof(snr));
            h = fnv1a64(&trial, sizeof(trial), h);
            c.seed = cfg.seed ^ h;
            auto [rec, row] = transmit_video(seq, c, cb, model);
            row.trial = trial;
            rows.push_back(std::move(row));
        }
    return rows;
}

// ---------------------------------------------------------------------------
// Config file: one "key = value" pair per line, '#' comments. Unknown keys
// are rejected so typos fail loudly.
// ---------------------------------------------------------------------------

inline void apply_config_pair(ExperimentConfig& cfg, const std::string& key,
                              const std::string& value) {
    auto as_int = [&] { return std::stoi(value); };
    auto as_double = [&] { return std::stod(value); };
    if (key == "video") cfg.video_path = value;
    else if (key == "width") cfg.width = as_int();
    else if (key == "height") cfg.height = as_int();
    else if (key == "patch") cfg.vq.patch = as_int();
    else if (key == "feature_dim") cfg.vq.dim = as_int();
    else if (key == "codebook_size") cfg.vq.codebook_size = as_int();
    else if (key == "transform") {
        if (value == "identity_patch") cfg.vq.transform = PatchTransform::identity_patch;
        else if (value == "dct_patch") cfg.vq.transform = PatchTransform::dct_patch;
        else throw BadConfig("unknown transform: " + value);
    } else if (key == "interpolator") {
        if (value == "hold") cfg.interp.variant = InterpVariant::hold;
        else if (value == "linear_blend") cfg.interp.variant = InterpVariant::linear_blend;
        else if (value == "block_flow") cfg.interp.variant = InterpVariant::block_flow;
        else throw BadConfig("unknown interpolator: " + value);
    } else if (key == "block_size") cfg.interp.block_size = as_int();
    else if (key == "search_range") cfg.interp.search_range = as_int();
    else if (key == "metric") {
        if (value == "one_minus_ssim") cfg.metric = ImportanceMetric::one_minus_ssim;
        else if (value == "mse") cfg.metric = ImportanceMetric::mse;
        else throw BadConfig("unknown metric: " + value);
    } else if (key == "codebook") cfg.codebook_path = value;
    else if (key == "rate_model") cfg.rate_model_path = value;
    else if (key == "eta") cfg.eta = as_double();
    else if (key == "modulation") {
        if (value == "qpsk") cfg.modulation = phy::ModulationKind::QPSK;
        else if (value == "16qam") cfg.modulation = phy::ModulationKind::QAM16;
        else throw BadConfig("unknown modulation: " + value);
    } else if (key == "channel") {
        if (value == "bypass") cfg.channel.variant = ChannelVariant::bypass;
        else if (value == "awgn") cfg.channel.variant = ChannelVariant::awgn;
        else if (value == "multipath") cfg.channel.variant = ChannelVariant::multipath;
        else throw BadConfig("unknown channel: " + value);
    } else if (key == "snr_db") cfg.channel.snr_db = as_double();
    else if (key == "tap_delays" || key == "tap_powers_db") {
        std::istringstream is(value);
        if (key == "tap_delays") {
            cfg.channel.tap_delays.clear();
            int v;
            while (is >> v) cfg.channel.tap_delays.push_back(v);
        } else {
            cfg.channel.tap_powers_db.clear();
            double v;
            while (is >> v) cfg.channel.tap_powers_db.push_back(v);
        }
    } else if (key == "rho_ref") cfg.rho_ref = as_double();
    else if (key == "retransmit") cfg.retransmit = (value == "1" || value == "true");
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "gop") cfg.gop = as_int();
    else if (key == "report") cfg.report_path = value;
    else throw BadConfig("unknown config key: " + key);
}

inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        apply_config_pair(cfg, key, value);
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Deterministic synthetic test corpus: a moving bright square over a drifting
// gradient background, so interpolation and motion estimation have structure
// to work with.
// ---------------------------------------------------------------------------

inline VideoSequence make_synthetic_sequence(std::size_t n, int width, int height,
                                             std::uint64_t seed) {
    if (n < 2) throw InsufficientFrames("synthetic sequence needs >= 2 frames");
    GaussianRng rng(seed);
    int sq = std::max(4, width / 4);
    double x0 = static_cast<double>(rng.below(static_cast<std::uint64_t>(width - sq)));
    double y0 = static_cast<double>(rng.below(static_cast<std::uint64_t>(height - sq)));
    double vx = 1.0 + static_cast<double>(rng.below(3));
    double vy = 1.0 + static_cast<double>(rng.below(2));
    int phase = static_cast<int>(rng.below(64));

    VideoSequence seq;
    for (std::size_t t = 0; t < n; ++t) {
        Frame f(width, height);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                int g = (x * 2 + y + phase + static_cast<int>(t) * 3) & 0xFF;
                f.at(0, y, x) = static_cast<std::uint8_t>(g);
                f.at(1, y, x) = static_cast<std::uint8_t>(255 - g);
                f.at(2, y, x) = static_cast<std::uint8_t>((g * 3) & 0xFF);
            }
        int sx = static_cast<int>(x0 + vx * static_cast<double>(t)) % (width - sq);
        int sy = static_cast<int>(y0 + vy * static_cast<double>(t)) % (height - sq);
        if (sx < 0) sx += width - sq;
        if (sy < 0) sy += height - sq;
        for (int y = sy; y < sy + sq; ++y)
            for (int x = sx; x < sx + sq; ++x) {
                f.at(0, y, x) = 230;
                f.at(1, y, x) = 40;
                f.at(2, y, x) = 40;
            }
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

}  // namespace vqvsc
