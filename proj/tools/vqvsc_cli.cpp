// vqvsc command-line front end.
//
// Subcommands:
//   train-codebook  raw video -> codebook file (k-means over patch features)
//   fit-rho         (snr_db, rho) samples -> polynomial rate model file
//   encode          raw video -> container file (length-prefixed per GOP)
//   decode          container file -> raw video
//   transmit        single end-to-end run over the configured channel
//   sweep           CSV report over an SNR list
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vqvsc/pipeline.hpp"
#include "vqvsc/video_io.hpp"

namespace {

using namespace vqvsc;

// Config file first, then individual flag overrides in command-line order.
struct ConfigSource {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw BadConfig("cannot open config file: " + config_path);
            cfg = parse_config(f);
        }
        for (const auto& [key, value] : overrides) apply_config_pair(cfg, key, value);
        return cfg;
    }
};

void add_config_options(CLI::App* cmd, ConfigSource& src, bool with_seed = true) {
    cmd->add_option("--config", src.config_path, "key = value config file");
    // One flag per config key; values are parsed by the same code path as the
    // config file, so flags and file entries behave identically.
    static const char* keys[] = {
        "video",       "width",       "height",     "patch",      "feature_dim",
        "codebook_size", "transform", "interpolator", "block_size", "search_range",
        "metric",      "codebook",    "rate_model", "eta",        "modulation",
        "channel",     "snr_db",      "tap_delays", "tap_powers_db", "rho_ref",
        "retransmit",  "seed",        "gop",        "report",
    };
    for (const char* key : keys) {
        std::string k = key;
        if (!with_seed && k == "seed") continue;  // transmit/sweep own --seed
        cmd->add_option_function<std::string>(
            "--" + k, [&src, k](const std::string& v) { src.overrides.emplace_back(k, v); },
            "override config key '" + k + "'");
    }
}

VideoSequence load_video(const ExperimentConfig& cfg) {
    if (cfg.video_path.empty()) throw BadConfig("no input video (set 'video')");
    std::ifstream f(cfg.video_path, std::ios::binary);
    if (!f) throw BadConfig("cannot open video: " + cfg.video_path);
    return read_raw_video(f, cfg.width, cfg.height);
}

Codebook load_codebook_for(const ExperimentConfig& cfg) {
    if (cfg.codebook_path.empty()) throw BadConfig("no codebook file (set 'codebook')");
    std::ifstream f(cfg.codebook_path);
    if (!f) throw BadConfig("cannot open codebook: " + cfg.codebook_path);
    return load_codebook(f);
}

RateModel load_model_for(const ExperimentConfig& cfg) {
    if (cfg.rate_model_path.empty()) throw BadConfig("no rate model file (set 'rate_model')");
    std::ifstream f(cfg.rate_model_path);
    if (!f) throw BadConfig("cannot open rate model: " + cfg.rate_model_path);
    return load_rate_model(f);
}

void write_report(const ExperimentConfig& cfg, const std::vector<ReportRow>& rows) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!cfg.report_path.empty()) {
        file.open(cfg.report_path);
        if (!file) throw BadConfig("cannot open report file: " + cfg.report_path);
        out = &file;
    }
    *out << csv_header() << "\n";
    for (const auto& r : rows) *out << csv_row(r) << "\n";
}

// Container files hold one container per GOP, each prefixed by a 4-byte
// big-endian byte count so GOP boundaries survive concatenation.
void write_containers(const std::vector<std::vector<std::uint8_t>>& containers,
                      const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw BadConfig("cannot open output container file: " + path);
    for (const auto& c : containers) {
        std::uint8_t len[4] = {static_cast<std::uint8_t>(c.size() >> 24),
                               static_cast<std::uint8_t>(c.size() >> 16),
                               static_cast<std::uint8_t>(c.size() >> 8),
                               static_cast<std::uint8_t>(c.size())};
        f.write(reinterpret_cast<const char*>(len), 4);
        f.write(reinterpret_cast<const char*>(c.data()), static_cast<long>(c.size()));
    }
}

std::vector<std::vector<std::uint8_t>> read_containers(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw BadConfig("cannot open container file: " + path);
    std::vector<std::vector<std::uint8_t>> out;
    for (;;) {
        std::uint8_t len[4];
        f.read(reinterpret_cast<char*>(len), 4);
        if (f.gcount() == 0) break;
        if (f.gcount() != 4) throw Truncated("truncated container length prefix");
        std::size_t n = (static_cast<std::size_t>(len[0]) << 24) |
                        (static_cast<std::size_t>(len[1]) << 16) |
                        (static_cast<std::size_t>(len[2]) << 8) | len[3];
        std::vector<std::uint8_t> c(n);
        f.read(reinterpret_cast<char*>(c.data()), static_cast<long>(n));
        if (static_cast<std::size_t>(f.gcount()) != n) throw Truncated("truncated container");
        out.push_back(std::move(c));
    }
    if (out.empty()) throw EmptyInput("container file holds no containers");
    return out;
}

std::vector<double> parse_snr_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream is(csv);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw BadConfig("empty SNR list");
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"VQ video semantic communication simulator"};
    app.require_subcommand(1);

    // train-codebook
    ConfigSource train_src;
    std::string train_out;
    int train_iters = 100;
    std::uint64_t train_seed = 0;
    auto* train = app.add_subcommand("train-codebook",
                                     "learn a codebook from a raw video's patch features");
    add_config_options(train, train_src);
    train->add_option("--output", train_out, "codebook file to write")->required();
    train->add_option("--max-iters", train_iters, "Lloyd iteration cap");
    train->add_option("--train-seed", train_seed, "k-means RNG seed");

    // fit-rho
    std::string fit_samples, fit_out;
    int fit_degree = 1;
    std::string fit_reg = "none";
    double fit_upsilon = 0.0;
    auto* fit = app.add_subcommand("fit-rho",
                                   "fit the SNR -> key-frame-ratio polynomial model");
    fit->add_option("--samples", fit_samples,
                    "text file: one 'snr_db rho' pair per line")->required();
    fit->add_option("--output", fit_out, "rate model file to write")->required();
    fit->add_option("--degree", fit_degree, "polynomial degree in ln(snr)");
    fit->add_option("--reg", fit_reg, "regularization: none, L1 or L2");
    fit->add_option("--upsilon", fit_upsilon, "regularization weight");

    // encode / decode
    ConfigSource enc_src;
    std::string enc_out;
    auto* enc = app.add_subcommand("encode", "compress a raw video into container files");
    add_config_options(enc, enc_src);
    enc->add_option("--output", enc_out, "container file to write")->required();

    ConfigSource dec_src;
    std::string dec_in, dec_out;
    auto* dec = app.add_subcommand("decode", "reconstruct a raw video from container files");
    add_config_options(dec, dec_src);
    dec->add_option("--input", dec_in, "container file to read")->required();
    dec->add_option("--output", dec_out, "raw video file to write")->required();

    // transmit / sweep
    ConfigSource tx_src;
    std::string tx_out;
    std::uint64_t tx_seed = 0;
    auto* tx = app.add_subcommand("transmit", "one end-to-end run over the channel");
    add_config_options(tx, tx_src, false);
    auto* tx_seed_opt = tx->add_option("--seed", tx_seed, "run seed")->required();
    tx->add_option("--received", tx_out, "write the received video here");

    ConfigSource sw_src;
    std::string sw_snrs = "0,5,10,15,20";
    int sw_trials = 1;
    std::uint64_t sw_seed = 0;
    auto* sw = app.add_subcommand("sweep", "CSV report over an SNR list");
    add_config_options(sw, sw_src, false);
    auto* sw_seed_opt = sw->add_option("--seed", sw_seed, "base seed")->required();
    sw->add_option("--snrs", sw_snrs, "comma-separated SNR list in dB");
    sw->add_option("--trials", sw_trials, "trials per SNR");

    CLI11_PARSE(app, argc, argv);

    if (train->parsed()) {
        auto cfg = train_src.resolve();
        auto seq = load_video(cfg);
        std::vector<FeatureTensor> samples;
        for (const auto& f : seq.frames) samples.push_back(extract_features(f, cfg.vq));
        auto cb = train_codebook(samples, cfg.vq.codebook_size, train_seed, train_iters);
        std::ofstream out(train_out);
        if (!out) throw BadConfig("cannot open output: " + train_out);
        save_codebook(cb, out);
        std::cout << "codebook: L=" << cb.size << " d=" << cb.dim << " id=" << cb.id << "\n";
        return 0;
    }

    if (fit->parsed()) {
        std::ifstream in(fit_samples);
        if (!in) throw BadConfig("cannot open samples file: " + fit_samples);
        std::vector<std::pair<double, double>> samples;
        double snr_db, rho;
        while (in >> snr_db >> rho)
            samples.emplace_back(std::pow(10.0, snr_db / 10.0), rho);
        auto model = fit_rate_model(samples, fit_degree, reg_from_string(fit_reg), fit_upsilon);
        std::ofstream out(fit_out);
        if (!out) throw BadConfig("cannot open output: " + fit_out);
        save_rate_model(model, out);
        std::cout << "rate model: degree=" << model.degree << " from " << samples.size()
                  << " samples\n";
        return 0;
    }

    if (enc->parsed()) {
        auto cfg = enc_src.resolve();
        auto seq = load_video(cfg);
        auto cb = load_codebook_for(cfg);
        auto model = load_model_for(cfg);
        std::vector<std::vector<std::uint8_t>> containers;
        std::size_t start = 0;
        while (start < seq.size()) {
            std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(cfg.gop),
                                                    seq.size() - start);
            if (seq.size() - start - len == 1) ++len;
            VideoSequence gop;
            gop.frames.assign(seq.frames.begin() + static_cast<long>(start),
                              seq.frames.begin() + static_cast<long>(start + len));
            containers.push_back(encode_gop(gop, cfg, cb, model).container.bytes);
            start += len;
        }
        write_containers(containers, enc_out);
        std::cout << "wrote " << containers.size() << " container(s) for " << seq.size()
                  << " frames\n";
        return 0;
    }

    if (dec->parsed()) {
        auto cfg = dec_src.resolve();
        auto cb = load_codebook_for(cfg);
        VideoSequence out;
        for (const auto& c : read_containers(dec_in)) {
            auto uc = unpack(c);
            if (uc.header.codebook_id != cb.id)
                throw BadConfig("codebook id mismatch with container");
            auto rec = decode_gop(uc, cfg, cb);
            out.frames.insert(out.frames.end(), rec.frames.begin(), rec.frames.end());
        }
        std::ofstream f(dec_out, std::ios::binary);
        if (!f) throw BadConfig("cannot open output: " + dec_out);
        write_raw_video(out, f);
        std::cout << "decoded " << out.size() << " frames\n";
        return 0;
    }

    if (tx->parsed()) {
        auto cfg = tx_src.resolve();
        if (tx_seed_opt->count()) cfg.seed = tx_seed;
        auto seq = load_video(cfg);
        auto cb = load_codebook_for(cfg);
        auto model = load_model_for(cfg);
        auto [received, row] = transmit_video(seq, cfg, cb, model);
        write_report(cfg, {row});
        if (!tx_out.empty()) {
            std::ofstream f(tx_out, std::ios::binary);
            if (!f) throw BadConfig("cannot open output: " + tx_out);
            write_raw_video(received, f);
        }
        return 0;
    }

    if (sw->parsed()) {
        auto cfg = sw_src.resolve();
        if (sw_seed_opt->count()) cfg.seed = sw_seed;
        auto seq = load_video(cfg);
        auto cb = load_codebook_for(cfg);
        auto model = load_model_for(cfg);
        auto rows = sweep(seq, cfg, cb, model, parse_snr_list(sw_snrs), sw_trials);
        write_report(cfg, rows);
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
