#pragma once

#include <complex>
#include <vector>

#include "vqvsc/common.hpp"

namespace vqvsc {

using cplx = std::complex<double>;

enum class ChannelVariant { bypass, awgn, multipath };

struct ChannelModel {
    ChannelVariant variant = ChannelVariant::awgn;
    std::vector<int> tap_delays = {0, 1, 2};          // samples
    std::vector<double> tap_powers_db = {0.0, -3.0, -6.0};
    double snr_db = 10.0;
    std::uint64_t seed = 0;

    /// Average tap powers normalized to unit total.
    std::vector<double> normalized_powers() const {
        if (tap_delays.size() != tap_powers_db.size() || tap_delays.empty())
            throw BadProfile("tap delay/power lists mismatch");
        std::vector<double> lin(tap_powers_db.size());
        double total = 0.0;
        for (std::size_t i = 0; i < lin.size(); ++i) {
            lin[i] = std::pow(10.0, tap_powers_db[i] / 10.0);
            total += lin[i];
        }
        if (!(total > 0.0) || !std::isfinite(total)) throw BadProfile("unnormalizable profile");
        for (double& p : lin) p /= total;
        return lin;
    }
};

namespace detail {

inline double mean_power(const std::vector<cplx>& x) {
    double p = 0.0;
    for (const cplx& v : x) p += std::norm(v);
    return p / static_cast<double>(x.size());
}

}  // namespace detail

/// y = x + n with circular complex Gaussian noise at the requested SNR
/// relative to the measured input power. Deterministic given the seed.
inline std::vector<cplx> awgn(const std::vector<cplx>& x, double gamma_db, std::uint64_t seed) {
    if (x.empty()) throw EmptyInput("empty sample vector");
    double px = detail::mean_power(x);
    double sigma2 = px * std::pow(10.0, -gamma_db / 10.0);
    double s = std::sqrt(sigma2 / 2.0);
    GaussianRng rng(seed);
    std::vector<cplx> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = x[i] + cplx(s * rng.gaussian(), s * rng.gaussian());
    return y;
}

struct MultipathResult {
    std::vector<cplx> y;
    std::vector<cplx> taps;  // diagnostics only; never fed to the receiver
};

/// Block-fading tapped delay line: taps drawn once per call as independent
/// complex Gaussians with the profile powers, then convolution plus AWGN at
/// the configured SNR relative to the faded signal power.
inline MultipathResult multipath(const std::vector<cplx>& x, const ChannelModel& model) {
    if (x.empty()) throw EmptyInput("empty sample vector");
    auto powers = model.normalized_powers();
    GaussianRng rng(model.seed);

    std::vector<cplx> taps(powers.size());
    int max_delay = 0;
    for (std::size_t i = 0; i < taps.size(); ++i) {
        double s = std::sqrt(powers[i] / 2.0);
        taps[i] = cplx(s * rng.gaussian(), s * rng.gaussian());
        max_delay = std::max(max_delay, model.tap_delays[i]);
    }

    std::vector<cplx> faded(x.size() + static_cast<std::size_t>(max_delay), cplx(0.0, 0.0));
    for (std::size_t t = 0; t < taps.size(); ++t) {
        int d = model.tap_delays[t];
        for (std::size_t i = 0; i < x.size(); ++i)
            faded[i + static_cast<std::size_t>(d)] += taps[t] * x[i];
    }

    double pr = detail::mean_power(faded);
    double sigma2 = pr * std::pow(10.0, -model.snr_db / 10.0);
    double s = std::sqrt(sigma2 / 2.0);
    MultipathResult res;
    res.taps = std::move(taps);
    res.y.resize(faded.size());
    for (std::size_t i = 0; i < faded.size(); ++i)
        res.y[i] = faded[i] + cplx(s * rng.gaussian(), s * rng.gaussian());
    return res;
}

/// Apply the configured channel; bypass returns the input unchanged.
inline std::vector<cplx> apply_channel(const std::vector<cplx>& x, const ChannelModel& model) {
    switch (model.variant) {
        case ChannelVariant::bypass: return x;
        case ChannelVariant::awgn: return awgn(x, model.snr_db, model.seed);
        case ChannelVariant::multipath: return multipath(x, model).y;
    }
    throw BadConfig("unknown channel variant");
}

}  // namespace vqvsc
