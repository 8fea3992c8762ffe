#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "fracdim/time_series.hpp"

namespace fracdim {

// Truncation threshold for the Weierstrass series: terms are kept until
// the coefficient a^n drops below this.
inline constexpr double kWeierstrassTailEpsilon = 1e-6;

struct WeierstrassParams {
    double amplitude_ratio = 0.5;      // a in (0,1)
    double frequency_ratio = 3.0;      // b > 1, with a*b > 1
    int n_terms = 0;                   // series terms n = 0 .. n_terms-1
    double theoretical_dimension = 0.0; // 2 + ln(a)/ln(b)
};

namespace detail {

inline std::size_t sample_count(double sample_rate, double duration) {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw std::invalid_argument("sample rate must be positive and finite");
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw std::invalid_argument("duration must be positive and finite");
    const double n = std::round(duration * sample_rate);
    if (n < 2.0)
        throw std::invalid_argument("duration * sample_rate must be at least 2 samples");
    if (n > 1e9)
        throw std::invalid_argument("requested signal is unreasonably long");
    return static_cast<std::size_t>(n);
}

inline void check_tone_args(double freq, double sample_rate, double amplitude) {
    if (!(freq > 0.0) || !std::isfinite(freq))
        throw std::invalid_argument("frequency must be positive and finite");
    if (freq >= sample_rate / 2.0)
        throw std::invalid_argument("frequency must be below the Nyquist rate");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw std::invalid_argument("amplitude must be positive and finite");
}

} // namespace detail

inline TimeSeries gen_sine(double freq, double sample_rate, double duration,
                           double amplitude = 1.0) {
    const std::size_t n = detail::sample_count(sample_rate, duration);
    detail::check_tone_args(freq, sample_rate, amplitude);
    TimeSeries ts{{}, sample_rate};
    ts.samples.resize(n);
    const double w = 2.0 * M_PI * freq / sample_rate;
    for (std::size_t i = 0; i < n; ++i)
        ts.samples[i] = amplitude * std::sin(w * static_cast<double>(i));
    return ts;
}

inline TimeSeries gen_square(double freq, double sample_rate, double duration,
                             double amplitude = 1.0) {
    const std::size_t n = detail::sample_count(sample_rate, duration);
    detail::check_tone_args(freq, sample_rate, amplitude);
    TimeSeries ts{{}, sample_rate};
    ts.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double phase = std::fmod(freq * static_cast<double>(i) / sample_rate, 1.0);
        ts.samples[i] = (phase < 0.5) ? amplitude : -amplitude;
    }
    return ts;
}

inline TimeSeries gen_triangle(double freq, double sample_rate, double duration,
                               double amplitude = 1.0) {
    const std::size_t n = detail::sample_count(sample_rate, duration);
    detail::check_tone_args(freq, sample_rate, amplitude);
    TimeSeries ts{{}, sample_rate};
    ts.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = std::fmod(freq * static_cast<double>(i) / sample_rate, 1.0);
        double v;
        if (p < 0.25)
            v = 4.0 * p;
        else if (p < 0.75)
            v = 2.0 - 4.0 * p;
        else
            v = 4.0 * p - 4.0;
        ts.samples[i] = amplitude * v;
    }
    return ts;
}

// Derives the term count from the tail threshold and the theoretical
// dimension 2 + ln(a)/ln(b). Requires 0 < a < 1 < b and a*b > 1.
inline WeierstrassParams weierstrass_params(double a, double b) {
    if (!(a > 0.0) || !(a < 1.0) || !std::isfinite(a))
        throw std::invalid_argument("amplitude ratio must satisfy 0 < a < 1");
    if (!(b > 1.0) || !std::isfinite(b))
        throw std::invalid_argument("frequency ratio must satisfy b > 1");
    if (!(a * b > 1.0))
        throw std::invalid_argument("a * b must exceed 1");
    WeierstrassParams p;
    p.amplitude_ratio = a;
    p.frequency_ratio = b;
    p.n_terms = static_cast<int>(std::ceil(std::log(kWeierstrassTailEpsilon) / std::log(a)));
    if (p.n_terms < 1) p.n_terms = 1;
    p.theoretical_dimension = 2.0 + std::log(a) / std::log(b);
    return p;
}

// Picks a = b^(d-2) so the theoretical dimension is d. Requires 1 < d < 2.
inline WeierstrassParams weierstrass_params_for_dimension(double d, double b = 3.0) {
    if (!(d > 1.0) || !(d < 2.0))
        throw std::invalid_argument("target dimension must lie in (1, 2)");
    return weierstrass_params(std::pow(b, d - 2.0), b);
}

inline TimeSeries gen_weierstrass(const WeierstrassParams& p, double sample_rate,
                                  double duration) {
    const std::size_t n = detail::sample_count(sample_rate, duration);
    if (!(p.amplitude_ratio > 0.0) || !(p.amplitude_ratio < 1.0))
        throw std::invalid_argument("amplitude ratio must satisfy 0 < a < 1");
    if (!(p.frequency_ratio > 1.0))
        throw std::invalid_argument("frequency ratio must satisfy b > 1");
    if (p.n_terms < 1)
        throw std::invalid_argument("n_terms must be at least 1");
    TimeSeries ts{{}, sample_rate};
    ts.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        double acc = 0.0;
        double an = 1.0;
        double bn = 1.0;
        for (int term = 0; term < p.n_terms; ++term) {
            acc += an * std::cos(bn * M_PI * t);
            an *= p.amplitude_ratio;
            bn *= p.frequency_ratio;
        }
        ts.samples[i] = acc;
    }
    return ts;
}

// Uniform white noise in [-amplitude, amplitude). The exact sample stream
// is part of the contract so runs are reproducible across platforms:
// mt19937_64 seeded with `seed`, u = (x >> 11) * 2^-53, sample = amplitude * (2u - 1).
inline TimeSeries gen_white_noise(std::uint64_t seed, double sample_rate,
                                  double duration, double amplitude = 1.0) {
    const std::size_t n = detail::sample_count(sample_rate, duration);
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw std::invalid_argument("amplitude must be positive and finite");
    TimeSeries ts{{}, sample_rate};
    ts.samples.resize(n);
    std::mt19937_64 rng(seed);
    constexpr double kScale = 1.0 / 9007199254740992.0; // 2^-53
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(rng() >> 11) * kScale;
        ts.samples[i] = amplitude * (2.0 * u - 1.0);
    }
    return ts;
}

// X(i) = i. The canonical estimator check: every curve length at scale k
// is exactly (N-1)/k, so the fitted dimension is 1.
inline TimeSeries gen_ramp(std::size_t n, double sample_rate = 1.0) {
    if (n < 2)
        throw std::invalid_argument("ramp needs at least 2 samples");
    TimeSeries ts{{}, sample_rate};
    ts.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ts.samples[i] = static_cast<double>(i);
    return ts;
}

} // namespace fracdim
