#pragma once

// Core quantities for compute-and-forward equation selection over a
// 2-source real channel.  A relay observing y = h1*x1 + h2*x2 + z decodes
// the integer combination a1*s1 + a2*s2; with per-source powers P_l the
// effective channel is g_l = h_l * sqrt(P_l) and the computation rate is
//
//   R(g,a) = 1/2 * log2+( 1 / (|a|^2 - (a.g)^2/(1+|g|^2)) )
//
// The quadratic form in the denominator is a^T G a with
// G = I - g g^T / (1+|g|^2), so maximizing the rate over a is a shortest
// vector problem in the metric G.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace cmf {

using Rate = double;  // bits per channel use, always >= 0

struct SourcePowers {
    double p1 = 1.0;
    double p2 = 1.0;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Equal-power configuration at the given per-source SNR in dB.
inline SourcePowers powers_from_snr_db(double snr_db) {
    double p = db_to_linear(snr_db);
    if (!std::isfinite(p) || p <= 0.0)
        throw std::invalid_argument("powers_from_snr_db: SNR out of range");
    return {p, p};
}

/// Fading magnitudes seen by one relay (h_l >= 0).
struct ChannelVector {
    double h1 = 0.0;
    double h2 = 0.0;
};

/// Power-scaled channel g_l = h_l * sqrt(P_l).
struct ScaledChannel {
    double g1 = 0.0;
    double g2 = 0.0;
    double norm_sq() const { return g1 * g1 + g2 * g2; }
};

inline ScaledChannel scaled_channel(const ChannelVector& h, const SourcePowers& p) {
    if (h.h1 < 0.0 || h.h2 < 0.0 || !std::isfinite(h.h1) || !std::isfinite(h.h2))
        throw std::invalid_argument("scaled_channel: magnitudes must be finite and >= 0");
    if (!(p.p1 > 0.0) || !(p.p2 > 0.0))
        throw std::invalid_argument("scaled_channel: powers must be positive");
    return {h.h1 * std::sqrt(p.p1), h.h2 * std::sqrt(p.p2)};
}

/// Equation coefficient vector a in Z^2.
struct Ecv {
    int a1 = 0;
    int a2 = 0;

    bool is_zero() const { return a1 == 0 && a2 == 0; }
    long long norm_sq() const {
        return static_cast<long long>(a1) * a1 + static_cast<long long>(a2) * a2;
    }
    friend bool operator==(const Ecv&, const Ecv&) = default;
    friend auto operator<=>(const Ecv&, const Ecv&) = default;
};

/// Canonical representative of {a, -a} scaled to gcd 1: divide by gcd(|a1|,|a2|),
/// then flip sign so the first nonzero component is positive.
/// (0,-3) -> (0,1), (-2,-4) -> (1,2), (3,-2) stays (3,-2).
inline Ecv canonicalize(const Ecv& a) {
    if (a.is_zero()) throw std::invalid_argument("canonicalize: zero vector");
    int g = std::gcd(std::abs(a.a1), std::abs(a.a2));
    int x = a.a1 / g, y = a.a2 / g;
    if (x < 0 || (x == 0 && y < 0)) { x = -x; y = -y; }
    return {x, y};
}

/// G = I - g g^T / (1 + |g|^2).  Symmetric positive definite with
/// eigenvalues 1 and 1/(1+|g|^2), det = 1/(1+|g|^2).
struct GramMatrix {
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;
};

inline GramMatrix gram_matrix(const ScaledChannel& g) {
    if (!std::isfinite(g.g1) || !std::isfinite(g.g2))
        throw std::invalid_argument("gram_matrix: channel must be finite");
    double s = 1.0 + g.norm_sq();
    return {1.0 - g.g1 * g.g1 / s, -g.g1 * g.g2 / s,
            -g.g1 * g.g2 / s, 1.0 - g.g2 * g.g2 / s};
}

/// a^T G a = |a|^2 - (a.g)^2/(1+|g|^2).  Strictly positive for a != 0.
inline double quad_form(const Ecv& a, const GramMatrix& G) {
    double x = a.a1, y = a.a2;
    return x * x * G.m11 + x * y * (G.m12 + G.m21) + y * y * G.m22;
}

/// R(g,a) = 1/2 * max(0, -log2(a^T G a)).  Zero once |a|^2 >= 1 + |g|^2.
inline Rate computation_rate(const ScaledChannel& g, const Ecv& a) {
    if (a.is_zero()) throw std::invalid_argument("computation_rate: zero ECV");
    double q = quad_form(a, gram_matrix(g));
    return 0.5 * std::max(0.0, -std::log2(q));
}

}  // namespace cmf
