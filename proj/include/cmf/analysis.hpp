#pragma once

// Exact outage analysis for the simplified selection rule.
//
// Channels g_l = h_l*sqrt(P_l) with Rayleigh h of unit second moment have
// density f(g) = (2g/P) exp(-g^2/P) per axis.  For a candidate set
// {e_1..e_K} the quadrant splits into selection regions D_k (e_k wins the
// quad-form comparison) and outage subsets O_k = {quad(e_k) > 2^(-2*Rt)}.
// Every probability below is a 2-D integral of the density against region
// indicators evaluated by direct quad-form comparison; one adaptive pass
// integrates all selection and outage masses at once.
//
// Destination view for M relays: relays selecting e_k form group T_k whose
// best rate is R'_k (empty group: 0).  Outage is "second largest R'_k below
// Rt"; conditioning on the multinomial group sizes gives
//
//   P_out = sum over compositions (n_1..n_K) of M of
//           M!/(n_1!..n_K!) * prod_k p_k^n_k *
//           [ prod_k o_k^n_k + sum_k (1 - o_k^n_k) prod_{j!=k} o_j^n_j ]
//
// with p_k the selection probability, o_k the conditional outage of e_k and
// the convention x^0 = 1.  Compositions that put all M relays on one ECV
// make the bracket 1 (rank failure), so P_fail = sum_k p_k^M is a lower
// bound recovered exactly as Rt -> 0+.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"
#include "search.hpp"

namespace cmf {

/// Joint density of the scaled channel pair under unit-second-moment
/// Rayleigh fading.  tail_eps sets the quadrant truncation for quadrature:
/// the axis bound sqrt(P*ln(1/eps)) leaves eps of mass per axis outside.
struct FadingModel {
    SourcePowers powers;
    double tail_eps = 1e-12;

    static double axis_density(double g, double p) {
        return (2.0 * g / p) * std::exp(-g * g / p);
    }
    double density(double g1, double g2) const {
        return axis_density(g1, powers.p1) * axis_density(g2, powers.p2);
    }
    double trunc1() const { return std::sqrt(powers.p1 * std::log(1.0 / tail_eps)); }
    double trunc2() const { return std::sqrt(powers.p2 * std::log(1.0 / tail_eps)); }
};

struct AnalysisParams {
    double abs_tol = 1e-5;  // target absolute error per probability
    int outer_panels = 32;
    int inner_panels = 16;
    int outer_depth = 24;
    int inner_depth = 44;
};

/// Per-candidate selection and outage probabilities for one configuration.
struct SelectionProfile {
    std::vector<Ecv> ecvs;
    std::vector<double> probs;        // P(D_k)
    std::vector<double> outage_mass;  // P(O_k intersect D_k)
    std::vector<double> cond_outage;  // outage_mass / probs, 1 when degenerate
    std::vector<char> degenerate;     // selection probability below 1e-12
    double target_rate = 0.0;
    double err_bound = 0.0;  // absolute quadrature error bound per component
};

namespace detail {

inline void check_model(const FadingModel& fm) {
    if (!(fm.powers.p1 > 0.0) || !(fm.powers.p2 > 0.0))
        throw std::invalid_argument("analysis: powers must be positive");
    if (!(fm.tail_eps > 0.0) || fm.tail_eps >= 1.0)
        throw std::invalid_argument("analysis: tail_eps must be in (0,1)");
}

}  // namespace detail

/// One batched quadrature pass over the truncated quadrant.  with_outage
/// doubles the component count to collect the O_k intersect D_k masses.
inline SelectionProfile build_selection_profile(const CandidateSet& set, const FadingModel& fm,
                                                double target_rate,
                                                const AnalysisParams& prm = {},
                                                bool with_outage = true) {
    detail::check_model(fm);
    if (target_rate < 0.0)
        throw std::invalid_argument("build_selection_profile: target rate must be >= 0");
    size_t K = set.size();
    size_t n = with_outage ? 2 * K : K;
    if (n > kQuadMaxComponents)
        throw std::invalid_argument("build_selection_profile: candidate set too large");

    double tau = std::exp2(-2.0 * target_rate);
    double x1 = fm.trunc1(), x2 = fm.trunc2();
    QuadOptions inner_opt{prm.abs_tol * 1e-4, prm.inner_depth, prm.inner_panels};
    QuadOptions outer_opt{prm.abs_tol * 0.4, prm.outer_depth, prm.outer_panels};

    double worst_inner_err = 0.0;
    auto outer_f = [&](double g1) {
        auto inner_f = [&](double g2) {
            GramMatrix G = gram_matrix({g1, g2});
            size_t sel = 0;
            double best_q = quad_form(set.ecvs[0], G);
            for (size_t k = 1; k < K; ++k) {
                double q = quad_form(set.ecvs[k], G);
                if (q < best_q) { best_q = q; sel = k; }
            }
            QVec r = QVec::zero(n);
            double dens = fm.density(g1, g2);
            r[sel] = dens;
            if (with_outage && best_q > tau) r[K + sel] = dens;
            return r;
        };
        QuadOutcome inner = adaptive_simpson(inner_f, 0.0, x2, inner_opt);
        worst_inner_err = std::max(worst_inner_err, inner.err);
        return inner.value;
    };
    QuadOutcome outer = adaptive_simpson(outer_f, 0.0, x1, outer_opt);

    SelectionProfile profile;
    profile.ecvs = set.ecvs;
    profile.target_rate = target_rate;
    profile.err_bound = outer.err + x1 * worst_inner_err;
    if (profile.err_bound > prm.abs_tol)
        throw QuadratureError("selection profile quadrature missed its target accuracy",
                              profile.err_bound);
    profile.probs.resize(K);
    profile.outage_mass.assign(K, 0.0);
    profile.cond_outage.assign(K, 0.0);
    profile.degenerate.assign(K, 0);
    for (size_t k = 0; k < K; ++k) {
        profile.probs[k] = outer.value[k];
        if (with_outage) profile.outage_mass[k] = outer.value[K + k];
        if (profile.probs[k] < 1e-12) {
            profile.degenerate[k] = 1;
            profile.cond_outage[k] = 1.0;
        } else if (with_outage) {
            profile.cond_outage[k] =
                std::min(1.0, profile.outage_mass[k] / profile.probs[k]);
        }
    }
    return profile;
}

/// P(e_k selected), k is a 0-based index into the set.
inline double selection_probability(const CandidateSet& set, size_t k, const FadingModel& fm,
                                    const AnalysisParams& prm = {}) {
    if (k >= set.size()) throw std::invalid_argument("selection_probability: bad index");
    return build_selection_profile(set, fm, 0.0, prm, false).probs[k];
}

/// P(outage | e_k selected); degenerates to 1 when P(e_k selected) < 1e-12.
inline double conditional_outage(const CandidateSet& set, size_t k, const FadingModel& fm,
                                 double target_rate, const AnalysisParams& prm = {}) {
    if (k >= set.size()) throw std::invalid_argument("conditional_outage: bad index");
    return build_selection_profile(set, fm, target_rate, prm).cond_outage[k];
}

inline double relay_outage_from_profile(const SelectionProfile& p) {
    double sum = 0.0;
    for (double m : p.outage_mass) sum += m;
    return sum;
}

/// P(selected equation's rate < Rt) for a single relay.
inline double relay_outage(const CandidateSet& set, const FadingModel& fm, double target_rate,
                           const AnalysisParams& prm = {}) {
    return relay_outage_from_profile(build_selection_profile(set, fm, target_rate, prm));
}

inline double rank_failure_from_profile(const SelectionProfile& p, int m_relays) {
    if (m_relays < 2) throw std::invalid_argument("rank failure: need m_relays >= 2");
    double sum = 0.0;
    for (double pk : p.probs) sum += std::pow(pk, m_relays);
    return sum;
}

/// P(all M relays select the same ECV).
inline double rank_failure_probability(const CandidateSet& set, const FadingModel& fm,
                                       int m_relays, const AnalysisParams& prm = {}) {
    return rank_failure_from_profile(
        build_selection_profile(set, fm, 0.0, prm, false), m_relays);
}

/// Weak compositions of total into parts, colexicographic ascending:
/// (total,0,..), .., (0,..,total).  Guarded against blowup.
inline std::vector<std::vector<int>> enumerate_compositions(int total, int parts) {
    if (total < 0 || parts < 1)
        throw std::invalid_argument("enumerate_compositions: bad arguments");
    double count = 1.0;
    for (int i = 1; i < parts; ++i) count *= static_cast<double>(total + i) / i;
    if (count > 1e6)
        throw std::overflow_error("enumerate_compositions: more than 1e6 compositions");

    std::vector<std::vector<int>> out;
    std::vector<int> c(parts, 0);
    c[0] = total;
    for (;;) {
        out.push_back(c);
        int i = 0;
        while (i < parts && c[i] == 0) ++i;
        if (i == parts || i + 1 == parts) break;
        int t = c[i];
        c[i] = 0;
        c[i + 1] += 1;
        c[0] = t - 1;
    }
    return out;
}

namespace detail {

inline double multinomial(int m, const std::vector<int>& comp) {
    double c = 1.0;
    int rem = m;
    for (int nk : comp) {
        for (int i = 1; i <= nk; ++i) c *= static_cast<double>(rem - nk + i) / i;
        rem -= nk;
    }
    return c;
}

}  // namespace detail

inline double system_outage_from_profile(const SelectionProfile& p, int m_relays) {
    if (m_relays < 2) throw std::invalid_argument("system outage: need m_relays >= 2");
    size_t K = p.probs.size();
    double total = 0.0;
    for (const auto& comp : enumerate_compositions(m_relays, static_cast<int>(K))) {
        double w = detail::multinomial(m_relays, comp);
        for (size_t k = 0; k < K; ++k) w *= std::pow(p.probs[k], comp[k]);
        if (w == 0.0) continue;
        double all = 1.0;
        for (size_t k = 0; k < K; ++k) all *= std::pow(p.cond_outage[k], comp[k]);
        double bracket = all;
        for (size_t k = 0; k < K; ++k) {
            double rest = 1.0;
            for (size_t j = 0; j < K; ++j)
                if (j != k) rest *= std::pow(p.cond_outage[j], comp[j]);
            bracket += (1.0 - std::pow(p.cond_outage[k], comp[k])) * rest;
        }
        total += w * bracket;
    }
    return total;
}

/// P(second largest group rate < Rt) at the destination.
inline double system_outage(const CandidateSet& set, const FadingModel& fm, int m_relays,
                            double target_rate, const AnalysisParams& prm = {}) {
    return system_outage_from_profile(
        build_selection_profile(set, fm, target_rate, prm), m_relays);
}

/// Bundled analytic results for one (set, powers, M, Rt) configuration.
struct OutageReport {
    int m_relays = 0;
    double target_rate = 0.0;
    double relay_outage = 0.0;
    double rank_failure = 0.0;
    double system_outage = 0.0;
    SelectionProfile profile;
};

inline OutageReport build_outage_report(const CandidateSet& set, const FadingModel& fm,
                                        int m_relays, double target_rate,
                                        const AnalysisParams& prm = {}) {
    OutageReport r;
    r.m_relays = m_relays;
    r.target_rate = target_rate;
    r.profile = build_selection_profile(set, fm, target_rate, prm);
    r.relay_outage = relay_outage_from_profile(r.profile);
    r.rank_failure = rank_failure_from_profile(r.profile, m_relays);
    r.system_outage = system_outage_from_profile(r.profile, m_relays);
    return r;
}

}  // namespace cmf
