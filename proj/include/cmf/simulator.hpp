#pragma once

// Seeded Monte Carlo for the relay network.
//
// Per trial: draw complex fading for every relay, optionally corrupt the
// estimates (h_hat = |gamma + sigma_e*e| reusing the stored gamma), let each
// relay pick its ECV from the *estimated* channel, score it on the *true*
// channel, then apply the destination rule: group relays by canonical ECV,
// take each group's best realized rate, and declare outage when fewer than
// two distinct groups exist (rank failure) or the second best group rate
// falls below the target.
//
// Draw order inside a trial is fixed: first all fading pairs relay by relay,
// then, only when sigma_e^2 > 0, the estimation-noise pairs relay by relay.
// A zero-variance CEE run therefore consumes the identical stream as a run
// with estimation disabled and reproduces it bit for bit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "core.hpp"
#include "rng.hpp"
#include "search.hpp"

namespace cmf {

/// Complex fading coefficients for one relay; gains are their magnitudes,
/// Rayleigh with E[h^2] = 1.
struct RelayFading {
    std::complex<double> c1;
    std::complex<double> c2;
    ChannelVector magnitudes() const { return {std::abs(c1), std::abs(c2)}; }
};

/// Circularly symmetric complex normal with unit total variance.
inline std::complex<double> draw_unit_cn(SplitMix64& rng) {
    NormalPair z = standard_normal_pair(rng);
    return {z.z0 * 0.7071067811865476, z.z1 * 0.7071067811865476};
}

inline std::vector<RelayFading> draw_channels(SplitMix64& rng, int m_relays) {
    if (m_relays < 1) throw std::invalid_argument("draw_channels: need at least one relay");
    std::vector<RelayFading> v(m_relays);
    for (auto& f : v) {
        f.c1 = draw_unit_cn(rng);
        f.c2 = draw_unit_cn(rng);
    }
    return v;
}

/// Estimated magnitudes |gamma + sigma_e * e|.  sigma_e_sq = 0 returns the
/// true magnitudes without consuming randomness.
inline std::vector<ChannelVector> apply_cee(SplitMix64& rng, const std::vector<RelayFading>& ch,
                                            double sigma_e_sq) {
    if (sigma_e_sq < 0.0) throw std::invalid_argument("apply_cee: variance must be >= 0");
    std::vector<ChannelVector> out(ch.size());
    if (sigma_e_sq == 0.0) {
        for (size_t i = 0; i < ch.size(); ++i) out[i] = ch[i].magnitudes();
        return out;
    }
    double s = std::sqrt(sigma_e_sq);
    for (size_t i = 0; i < ch.size(); ++i) {
        std::complex<double> e1 = draw_unit_cn(rng);
        out[i].h1 = std::abs(ch[i].c1 + s * e1);
        std::complex<double> e2 = draw_unit_cn(rng);
        out[i].h2 = std::abs(ch[i].c2 + s * e2);
    }
    return out;
}

struct SimConfig {
    int m_relays = 2;
    SourcePowers powers{};
    double target_rate = 0.5;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    bool optimal = false;   // otherwise simplified rule with set_size candidates
    int set_size = 3;
    double cee_sigma_sq = 0.0;
    int threads = 1;
};

/// Solver inputs shared by every trial.  Simplified runs need the candidate
/// set; optimal runs need the region-distance table (sized generously, the
/// solver falls back to enumeration past its coverage).
struct SimContext {
    const GminTable* table = nullptr;
    const CandidateSet* set = nullptr;
};

struct TrialOutcome {
    bool outage = false;
    bool rank_failure = false;
    std::vector<RelayDecision> decisions;  // canonical ECV + realized rate per relay
};

/// Destination rule on realized rates.  Returns {outage, rank_failure}.
inline std::pair<bool, bool> destination_outage(const std::vector<RelayDecision>& decisions,
                                                double target_rate) {
    if (decisions.size() < 2)
        throw std::invalid_argument("destination_outage: need at least two relays");
    std::vector<Ecv> keys;
    std::vector<double> best;
    for (const auto& d : decisions) {
        size_t i = 0;
        while (i < keys.size() && !(keys[i] == d.ecv)) ++i;
        if (i == keys.size()) {
            keys.push_back(d.ecv);
            best.push_back(d.rate);
        } else {
            best[i] = std::max(best[i], d.rate);
        }
    }
    if (keys.size() < 2) return {true, true};
    double top1 = -1.0, top2 = -1.0;
    for (double r : best) {
        if (r > top1) { top2 = top1; top1 = r; }
        else if (r > top2) top2 = r;
    }
    return {top2 < target_rate, false};
}

namespace detail {

inline void check_sim(const SimConfig& cfg, const SimContext& ctx) {
    if (cfg.m_relays < 2) throw std::invalid_argument("simulate: need m_relays >= 2");
    if (cfg.trials < 1) throw std::invalid_argument("simulate: need trials >= 1");
    if (!(cfg.powers.p1 > 0.0) || !(cfg.powers.p2 > 0.0))
        throw std::invalid_argument("simulate: powers must be positive");
    if (cfg.target_rate < 0.0) throw std::invalid_argument("simulate: target rate must be >= 0");
    if (cfg.cee_sigma_sq < 0.0) throw std::invalid_argument("simulate: CEE variance must be >= 0");
    if (cfg.threads < 1) throw std::invalid_argument("simulate: threads must be >= 1");
    if (cfg.optimal) {
        if (ctx.table == nullptr) throw std::invalid_argument("simulate: optimal needs a table");
    } else if (ctx.set == nullptr) {
        throw std::invalid_argument("simulate: simplified rule needs a candidate set");
    }
}

struct Accum {
    std::uint64_t outage = 0;
    std::uint64_t rank_failure = 0;
    std::uint64_t relay_outage = 0;
    std::vector<std::pair<Ecv, std::uint64_t>> hist;  // small, linear probe

    void add_selection(const Ecv& e) {
        for (auto& [k, c] : hist)
            if (k == e) { ++c; return; }
        hist.emplace_back(e, 1);
    }
    void merge(const Accum& o) {
        outage += o.outage;
        rank_failure += o.rank_failure;
        relay_outage += o.relay_outage;
        for (const auto& [k, c] : o.hist) {
            bool found = false;
            for (auto& [k2, c2] : hist)
                if (k2 == k) { c2 += c; found = true; break; }
            if (!found) hist.emplace_back(k, c);
        }
    }
};

struct TrialScratch {
    std::vector<RelayFading> fading;
    std::vector<Ecv> keys;
    std::vector<double> best;
};

// Single implementation used by both the per-trial API and the batch runner.
inline void run_trial(const SimConfig& cfg, const SimContext& ctx, std::uint64_t index,
                      TrialScratch& scratch, Accum* acc, TrialOutcome* outcome) {
    SplitMix64 rng = trial_rng(cfg.seed, index);
    int m = cfg.m_relays;
    scratch.fading.resize(m);
    for (auto& f : scratch.fading) {
        f.c1 = draw_unit_cn(rng);
        f.c2 = draw_unit_cn(rng);
    }
    double se = cfg.cee_sigma_sq > 0.0 ? std::sqrt(cfg.cee_sigma_sq) : 0.0;

    scratch.keys.clear();
    scratch.best.clear();
    if (outcome) outcome->decisions.clear();

    std::uint64_t relay_out = 0;
    for (int r = 0; r < m; ++r) {
        ChannelVector h = scratch.fading[r].magnitudes();
        ChannelVector h_est = h;
        if (se > 0.0) {
            std::complex<double> e1 = draw_unit_cn(rng);
            h_est.h1 = std::abs(scratch.fading[r].c1 + se * e1);
            std::complex<double> e2 = draw_unit_cn(rng);
            h_est.h2 = std::abs(scratch.fading[r].c2 + se * e2);
        }
        ScaledChannel g_est = scaled_channel(h_est, cfg.powers);
        RelayDecision d = cfg.optimal ? solve_optimal(g_est, *ctx.table)
                                      : solve_simplified(g_est, *ctx.set);
        double realized = se > 0.0
                              ? computation_rate(scaled_channel(h, cfg.powers), d.ecv)
                              : d.rate;
        if (realized < cfg.target_rate) ++relay_out;
        if (acc) acc->add_selection(d.ecv);
        if (outcome) outcome->decisions.push_back({d.ecv, realized});

        size_t i = 0;
        while (i < scratch.keys.size() && !(scratch.keys[i] == d.ecv)) ++i;
        if (i == scratch.keys.size()) {
            scratch.keys.push_back(d.ecv);
            scratch.best.push_back(realized);
        } else {
            scratch.best[i] = std::max(scratch.best[i], realized);
        }
    }

    bool rank_fail = scratch.keys.size() < 2;
    bool outage = rank_fail;
    if (!rank_fail) {
        double top1 = -1.0, top2 = -1.0;
        for (double v : scratch.best) {
            if (v > top1) { top2 = top1; top1 = v; }
            else if (v > top2) top2 = v;
        }
        outage = top2 < cfg.target_rate;
    }
    if (acc) {
        acc->relay_outage += relay_out;
        if (outage) ++acc->outage;
        if (rank_fail) ++acc->rank_failure;
    }
    if (outcome) {
        outcome->outage = outage;
        outcome->rank_failure = rank_fail;
    }
}

}  // namespace detail

inline TrialOutcome simulate_trial(const SimConfig& cfg, const SimContext& ctx,
                                   std::uint64_t trial_index) {
    detail::check_sim(cfg, ctx);
    detail::TrialScratch scratch;
    TrialOutcome out;
    detail::run_trial(cfg, ctx, trial_index, scratch, nullptr, &out);
    return out;
}

struct OutageEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

struct MonteCarloResult {
    OutageEstimate outage;
    OutageEstimate rank_failure;
    OutageEstimate relay_outage;  // per relay decision, samples = trials*m
    std::vector<std::pair<Ecv, std::uint64_t>> selection_counts;  // sorted by ECV
    std::uint64_t trials = 0;
    int m_relays = 0;
};

inline MonteCarloResult run_monte_carlo(const SimConfig& cfg, const SimContext& ctx) {
    detail::check_sim(cfg, ctx);

    int threads = cfg.threads;
    std::vector<detail::Accum> parts(std::max(1, threads));
    if (threads <= 1) {
        detail::TrialScratch scratch;
        for (std::uint64_t t = 0; t < cfg.trials; ++t)
            detail::run_trial(cfg, ctx, t, scratch, &parts[0], nullptr);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = cfg.trials / threads, extra = cfg.trials % threads;
        std::uint64_t begin = 0;
        for (int i = 0; i < threads; ++i) {
            std::uint64_t end = begin + chunk + (static_cast<std::uint64_t>(i) < extra ? 1 : 0);
            pool.emplace_back([&, i, begin, end] {
                detail::TrialScratch scratch;
                for (std::uint64_t t = begin; t < end; ++t)
                    detail::run_trial(cfg, ctx, t, scratch, &parts[i], nullptr);
            });
            begin = end;
        }
        for (auto& th : pool) th.join();
        for (int i = 1; i < threads; ++i) parts[0].merge(parts[i]);
    }

    auto estimate = [](std::uint64_t count, std::uint64_t n) {
        double v = static_cast<double>(count) / static_cast<double>(n);
        return OutageEstimate{v, std::sqrt(v * (1.0 - v) / static_cast<double>(n)), n};
    };
    MonteCarloResult res;
    res.trials = cfg.trials;
    res.m_relays = cfg.m_relays;
    res.outage = estimate(parts[0].outage, cfg.trials);
    res.rank_failure = estimate(parts[0].rank_failure, cfg.trials);
    res.relay_outage = estimate(parts[0].relay_outage,
                                cfg.trials * static_cast<std::uint64_t>(cfg.m_relays));
    res.selection_counts = std::move(parts[0].hist);
    std::sort(res.selection_counts.begin(), res.selection_counts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return res;
}

/// Convenience: derive the context from a table (and set size for the
/// simplified rule), then run.
inline MonteCarloResult run_monte_carlo(const SimConfig& cfg, const GminTable& table) {
    if (cfg.optimal) return run_monte_carlo(cfg, SimContext{&table, nullptr});
    CandidateSet set = candidate_set(table, cfg.set_size);
    return run_monte_carlo(cfg, SimContext{&table, &set});
}

/// Table size covering the 1-1e-9 quantile of |g_hat|^2 (sum of two
/// exponentials with mean p*(1+sigma_e^2) each); rarer channels take the
/// solver's enumeration fallback.
inline double recommended_table_cap(double max_power, double max_cee_sigma_sq = 0.0) {
    return 24.5 * max_power * (1.0 + max_cee_sigma_sq);
}

}  // namespace cmf
