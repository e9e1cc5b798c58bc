#pragma once

// ECV search for one relay.
//
// Minimizing a^T G a over nonzero integer a is a 2-D shortest vector problem
// that three structural facts shrink to a handful of candidates:
//   * rate is positive only if |a|^2 < 1 + |g|^2, so the search ball is known;
//   * some minimizer has sign(a_l) = sign(g_l) componentwise (a_l = 0 where
//     g_l = 0), so it suffices to search nonnegative a against |g|;
//   * the minimizer is primitive (gcd 1), otherwise a/gcd beats it.
// The last cut is geometric: the set of channels for which a given ECV e wins
// is a region D_e, and e can only be selected once |g| reaches the distance
// from the origin to D_e.  Those squared distances are precomputed into a
// GminTable; at solve time every e with table value above |g|^2 is skipped.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace cmf {

struct RelayDecision {
    Ecv ecv;
    Rate rate = 0.0;
};

/// Squared enumeration radius: every a with |a|^2 >= 1 + |g|^2 has rate 0.
inline double search_radius_sq(const ScaledChannel& g) { return 1.0 + g.norm_sq(); }

struct GminTable {
    struct Entry {
        int k = 0;  // 1-based rank after sorting
        Ecv ecv;
        double gmin_sq = 0.0;
    };
    std::vector<Entry> entries;
    double coverage_gsq = 0.0;  // sound for any channel with |g|^2 <= coverage_gsq

    // Squared region distance for the ECV whose componentwise magnitudes match
    // (a1, a2); +inf when the table proves nothing (not selectable below coverage).
    double lookup_gmin_sq(const Ecv& a) const {
        int x = std::abs(a.a1), y = std::abs(a.a2);
        for (const auto& e : entries)
            if (e.ecv.a1 == x && e.ecv.a2 == y) return e.gmin_sq;
        return std::numeric_limits<double>::infinity();
    }

    void to_csv(std::ostream& os) const;
};

/// Ordered candidate list for the simplified selection rule.  Must start with
/// the unit vectors and hold distinct canonical ECVs.
struct CandidateSet {
    std::vector<Ecv> ecvs;

    explicit CandidateSet(std::vector<Ecv> list) : ecvs(std::move(list)) {
        if (ecvs.size() < 2)
            throw std::invalid_argument("CandidateSet: need at least 2 ECVs");
        if (!(ecvs[0] == Ecv{1, 0} && ecvs[1] == Ecv{0, 1}))
            throw std::invalid_argument("CandidateSet: must begin with (1,0),(0,1)");
        for (size_t i = 0; i < ecvs.size(); ++i) {
            if (!(canonicalize(ecvs[i]) == ecvs[i]))
                throw std::invalid_argument("CandidateSet: entries must be canonical");
            for (size_t j = i + 1; j < ecvs.size(); ++j)
                if (ecvs[i] == ecvs[j])
                    throw std::invalid_argument("CandidateSet: duplicate ECV");
        }
    }
    size_t size() const { return ecvs.size(); }
};

struct PruneOptions {
    bool sign_match = true;    // search nonnegative a against |g|, a_l = 0 where g_l = 0
    bool primitive = true;     // keep gcd(a1,a2) = 1 only
    bool region_bound = true;  // keep ECVs whose table gmin_sq <= |g|^2
};

/// Staged candidate enumeration.  With all pruning off this is every nonzero
/// integer vector strictly inside the search ball; each enabled stage filters
/// further.  Order: ascending |a|^2, then ascending lexicographic.
inline std::vector<Ecv> enumerate_candidates(const ScaledChannel& g, const PruneOptions& opt,
                                             const GminTable* table = nullptr) {
    if (opt.region_bound) {
        if (table == nullptr)
            throw std::invalid_argument("enumerate_candidates: region bound needs a table");
        if (g.norm_sq() > table->coverage_gsq)
            throw std::domain_error("enumerate_candidates: table coverage too short for |g|^2");
    }
    double bound = search_radius_sq(g);
    int amax = static_cast<int>(std::floor(std::sqrt(std::max(0.0, bound))));
    double ag1 = std::abs(g.g1), ag2 = std::abs(g.g2);

    std::vector<Ecv> out;
    int lo1 = opt.sign_match ? 0 : -amax;
    int lo2 = opt.sign_match ? 0 : -amax;
    for (int x = lo1; x <= amax; ++x) {
        for (int y = lo2; y <= amax; ++y) {
            Ecv a{x, y};
            if (a.is_zero()) continue;
            if (static_cast<double>(a.norm_sq()) >= bound) continue;
            if (opt.sign_match && ((ag1 == 0.0 && x != 0) || (ag2 == 0.0 && y != 0))) continue;
            if (opt.primitive && std::gcd(std::abs(x), std::abs(y)) != 1) continue;
            if (opt.region_bound && table->lookup_gmin_sq(a) > g.norm_sq()) continue;
            out.push_back(a);
        }
    }
    std::sort(out.begin(), out.end(), [](const Ecv& a, const Ecv& b) {
        if (a.norm_sq() != b.norm_sq()) return a.norm_sq() < b.norm_sq();
        return a < b;
    });
    return out;
}

namespace detail {

// Primitive nonnegative pairs (axes included) with |b|^2 <= max_norm_sq,
// sorted by ascending norm so infeasible directions die early.
inline std::vector<Ecv> primitive_pairs(double max_norm_sq) {
    int m = static_cast<int>(std::floor(std::sqrt(std::max(0.0, max_norm_sq))));
    std::vector<Ecv> out;
    for (int x = 0; x <= m; ++x)
        for (int y = 0; y <= m; ++y) {
            if (x == 0 && y == 0) continue;
            if (static_cast<double>(static_cast<long long>(x) * x + static_cast<long long>(y) * y) > max_norm_sq)
                continue;
            if (std::gcd(x, y) != 1) continue;
            out.push_back({x, y});
        }
    std::sort(out.begin(), out.end(), [](const Ecv& a, const Ecv& b) {
        if (a.norm_sq() != b.norm_sq()) return a.norm_sq() < b.norm_sq();
        return a < b;
    });
    return out;
}

// Smallest |g|^2 along direction (c,s) for which e beats every competitor.
// With g = r*(c,s), the comparison quad(e) <= quad(b) collapses to
// A + B*r^2 <= 0 where A = |e|^2-|b|^2 and B = A - ((e.u)^2-(b.u)^2),
// so each competitor contributes one interval bound on r^2; the direction is
// feasible iff the intersection is nonempty, and its infimum is returned.
// Returns +inf for infeasible directions.
struct DirCompetitor {
    double b1, b2, norm_sq;
};

inline double rmin_sq_for_direction(const Ecv& e, double c, double s,
                                    const std::vector<DirCompetitor>& comps) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double esq = static_cast<double>(e.norm_sq());
    double en = e.a1 * c + e.a2 * s;
    double ensq = en * en;
    double lo = 0.0, hi = inf;
    for (const auto& b : comps) {
        if (b.b1 == e.a1 && b.b2 == e.a2) continue;
        double bn = b.b1 * c + b.b2 * s;
        double A = esq - b.norm_sq;
        double B = A - (ensq - bn * bn);
        if (B < 0.0) {
            if (A > 0.0) {
                lo = std::max(lo, A / -B);
                if (lo > hi) return inf;
            }
        } else if (B > 0.0) {
            if (A > 0.0) return inf;
            hi = std::min(hi, A == 0.0 ? 0.0 : -A / B);
            if (hi < lo) return inf;
        } else if (A > 0.0) {
            return inf;
        }
    }
    return lo;
}

struct GminParams {
    int grid = 2048;
    int refine_seeds = 6;
    int refine_rounds = 40;
};

inline double gmin_sq_impl(const Ecv& e, double cap_gsq, const GminParams& prm = {}) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double half_pi = 1.5707963267948966;

    // Only primitive nonnegative competitors inside the search ball matter:
    // a winning e already beats the axis vectors, whose quad form never
    // exceeds 1, so any b with |b|^2 > 1 + cap can never bind below the cap.
    std::vector<DirCompetitor> comps;
    for (const Ecv& b : primitive_pairs(1.0 + cap_gsq))
        comps.push_back({static_cast<double>(b.a1), static_cast<double>(b.a2),
                         static_cast<double>(b.norm_sq())});

    auto eval = [&](double theta) {
        return rmin_sq_for_direction(e, std::cos(theta), std::sin(theta), comps);
    };

    // Coarse sweep of the quadrant plus the candidate's own direction.  Keep
    // every feasible direction even when its bound exceeds the cap: the true
    // minimum can sit between grid points below a ridge that is above it.
    std::vector<std::pair<double, double>> feasible;  // (r^2 bound, theta)
    double step = half_pi / prm.grid;
    for (int i = 0; i <= prm.grid; ++i) {
        double th = step * i;
        double r = eval(th);
        if (r < inf) feasible.emplace_back(r, th);
    }
    {
        double th = std::atan2(static_cast<double>(e.a2), static_cast<double>(e.a1));
        double r = eval(th);
        if (r < inf) feasible.emplace_back(r, th);
    }
    if (feasible.empty()) return inf;

    std::sort(feasible.begin(), feasible.end());
    double best = feasible.front().first;
    int seeds = std::min<size_t>(prm.refine_seeds, feasible.size());
    for (int i = 0; i < seeds; ++i) {
        double th0 = feasible[i].second;
        double r0 = feasible[i].first;
        double w = step;
        for (int round = 0; round < prm.refine_rounds; ++round) {
            for (double d : {-w, -0.5 * w, 0.5 * w, w}) {
                double th = std::clamp(th0 + d, 0.0, half_pi);
                double r = eval(th);
                if (r < r0) { r0 = r; th0 = th; }
            }
            w *= 0.5;
        }
        best = std::min(best, r0);
    }
    return best <= cap_gsq * (1.0 + 1e-9) + 1e-12 ? best : inf;
}

}  // namespace detail

/// Distance from the origin to the selection region of e, i.e. the smallest
/// |g| for which e is the quad-form minimizer.  Searches |g| <= cap and
/// returns +inf when the region starts beyond it.  e may be signed (the
/// region distance only depends on componentwise magnitudes) but must be
/// nonzero and primitive.
inline double gmin(const Ecv& e, double cap) {
    if (e.is_zero()) throw std::invalid_argument("gmin: zero ECV");
    if (std::gcd(std::abs(e.a1), std::abs(e.a2)) != 1)
        throw std::invalid_argument("gmin: non-primitive ECV is never selected");
    if (!(cap > 0.0)) throw std::invalid_argument("gmin: cap must be positive");
    Ecv abs_e{std::abs(e.a1), std::abs(e.a2)};
    double rsq = detail::gmin_sq_impl(abs_e, cap * cap);
    return std::isfinite(rsq) ? std::sqrt(rsq) : rsq;
}

/// All ECVs selectable somewhere in |g|^2 <= max_gmin_sq, with their squared
/// region distances.  Rows sorted by ascending gmin_sq, then ascending |e|^2,
/// then descending lexicographic, so the two unit vectors come first and each
/// permutation pair is adjacent.
inline GminTable build_gmin_table(double max_gmin_sq) {
    if (!(max_gmin_sq > 0.0))
        throw std::invalid_argument("build_gmin_table: max_gmin_sq must be positive");

    GminTable table;
    table.coverage_gsq = max_gmin_sq;

    // A selectable e beats the unit vectors, so |e|^2 - |g|^2 <= quad(e) <=
    // quad(unit) <= 1 forces |e|^2 <= 1 + max_gmin_sq.  Region distance is
    // permutation-symmetric, so compute each unordered pair once.
    for (const Ecv& e : detail::primitive_pairs(1.0 + max_gmin_sq)) {
        if (e.a1 < e.a2) continue;
        double rsq = detail::gmin_sq_impl(e, max_gmin_sq);
        if (!std::isfinite(rsq)) continue;
        table.entries.push_back({0, e, rsq});
        if (e.a1 != e.a2 && e.a2 != 0)
            table.entries.push_back({0, {e.a2, e.a1}, rsq});
        else if (e.a2 == 0)
            table.entries.push_back({0, {0, e.a1}, rsq});
    }
    std::sort(table.entries.begin(), table.entries.end(),
              [](const GminTable::Entry& a, const GminTable::Entry& b) {
                  if (a.gmin_sq != b.gmin_sq) return a.gmin_sq < b.gmin_sq;
                  if (a.ecv.norm_sq() != b.ecv.norm_sq()) return a.ecv.norm_sq() < b.ecv.norm_sq();
                  return b.ecv < a.ecv;
              });
    for (size_t i = 0; i < table.entries.size(); ++i)
        table.entries[i].k = static_cast<int>(i + 1);
    return table;
}

inline void GminTable::to_csv(std::ostream& os) const {
    os << "k,a1,a2,gmin_sq\n";
    char buf[64];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.6f\n", e.k, e.ecv.a1, e.ecv.a2, e.gmin_sq);
        os << buf;
    }
}

/// First k table rows as a simplified-rule candidate set.
inline CandidateSet candidate_set(const GminTable& table, int k) {
    if (k < 2) throw std::invalid_argument("candidate_set: k must be >= 2");
    if (static_cast<size_t>(k) > table.entries.size())
        throw std::invalid_argument("candidate_set: table has fewer rows than k");
    std::vector<Ecv> list;
    list.reserve(k);
    for (int i = 0; i < k; ++i) list.push_back(table.entries[i].ecv);
    return CandidateSet(std::move(list));
}

namespace detail {

// Shared comparator: smaller quad form wins; exact ties go to the smaller
// norm, then ascending lexicographic on the (canonical, nonnegative) vector.
inline bool better(double q, const Ecv& a, double best_q, const Ecv& best) {
    if (q != best_q) return q < best_q;
    if (a.norm_sq() != best.norm_sq()) return a.norm_sq() < best.norm_sq();
    return a < best;
}

}  // namespace detail

/// Exact quad-form minimizer over all nonzero integer vectors, returned in
/// canonical form with its rate.  Uses the table fast path when it covers
/// |g|^2 and falls back to ball enumeration otherwise.  g = 0 degenerates to
/// (1,0) at rate 0.
inline RelayDecision solve_optimal(const ScaledChannel& g, const GminTable& table) {
    double gsq = g.norm_sq();
    if (gsq == 0.0) return {{1, 0}, 0.0};

    ScaledChannel ga{std::abs(g.g1), std::abs(g.g2)};
    GramMatrix G = gram_matrix(ga);

    Ecv best{1, 0};
    double best_q = std::numeric_limits<double>::infinity();
    auto consider = [&](const Ecv& a) {
        if ((ga.g1 == 0.0 && a.a1 != 0) || (ga.g2 == 0.0 && a.a2 != 0)) return;
        double q = quad_form(a, G);
        if (detail::better(q, a, best_q, best)) { best_q = q; best = a; }
    };

    if (gsq <= table.coverage_gsq) {
        for (const auto& entry : table.entries) {
            if (entry.gmin_sq > gsq) break;  // sorted ascending
            consider(entry.ecv);
        }
    } else {
        for (const Ecv& a : enumerate_candidates(ga, {true, true, false})) consider(a);
    }
    if (!std::isfinite(best_q)) return {{1, 0}, 0.0};

    // Restore the sign pattern of g, then canonicalize; both keep the quad
    // form, so the reported rate is the optimum.
    Ecv signed_a{g.g1 < 0.0 ? -best.a1 : best.a1, g.g2 < 0.0 ? -best.a2 : best.a2};
    Ecv canon = canonicalize(signed_a);
    return {canon, 0.5 * std::max(0.0, -std::log2(best_q))};
}

/// Simplified rule: evaluate exactly the candidate set, earliest entry wins
/// ties.  Rate can be 0 when even the best listed ECV is outside the ball.
inline RelayDecision solve_simplified(const ScaledChannel& g, const CandidateSet& set) {
    GramMatrix G = gram_matrix(g);
    size_t best_i = 0;
    double best_q = quad_form(set.ecvs[0], G);
    for (size_t i = 1; i < set.ecvs.size(); ++i) {
        double q = quad_form(set.ecvs[i], G);
        if (q < best_q) { best_q = q; best_i = i; }
    }
    return {set.ecvs[best_i], 0.5 * std::max(0.0, -std::log2(best_q))};
}

}  // namespace cmf
