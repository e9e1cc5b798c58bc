#pragma once

// Adaptive Simpson integration for vector-valued integrands.  Integrands here
// are densities gated by region indicators, so they jump along region borders;
// the recursion keeps bisecting intervals whose Richardson estimate disagrees
// and gives up refining a straddling interval only at max_depth, by which
// point the interval is narrow enough that its contribution to the error is
// below anything we care about.  Everything is deterministic: fixed panel
// splits, fixed recursion order, no randomization.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace cmf {

constexpr std::size_t kQuadMaxComponents = 16;

/// Fixed-capacity value vector so integrand arity can be chosen at run time
/// without heap churn in the eval loop.
struct QVec {
    std::array<double, kQuadMaxComponents> v{};
    std::size_t n = 1;

    static QVec zero(std::size_t n) {
        QVec q;
        q.n = n;
        return q;
    }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

inline QVec operator+(const QVec& a, const QVec& b) {
    QVec r = a;
    for (std::size_t i = 0; i < r.n; ++i) r.v[i] += b.v[i];
    return r;
}
inline QVec operator-(const QVec& a, const QVec& b) {
    QVec r = a;
    for (std::size_t i = 0; i < r.n; ++i) r.v[i] -= b.v[i];
    return r;
}
inline QVec operator*(double c, const QVec& a) {
    QVec r = a;
    for (std::size_t i = 0; i < r.n; ++i) r.v[i] *= c;
    return r;
}
inline double max_abs(const QVec& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) m = std::max(m, std::abs(a.v[i]));
    return m;
}

struct QuadratureError : std::runtime_error {
    double achieved;
    QuadratureError(const std::string& what, double achieved_err)
        : std::runtime_error(what), achieved(achieved_err) {}
};

struct QuadOptions {
    double abs_tol = 1e-8;
    int max_depth = 40;
    int init_panels = 8;
};

struct QuadOutcome {
    QVec value;
    double err = 0.0;          // accumulated Richardson estimates
    bool depth_capped = false;  // some interval hit max_depth before agreeing
    std::size_t evals = 0;
};

namespace detail {

template <class F>
void simpson_rec(F& f, double a, double m, double b, const QVec& fa, const QVec& fm,
                 const QVec& fb, const QVec& whole, double tol, int depth,
                 const QuadOptions& opt, QuadOutcome& out) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    QVec flm = f(lm), frm = f(rm);
    out.evals += 2;
    QVec left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
    QVec right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
    QVec delta = (left + right) - whole;
    double est = max_abs(delta) / 15.0;
    if (est <= tol || depth >= opt.max_depth) {
        out.value = out.value + (left + right) + (1.0 / 15.0) * delta;
        out.err += est;
        if (est > tol) out.depth_capped = true;
        return;
    }
    simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1, opt, out);
    simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1, opt, out);
}

}  // namespace detail

/// Integrate f over [a,b].  f: double -> QVec with a fixed component count.
template <class F>
QuadOutcome adaptive_simpson(F&& f, double a, double b, const QuadOptions& opt = {}) {
    QuadOutcome out;
    if (!(b > a)) return out;
    int panels = std::max(1, opt.init_panels);
    double h = (b - a) / panels;
    double tol = opt.abs_tol / panels;
    bool first = true;
    for (int p = 0; p < panels; ++p) {
        double pa = a + p * h, pb = (p + 1 == panels) ? b : a + (p + 1) * h;
        double pm = 0.5 * (pa + pb);
        QVec fa = f(pa), fm = f(pm), fb = f(pb);
        out.evals += 3;
        if (first) {
            out.value = QVec::zero(fa.n);
            first = false;
        }
        QVec whole = ((pb - pa) / 6.0) * (fa + 4.0 * fm + fb);
        detail::simpson_rec(f, pa, pm, pb, fa, fm, fb, whole, tol, 0, opt, out);
    }
    return out;
}

/// Scalar convenience wrapper.
template <class F>
std::pair<double, double> adaptive_simpson_1(F&& f, double a, double b,
                                             const QuadOptions& opt = {}) {
    auto wrapped = [&](double x) {
        QVec q = QVec::zero(1);
        q[0] = f(x);
        return q;
    };
    QuadOutcome out = adaptive_simpson(wrapped, a, b, opt);
    return {out.value.n ? out.value[0] : 0.0, out.err};
}

}  // namespace cmf
