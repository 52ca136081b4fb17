#pragma once

#include <finestruct/force.hpp>
#include <finestruct/precision.hpp>
#include <finestruct/real.hpp>
#include <finestruct/sequence.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace finestruct {

// Fixed repulsion law f(r) = r^-2 between adjacent points.
struct InteractionLaw {
    static Real f(const Real& r) { return 1 / (r * r); }
    static Real fprime(const Real& r) { return -2 / (r * r * r); }
};

// Raised when a solver cannot meet its residual contract (stalled iteration,
// failed bracketing). Distinct from std::invalid_argument: the input was
// well-formed, the computation did not converge.
class solve_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A solved point chain on [0, 1]: endpoints pinned, interior points
// balancing neighbor repulsion against the external force. gaps[i] is
// points[i+1] - points[i]; deviations[i] is gaps[i]/gaps[0] - 1.
struct Configuration {
    int n_points = 0;
    Real domain_length;           // fixed 1
    std::vector<Real> points;     // x_1..x_N
    std::vector<Real> gaps;       // N-1 entries
    Real base_gap;                // gaps[0]
    std::vector<Real> deviations; // N-1 entries, first is exactly 0
    Real residual;                // max interior equation residual
    PrecisionContext context;
    ForceModel force;             // force the solver balanced against
};

struct SolveStats {
    int iterations = 0;  // Newton steps or bisection halvings
    int stages = 1;      // force continuation stages actually used
};

namespace detail {

// max_i |f(gap_{i-1}) - f(gap_i) + s*F(x_i)| over interior points
inline Real chain_residual(const std::vector<Real>& x, const ForceEval& force, const Real& scale) {
    const std::size_t n = x.size();
    Real worst(0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        Real left = x[i] - x[i - 1];
        Real right = x[i + 1] - x[i];
        Real r = InteractionLaw::f(left) - InteractionLaw::f(right) + scale * force.value(x[i]);
        Real a = abs(r);
        if (a > worst)
            worst = a;
    }
    return worst;
}

inline bool strictly_increasing(const std::vector<Real>& x) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1]))
            return false;
    return true;
}

// Tridiagonal solve (Thomas algorithm), overwriting its inputs. sub[i] is
// the coefficient left of the diagonal in row i (sub[0] unused), sup[i] the
// one right of it (sup[last] unused).
inline std::vector<Real> solve_tridiagonal(std::vector<Real> sub, std::vector<Real> diag,
                                           std::vector<Real> sup, std::vector<Real> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0)
            throw solve_error("tridiagonal solve: zero pivot");
        Real w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (diag[n - 1] == 0)
        throw solve_error("tridiagonal solve: zero pivot");
    std::vector<Real> out(n);
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        out[i] = (rhs[i] - sup[i] * out[i + 1]) / diag[i];
    return out;
}

// One damped Newton descent at a fixed force scale. Returns false on stall
// (caller escalates to continuation); x is updated in place only along
// accepted steps, so ordering never breaks.
inline bool newton_descend(std::vector<Real>& x, const ForceEval& force, const Real& scale,
                           const Real& tol, int max_iterations, int& iterations_used) {
    const std::size_t n = x.size();
    const std::size_t m = n - 2;  // interior unknowns
    Real res = chain_residual(x, force, scale);
    for (int it = 0; it < max_iterations; ++it) {
        if (res <= tol) {
            iterations_used = it;
            return true;
        }
        std::vector<Real> sub(m), diag(m), sup(m), rhs(m);
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t i = k + 1;  // point index of this unknown
            Real left = x[i] - x[i - 1];
            Real right = x[i + 1] - x[i];
            Real fl = InteractionLaw::fprime(left);
            Real fr = InteractionLaw::fprime(right);
            sub[k] = -fl;
            sup[k] = -fr;
            diag[k] = fl + fr + scale * force.deriv(x[i]);
            rhs[k] = -(InteractionLaw::f(left) - InteractionLaw::f(right) +
                       scale * force.value(x[i]));
        }
        std::vector<Real> step = solve_tridiagonal(std::move(sub), std::move(diag),
                                                   std::move(sup), std::move(rhs));
        Real damping(1);
        bool accepted = false;
        for (int half = 0; half < 70; ++half) {
            std::vector<Real> trial = x;
            for (std::size_t k = 0; k < m; ++k)
                trial[k + 1] += damping * step[k];
            if (strictly_increasing(trial)) {
                Real trial_res = chain_residual(trial, force, scale);
                if (trial_res < res || trial_res <= tol) {
                    x = std::move(trial);
                    res = trial_res;
                    accepted = true;
                    break;
                }
            }
            damping /= 2;
        }
        if (!accepted) {
            iterations_used = it;
            return false;  // stalled: no damping level helps
        }
    }
    iterations_used = max_iterations;
    return res <= tol;
}

}  // namespace detail

namespace detail {

// Assemble the immutable result from solved points; shared by both solvers.
// Re-derives every dependent field and enforces the residual contract.
inline Configuration finish_configuration(std::vector<Real> x, const ForceModel& force,
                                          const PrecisionContext& ctx) {
    if (!strictly_increasing(x))
        throw solve_error("configuration: points are not strictly increasing");
    Configuration c;
    c.n_points = static_cast<int>(x.size());
    c.domain_length = Real(1);
    c.points = std::move(x);
    c.gaps.reserve(c.points.size() - 1);
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
        c.gaps.push_back(c.points[i + 1] - c.points[i]);
    c.base_gap = c.gaps[0];
    c.deviations.reserve(c.gaps.size());
    c.deviations.push_back(Real(0));  // exact by definition
    for (std::size_t i = 1; i < c.gaps.size(); ++i)
        c.deviations.push_back(c.gaps[i] / c.base_gap - 1);
    ForceEval feval(force);
    c.residual = chain_residual(c.points, feval, Real(1));
    c.context = ctx;
    c.force = force;
    if (c.residual > ctx.solver_tol)
        throw solve_error("configuration: residual exceeds the context tolerance");
    return c;
}

}  // namespace detail

// Damped Newton on the interior points with a tridiagonal Jacobian (Thomas
// algorithm, O(N) per step), equal spacing as the initial guess. If plain
// damping stalls, the force amplitude is walked up geometrically over four
// continuation stages. Endpoints stay pinned at 0 and 1 throughout.
inline Configuration solve_newton(int N, const ForceModel& force, const PrecisionContext& ctx,
                                  SolveStats* stats = nullptr) {
    if (N < 2)
        throw std::invalid_argument("solve_newton: need N >= 2");
    PrecisionScope scope(ctx.mantissa_bits);
    std::vector<Real> x(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        x[static_cast<std::size_t>(i)] = Real(i) / (N - 1);
    SolveStats local;
    if (N > 2) {
        ForceEval feval(force);
        constexpr int per_stage_cap = 80;
        int used = 0;
        if (detail::newton_descend(x, feval, Real(1), ctx.solver_tol, per_stage_cap, used)) {
            local.iterations = used;
        } else {
            // walk the amplitude up 1/8 -> 1/4 -> 1/2 -> 1, re-solving from
            // the previous stage's configuration
            local.iterations = used;
            local.stages = 0;
            for (int i2 = 0; i2 < N; ++i2)
                x[static_cast<std::size_t>(i2)] = Real(i2) / (N - 1);
            for (int stage = 3; stage >= 0; --stage) {
                ++local.stages;
                Real scale = pow2(-stage);
                if (!detail::newton_descend(x, feval, scale, ctx.solver_tol, per_stage_cap,
                                            used))
                    throw solve_error("solve_newton: stalled at continuation stage " +
                                      std::to_string(4 - stage) + " of 4");
                local.iterations += used;
            }
        }
    }
    x.front() = Real(0);
    x.back() = Real(1);
    if (stats != nullptr)
        *stats = local;
    return detail::finish_configuration(std::move(x), force, ctx);
}

// Structurally independent second solver: propagate the gap recurrence
//   gap_i = (gap_{i-1}^-2 + F(x_i))^(-1/2)
// from a trial first gap and bisect on the closure defect (sum of gaps) - 1.
// F >= 0 makes gaps non-increasing, so [1/(N-1), 1] always brackets.
inline Configuration solve_shooting(int N, const ForceModel& force, const PrecisionContext& ctx,
                                    SolveStats* stats = nullptr) {
    if (N < 2)
        throw std::invalid_argument("solve_shooting: need N >= 2");
    PrecisionScope scope(ctx.mantissa_bits);
    if (N == 2) {
        if (stats != nullptr)
            *stats = SolveStats{0, 1};
        return detail::finish_configuration({Real(0), Real(1)}, force, ctx);
    }
    ForceEval feval(force);

    auto propagate = [&](const Real& first_gap) {
        std::vector<Real> x(static_cast<std::size_t>(N));
        x[0] = Real(0);
        Real gap = first_gap;
        x[1] = gap;
        for (int i = 2; i < N; ++i) {
            // next gap from the telescoped balance at point i-1 (0-based i-1)
            Real inv2 = 1 / (gap * gap) + feval.value(x[static_cast<std::size_t>(i - 1)]);
            gap = 1 / sqrt(inv2);
            x[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i - 1)] + gap;
        }
        return x;
    };
    auto closure = [&](const Real& first_gap) { return propagate(first_gap).back() - 1; };

    // Gaps only shrink rightward, so a first gap just under the even spacing
    // cannot close the chain (total <= 1 - 2^-20 * spacing); a first gap of 1
    // overshoots on its own. The margin keeps F = 0 away from the
    // rounding-level tie at exactly even spacing.
    Real lo = (1 - pow2(-20)) / (N - 1);
    Real hi(1);
    Real clo = closure(lo);
    Real chi = closure(hi);
    if (clo > 0 || chi < 0)
        throw solve_error("solve_shooting: closure defect does not bracket a root");
    const long halvings = ctx.mantissa_bits + 60;
    for (long it = 0; it < halvings; ++it) {
        Real mid = (lo + hi) / 2;
        if (closure(mid) <= 0)
            lo = mid;
        else
            hi = mid;
    }
    std::vector<Real> x = propagate((lo + hi) / 2);
    x.back() = Real(1);  // pin the endpoint; the bisection drove the defect
                         // far below what the residual contract can see
    if (stats != nullptr)
        *stats = SolveStats{static_cast<int>(halvings), 1};
    return detail::finish_configuration(std::move(x), force, ctx);
}

// Endpoint force balance: with endpoints pinned, the boundary multipliers
// must have the right signs. Failure is a report outcome, not an exception.
struct KktReport {
    Real left_slack;   // -f(gap_1) + F(x_1), feasible when <= 0
    Real right_slack;  // f(gap_{N-1}) + F(x_N), feasible when >= 0
    bool pass = false;
};

inline KktReport kkt_check(const Configuration& config, const ForceModel& force) {
    PrecisionScope scope(config.context.mantissa_bits);
    ForceEval feval(force);
    KktReport r;
    r.left_slack = -InteractionLaw::f(config.gaps.front()) + feval.value(config.points.front());
    r.right_slack = InteractionLaw::f(config.gaps.back()) + feval.value(config.points.back());
    r.pass = r.left_slack <= 0 && r.right_slack >= 0;
    return r;
}

// Accumulated force load Q_i = base_gap^2 * sum_{k=2..i} F(x_k) for the
// interior points i = 2..N-1, as a sequence with ambient offset 2.
inline Sequence<Real> q_profile(const Configuration& config, const ForceModel& force) {
    if (config.n_points < 3)
        throw std::invalid_argument("q_profile: no interior points");
    PrecisionScope scope(config.context.mantissa_bits);
    ForceEval feval(force);
    Real d2 = config.base_gap * config.base_gap;
    std::vector<Real> q;
    q.reserve(static_cast<std::size_t>(config.n_points) - 2);
    Real acc(0);
    for (int i = 2; i <= config.n_points - 1; ++i) {
        acc += feval.value(config.points[static_cast<std::size_t>(i - 1)]);
        q.push_back(d2 * acc);
    }
    return Sequence<Real>(std::move(q), 2);
}

// Exact coefficient of the binomial series (1+Q)^(-1/2) - 1 = sum a_m Q^m:
// a_m = (-1)^m (2m)! / (2^m m!)^2.
inline Rat series_coefficient(int m) {
    if (m < 1)
        throw std::invalid_argument("series_coefficient: need m >= 1");
    Int num = factorial_int(static_cast<unsigned>(2 * m));
    Int den = pow(Int(2), static_cast<unsigned>(m)) * factorial_int(static_cast<unsigned>(m));
    Rat a(num, den * den);
    return (m % 2 != 0) ? -a : a;
}

// Partial sum sum_{m=1..M} a_m Q^m. |a_m| <= 1, so the truncation error is
// at most |Q|^{M+1}/(1-|Q|); inputs outside the radius are rejected.
inline Real series_delta(const Real& Q, int M) {
    if (M < 1)
        throw std::invalid_argument("series_delta: need M >= 1");
    if (!(abs(Q) < 1))
        throw std::invalid_argument("series_delta: |Q| must be below the series radius 1");
    Real acc(0);
    Real qpow(1);
    for (int m = 1; m <= M; ++m) {
        qpow *= Q;
        acc += to_real(series_coefficient(m)) * qpow;
    }
    return acc;
}

// The gap deviations of a solved chain satisfy, identically,
//   deviation_i = (1 + Q_i)^(-1/2) - 1.
// Returns the worst interior mismatch; only solver tolerance and rounding
// noise (amplified through f by about N^2) should show up.
inline Real series_consistency(const Configuration& config, const ForceModel& force) {
    if (config.n_points < 3)
        return Real(0);
    PrecisionScope scope(config.context.mantissa_bits);
    Sequence<Real> q = q_profile(config, force);
    Real worst(0);
    for (int i = 2; i <= config.n_points - 1; ++i) {
        Real closed = 1 / sqrt(1 + q.at(i)) - 1;
        Real err = abs(config.deviations[static_cast<std::size_t>(i - 1)] - closed);
        if (err > worst)
            worst = err;
    }
    return worst;
}

}  // namespace finestruct
