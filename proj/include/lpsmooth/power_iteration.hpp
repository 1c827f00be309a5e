#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace lpsmooth {

struct PowerOptions {
    int trials = 8;
    int iterations = 50;
    /// Relative change of the quotient below which a trial is declared converged.
    double tol = 1e-6;
};

struct PowerResult {
    double norm = 0.0;
    /// max - min of the per-trial quotients.
    double spread = 0.0;
    std::vector<double> per_trial;
    int iterations_used = 0;
};

/// Largest ||A v|| / ||v|| found by power iteration on A*A from `start(trial)`.
/// The quotient is a lower bound on ||A|| for every iterate.
template<class Op, class AdjOp, class Start, class Norm>
PowerResult power_norm(Op&& apply, AdjOp&& adjoint, Start&& start, Norm&& norm, const PowerOptions& opt) {
    PowerResult res;
    for (int trial = 0; trial < std::max(1, opt.trials); ++trial) {
        auto v = start(trial);
        double nv = norm(v);
        if (nv == 0.0) continue;
        v *= 1.0 / nv;
        double best = 0.0, prev = 0.0;
        int it = 0;
        for (; it < opt.iterations; ++it) {
            auto av = apply(v);
            const double q = norm(av);
            best = std::max(best, q);
            if (q == 0.0) break;
            auto w = adjoint(av);
            const double nw = norm(w);
            if (nw == 0.0) break;
            w *= 1.0 / nw;
            v = std::move(w);
            if (it > 0 && std::abs(q - prev) <= opt.tol * q) {
                ++it;
                break;
            }
            prev = q;
        }
        res.iterations_used = std::max(res.iterations_used, it);
        res.per_trial.push_back(best);
    }
    if (!res.per_trial.empty()) {
        const auto [lo, hi] = std::minmax_element(res.per_trial.begin(), res.per_trial.end());
        res.norm = *hi;
        res.spread = *hi - *lo;
    }
    return res;
}

} // namespace lpsmooth
