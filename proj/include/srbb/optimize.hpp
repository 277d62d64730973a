#pragma once

// Layered approximation of a special unitary by the parametric family:
// derivative-free optimizers (Nelder-Mead, Powell) plus a finite-difference
// Adam fallback, with deterministic parallel multi-restart per layer.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <ostream>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "srbb/assembly.hpp"
#include "srbb/basis.hpp"
#include "srbb/complex_matrix.hpp"

namespace srbb {

enum class Optimizer { NelderMead, Powell, FiniteDifferenceGradient };
enum class InitDistribution { Uniform, Normal };

struct ApproxConfig {
    double epsilon = 1e-6;
    int max_layers = 1;
    int restarts = 32;
    InitDistribution init = InitDistribution::Uniform;
    Optimizer optimizer = Optimizer::NelderMead;
    int max_evals = 60000;  // per restart
    std::uint64_t seed = 1;
    bool phase_invariant = false;
    double time_budget_seconds = 0.0;  // 0 = unlimited
    std::vector<double> warm_start;    // optional first-restart start for layer 1
};

struct ApproxReport {
    bool converged = false;
    bool input_rescaled_to_su = false;
    std::vector<double> layer_errors;        // error after each accepted layer
    std::vector<double> restart_best_costs;  // best cost seen per layer
    long total_evaluations = 0;
    double wall_seconds = 0.0;
    double final_error = 0.0;
    ThetaSchedule schedule;
};

inline double cost(const CMat& u, const SrbbBasis& basis, const ThetaSchedule& s,
                   bool phase_invariant = false) {
    if (u.dim() != basis.d) throw std::invalid_argument("cost: dimension mismatch");
    CMat a = assemble(basis, s);
    if (!phase_invariant) return frobenius_distance(u, a);
    // align the global phase explicitly; the trace identity sqrt(2d - 2|tr|)
    // amplifies unitarity rounding noise under the square root
    const cplx ph = std::exp(cplx(0.0, std::arg((a.adjoint() * u).trace())));
    for (auto& v : a.data()) v *= ph;
    return frobenius_distance(u, a);
}

struct OptResult {
    std::vector<double> x;
    double f = 0.0;
    long evals = 0;
};

// Standard simplex method: reflection 1, expansion 2, contraction 0.5,
// shrink 0.5; initial step 0.1 rad per coordinate; stops when the simplex
// diameter drops under 1e-10 or the value spread under 1e-14.
inline OptResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, long budget,
                             double diam_tol = 1e-10, double spread_tol = 1e-14,
                             double step = 0.1) {
    const size_t k = x0.size();
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) { ++evals; return f(x); };

    std::vector<std::vector<double>> pts(k + 1, x0);
    std::vector<double> val(k + 1);
    for (size_t i = 1; i <= k; ++i) pts[i][i - 1] += step;
    for (size_t i = 0; i <= k; ++i) val[i] = eval(pts[i]);

    std::vector<size_t> order(k + 1);
    while (evals < budget) {
        for (size_t i = 0; i <= k; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return val[a] < val[b]; });
        const size_t best = order[0], worst = order[k], second = order[k - 1];

        if (val[worst] - val[best] < spread_tol) break;
        double diam = 0.0;
        for (size_t i = 1; i <= k; ++i)
            for (size_t c = 0; c < k; ++c)
                diam = std::max(diam, std::abs(pts[order[i]][c] - pts[best][c]));
        if (diam < diam_tol) break;

        std::vector<double> centroid(k, 0.0);
        for (size_t i = 0; i <= k; ++i) {
            if (i == worst) continue;
            for (size_t c = 0; c < k; ++c) centroid[c] += pts[i][c];
        }
        for (auto& v : centroid) v /= (double)k;

        auto blend = [&](double t) {
            std::vector<double> x(k);
            for (size_t c = 0; c < k; ++c) x[c] = centroid[c] + t * (pts[worst][c] - centroid[c]);
            return x;
        };
        const std::vector<double> xr = blend(-1.0);
        const double fr = eval(xr);
        if (fr < val[order[0]]) {
            const std::vector<double> xe = blend(-2.0);
            const double fe = eval(xe);
            if (fe < fr) { pts[worst] = xe; val[worst] = fe; }
            else { pts[worst] = xr; val[worst] = fr; }
        } else if (fr < val[second]) {
            pts[worst] = xr;
            val[worst] = fr;
        } else {
            const bool outside = fr < val[worst];
            const std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < std::min(fr, val[worst])) {
                pts[worst] = xc;
                val[worst] = fc;
            } else {
                for (size_t i = 0; i <= k; ++i) {
                    if (i == best) continue;
                    for (size_t c = 0; c < k; ++c)
                        pts[i][c] = pts[best][c] + 0.5 * (pts[i][c] - pts[best][c]);
                    val[i] = eval(pts[i]);
                }
            }
        }
    }
    size_t best = 0;
    for (size_t i = 1; i <= k; ++i)
        if (val[i] < val[best]) best = i;
    return {pts[best], val[best], evals};
}

// Direction-set method with golden-section line searches along coordinate
// directions, replacing the direction of largest decrease per sweep.
inline OptResult powell(const std::function<double(const std::vector<double>&)>& f,
                        std::vector<double> x0, long budget) {
    const size_t k = x0.size();
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) { ++evals; return f(x); };

    auto line_min = [&](std::vector<double>& x, const std::vector<double>& dir, double fx) {
        // bracket by doubling, then golden-section
        const double gold = 0.6180339887498949;
        double a = -1.0, b = 1.0;
        auto at = [&](double t) {
            std::vector<double> y = x;
            for (size_t c = 0; c < k; ++c) y[c] += t * dir[c];
            return eval(y);
        };
        double fa = at(a), fb = at(b), f0 = fx;
        if (fa < f0 && fa < fb) { while (fa < f0 && evals < budget) { b = 0; fb = f0; f0 = fa; a *= 2; fa = at(a); } }
        else if (fb < f0 && fb < fa) { while (fb < f0 && evals < budget) { a = 0; fa = f0; f0 = fb; b *= 2; fb = at(b); } }
        double lo = a, hi = b;
        double m1 = hi - gold * (hi - lo), m2 = lo + gold * (hi - lo);
        double fm1 = at(m1), fm2 = at(m2);
        for (int it = 0; it < 100 && hi - lo > 1e-13 && evals < budget; ++it) {
            if (fm1 < fm2) { hi = m2; m2 = m1; fm2 = fm1; m1 = hi - gold * (hi - lo); fm1 = at(m1); }
            else { lo = m1; m1 = m2; fm1 = fm2; m2 = lo + gold * (hi - lo); fm2 = at(m2); }
        }
        const double t = (fm1 < fm2) ? m1 : m2;
        const double ft = std::min(fm1, fm2);
        if (ft < fx) { for (size_t c = 0; c < k; ++c) x[c] += t * dir[c]; return ft; }
        return fx;
    };

    std::vector<std::vector<double>> dirs(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) dirs[i][i] = 0.5;
    double fx = eval(x0);
    while (evals < budget) {
        const std::vector<double> xold = x0;
        const double fold = fx;
        size_t big = 0;
        double bigdrop = 0.0;
        for (size_t i = 0; i < k && evals < budget; ++i) {
            const double before = fx;
            fx = line_min(x0, dirs[i], fx);
            if (before - fx > bigdrop) { bigdrop = before - fx; big = i; }
        }
        if (fold - fx < 1e-14) break;
        std::vector<double> newdir(k);
        double nrm = 0.0;
        for (size_t c = 0; c < k; ++c) { newdir[c] = x0[c] - xold[c]; nrm += newdir[c] * newdir[c]; }
        if (nrm > 1e-24) {
            dirs[big] = newdir;
            fx = line_min(x0, newdir, fx);
        }
    }
    return {x0, fx, evals};
}

// Central-difference gradient fed to Adam; robust in the 255-parameter
// regime where simplex methods stall.
inline OptResult fd_adam(const std::function<double(const std::vector<double>&)>& f,
                         std::vector<double> x, long budget,
                         double lr = 0.05, double h = 1e-5) {
    const size_t k = x.size();
    long evals = 0;
    auto eval = [&](const std::vector<double>& y) { ++evals; return f(y); };
    std::vector<double> m(k, 0.0), v(k, 0.0), g(k);
    std::vector<double> best_x = x;
    double best_f = eval(x);
    double fx = best_f;
    int step = 0;
    while (evals + 2 * (long)k < budget) {
        ++step;
        std::vector<double> y = x;
        for (size_t c = 0; c < k; ++c) {
            y[c] = x[c] + h;
            const double fp = eval(y);
            y[c] = x[c] - h;
            const double fm = eval(y);
            y[c] = x[c];
            g[c] = (fp - fm) / (2.0 * h);
        }
        const double b1 = 0.9, b2 = 0.999;
        const double lr_t = lr * std::sqrt(1.0 - std::pow(b2, step)) / (1.0 - std::pow(b1, step));
        for (size_t c = 0; c < k; ++c) {
            m[c] = b1 * m[c] + (1 - b1) * g[c];
            v[c] = b2 * v[c] + (1 - b2) * g[c] * g[c];
            x[c] -= lr_t * m[c] / (std::sqrt(v[c]) + 1e-10);
        }
        fx = eval(x);
        if (fx < best_f) { best_f = fx; best_x = x; }
        else if (step % 50 == 0 && best_f < fx) { x = best_x; lr *= 0.5; }
        if (best_f < 1e-13) break;
    }
    return {best_x, best_f, evals};
}

namespace detail {

inline int thread_budget() {
    if (const char* env = std::getenv("SRBB_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 4;
}

inline std::vector<double> random_start(int k, InitDistribution init, std::mt19937_64& rng) {
    std::vector<double> x(k);
    if (init == InitDistribution::Uniform) {
        std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
        for (auto& v : x) v = u(rng);
    } else {
        std::normal_distribution<double> gnoise(kPi, kPi / 2.0);
        for (auto& v : x) v = std::clamp(gnoise(rng), 0.0, 2.0 * kPi);
    }
    return x;
}

inline OptResult run_optimizer(Optimizer opt,
                               const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> x0, long budget) {
    switch (opt) {
        case Optimizer::NelderMead: return nelder_mead(f, std::move(x0), budget);
        case Optimizer::Powell: return powell(f, std::move(x0), budget);
        case Optimizer::FiniteDifferenceGradient: return fd_adam(f, std::move(x0), budget);
    }
    throw std::logic_error("unknown optimizer");
}

}  // namespace detail

// Layered greedy fit: optimize one layer against the current residual, accept
// it only if the error does not increase, then fold it into the residual.
inline ApproxReport approximate(const CMat& u_in, const ApproxConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    const int d = u_in.dim();
    int n = 0;
    while ((1 << n) < d) ++n;
    if ((1 << n) != d) throw std::invalid_argument("approximate: dimension is not a power of 2");
    if (!is_unitary(u_in, 1e-8)) throw std::invalid_argument("approximate: input is not unitary");

    ApproxReport rep;
    CMat u = u_in;
    const cplx det = u.determinant();
    if (std::abs(det - cplx(1.0)) > 1e-10) {
        const cplx scale = std::exp(cplx(0.0, -std::arg(det) / d));
        for (auto& v : u.data()) v *= scale;
        rep.input_rescaled_to_su = true;
    }

    const SrbbBasis basis = build_srbb(n);
    const int k = (1 << (2 * n)) - 1;
    const int threads = detail::thread_budget();

    CMat residual = u;  // U_t; target for the next layer
    double current_error = frobenius_distance(residual, CMat::identity(d));
    std::vector<std::vector<double>> accepted;  // front = leftmost layer

    std::atomic<long> eval_count{0};

    for (int t = 1; t <= cfg.max_layers; ++t) {
        const CMat target = residual;
        auto layer_cost = [&, target](const std::vector<double>& theta) {
            eval_count.fetch_add(1, std::memory_order_relaxed);
            CMat a = assemble_layer(basis, theta);
            if (!cfg.phase_invariant) return frobenius_distance(target, a);
            const cplx ph = std::exp(cplx(0.0, std::arg((a.adjoint() * target).trace())));
            for (auto& v : a.data()) v *= ph;
            return frobenius_distance(target, a);
        };

        OptResult best;
        best.f = std::numeric_limits<double>::infinity();
        bool have_best = false;

        for (int attempt = 0; attempt < 4 && !(have_best && best.f <= current_error + 1e-12);
             ++attempt) {
            if (attempt > 0 && t == 1 && cfg.max_layers == 1) break;  // retries can't help L=1
            std::vector<std::vector<double>> starts;
            for (int r = 0; r < cfg.restarts; ++r) {
                std::mt19937_64 rng(cfg.seed * 1000003ULL + (std::uint64_t)t * 10007ULL +
                                    (std::uint64_t)attempt * 131071ULL + (std::uint64_t)r);
                if (r == 0 && t == 1 && attempt == 0 && !cfg.warm_start.empty()) {
                    if ((int)cfg.warm_start.size() != k)
                        throw std::invalid_argument("approximate: warm start length mismatch");
                    starts.push_back(cfg.warm_start);
                } else if (r == 0 && t >= 2 && attempt == 0) {
                    // a near-zero layer reproduces the current error, keeping
                    // the accepted-layer error sequence non-increasing
                    std::vector<double> x(k, 0.0);
                    std::normal_distribution<double> gnoise(0.0, 0.01);
                    for (auto& v : x) v = gnoise(rng);
                    starts.push_back(x);
                } else {
                    starts.push_back(detail::random_start(k, cfg.init, rng));
                }
            }

            std::vector<OptResult> results(starts.size());
            std::atomic<size_t> next{0};
            auto worker = [&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= starts.size()) return;
                    if (cfg.time_budget_seconds > 0 && elapsed() > cfg.time_budget_seconds &&
                        have_best) {
                        results[i].f = std::numeric_limits<double>::infinity();
                        continue;
                    }
                    results[i] = detail::run_optimizer(cfg.optimizer, layer_cost, starts[i],
                                                       cfg.max_evals);
                }
            };
            std::vector<std::future<void>> futs;
            for (int w = 0; w < std::min<int>(threads, (int)starts.size()); ++w)
                futs.push_back(std::async(std::launch::async, worker));
            for (auto& fu : futs) fu.get();

            for (const auto& r : results)
                if (r.f < best.f) { best = r; have_best = true; }
            if (cfg.time_budget_seconds > 0 && elapsed() > cfg.time_budget_seconds) break;
        }

        // polish the winner: a direction-set pass, then restarted simplexes
        // at shrinking scales (the first simplex can stall with a collapsed
        // simplex just short of a local minimum in higher dimensions)
        if (have_best && best.f > cfg.epsilon &&
            !(cfg.time_budget_seconds > 0 && elapsed() > cfg.time_budget_seconds)) {
            const OptResult pol =
                detail::run_optimizer(Optimizer::Powell, layer_cost, best.x, cfg.max_evals);
            if (pol.f < best.f) best = pol;
            for (double step : {1e-2, 1e-4, 1e-6}) {
                if (best.f <= cfg.epsilon ||
                    (cfg.time_budget_seconds > 0 && elapsed() > cfg.time_budget_seconds))
                    break;
                const OptResult nm =
                    nelder_mead(layer_cost, best.x, cfg.max_evals, 1e-12, 1e-16, step);
                if (nm.f < best.f) best = nm;
            }
        }

        // a warm start marks a trusted basin: descend from it with simplex
        // steps small enough not to hop to a neighboring local minimum
        if (t == 1 && !cfg.warm_start.empty() && have_best && best.f > cfg.epsilon &&
            !(cfg.time_budget_seconds > 0 && elapsed() > cfg.time_budget_seconds)) {
            OptResult r = nelder_mead(layer_cost, cfg.warm_start, cfg.max_evals, 1e-13, 1e-17,
                                      1e-3);
            for (int round = 0; round < 10 && r.f > cfg.epsilon; ++round) {
                const OptResult r2 =
                    nelder_mead(layer_cost, r.x, cfg.max_evals, 1e-13, 1e-17,
                                std::clamp(r.f * 100.0, 1e-8, 1e-3));
                if (r2.f < r.f) r = r2;
                else break;
            }
            if (r.f < best.f) best = r;
        }

        rep.restart_best_costs.push_back(best.f);
        if (t >= 2 && best.f > current_error + 1e-12) break;  // no improving layer found

        // fold the accepted layer in: U_{t+1} = U_t * A_t^dagger
        const CMat a = assemble_layer(basis, best.x);
        residual = residual * a.adjoint();
        accepted.insert(accepted.begin(), best.x);
        current_error = best.f;
        rep.layer_errors.push_back(current_error);
        if (current_error <= cfg.epsilon) { rep.converged = true; break; }
        if (cfg.time_budget_seconds > 0 && elapsed() > cfg.time_budget_seconds) break;
    }

    rep.schedule = ThetaSchedule::zeros(n, std::max<int>(1, (int)accepted.size()));
    for (size_t i = 0; i < accepted.size(); ++i) rep.schedule.layers[i] = accepted[i];
    rep.final_error = cost(u, basis, rep.schedule, cfg.phase_invariant);
    rep.total_evaluations = eval_count.load();
    rep.wall_seconds = elapsed();
    return rep;
}

// --- report serialization (structured text) ---

inline void write_report(std::ostream& os, const ApproxReport& r) {
    os << "converged " << (r.converged ? 1 : 0) << "\n";
    os << "rescaled_to_su " << (r.input_rescaled_to_su ? 1 : 0) << "\n";
    os << "final_error " << std::hexfloat << r.final_error << std::defaultfloat
       << " # " << r.final_error << "\n";
    os << "wall_seconds " << r.wall_seconds << "\n";
    os << "total_evaluations " << r.total_evaluations << "\n";
    os << "layer_errors";
    for (double e : r.layer_errors) os << " " << e;
    os << "\nrestart_best_costs";
    for (double e : r.restart_best_costs) os << " " << e;
    os << "\n";
    write_schedule(os, r.schedule);
}

}  // namespace srbb
