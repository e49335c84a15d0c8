#include "kfnns/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace kfnns {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inf_norm(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

struct CurvaturePair {
    std::vector<double> s;  // x_{k+1} - x_k
    std::vector<double> y;  // g_{k+1} - g_k
    double rho;             // 1 / (y.s)
};

// Two-loop recursion: d = -H g with H0 = gamma I scaled by the newest pair.
std::vector<double> search_direction(const std::deque<CurvaturePair>& pairs,
                                     const std::vector<double>& g) {
    std::vector<double> q = g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t j = pairs.size(); j-- > 0;) {
        alpha[j] = pairs[j].rho * dot(pairs[j].s, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[j] * pairs[j].y[i];
    }
    if (!pairs.empty()) {
        const CurvaturePair& newest = pairs.back();
        const double gamma = 1.0 / (newest.rho * dot(newest.y, newest.y));
        for (double& v : q) v *= gamma;
    }
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const double beta = pairs[j].rho * dot(pairs[j].y, q);
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] += (alpha[j] - beta) * pairs[j].s[i];
    }
    for (double& v : q) v = -v;
    return q;
}

}  // namespace

LbfgsObjective make_objective(
    std::function<double(const std::vector<double>&, std::vector<double>&)> f) {
    LbfgsObjective obj;
    obj.value_and_grad = f;
    obj.value = [f](const std::vector<double>& x) {
        std::vector<double> scratch;
        return f(x, scratch);
    };
    return obj;
}

std::vector<double> lbfgs_minimize(const LbfgsObjective& objective,
                                   std::vector<double> start,
                                   const LbfgsOptions& options) {
    if (options.steps < 1) throw std::invalid_argument("lbfgs: steps must be >= 1");

    std::vector<double> x = std::move(start);
    std::vector<double> g(x.size());
    double f = objective.value_and_grad(x, g);
    if (!std::isfinite(f))
        throw std::runtime_error("lbfgs: objective is not finite at the start");

    std::vector<double> best_x = x;
    double best_f = f;
    if (inf_norm(g) == 0.0) return best_x;  // already stationary

    std::deque<CurvaturePair> pairs;
    std::vector<double> x_trial(x.size()), g_new(x.size());

    for (int step = 0; step < options.steps; ++step) {
        std::vector<double> d = search_direction(pairs, g);
        double gd = dot(g, d);
        if (!(gd < 0.0)) {
            // Not a descent direction; curvature info is stale.
            pairs.clear();
            for (std::size_t i = 0; i < x.size(); ++i) d[i] = -g[i];
            gd = -dot(g, g);
            if (!(gd < 0.0)) break;
        }

        const auto armijo_ok = [&](double t, double ft) {
            return std::isfinite(ft) && ft <= f + options.armijo_c * t * gd;
        };
        double t = options.alpha;
        double f_trial = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < options.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < x.size(); ++i) x_trial[i] = x[i] + t * d[i];
            f_trial = objective.value(x_trial);
            if (armijo_ok(t, f_trial)) {
                accepted = true;
                // The very first trial succeeded: expand while the Armijo
                // bound keeps holding, so a too-small alpha cannot throttle
                // well-scaled quasi-Newton steps.
                if (bt == 0) {
                    std::vector<double> x_wide(x.size());
                    for (int grow = 0; grow < 30; ++grow) {
                        const double t2 = t * 2.0;
                        for (std::size_t i = 0; i < x.size(); ++i)
                            x_wide[i] = x[i] + t2 * d[i];
                        const double f2 = objective.value(x_wide);
                        if (!armijo_ok(t2, f2)) break;
                        t = t2;
                        f_trial = f2;
                        x_trial.swap(x_wide);
                    }
                    // Re-prime the objective cache at the chosen point.
                    if (t != options.alpha) objective.value(x_trial);
                }
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // No Armijo point: the iterate sits in a basin whose rim the
            // objective must climb (the staged embedding objective has one
            // around the unperturbed cover). Take the nominal alpha step
            // anyway; the best-seen iterate still guards the result.
            t = options.alpha;
            bool finite_ok = false;
            for (int bt = 0; bt < options.max_backtracks; ++bt) {
                for (std::size_t i = 0; i < x.size(); ++i) x_trial[i] = x[i] + t * d[i];
                f_trial = objective.value(x_trial);
                if (std::isfinite(f_trial)) {
                    finite_ok = true;
                    break;
                }
                t *= 0.5;
            }
            if (!finite_ok) break;
        }

        const double f_new = objective.value_and_grad(x_trial, g_new);

        CurvaturePair pair;
        pair.s.resize(x.size());
        pair.y.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            pair.s[i] = x_trial[i] - x[i];
            pair.y[i] = g_new[i] - g[i];
        }
        const double ys = dot(pair.y, pair.s);
        if (ys > 1e-10 * std::sqrt(dot(pair.s, pair.s)) * std::sqrt(dot(pair.y, pair.y))) {
            pair.rho = 1.0 / ys;
            pairs.push_back(std::move(pair));
            if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
        } else if (!pairs.empty()) {
            // Nonpositive curvature (Armijo alone cannot rule it out): the
            // stored pairs no longer describe the local landscape, so age
            // them out instead of freezing the direction.
            pairs.pop_front();
        }

        x.swap(x_trial);
        g.swap(g_new);
        f = f_new;
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
        if (options.on_accept) options.on_accept(step, f);
        if (inf_norm(g) == 0.0) break;
    }
    return best_x;
}

std::vector<double> lbfgs_minimize(const LbfgsObjective& objective,
                                   std::vector<double> start, int steps,
                                   double alpha, int memory) {
    LbfgsOptions opt;
    opt.steps = steps;
    opt.alpha = alpha;
    opt.memory = memory;
    return lbfgs_minimize(objective, std::move(start), opt);
}

}  // namespace kfnns
