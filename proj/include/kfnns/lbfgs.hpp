#pragma once

#include <functional>
#include <vector>

namespace kfnns {

// Objective split into value-only and value+gradient calls so the line
// search can probe candidate points without paying for gradients. The two
// must agree; implementations may cache forward state between them.
struct LbfgsObjective {
    std::function<double(const std::vector<double>&)> value;
    std::function<double(const std::vector<double>&, std::vector<double>&)> value_and_grad;
};

LbfgsObjective make_objective(
    std::function<double(const std::vector<double>&, std::vector<double>&)> f);

struct LbfgsOptions {
    int steps = 15;
    double alpha = 0.1;   // initial trial step of every line search
    int memory = 10;
    double armijo_c = 1e-4;
    int max_backtracks = 40;
    // Called after each accepted step with the new objective value.
    std::function<void(int step, double value)> on_accept;
};

// Limited-memory BFGS with two-loop recursion and Armijo backtracking
// starting from options.alpha. Returns the best iterate seen (the start
// point if no step is accepted). Throws std::runtime_error when the
// objective is not finite at the start.
std::vector<double> lbfgs_minimize(const LbfgsObjective& objective,
                                   std::vector<double> start,
                                   const LbfgsOptions& options);

std::vector<double> lbfgs_minimize(const LbfgsObjective& objective,
                                   std::vector<double> start, int steps,
                                   double alpha, int memory = 10);

}  // namespace kfnns
