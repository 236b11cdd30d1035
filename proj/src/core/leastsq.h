#pragma once

#include <functional>
#include <vector>

namespace fbar {

// residual callback fills r (fixed length) from parameters x
using ResidualFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct LsqOptions {
    int max_iter = 200;
    double rel_step_tol = 1e-8;
    double lambda0 = 1e-3;
    double rel_cost_tol = 1e-12; // stop when an accepted step improves cost by less
};

struct LsqResult {
    std::vector<double> x;
    double rms = 0;
    int iters = 0;
    bool converged = false;
};

// damped least squares with a central-difference Jacobian and box clamping;
// deterministic for identical inputs. Callers should normalize parameters to
// order one so the shared differencing step is sane.
LsqResult levmar(const ResidualFn& fn, std::vector<double> x0, const std::vector<double>& lo,
                 const std::vector<double>& hi, size_t n_residuals, const LsqOptions& opt = {});

} // namespace fbar
