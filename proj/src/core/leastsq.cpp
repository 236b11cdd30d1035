#include "core/leastsq.h"

#include <algorithm>
#include <cmath>

#include "core/error.h"

namespace fbar {

namespace {

double cost_of(const std::vector<double>& r) {
    double c = 0;
    for (double v : r) c += v * v;
    return c;
}

// solve (p x p) A dx = b in place, partial pivoting; p stays tiny here
bool solve_inplace(std::vector<double>& a, std::vector<double>& b, size_t p) {
    for (size_t k = 0; k < p; ++k) {
        size_t piv = k;
        for (size_t i = k + 1; i < p; ++i)
            if (std::abs(a[i * p + k]) > std::abs(a[piv * p + k])) piv = i;
        if (std::abs(a[piv * p + k]) < 1e-300) return false;
        if (piv != k) {
            for (size_t j = 0; j < p; ++j) std::swap(a[k * p + j], a[piv * p + j]);
            std::swap(b[k], b[piv]);
        }
        for (size_t i = k + 1; i < p; ++i) {
            double m = a[i * p + k] / a[k * p + k];
            for (size_t j = k; j < p; ++j) a[i * p + j] -= m * a[k * p + j];
            b[i] -= m * b[k];
        }
    }
    for (size_t k = p; k-- > 0;) {
        double s = b[k];
        for (size_t j = k + 1; j < p; ++j) s -= a[k * p + j] * b[j];
        b[k] = s / a[k * p + k];
    }
    return true;
}

} // namespace

LsqResult levmar(const ResidualFn& fn, std::vector<double> x0, const std::vector<double>& lo,
                 const std::vector<double>& hi, size_t n_residuals, const LsqOptions& opt) {
    size_t p = x0.size();
    if (p == 0 || lo.size() != p || hi.size() != p)
        fail(Errc::invalid, "levmar: inconsistent parameter bounds");
    size_t m = n_residuals;
    if (m < p) fail(Errc::invalid, "levmar: fewer residuals than parameters");

    auto clamp = [&](std::vector<double>& x) {
        for (size_t j = 0; j < p; ++j) x[j] = std::clamp(x[j], lo[j], hi[j]);
    };
    clamp(x0);

    std::vector<double> r(m), rp(m), rm_(m), rtrial(m);
    std::vector<double> jac(m * p); // row-major, m x p
    fn(x0, r);
    double cost = cost_of(r);

    LsqResult res;
    res.x = x0;
    double lambda = opt.lambda0;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        res.iters = iter + 1;
        // central-difference Jacobian; probes may poke slightly past the box,
        // model evaluation is expected to tolerate that
        for (size_t j = 0; j < p; ++j) {
            double h = 1e-6 * std::max(std::abs(res.x[j]), 1e-3);
            auto xp = res.x, xm = res.x;
            xp[j] += h;
            xm[j] -= h;
            fn(xp, rp);
            fn(xm, rm_);
            double inv = 1.0 / (2 * h);
            for (size_t i = 0; i < m; ++i) jac[i * p + j] = (rp[i] - rm_[i]) * inv;
        }
        // normal equations
        std::vector<double> jtj(p * p, 0.0), jtr(p, 0.0);
        for (size_t i = 0; i < m; ++i) {
            const double* row = &jac[i * p];
            for (size_t a = 0; a < p; ++a) {
                jtr[a] += row[a] * r[i];
                for (size_t b = a; b < p; ++b) jtj[a * p + b] += row[a] * row[b];
            }
        }
        for (size_t a = 0; a < p; ++a)
            for (size_t b = 0; b < a; ++b) jtj[a * p + b] = jtj[b * p + a];

        bool stepped = false;
        for (int tries = 0; tries < 32; ++tries) {
            std::vector<double> a(jtj), b(p);
            for (size_t k = 0; k < p; ++k) {
                double d = jtj[k * p + k];
                a[k * p + k] = d + lambda * std::max(d, 1e-12);
                b[k] = -jtr[k];
            }
            if (!solve_inplace(a, b, p)) {
                lambda = std::min(lambda * 10, 1e14);
                continue;
            }
            auto xtrial = res.x;
            for (size_t k = 0; k < p; ++k) xtrial[k] += b[k];
            clamp(xtrial);
            fn(xtrial, rtrial);
            double ctrial = cost_of(rtrial);
            if (ctrial < cost) {
                double step = 0;
                for (size_t k = 0; k < p; ++k)
                    step = std::max(step, std::abs(xtrial[k] - res.x[k]) /
                                              std::max(std::abs(res.x[k]), 1e-12));
                double gain = cost - ctrial;
                res.x = xtrial;
                r = rtrial;
                cost = ctrial;
                lambda = std::max(lambda / 3, 1e-12);
                stepped = true;
                if (step < opt.rel_step_tol || gain <= opt.rel_cost_tol * cost) {
                    res.converged = true;
                    res.rms = std::sqrt(cost / m);
                    return res;
                }
                break;
            }
            lambda = std::min(lambda * 5, 1e14);
        }
        if (!stepped) {
            // no downhill step found at any damping: treat as converged-in-place
            res.converged = true;
            break;
        }
    }
    res.rms = std::sqrt(cost / m);
    return res;
}

} // namespace fbar
