#include "core/mbvd.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "core/error.h"
#include "core/leastsq.h"
#include "core/text.h"

namespace fbar {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

double branch_fs(const Branch& b) { return 1.0 / (2 * kPi * std::sqrt(b.lm * b.cm)); }

void validate_mbvd(const Mbvd& m) {
    if (m.rs < 0 || m.ls < 0 || m.r0 < 0) fail(Errc::invalid, "series parasitics must be >= 0");
    if (!(m.c0 > 0)) fail(Errc::invalid, "c0 must be > 0");
    double prev = 0;
    for (size_t i = 0; i < m.branches.size(); ++i) {
        const auto& b = m.branches[i];
        if (b.rm < 0 || !(b.lm > 0) || !(b.cm > 0))
            fail(Errc::invalid, "branch " + std::to_string(i + 1) + " needs rm >= 0, lm > 0, cm > 0");
        double fs = branch_fs(b);
        if (fs <= prev)
            fail(Errc::invalid, "branch resonances must increase strictly");
        prev = fs;
    }
}

cplx evaluate_at(const Mbvd& m, double f) {
    if (!(f > 0)) fail(Errc::invalid, "mbvd evaluation needs f > 0");
    const cplx j{0, 1};
    cplx om = 2 * kPi * f;
    cplx y_core = 1.0 / (m.r0 + 1.0 / (j * om * m.c0));
    for (const auto& b : m.branches) y_core += 1.0 / (b.rm + j * om * b.lm + 1.0 / (j * om * b.cm));
    return 1.0 / (m.rs + j * om * m.ls + 1.0 / y_core);
}

Spectrum evaluate(const Mbvd& m, const std::vector<double>& freqs) {
    Spectrum s;
    s.provenance = Provenance::simulated;
    s.f = freqs;
    s.y.reserve(freqs.size());
    for (double f : freqs) s.y.push_back(evaluate_at(m, f));
    validate_spectrum(s);
    return s;
}

Mbvd initial_guess(const Spectrum& s) {
    validate_spectrum(s);
    if (s.size() < 16) fail(Errc::invalid, "need at least 16 points to seed a model");

    // C0 from the lowest octave of the grid, where the response is capacitive
    double f_lo = s.f.front();
    std::vector<double> cs;
    for (size_t i = 0; i < s.size() && s.f[i] <= 2 * f_lo; ++i)
        cs.push_back(s.y[i].imag() / (2 * kPi * s.f[i]));
    if (cs.size() < 3) {
        size_t n10 = std::max<size_t>(3, s.size() / 10);
        cs.clear();
        for (size_t i = 0; i < n10; ++i) cs.push_back(s.y[i].imag() / (2 * kPi * s.f[i]));
    }
    auto mid = cs.begin() + cs.size() / 2;
    std::nth_element(cs.begin(), mid, cs.end());
    double c0 = *mid;
    if (!(c0 > 0)) fail(Errc::numeric, "cannot seed C0: low band is not capacitive");

    // series resistance from the high-frequency Re(Z) floor
    std::vector<double> rserie;
    size_t n10 = std::max<size_t>(3, s.size() / 10);
    for (size_t i = s.size() - n10; i < s.size(); ++i)
        rserie.push_back((1.0 / s.y[i]).real());
    auto rmid = rserie.begin() + rserie.size() / 2;
    std::nth_element(rserie.begin(), rmid, rserie.end());

    Mbvd m;
    m.c0 = c0;
    m.rs = std::max(0.0, *rmid);
    m.ls = 0;
    m.r0 = 0;
    for (const auto& p : find_resonances(s)) {
        Branch b;
        b.cm = c0 * (p.fp * p.fp - p.fs * p.fs) / (p.fs * p.fs);
        b.lm = 1.0 / ((2 * kPi * p.fs) * (2 * kPi * p.fs) * b.cm);
        b.rm = 2 * kPi * p.fs * b.lm / 50.0; // seed Q of 50
        m.branches.push_back(b);
    }
    return m;
}

std::vector<BranchMetrics> derive_metrics(const Mbvd& m) {
    std::vector<BranchMetrics> out;
    for (const auto& b : m.branches) {
        BranchMetrics bm;
        bm.fs = branch_fs(b);
        bm.q = b.rm > 0 ? 2 * kPi * bm.fs * b.lm / b.rm : HUGE_VAL;
        bm.k2 = (kPi * kPi / 8.0) * b.cm / (m.c0 + b.cm);
        out.push_back(bm);
    }
    return out;
}

namespace {

struct FitContext {
    const Spectrum& s;
    std::vector<double> w; // 1/|Y| per point

    explicit FitContext(const Spectrum& spec) : s(spec) {
        w.resize(s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            double m = std::abs(s.y[i]);
            w[i] = m > 0 ? 1.0 / m : 1.0;
        }
    }
};

// residuals over a point subset: weighted complex misfit, two entries per point
void residuals_on(const FitContext& ctx, const Mbvd& m, const std::vector<size_t>& idx,
                  std::vector<double>& r) {
    for (size_t k = 0; k < idx.size(); ++k) {
        size_t i = idx[k];
        cplx d = evaluate_at(m, ctx.s.f[i]) - ctx.s.y[i];
        r[2 * k] = d.real() * ctx.w[i];
        r[2 * k + 1] = d.imag() * ctx.w[i];
    }
}

std::vector<size_t> em_point_set(const Spectrum& s, const std::vector<ResonancePair>& pairs) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < s.size(); ++i) {
        bool excluded = false;
        for (const auto& p : pairs) {
            double d = p.fp - p.fs;
            if (s.f[i] >= p.fs - 3 * d && s.f[i] <= p.fp + 3 * d) { excluded = true; break; }
        }
        if (!excluded) idx.push_back(i);
    }
    return idx;
}

std::vector<size_t> window_point_set(const Spectrum& s, const ResonancePair& p) {
    std::vector<size_t> idx;
    double d = p.fp - p.fs;
    for (size_t i = 0; i < s.size(); ++i)
        if (s.f[i] >= p.fs - 5 * d && s.f[i] <= p.fp + 5 * d) idx.push_back(i);
    return idx;
}

constexpr double kUnbounded = 1e30;

} // namespace

FitResult fit_mbvd(const Spectrum& spec) {
    FitContext ctx(spec);
    auto pairs = find_resonances(spec);
    Mbvd seed = initial_guess(spec);

    FitResult out;
    out.model = seed;

    // stage 1: EM parameters on off-resonance points, branches omitted.
    // Away from resonance rs and r0 sit in one series path, so r0 is pinned
    // to zero here; the polish stage separates them with near-resonance data.
    {
        auto idx = em_point_set(spec, pairs);
        if (idx.size() < 20) fail(Errc::numeric, "too few off-resonance points for the EM stage");
        double c0s = seed.c0;
        double rss = std::max(seed.rs, 0.1);
        double lss = 1e-11;
        Mbvd em = seed;
        em.branches.clear();
        em.r0 = 0;
        std::vector<double> r(2 * idx.size());
        auto fn = [&](const std::vector<double>& x, std::vector<double>& rr) {
            Mbvd m = em;
            m.rs = x[0] * rss;
            m.ls = x[1] * lss;
            m.c0 = x[2] * c0s;
            residuals_on(ctx, m, idx, rr);
        };
        // the branchless model cannot represent the branches' off-resonance
        // tails, so the cost bottoms out at a misfit floor; a loose cost
        // tolerance stops the crawl once the seed stops improving
        LsqResult lr = levmar(fn, {seed.rs / rss, 0.0, 1.0}, {0, 0, 1e-6},
                              {kUnbounded, kUnbounded, kUnbounded}, r.size(),
                              {.max_iter = 200, .rel_step_tol = 1e-8, .rel_cost_tol = 1e-6});
        out.model.rs = lr.x[0] * rss;
        out.model.ls = lr.x[1] * lss;
        out.model.c0 = lr.x[2] * c0s;
        out.model.r0 = 0;
        out.stages.push_back({"em", lr.iters, lr.converged});
        if (!lr.converged) out.warnings.push_back("EM stage did not converge; best-so-far kept");
    }

    // stage 2: one branch per window, EM frozen, earlier branches included
    out.model.branches.clear();
    for (size_t k = 0; k < pairs.size(); ++k) {
        auto idx = window_point_set(spec, pairs[k]);
        if (idx.size() < 8) {
            out.warnings.push_back("window " + std::to_string(k + 1) +
                                   " has too few points; branch skipped");
            out.stages.push_back({"branch" + std::to_string(k + 1), 0, false});
            continue;
        }
        Branch bs = seed.branches[k];
        std::vector<double> r(2 * idx.size());
        auto fn = [&](const std::vector<double>& x, std::vector<double>& rr) {
            Mbvd m = out.model;
            m.branches.push_back({x[0] * bs.rm, x[1] * bs.lm, x[2] * bs.cm});
            residuals_on(ctx, m, idx, rr);
        };
        LsqResult lr = levmar(fn, {1.0, 1.0, 1.0}, {0, 1e-6, 1e-6},
                              {kUnbounded, kUnbounded, kUnbounded}, r.size(),
                              {.max_iter = 200, .rel_step_tol = 1e-8});
        out.model.branches.push_back({lr.x[0] * bs.rm, lr.x[1] * bs.lm, lr.x[2] * bs.cm});
        out.stages.push_back({"branch" + std::to_string(k + 1), lr.iters, lr.converged});
        if (!lr.converged)
            out.warnings.push_back("branch " + std::to_string(k + 1) + " fit did not converge");
    }

    // stage 3: bounded global polish of everything jointly
    if (!out.model.branches.empty()) {
        size_t nb = out.model.branches.size();
        Mbvd base = out.model;
        double c0s = base.c0;
        double rss = std::max(base.rs, 0.1);
        double lss = std::max(base.ls, 1e-12);
        double r0s = std::max(base.r0, 0.1);
        std::vector<size_t> idx(spec.size());
        for (size_t i = 0; i < spec.size(); ++i) idx[i] = i;
        std::vector<double> r(2 * idx.size());
        auto unpack = [&](const std::vector<double>& x) {
            Mbvd m = base;
            m.rs = x[0] * rss;
            m.ls = x[1] * lss;
            m.c0 = x[2] * c0s;
            m.r0 = x[3] * r0s;
            for (size_t b = 0; b < nb; ++b) {
                m.branches[b].rm = x[4 + 3 * b] * std::max(base.branches[b].rm, 1e-3);
                m.branches[b].lm = x[5 + 3 * b] * base.branches[b].lm;
                m.branches[b].cm = x[6 + 3 * b] * base.branches[b].cm;
            }
            return m;
        };
        auto fn = [&](const std::vector<double>& x, std::vector<double>& rr) {
            residuals_on(ctx, unpack(x), idx, rr);
        };
        std::vector<double> x0(4 + 3 * nb, 1.0);
        x0[0] = base.rs / rss;
        x0[1] = base.ls / lss;
        x0[3] = base.r0 / r0s;
        for (size_t b = 0; b < nb; ++b)
            x0[4 + 3 * b] = base.branches[b].rm / std::max(base.branches[b].rm, 1e-3);
        std::vector<double> lo(x0.size(), 0.0), hi(x0.size(), kUnbounded);
        for (size_t b = 0; b < nb; ++b) { lo[5 + 3 * b] = 1e-6; lo[6 + 3 * b] = 1e-6; }
        lo[2] = 1e-6;
        LsqResult lr = levmar(fn, x0, lo, hi, r.size(), {.max_iter = 100, .rel_step_tol = 1e-8});
        out.model = unpack(lr.x);
        out.stages.push_back({"polish", lr.iters, lr.converged});
    }

    std::sort(out.model.branches.begin(), out.model.branches.end(),
              [](const Branch& a, const Branch& b) { return branch_fs(a) < branch_fs(b); });
    validate_mbvd(out.model);

    // weighted rms over the full grid
    {
        std::vector<size_t> idx(spec.size());
        for (size_t i = 0; i < spec.size(); ++i) idx[i] = i;
        std::vector<double> r(2 * idx.size());
        residuals_on(ctx, out.model, idx, r);
        double c = 0;
        for (double v : r) c += v * v;
        out.residual = std::sqrt(c / r.size());
    }
    out.metrics = derive_metrics(out.model);
    return out;
}

void write_mbvd(const Mbvd& m, std::ostream& out) {
    out << "rs_ohm " << fmt_g(m.rs) << "\n";
    out << "ls_h " << fmt_g(m.ls) << "\n";
    out << "c0_f " << fmt_g(m.c0) << "\n";
    out << "r0_ohm " << fmt_g(m.r0) << "\n";
    for (const auto& b : m.branches)
        out << "branch " << fmt_g(b.rm) << " " << fmt_g(b.lm) << " " << fmt_g(b.cm) << "\n";
}

void write_mbvd_file(const Mbvd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write '" + path + "'");
    write_mbvd(m, out);
    if (!out.good()) fail(Errc::io, "write failed for '" + path + "'");
}

Mbvd read_mbvd(std::istream& in, const std::string& origin) {
    Mbvd m;
    bool saw_c0 = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string body = strip_comment(line, '#');
        if (body.empty()) continue;
        auto tok = split_ws(body);
        const std::string& key = tok[0];
        if (key == "branch") {
            if (tok.size() != 4) fail(Errc::parse, where + ": expected 'branch rm_ohm lm_h cm_f'");
            Branch b;
            b.rm = parse_double(tok[1], where + " rm");
            b.lm = parse_double(tok[2], where + " lm");
            b.cm = parse_double(tok[3], where + " cm");
            m.branches.push_back(b);
        } else {
            if (tok.size() != 2) fail(Errc::parse, where + ": expected '<key> <value>'");
            double v = parse_double(tok[1], where + " " + key);
            if (key == "rs_ohm") m.rs = v;
            else if (key == "ls_h") m.ls = v;
            else if (key == "c0_f") { m.c0 = v; saw_c0 = true; }
            else if (key == "r0_ohm") m.r0 = v;
            else fail(Errc::parse, where + ": unknown key '" + key + "'");
        }
    }
    if (!saw_c0) fail(Errc::parse, origin + ": missing c0_f");
    try {
        validate_mbvd(m);
    } catch (const Error& e) {
        fail(Errc::parse, origin + ": " + e.what());
    }
    return m;
}

Mbvd read_mbvd_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open '" + path + "'");
    return read_mbvd(in, path);
}

} // namespace fbar
