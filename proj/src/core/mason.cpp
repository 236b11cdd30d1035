#include "core/mason.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "core/error.h"

namespace fbar {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;
constexpr double kFaceLoadClamp = 1e12; // on |z| after normalization by the piezo impedance

struct LayerWave {
    cplx v;     // complex phase velocity, lossy
    cplx gamma; // phase across the layer
    cplx z;     // area-scaled characteristic impedance
};

LayerWave layer_wave(const Layer& l, double f, double area) {
    auto ac = derive_acoustics(l.mat);
    LayerWave w;
    w.v = std::sqrt(ac.c_complex / l.mat.rho);
    w.gamma = kTau * f * l.thickness / w.v;
    w.z = l.mat.rho * w.v * area;
    return w;
}

cplx termination_load(const Termination& term, double f, double area) {
    (void)f;
    if (term.free) return {0, 0};
    auto ac = derive_acoustics(*term.mat);
    cplx v = std::sqrt(ac.c_complex / term.mat->rho);
    return term.mat->rho * v * area; // semi-infinite medium: matched characteristic load
}

cplx clamp_norm(cplx z) {
    double m = std::abs(z);
    if (!std::isfinite(m)) return {kFaceLoadClamp, 0};
    if (m > kFaceLoadClamp) return z * (kFaceLoadClamp / m);
    return z;
}

} // namespace

Abcd layer_matrix(const Layer& l, double f, double area) {
    if (!(f > 0)) fail(Errc::invalid, "layer_matrix needs f > 0");
    auto w = layer_wave(l, f, area);
    cplx cg = std::cos(w.gamma), sg = std::sin(w.gamma);
    const cplx j{0, 1};
    return {cg, j * w.z * sg, j * sg / w.z, cg};
}

cplx face_load(std::span<const Layer> outward, double f, double area, const Termination& term) {
    Abcd m;
    for (const Layer& l : outward) {
        Abcd k = layer_matrix(l, f, area);
        // m = m * k, ordered piezo-side first so the termination sits at the far port
        m = {m.a * k.a + m.b * k.c, m.a * k.b + m.b * k.d,
             m.c * k.a + m.d * k.c, m.c * k.b + m.d * k.d};
    }
    cplx zl = termination_load(term, f, area);
    cplx num = m.a * zl + m.b;
    cplx den = m.c * zl + m.d;
    if (den == cplx{0, 0}) den = {1e-300, 0}; // exact lossless pole; magnitude clamped downstream
    return num / den;
}

namespace {

cplx input_impedance_guarded(const Stack& s, double f, int attempt);

} // namespace

cplx input_impedance_at(const Stack& s, double f) { return input_impedance_guarded(s, f, 0); }

namespace {

cplx input_impedance_guarded(const Stack& s, double f, int attempt) {
    if (!(f > 0)) fail(Errc::invalid, "frequency must be > 0");
    int p = s.piezo_index();
    if (p < 0) fail(Errc::invalid, "stack has no active piezo layer");
    const Layer& pz = s.layers[p];

    auto ac = derive_acoustics(pz.mat);
    cplx vp = std::sqrt(ac.c_complex / pz.mat.rho);
    cplx zp = pz.mat.rho * vp * s.area;
    cplx x = kTau * f * pz.thickness / vp;
    cplx kt2 = pz.mat.e33 * pz.mat.e33 / (ac.c_complex * pz.mat.eps33);

    // outward-ordered neighbor lists
    std::vector<Layer> above(s.layers.begin() + p + 1, s.layers.end());
    std::vector<Layer> below(s.layers.rend() - p, s.layers.rend());
    cplx zt = clamp_norm(face_load(above, f, s.area, s.top) / zp);
    cplx zb = clamp_norm(face_load(below, f, s.area, s.bottom) / zp);

    double c0 = static_capacitance(s);
    const cplx j{0, 1};
    cplx om = kTau * f;
    cplx sx = std::sin(x), cx = std::cos(x);
    cplx num = (zt + zb) * sx + 2.0 * j * (1.0 - cx);
    cplx den = (zt + zb) * cx + j * (1.0 + zt * zb) * sx;
    cplx zin = (1.0 / (j * om * c0)) * (1.0 - (kt2 / x) * (num / den));
    if (!std::isfinite(zin.real()) || !std::isfinite(zin.imag())) {
        // lossless grids can land exactly on a pole; a relative nudge resolves it
        if (attempt >= 3) fail(Errc::numeric, "impedance evaluation failed at f = " + std::to_string(f));
        return input_impedance_guarded(s, f * (1.0 + 1e-9), attempt + 1);
    }
    return zin;
}

} // namespace

cplx input_admittance_at(const Stack& s, double f) {
    cplx z = input_impedance_at(s, f);
    if (z == cplx{0, 0}) z = input_impedance_at(s, f * (1.0 + 1e-9));
    cplx y = 1.0 / z;
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
        fail(Errc::numeric, "admittance evaluation failed at f = " + std::to_string(f));
    return y;
}

Spectrum input_admittance(const Stack& s, const std::vector<double>& freqs) {
    validate_stack(s);
    for (double f : freqs)
        if (!(f > 0)) fail(Errc::invalid, "frequency grid must be positive");
    Spectrum out;
    out.provenance = Provenance::simulated;
    out.f = freqs;
    out.y.resize(freqs.size());

    size_t n = freqs.size();
    unsigned hw = std::thread::hardware_concurrency();
    size_t nthreads = std::min<size_t>(hw ? hw : 1, 8);
    if (n < 512 || nthreads < 2) {
        for (size_t i = 0; i < n; ++i) out.y[i] = input_admittance_at(s, freqs[i]);
    } else {
        // each point is independent; workers own disjoint index strides
        std::vector<std::thread> pool;
        std::exception_ptr err;
        std::mutex err_mx;
        for (size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (size_t i = t; i < n; i += nthreads) out.y[i] = input_admittance_at(s, freqs[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mx);
                    if (!err) err = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }
    return out;
}

Spectrum input_admittance(const Stack& s, const Grid& g) { return input_admittance(s, g.points()); }

double static_capacitance(const Stack& s) {
    const Layer& pz = s.piezo();
    return pz.mat.eps33 * s.area / pz.thickness;
}

namespace {

// marches (tau, v) a distance xi into a layer, starting from the near-face state
void sample_layer(const LayerWave& w, double t, cplx tau0, cplx v0, int nsamp, double z_base,
                  std::vector<double>& zs, std::vector<cplx>& taus, cplx& tau_far, cplx& v_far) {
    const cplx j{0, 1};
    tau_far = tau0;
    v_far = v0;
    for (int k = 0; k < nsamp; ++k) {
        double frac = static_cast<double>(k) / (nsamp - 1);
        cplx g = w.gamma * frac;
        cplx cg = std::cos(g), sg = std::sin(g);
        // inverse line matrix: state at depth xi given the near-face state
        cplx tau_here = cg * tau0 - j * w.z * sg * v0;
        cplx v_here = -j * sg / w.z * tau0 + cg * v0;
        zs.push_back(z_base + frac * t);
        taus.push_back(tau_here);
        if (k == nsamp - 1) { tau_far = tau_here; v_far = v_here; }
    }
}

} // namespace

StressProfile stress_profile(const Stack& s, double f, int min_per_layer) {
    validate_stack(s);
    if (!(f > 0)) fail(Errc::invalid, "frequency must be > 0");
    if (min_per_layer < 2) min_per_layer = 2;
    int p = s.piezo_index();
    const Layer& pz = s.layers[p];

    auto ac = derive_acoustics(pz.mat);
    cplx vp = std::sqrt(ac.c_complex / pz.mat.rho);
    cplx zp = pz.mat.rho * vp * s.area;
    cplx x = kTau * f * pz.thickness / vp;
    double h = pz.mat.e33 / pz.mat.eps33;

    std::vector<Layer> above(s.layers.begin() + p + 1, s.layers.end());
    std::vector<Layer> below(s.layers.rend() - p, s.layers.rend());
    cplx zt = face_load(above, f, s.area, s.top);
    cplx zb = face_load(below, f, s.area, s.bottom);

    // piezo wave amplitudes (a, b) for particle velocity v = a e^{-jkz} + b e^{jkz},
    // force-positive stress tau = zp (a e^{-jkz} - b e^{jkz}) + h D A, with face
    // conditions tau(0) = -zb v(0) and tau(tp) = +zt v(tp); D set by unit drive
    const cplx j{0, 1};
    cplx d_lin = 1.0; // solve at D*A = 1, rescale to V = 1 afterwards
    cplx hd = h * d_lin;
    cplx em = std::exp(-j * x), ep = std::exp(j * x);
    cplx a11 = zp + zb, a12 = -(zp - zb);
    cplx a21 = em * (zp - zt), a22 = -ep * (zp + zt);
    cplx det = a11 * a22 - a12 * a21;
    if (det == cplx{0, 0}) fail(Errc::numeric, "degenerate piezo boundary system");
    cplx r1 = -hd, r2 = -hd;
    cplx wa = (r1 * a22 - a12 * r2) / det;
    cplx wb = (a11 * r2 - r1 * a21) / det;

    double om = kTau * f;
    cplx v_bot = wa + wb;
    cplx v_top = wa * em + wb * ep;
    // drive voltage for D*A = 1: V = tp/(eps*A) * (D*A) - h (u_top - u_bot)
    cplx volt = pz.thickness / (pz.mat.eps33 * s.area) * d_lin - h * (v_top - v_bot) / (j * om);
    if (volt == cplx{0, 0}) fail(Errc::numeric, "zero drive voltage in field solve");
    // amplitudes below carry force (stress * area); report stress per unit drive volt
    cplx scale = 1.0 / (volt * s.area);

    cplx k_pz = om / vp;

    StressProfile prof;
    auto push_dedup = [&prof](double z, cplx tau) {
        if (!prof.z.empty() && z <= prof.z.back() + 1e-18) return; // interface samples repeat
        prof.z.push_back(z);
        prof.tau.push_back(tau);
    };

    // bottom block: march downward from the piezo bottom face with flipped velocity
    double below_t = 0;
    {
        std::vector<double> zs_rev;
        std::vector<cplx> taus_rev;
        cplx tau0 = zp * (wa - wb) + hd;
        cplx w0 = -v_bot; // z-flip reverses velocity, stress is even under the flip
        double depth = 0;
        for (const auto& l : below) {
            auto w = layer_wave(l, f, s.area);
            cplx tau_far, v_far;
            sample_layer(w, l.thickness, tau0, w0, min_per_layer, depth, zs_rev, taus_rev, tau_far,
                         v_far);
            tau0 = tau_far;
            w0 = v_far;
            depth += l.thickness;
        }
        below_t = depth;
        // reverse into global coordinates: deepest sample is the outer bottom face
        for (size_t i = zs_rev.size(); i-- > 0;)
            push_dedup(below_t - zs_rev[i], taus_rev[i] * scale);
    }

    // piezo layer, analytic
    for (int k = 0; k < min_per_layer; ++k) {
        double frac = static_cast<double>(k) / (min_per_layer - 1);
        cplx ph = k_pz * (frac * pz.thickness);
        cplx tau_here = zp * (wa * std::exp(-j * ph) - wb * std::exp(j * ph)) + hd;
        push_dedup(below_t + frac * pz.thickness, tau_here * scale);
    }

    // top block: march upward from the piezo top face
    {
        double base = below_t + pz.thickness;
        cplx tau0 = zp * (wa * em - wb * ep) + hd;
        cplx v0 = v_top;
        std::vector<double> zs;
        std::vector<cplx> taus;
        double height = 0;
        for (const auto& l : above) {
            auto w = layer_wave(l, f, s.area);
            cplx tau_far, v_far;
            sample_layer(w, l.thickness, tau0, v0, min_per_layer, height, zs, taus, tau_far, v_far);
            tau0 = tau_far;
            v0 = v_far;
            height += l.thickness;
        }
        for (size_t i = 0; i < zs.size(); ++i) push_dedup(base + zs[i], taus[i] * scale);
    }
    return prof;
}

} // namespace fbar
