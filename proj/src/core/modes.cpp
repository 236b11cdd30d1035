#include "core/modes.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "core/error.h"
#include "core/text.h"

namespace fbar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kProminenceFloorDb = 0.5;

struct Peak {
    double f;
    double logmag;
    size_t index; // grid sample the maximum sits on
};

// vertex of the parabola through three (x, y) samples; clamped into [x0, x2]
Peak refine_parabolic(double x0, double y0, double x1, double y1, double x2, double y2,
                      size_t index) {
    double d = (x0 - x1) * (x0 - x2) * (x1 - x2);
    double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d;
    double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d;
    if (!(a < 0)) return {x1, y1, index}; // flat or upward: keep the grid sample
    double xv = -b / (2 * a);
    xv = std::clamp(xv, x0, x2);
    double c = y1 - a * x1 * x1 - b * x1;
    return {xv, a * xv * xv + b * xv + c, index};
}

std::vector<Peak> local_maxima(const std::vector<double>& f, const std::vector<double>& logmag) {
    std::vector<Peak> out;
    for (size_t i = 1; i + 1 < f.size(); ++i) {
        if (logmag[i] > logmag[i - 1] && logmag[i] > logmag[i + 1])
            out.push_back(refine_parabolic(f[i - 1], logmag[i - 1], f[i], logmag[i], f[i + 1],
                                           logmag[i + 1], i));
    }
    return out;
}

// topographic prominence of the maximum at index i: height over the higher of
// the two path minima toward higher terrain (or the band edge). For a real
// resonance the limiting saddle sits on the local capacitive jwC0 line, so
// this measures elevation over that baseline; for a noise wiggle riding on a
// resonance skirt it measures only the wiggle's own height.
double prominence_of(const std::vector<double>& logmag, size_t i) {
    double peak = logmag[i];
    double saddle_left = peak, saddle_right = peak;
    for (size_t j = i; j-- > 0;) {
        saddle_left = std::min(saddle_left, logmag[j]);
        if (logmag[j] > peak) break;
    }
    for (size_t j = i + 1; j < logmag.size(); ++j) {
        saddle_right = std::min(saddle_right, logmag[j]);
        if (logmag[j] > peak) break;
    }
    return peak - std::max(saddle_left, saddle_right);
}

} // namespace

std::vector<ResonancePair> find_resonances(const Spectrum& s) {
    validate_spectrum(s);
    if (s.size() < 16) fail(Errc::invalid, "need at least 16 spectrum points");

    std::vector<double> logy(s.size()), logz(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        double m = std::abs(s.y[i]);
        if (!(m > 0)) m = 1e-300;
        logy[i] = std::log(m);
        logz[i] = -logy[i];
    }
    constexpr double kDbPerLog = 20.0 / 2.302585092994046; // 20/ln 10
    auto ys = local_maxima(s.f, logy);
    auto zs = local_maxima(s.f, logz);

    // series candidates below the prominence floor are noise ripple, not modes
    std::vector<Peak> kept;
    std::vector<double> prom_db;
    for (const auto& y : ys) {
        double p = kDbPerLog * prominence_of(logy, y.index);
        if (p < kProminenceFloorDb) continue;
        kept.push_back(y);
        prom_db.push_back(p);
    }

    // pair each surviving |Y| maximum with the deepest |Z| maximum that
    // follows it before the next one; clean spectra alternate one-for-one
    std::vector<ResonancePair> pairs;
    size_t zi = 0;
    for (size_t i = 0; i < kept.size(); ++i) {
        double next_fs = (i + 1 < kept.size()) ? kept[i + 1].f : HUGE_VAL;
        while (zi < zs.size() && zs[zi].f <= kept[i].f) ++zi;
        bool have_z = false;
        Peak best_z{};
        for (size_t j = zi; j < zs.size() && zs[j].f < next_fs; ++j) {
            if (!have_z || zs[j].logmag > best_z.logmag) best_z = zs[j];
            have_z = true;
        }
        if (!have_z || !(kept[i].f < best_z.f)) continue;
        ResonancePair p;
        p.fs = kept[i].f;
        p.fp = best_z.f;
        p.prominence_db = prom_db[i];
        pairs.push_back(p);
    }
    return pairs;
}

double coupling(double fs, double fp, K2Def def) {
    if (!(fs > 0) || !(fs <= fp)) fail(Errc::invalid, "coupling needs 0 < fs <= fp");
    switch (def) {
        case K2Def::fractional_sq:
            return (kPi * kPi / 8.0) * (fp * fp - fs * fs) / (fp * fp);
        case K2Def::fractional:
            return (kPi * kPi / 4.0) * (fp - fs) / fp;
        case K2Def::exact_plate: {
            if (fs == fp) return 0;
            double u = kPi * fs / (2 * fp);
            return u / std::tan(u);
        }
    }
    fail(Errc::invalid, "unknown k2 definition");
}

ModeLabel classify_profile(const StressProfile& prof) {
    size_t n = prof.z.size();
    if (n < 8) fail(Errc::invalid, "stress profile too short to classify");

    // phase-align on the dominant sample so the profile is essentially real
    size_t i0 = 0;
    double peak = 0;
    for (size_t i = 0; i < n; ++i) {
        double m = std::abs(prof.tau[i]);
        if (m > peak) { peak = m; i0 = i; }
    }
    if (!(peak > 0)) fail(Errc::numeric, "zero stress profile");
    cplx rot = std::exp(cplx{0, -std::arg(prof.tau[i0])});
    std::vector<double> sig(n);
    for (size_t i = 0; i < n; ++i) sig[i] = (prof.tau[i] * rot).real();

    // harmonic order: sign changes above a noise floor, plus one
    double floor = 0.02 * peak;
    int flips = 0;
    double prev = 0;
    for (size_t i = 0; i < n; ++i) {
        if (std::abs(sig[i]) < floor) continue;
        if (prev != 0 && std::signbit(sig[i]) != std::signbit(prev)) ++flips;
        prev = sig[i];
    }
    int order = flips + 1;

    // mirror correlation on a uniform resample; the sign separates S from A,
    // the magnitude grades how cleanly the geometry supports the call
    constexpr int kResample = 512;
    double z0 = prof.z.front(), z1 = prof.z.back();
    std::vector<double> u(kResample);
    size_t seg = 0;
    for (int i = 0; i < kResample; ++i) {
        double z = z0 + (z1 - z0) * i / (kResample - 1);
        while (seg + 2 < n && prof.z[seg + 1] < z) ++seg;
        double t = (z - prof.z[seg]) / (prof.z[seg + 1] - prof.z[seg]);
        t = std::clamp(t, 0.0, 1.0);
        u[i] = sig[seg] + t * (sig[seg + 1] - sig[seg]);
    }
    double dot = 0, norm = 0;
    for (int i = 0; i < kResample; ++i) {
        dot += u[i] * u[kResample - 1 - i];
        norm += u[i] * u[i];
    }
    double corr = norm > 0 ? dot / norm : 0;

    ModeLabel lab;
    lab.order = order;
    if (std::abs(corr) > 0.5) {
        lab.family = corr > 0 ? 'S' : 'A';
        lab.warn = std::abs(corr) < 0.95;
    } else {
        // strongly asymmetric stacks defeat the geometric test; fall back to
        // the half-wave count, whose parity fixes the mode family
        lab.family = (order % 2 == 1) ? 'S' : 'A';
        lab.warn = true;
    }
    if (lab.order > 9) { lab.order = 9; lab.warn = true; } // higher overtones out of scope
    return lab;
}

ModeLabel classify_mode(const Stack& s, double fs) {
    return classify_profile(stress_profile(s, fs, 64));
}

double q_bode(const Spectrum& s, double f0) {
    validate_spectrum(s);
    if (s.size() < 3 || !(f0 >= s.f.front()) || !(f0 <= s.f.back()))
        fail(Errc::invalid, "f0 outside the spectrum grid");
    int inside = 0;
    for (double f : s.f)
        if (std::abs(f - f0) <= 0.02 * f0) ++inside;
    if (inside < 5) fail(Errc::numeric, "insufficient local points near f0");

    size_t i = std::lower_bound(s.f.begin(), s.f.end(), f0) - s.f.begin();
    if (i == 0) i = 1;
    if (i + 1 >= s.size()) i = s.size() - 2;
    if (i > 0 && std::abs(s.f[i - 1] - f0) < std::abs(s.f[i] - f0)) --i;
    i = std::clamp<size_t>(i, 1, s.size() - 2);

    if (std::abs(s.y[i].real()) < 1e-12 * std::abs(s.y[i]))
        fail(Errc::numeric, "insufficient damping");

    // phase of the input impedance, unwrapped across the three points
    double p0 = -std::arg(s.y[i - 1]);
    double p1 = -std::arg(s.y[i]);
    double p2 = -std::arg(s.y[i + 1]);
    p1 -= 2 * kPi * std::round((p1 - p0) / (2 * kPi));
    p2 -= 2 * kPi * std::round((p2 - p1) / (2 * kPi));
    double slope = (p2 - p0) / (s.f[i + 1] - s.f[i - 1]);
    double q = (f0 / 2.0) * std::abs(slope);
    if (!std::isfinite(q) || q > 1e9) fail(Errc::numeric, "insufficient damping");
    return q;
}

double fom(double k2, double q) {
    if (k2 < 0 || q < 0) fail(Errc::invalid, "fom needs nonnegative inputs");
    return k2 * q;
}

std::vector<ModeRow> analyze_modes(const Stack& stack, const Spectrum& spec, K2Def def) {
    auto pairs = find_resonances(spec);
    std::vector<ModeRow> rows;
    for (const auto& p : pairs) {
        ModeRow r;
        auto lab = classify_mode(stack, p.fs);
        r.label = lab.str();
        r.warn = lab.warn;
        r.fs = p.fs;
        r.fp = p.fp;
        r.k2 = coupling(p.fs, p.fp, def);
        try {
            r.q = q_bode(spec, p.fs);
            r.q_source = "bode";
            r.fom = fom(r.k2, *r.q);
        } catch (const Error&) {
            // lossless or sparsely sampled spectra carry no Q information
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_mode_csv(const std::vector<ModeRow>& rows, std::ostream& out) {
    out << "label,fs_hz,fp_hz,k2,q,q_source,fom\n";
    for (const auto& r : rows) {
        out << r.label << "," << fmt_g(r.fs) << "," << fmt_g(r.fp) << "," << fmt_g(r.k2) << ",";
        if (r.q) out << fmt_g(*r.q);
        out << "," << r.q_source << ",";
        if (r.fom) out << fmt_g(*r.fom);
        out << "\n";
    }
}

void write_mode_csv_file(const std::vector<ModeRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write '" + path + "'");
    write_mode_csv(rows, out);
    if (!out.good()) fail(Errc::io, "write failed for '" + path + "'");
}

std::vector<ModeRow> read_mode_csv(std::istream& in, const std::string& origin) {
    std::vector<ModeRow> rows;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string body = trim(line);
        if (body.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (body == "label,fs_hz,fp_hz,k2,q,q_source,fom") continue;
        }
        auto tok = split_char(body, ',');
        if (tok.size() != 7) fail(Errc::parse, where + ": expected 7 fields");
        ModeRow r;
        r.label = trim(tok[0]);
        r.fs = parse_double(tok[1], where + " fs");
        r.fp = parse_double(tok[2], where + " fp");
        r.k2 = parse_double(tok[3], where + " k2");
        if (!trim(tok[4]).empty()) r.q = parse_double(tok[4], where + " q");
        r.q_source = trim(tok[5]);
        if (!trim(tok[6]).empty()) r.fom = parse_double(tok[6], where + " fom");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ModeRow> read_mode_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open '" + path + "'");
    return read_mode_csv(in, path);
}

std::string format_mode_table(const std::vector<ModeRow>& rows) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-7s %11s %11s %8s %9s %-6s %8s\n", "label", "fs_ghz", "fp_ghz",
                  "k2_pct", "q", "q_src", "fom");
    out << buf;
    bool any_warn = false;
    for (const auto& r : rows) {
        std::string label = r.label + (r.warn ? "*" : "");
        any_warn |= r.warn;
        std::string qs = r.q ? [&] {
            char b[32];
            std::snprintf(b, sizeof b, "%.1f", *r.q);
            return std::string(b);
        }() : std::string("-");
        std::string fs = r.fom ? [&] {
            char b[32];
            std::snprintf(b, sizeof b, "%.2f", *r.fom);
            return std::string(b);
        }() : std::string("-");
        std::snprintf(buf, sizeof buf, "%-7s %11.4f %11.4f %8.2f %9s %-6s %8s\n", label.c_str(),
                      r.fs / 1e9, r.fp / 1e9, r.k2 * 100, qs.c_str(),
                      r.q_source.empty() ? "-" : r.q_source.c_str(), fs.c_str());
        out << buf;
    }
    if (any_warn) out << "* mode family call was ambiguous; see classification notes\n";
    return out.str();
}

} // namespace fbar
