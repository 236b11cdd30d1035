#include <algorithm>
#include <cmath>
#include <complex>

#include "core/error.h"
#include "core/mason.h"
#include "core/materials.h"
#include "core/modes.h"
#include "core/stack.h"
#include "doctest.h"

using namespace fbar;

namespace {

Material lossless(const char* name, double rho, double c33, double e33 = 0,
                  double epsr = 1.0) {
    Material m;
    m.name = name;
    m.rho = rho;
    m.c33 = c33;
    m.e33 = e33;
    m.eps33 = epsr * kEps0;
    m.mech_q = HUGE_VAL;
    return m;
}

// unit-impedance test line: rho = v = 1 so gamma = 2 pi f t
const Material kUnitLine = lossless("unit", 1.0, 1.0);

Stack bare_plate(double e33, double qm = HUGE_VAL, double t = 85e-9) {
    Material sc = lossless("piezo", 3450, 2.0212e11, e33, 15.0);
    sc.mech_q = qm;
    Stack s;
    s.layers.push_back({sc, t, true});
    s.area = 154e-12;
    return s;
}

double bisect(const Stack& s, double a, double b, bool parallel) {
    auto im = [&](double f) {
        cplx y = input_admittance_at(s, f);
        return parallel ? y.imag() : (1.0 / y).imag();
    };
    double fa = im(a);
    for (int i = 0; i < 120; ++i) {
        double m = 0.5 * (a + b), fm = im(m);
        if ((fa < 0) == (fm < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

TEST_CASE("layer matrix limits: identity, half-wave, quarter-wave") {
    double f = 1.0; // with v = 1, gamma = 2 pi f t
    Layer zero{kUnitLine, 1e-30, false};
    Abcd m0 = layer_matrix(zero, f, 1.0);
    CHECK(std::abs(m0.a - 1.0) < 1e-12);
    CHECK(std::abs(m0.b) < 1e-12);
    CHECK(std::abs(m0.c) < 1e-12);
    CHECK(std::abs(m0.d - 1.0) < 1e-12);

    Layer half{kUnitLine, 0.5, false}; // gamma = pi
    Abcd mh = layer_matrix(half, f, 1.0);
    CHECK(std::abs(mh.a + 1.0) < 1e-12);
    CHECK(std::abs(mh.d + 1.0) < 1e-12);
    CHECK(std::abs(mh.b) < 1e-10);
    CHECK(std::abs(mh.c) < 1e-10);

    Layer quarter{kUnitLine, 0.25, false}; // gamma = pi/2
    Abcd mq = layer_matrix(quarter, f, 1.0);
    CHECK(std::abs(mq.a) < 1e-10);
    CHECK(std::abs(mq.d) < 1e-10);
    CHECK(std::abs(mq.b - cplx(0, 1)) < 1e-12);
    CHECK(std::abs(mq.c - cplx(0, 1)) < 1e-12);
}

TEST_CASE("layer matrix determinant is 1 for lossy and lossless layers") {
    auto cat = Catalog::builtin();
    for (const auto& m : cat.entries()) {
        Layer l{m, 85e-9, false};
        for (double f : {1e9, 12.57e9, 45.3e9, 70e9}) {
            Abcd t = layer_matrix(l, f, 154e-12);
            CHECK(std::abs(t.a * t.d - t.b * t.c - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("face load: bare free face is zero") {
    Termination free_term;
    CHECK(std::abs(face_load({}, 1e9, 154e-12, free_term)) == 0);
}

TEST_CASE("face load of one line: j Z tan(gamma)") {
    Termination free_term;
    std::vector<Layer> eighth{{kUnitLine, 0.125, false}}; // gamma = pi/4 at f = 1
    cplx z = face_load(eighth, 1.0, 1.0, free_term);
    CHECK(std::abs(z - cplx(0, 1)) < 1e-12);

    std::vector<Layer> quarter{{kUnitLine, 0.25, false}}; // gamma = pi/2: shorted quarter-wave
    cplx zq = face_load(quarter, 1.0, 1.0, free_term);
    CHECK(std::abs(zq) > 1e9);
}

TEST_CASE("semi-infinite termination presents the material impedance") {
    Material si = lossless("Si", 2329, 1.657e11);
    Termination term{false, si};
    cplx z = face_load({}, 1e9, 1.0, term);
    CHECK(z.real() == doctest::Approx(2329 * std::sqrt(1.657e11 / 2329)).epsilon(1e-12));
}

TEST_CASE("vanishing coupling collapses the admittance to j w C0") {
    Stack s = bare_plate(1e-30);
    double c0 = static_capacitance(s);
    for (double f : {5e9, 22.53e9, 70e9}) {
        cplx y = input_admittance_at(s, f);
        cplx ideal(0, 2 * M_PI * f * c0);
        CHECK(std::abs(y - ideal) / std::abs(ideal) < 1e-10);
    }
}

TEST_CASE("static capacitance is eps A / t") {
    Stack s = bare_plate(2.8);
    CHECK(static_capacitance(s) ==
          doctest::Approx(15.0 * kEps0 * 154e-12 / 85e-9).epsilon(1e-12));
}

TEST_CASE("zero frequency is rejected") {
    Stack s = bare_plate(2.8);
    CHECK_THROWS_AS(input_admittance_at(s, 0), Error);
    CHECK_THROWS_AS(input_admittance(s, std::vector<double>{0.0, 1e9}), Error);
}

TEST_CASE("lossless bare plate: fp at v/2t, fs on the plate transcendental") {
    Stack s = bare_plate(2.8);
    auto ac = derive_acoustics(s.layers[0].mat);
    double fp_analytic = ac.velocity / (2 * 85e-9);
    double fs = bisect(s, 0.55 * fp_analytic, 0.999 * fp_analytic, false);
    double fp = bisect(s, fs * 1.0001, 1.2 * fp_analytic, true);
    CHECK(std::abs(fp - fp_analytic) / fp_analytic < 1e-9);
    double xh = M_PI / 2 * fs / fp_analytic; // x/2 at fs
    CHECK(xh / std::tan(xh) == doctest::Approx(ac.kt2).epsilon(1e-6));
}

TEST_CASE("lossless limit: Y is purely reactive away from resonance") {
    Stack s = bare_plate(2.8);
    for (double f : {6e9, 17e9, 33e9}) {
        cplx y = input_admittance_at(s, f);
        CHECK(std::abs(y.real()) < 1e-15 * std::abs(y));
    }
}

TEST_CASE("Al-Al quartet has admittance peaks near the design frequencies") {
    auto cat = Catalog::builtin();
    Stack s = quartet_stack(cat, "Al-Al");
    Spectrum spec = input_admittance(s, Grid{});
    auto pairs = find_resonances(spec);
    REQUIRE(pairs.size() >= 2);
    CHECK(pairs[0].fs == doctest::Approx(22.53e9).epsilon(0.05));
    CHECK(pairs[1].fs == doctest::Approx(56.43e9).epsilon(0.07));
}

TEST_CASE("splitting a layer in two changes nothing") {
    auto cat = Catalog::builtin();
    Stack s = quartet_stack(cat, "Pt-Al");
    Stack split = s;
    Layer top = split.layers.back();
    top.thickness /= 2;
    split.layers.back() = top;
    split.layers.push_back(top);
    Grid g{5e9, 70e9, 101};
    Spectrum a = input_admittance(s, g), b = input_admittance(split, g);
    for (size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a.y[i] - b.y[i]) / std::abs(a.y[i]) < 1e-9);
}

TEST_CASE("reversing the layer order leaves Y unchanged") {
    auto cat = Catalog::builtin();
    Stack s = quartet_stack(cat, "Pt-Al");
    Stack rev = s;
    std::reverse(rev.layers.begin(), rev.layers.end());
    Grid g{5e9, 70e9, 101};
    Spectrum a = input_admittance(s, g), b = input_admittance(rev, g);
    for (size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a.y[i] - b.y[i]) / std::abs(a.y[i]) < 1e-9);
}

TEST_CASE("passivity of the lossy quartet") {
    auto cat = Catalog::builtin();
    for (const auto& s : canonical_quartet(cat)) {
        Spectrum spec = input_admittance(s, Grid{5e9, 70e9, 501});
        for (const auto& y : spec.y) CHECK(y.real() >= -1e-15);
    }
}

TEST_CASE("threaded and serial grid evaluation agree") {
    auto cat = Catalog::builtin();
    Stack s = quartet_stack(cat, "Pt-Pt");
    Spectrum big = input_admittance(s, Grid{5e9, 70e9, 1024}); // above threading threshold
    auto f = Grid{5e9, 70e9, 1024}.points();
    for (size_t i : {size_t{0}, size_t{317}, size_t{1023}}) {
        cplx y = input_admittance_at(s, f[i]);
        CHECK(std::abs(big.y[i] - y) <= 1e-14 * std::abs(y));
    }
}

TEST_CASE("stress profile of the bare plate at fp") {
    Stack s = bare_plate(2.8);
    auto ac = derive_acoustics(s.layers[0].mat);
    double fp = ac.velocity / (2 * 85e-9);
    StressProfile prof = stress_profile(s, fp);
    REQUIRE(prof.z.size() >= 64);
    REQUIRE(prof.z.size() == prof.tau.size());
    for (size_t i = 0; i + 1 < prof.z.size(); ++i) REQUIRE(prof.z[i] < prof.z[i + 1]);
    CHECK(prof.z.front() == doctest::Approx(0.0));
    CHECK(prof.z.back() == doctest::Approx(85e-9));

    double peak = 0;
    size_t argmax = 0;
    for (size_t i = 0; i < prof.tau.size(); ++i) {
        if (std::abs(prof.tau[i]) > peak) {
            peak = std::abs(prof.tau[i]);
            argmax = i;
        }
    }
    // free faces carry no stress; the extremum sits at mid-thickness
    CHECK(std::abs(prof.tau.front()) < 1e-6 * peak);
    CHECK(std::abs(prof.tau.back()) < 1e-6 * peak);
    CHECK(prof.z[argmax] == doctest::Approx(42.5e-9).epsilon(0.02));
}

TEST_CASE("Pt-Pt at S3: three half-waves, nodes at the metal-piezo interfaces") {
    auto cat = Catalog::builtin();
    Stack s = quartet_stack(cat, "Pt-Pt");
    Spectrum spec = input_admittance(s, Grid{});
    auto pairs = find_resonances(spec);
    REQUIRE(pairs.size() >= 2);
    double fs3 = pairs[1].fs;
    StressProfile prof = stress_profile(s, fs3);

    double peak = 0;
    for (const auto& t : prof.tau) peak = std::max(peak, std::abs(t));

    // sign changes of the dominant real part after phase alignment
    size_t argmax = 0;
    for (size_t i = 0; i < prof.tau.size(); ++i)
        if (std::abs(prof.tau[i]) > std::abs(prof.tau[argmax])) argmax = i;
    cplx phase = prof.tau[argmax] / std::abs(prof.tau[argmax]);
    int flips = 0;
    double prev = 0;
    for (const auto& t : prof.tau) {
        double u = (t / phase).real();
        if (std::abs(u) < 0.02 * peak) continue;
        if (prev != 0 && (u > 0) != (prev > 0)) ++flips;
        prev = u;
    }
    CHECK(flips == 2);

    // interface stress is a small fraction of the peak
    auto mag_at = [&](double z) {
        size_t best = 0;
        for (size_t i = 1; i < prof.z.size(); ++i)
            if (std::abs(prof.z[i] - z) < std::abs(prof.z[best] - z)) best = i;
        return std::abs(prof.tau[best]);
    };
    double t_total = 175e-9;
    CHECK(mag_at(45e-9) < 0.10 * peak);
    CHECK(mag_at(t_total - 45e-9) < 0.10 * peak);

    // symmetric stack: |stress| is mirror-symmetric about the midplane
    double worst = 0;
    for (int k = 0; k <= 100; ++k) {
        double z = t_total * k / 100.0;
        worst = std::max(worst, std::abs(mag_at(z) - mag_at(t_total - z)) / peak);
    }
    CHECK(worst < 0.05);
}
