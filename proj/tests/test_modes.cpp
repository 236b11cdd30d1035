#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/error.h"
#include "core/mason.h"
#include "core/mbvd.h"
#include "core/modes.h"
#include "core/stack.h"
#include "doctest.h"

using namespace fbar;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = a + (b - a) * i / (n - 1);
    return f;
}

Mbvd one_branch(double fs, double q, double c0 = 30e-15, double ratio = 0.08) {
    Mbvd m;
    m.c0 = c0;
    Branch b;
    b.cm = c0 * ratio;
    b.lm = 1.0 / (std::pow(2 * M_PI * fs, 2) * b.cm);
    b.rm = 2 * M_PI * fs * b.lm / q;
    m.branches.push_back(b);
    return m;
}

Stack lossless_plate(double e33 = 2.8) {
    Material sc;
    sc.name = "piezo";
    sc.rho = 3450;
    sc.c33 = 2.0212e11;
    sc.e33 = e33;
    sc.eps33 = 15.0 * kEps0;
    sc.mech_q = HUGE_VAL;
    Stack s;
    s.layers.push_back({sc, 85e-9, true});
    s.area = 154e-12;
    return s;
}

double plate_fs_oracle(const Stack& s) {
    auto ac = derive_acoustics(s.layers[0].mat);
    double fp = ac.velocity / (2 * s.layers[0].thickness);
    // solve (x/2) cot(x/2) = kt2 for x in (0, pi) by bisection
    auto g = [&](double xh) { return xh / std::tan(xh) - ac.kt2; };
    double a = 1e-6, b = M_PI / 2 - 1e-12;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        if ((g(a) > 0) == (g(m) > 0)) a = m; else b = m;
    }
    double xh = 0.5 * (a + b);
    return fp * xh / (M_PI / 2);
}

} // namespace

TEST_CASE("a purely capacitive spectrum has no resonances") {
    Spectrum s;
    s.f = linspace(5e9, 70e9, 201);
    for (double f : s.f) s.y.push_back(cplx(0, 2 * M_PI * f * 30e-15));
    CHECK(find_resonances(s).empty());
}

TEST_CASE("find_resonances needs at least 16 points") {
    Spectrum s;
    s.f = linspace(5e9, 70e9, 8);
    s.y.assign(8, cplx(0, 1e-3));
    CHECK_THROWS_AS(find_resonances(s), Error);
}

TEST_CASE("synthesized single-branch spectrum: fs recovered within 0.01%") {
    // the |Y| maximum sits a shade below the branch fs (the jwC0 background
    // tilts the peak, offset ~ Q^-2), so a high Q keeps the oracle honest
    double fs_true = 22.53e9, q = 600;
    Mbvd m = one_branch(fs_true, q);
    Spectrum s = evaluate(m, linspace(15e9, 30e9, 4001));
    auto pairs = find_resonances(s);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].fs == doctest::Approx(fs_true).epsilon(1e-4));
    CHECK(pairs[0].fs < pairs[0].fp);
    double fp_true = fs_true * std::sqrt(1 + 0.08);
    CHECK(pairs[0].fp == doctest::Approx(fp_true).epsilon(1e-3));
}

TEST_CASE("doubling grid density moves refined peaks by less than 0.05%") {
    Mbvd m = one_branch(22.53e9, 150);
    Spectrum s1 = evaluate(m, linspace(15e9, 30e9, 1501));
    Spectrum s2 = evaluate(m, linspace(15e9, 30e9, 3001));
    auto p1 = find_resonances(s1), p2 = find_resonances(s2);
    REQUIRE(p1.size() == 1);
    REQUIRE(p2.size() == 1);
    CHECK(std::abs(p1[0].fs - p2[0].fs) / p2[0].fs < 5e-4);
    CHECK(std::abs(p1[0].fp - p2[0].fp) / p2[0].fp < 5e-4);
}

TEST_CASE("coupling definitions") {
    CHECK(coupling(10e9, 10e9) == 0);
    CHECK(coupling(9.5e9, 10e9) == doctest::Approx(0.12028).epsilon(1e-4));
    CHECK(coupling(9.5e9, 10e9, K2Def::fractional) ==
          doctest::Approx(M_PI * M_PI / 4 * 0.05).epsilon(1e-9));
    double xh = M_PI / 2 * 0.95;
    CHECK(coupling(9.5e9, 10e9, K2Def::exact_plate) ==
          doctest::Approx(xh / std::tan(xh)).epsilon(1e-9));
    CHECK_THROWS_AS(coupling(10e9, 9.5e9), Error);
    CHECK_THROWS_AS(coupling(0, 1e9), Error);
}

TEST_CASE("coupling is scale-invariant") {
    for (double a : {0.5, 3.0, 11.7}) {
        CHECK(coupling(a * 9.5e9, a * 10e9) == doctest::Approx(coupling(9.5e9, 10e9)).epsilon(1e-12));
    }
}

TEST_CASE("extracted coupling tracks intrinsic kt2 on the lossless plate") {
    // exact-plate definition inverts the transcendental to machine precision;
    // the default fractional-sq definition runs ~1-3% high, crossing 3%
    // relative near kt2 = 0.15
    for (double kt2 : {0.05, 0.10, 0.14}) {
        double e2_over_eps = kt2 * 2.0212e11 / (1 - kt2);
        double e33 = std::sqrt(e2_over_eps * 15.0 * kEps0);
        Stack s = lossless_plate(e33);
        auto ac = derive_acoustics(s.layers[0].mat);
        double fs = plate_fs_oracle(s);
        double fp = ac.velocity / (2 * 85e-9);
        CHECK(coupling(fs, fp, K2Def::exact_plate) == doctest::Approx(ac.kt2).epsilon(1e-6));
        CHECK(std::abs(coupling(fs, fp) - ac.kt2) / ac.kt2 < 0.03);
    }
    {
        double e33 = std::sqrt(0.16 * 2.0212e11 / (1 - 0.16) * 15.0 * kEps0);
        Stack s = lossless_plate(e33);
        auto ac = derive_acoustics(s.layers[0].mat);
        double fs = plate_fs_oracle(s);
        double fp = ac.velocity / (2 * 85e-9);
        CHECK(std::abs(coupling(fs, fp) - ac.kt2) / ac.kt2 < 0.035);
    }
}

TEST_CASE("bare plate fundamental classifies as S1") {
    Stack s = lossless_plate();
    double fs = plate_fs_oracle(s);
    ModeLabel l = classify_mode(s, fs);
    CHECK(l.family == 'S');
    CHECK(l.order == 1);
    CHECK(l.str() == "S1");
    CHECK_FALSE(l.warn);
}

TEST_CASE("quartet classification: S1/S3 for symmetric, A2 appears when asymmetric") {
    auto cat = Catalog::builtin();

    Stack ptpt = quartet_stack(cat, "Pt-Pt");
    Spectrum spec = input_admittance(ptpt, Grid{});
    auto pairs = find_resonances(spec);
    REQUIRE(pairs.size() >= 2);
    CHECK(classify_mode(ptpt, pairs[0].fs).str() == "S1");
    CHECK(classify_mode(ptpt, pairs[1].fs).str() == "S3");

    Stack ptal = quartet_stack(cat, "Pt-Al");
    Spectrum spec2 = input_admittance(ptal, Grid{});
    auto pairs2 = find_resonances(spec2);
    REQUIRE(pairs2.size() >= 3);
    CHECK(classify_mode(ptal, pairs2[0].fs).str() == "S1");
    CHECK(classify_mode(ptal, pairs2[1].fs).str() == "A2");
    CHECK(classify_mode(ptal, pairs2[2].fs).str() == "S3");
}

TEST_CASE("q_bode recovers the motional Q of a synthetic branch") {
    double fs = 20e9;
    for (double q : {100.0, 200.0}) {
        Mbvd m = one_branch(fs, q);
        m.rs = 1e-4; // negligible routing loss
        Spectrum s = evaluate(m, linspace(18e9, 23e9, 4001));
        auto pairs = find_resonances(s);
        REQUIRE(pairs.size() == 1);
        double qb = q_bode(s, pairs[0].fs);
        CHECK(qb == doctest::Approx(q).epsilon(0.10));
    }
}

TEST_CASE("q_bode refuses lossless data") {
    Spectrum s;
    s.f = linspace(19e9, 21e9, 2000); // even count keeps the pole off-grid
    for (double f : s.f) {
        double w = 2 * M_PI * f, w0 = 2 * M_PI * 20e9;
        // ideal LC branch in parallel with C0: purely imaginary admittance
        double lm = 1e-8;
        s.y.push_back(cplx(0, w * 30e-15 + 1.0 / (w * lm * (w0 * w0 / (w * w) - 1))));
    }
    CHECK_THROWS_AS(q_bode(s, 20e9), Error);
}

TEST_CASE("q_bode needs local support") {
    Mbvd m = one_branch(20e9, 100);
    Spectrum s = evaluate(m, linspace(5e9, 70e9, 40)); // far too coarse near f0
    CHECK_THROWS_AS(q_bode(s, 20e9), Error);
}

TEST_CASE("fom is the plain product, printed to two decimals") {
    CHECK(fom(0.037, 64) == doctest::Approx(2.368).epsilon(1e-12));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", fom(0.037, 64));
    CHECK(std::string(buf) == "2.37");
    std::snprintf(buf, sizeof buf, "%.2f", fom(0.040, 56));
    CHECK(std::string(buf) == "2.24");
    CHECK(fom(0.0, 500) == 0);
}

TEST_CASE("analyze_modes produces ordered, consistent rows") {
    auto cat = Catalog::builtin();
    Stack s = quartet_stack(cat, "Al-Al");
    Spectrum spec = input_admittance(s, Grid{});
    auto rows = analyze_modes(s, spec);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0].label == "S1");
    CHECK(rows[1].label == "S3");
    for (const auto& r : rows) {
        CHECK(r.fs < r.fp);
        CHECK(r.k2 > 0);
        CHECK(r.k2 < 1);
        REQUIRE(r.q.has_value());
        CHECK(*r.q > 0);
        CHECK(r.q_source == "bode");
        REQUIRE(r.fom.has_value());
        CHECK(*r.fom == doctest::Approx(r.k2 * *r.q).epsilon(1e-12));
    }
    // fundamental couples harder than the third harmonic
    CHECK(rows[0].k2 > rows[1].k2);
}

TEST_CASE("mode report CSV round trip and table shape") {
    std::vector<ModeRow> rows(2);
    rows[0] = {"S1", 13.56e9, 14.2e9, 0.037, 64.0, "mbvd", 2.368, false};
    rows[1] = {"A2", 38.1e9, 38.8e9, 0.041, std::nullopt, "", std::nullopt, true};
    std::ostringstream out;
    write_mode_csv(rows, out);
    CHECK(out.str().substr(0, 36) == "label,fs_hz,fp_hz,k2,q,q_source,fom\n");
    std::istringstream in(out.str());
    auto r = read_mode_csv(in, "mem");
    REQUIRE(r.size() == 2);
    CHECK(r[0].label == "S1");
    CHECK(r[0].fs == doctest::Approx(13.56e9).epsilon(1e-11));
    CHECK(r[0].q.value() == doctest::Approx(64.0));
    CHECK_FALSE(r[1].q.has_value());
    CHECK_FALSE(r[1].fom.has_value());

    std::string table = format_mode_table(rows);
    CHECK(table.find("S1") != std::string::npos);
    CHECK(table.find("A2*") != std::string::npos); // ambiguity marker
    CHECK(table.find("fs_ghz") != std::string::npos);

    // empty report: header-only CSV
    std::ostringstream empty;
    write_mode_csv({}, empty);
    CHECK(empty.str() == "label,fs_hz,fp_hz,k2,q,q_source,fom\n");
}
