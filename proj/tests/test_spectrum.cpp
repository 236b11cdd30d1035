#include <algorithm>
#include <sstream>

#include "core/error.h"
#include "core/spectrum.h"
#include "doctest.h"

using namespace fbar;

TEST_CASE("default grid: 5-70 GHz, 6501 points, exact endpoints") {
    Grid g;
    auto f = g.points();
    REQUIRE(f.size() == 6501);
    CHECK(f.front() == 5e9);
    CHECK(f.back() == 70e9);
    CHECK(f[1] - f[0] == doctest::Approx(10e6).epsilon(1e-9));
    for (size_t i = 0; i + 1 < f.size(); ++i) REQUIRE(f[i] < f[i + 1]);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS((Grid{0, 1e9, 10}.points()), Error);
    CHECK_THROWS_AS((Grid{2e9, 1e9, 10}.points()), Error);
    CHECK_THROWS_AS((Grid{1e9, 2e9, 1}.points()), Error);
}

TEST_CASE("spectrum validation") {
    Spectrum s;
    s.f = {1e9, 2e9, 2e9};
    s.y = {{0, 1}, {0, 2}, {0, 3}};
    CHECK_THROWS_AS(validate_spectrum(s), Error);
    s.f = {1e9, 2e9};
    CHECK_THROWS_AS(validate_spectrum(s), Error); // length mismatch
}

TEST_CASE("CSV round trip at 12 significant digits") {
    Spectrum s;
    s.f = {5e9, 5.01e9, 70e9};
    s.y = {{6.16666020158e-5, 9.85722155729e-3}, {-1.5e-7, 2.5e-2}, {3.3333333333e-4, -1e-6}};
    std::ostringstream out;
    write_spectrum_csv(s, out);
    auto text = out.str();
    CHECK(text.substr(0, 23) == "freq_hz,re_y_s,im_y_s\n5");
    // 3-point spectrum -> header + 3 lines
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);

    std::istringstream in(text);
    Spectrum r = read_spectrum_csv(in, "mem");
    REQUIRE(r.size() == 3);
    CHECK(r.provenance == Provenance::measured); // files count as external data
    for (size_t i = 0; i < 3; ++i) {
        CHECK(r.f[i] == doctest::Approx(s.f[i]).epsilon(1e-11));
        CHECK(r.y[i].real() == doctest::Approx(s.y[i].real()).epsilon(1e-11));
        CHECK(r.y[i].imag() == doctest::Approx(s.y[i].imag()).epsilon(1e-11));
    }
}

TEST_CASE("CSV reader rejects malformed rows") {
    std::istringstream bad("freq_hz,re_y_s,im_y_s\n1e9,0.1\n");
    CHECK_THROWS_AS(read_spectrum_csv(bad, "mem"), Error);
    std::istringstream nonmono("freq_hz,re_y_s,im_y_s\n2e9,0,0\n1e9,0,0\n");
    CHECK_THROWS_AS(read_spectrum_csv(nonmono, "mem"), Error);
}
