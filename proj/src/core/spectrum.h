#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace fbar {

using cplx = std::complex<double>;

struct Grid {
    double f_start = 5e9;
    double f_stop = 70e9;
    int n_points = 6501; // 10 MHz step over the default span

    std::vector<double> points() const;
};

void validate_grid(const Grid& g);

enum class Provenance { simulated, measured };

struct Spectrum {
    std::vector<double> f;  // Hz, strictly increasing
    std::vector<cplx> y;    // S
    Provenance provenance = Provenance::simulated;

    size_t size() const { return f.size(); }
};

void validate_spectrum(const Spectrum& s);

void write_spectrum_csv(const Spectrum& s, std::ostream& out);
void write_spectrum_csv_file(const Spectrum& s, const std::string& path);
Spectrum read_spectrum_csv(std::istream& in, const std::string& origin);
Spectrum read_spectrum_csv_file(const std::string& path);

} // namespace fbar
