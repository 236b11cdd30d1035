#include "core/spectrum.h"

#include <fstream>

#include "core/error.h"
#include "core/text.h"

namespace fbar {

void validate_grid(const Grid& g) {
    if (!(g.f_start > 0)) fail(Errc::invalid, "grid start must be > 0");
    if (!(g.f_stop > g.f_start)) fail(Errc::invalid, "grid stop must exceed start");
    if (g.n_points < 2) fail(Errc::invalid, "grid needs at least 2 points");
}

std::vector<double> Grid::points() const {
    validate_grid(*this);
    std::vector<double> f(n_points);
    double step = (f_stop - f_start) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) f[i] = f_start + step * i;
    f.back() = f_stop; // exact endpoint
    return f;
}

void validate_spectrum(const Spectrum& s) {
    if (s.f.size() != s.y.size()) fail(Errc::invalid, "spectrum length mismatch");
    for (size_t i = 0; i + 1 < s.f.size(); ++i)
        if (!(s.f[i] < s.f[i + 1])) fail(Errc::invalid, "spectrum frequencies must increase strictly");
    if (!s.f.empty() && !(s.f.front() > 0)) fail(Errc::invalid, "spectrum frequencies must be > 0");
}

void write_spectrum_csv(const Spectrum& s, std::ostream& out) {
    out << "freq_hz,re_y_s,im_y_s\n";
    for (size_t i = 0; i < s.size(); ++i)
        out << fmt_g(s.f[i]) << "," << fmt_g(s.y[i].real()) << "," << fmt_g(s.y[i].imag()) << "\n";
}

void write_spectrum_csv_file(const Spectrum& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write '" + path + "'");
    write_spectrum_csv(s, out);
    if (!out.good()) fail(Errc::io, "write failed for '" + path + "'");
}

Spectrum read_spectrum_csv(std::istream& in, const std::string& origin) {
    Spectrum s;
    s.provenance = Provenance::measured; // external data until told otherwise
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
            if (body == "freq_hz,re_y_s,im_y_s") continue; // headerless files tolerated
        }
        auto tok = split_char(body, ',');
        if (tok.size() != 3) fail(Errc::parse, where + ": expected 3 comma-separated fields");
        s.f.push_back(parse_double(tok[0], where + " freq"));
        s.y.emplace_back(parse_double(tok[1], where + " re_y"), parse_double(tok[2], where + " im_y"));
    }
    try {
        validate_spectrum(s);
    } catch (const Error& e) {
        fail(Errc::parse, origin + ": " + e.what());
    }
    return s;
}

Spectrum read_spectrum_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open '" + path + "'");
    return read_spectrum_csv(in, path);
}

} // namespace fbar
