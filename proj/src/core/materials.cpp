#include "core/materials.h"

#include <fstream>
#include <sstream>

#include "core/error.h"
#include "core/text.h"

namespace fbar {

void validate_material(const Material& m, const std::string& context) {
    if (m.name.empty()) fail(Errc::invalid, context + ": material name empty");
    if (!(m.rho > 0)) fail(Errc::invalid, context + ": density must be > 0");
    if (!(m.c33 > 0)) fail(Errc::invalid, context + ": c33 must be > 0");
    if (!(m.eps33 > 0)) fail(Errc::invalid, context + ": eps33 must be > 0");
    if (m.e33 < 0) fail(Errc::invalid, context + ": e33 must be >= 0");
    if (!(m.mech_q > 0)) fail(Errc::invalid, context + ": Qm must be > 0 or inf");
}

Acoustics derive_acoustics(const Material& m) {
    Acoustics a;
    a.c_stiffened = m.c33 + m.e33 * m.e33 / m.eps33;
    a.velocity = std::sqrt(a.c_stiffened / m.rho);
    a.specific_impedance = m.rho * a.velocity;
    a.kt2 = m.e33 * m.e33 / (a.c_stiffened * m.eps33);
    double im = m.lossless() ? 0.0 : a.c_stiffened / m.mech_q;
    a.c_complex = {a.c_stiffened, im};
    return a;
}

void Catalog::add(const Material& m) {
    if (has(m.name)) fail(Errc::invalid, "duplicate material '" + m.name + "'");
    entries_.push_back(m);
}

void Catalog::upsert(const Material& m) {
    for (auto& e : entries_) {
        if (e.name == m.name) { e = m; return; }
    }
    entries_.push_back(m);
}

bool Catalog::has(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return true;
    return false;
}

const Material& Catalog::get(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e;
    fail(Errc::not_found, "material '" + name + "' not in catalog");
}

// Curated defaults. Densities and metal stiffness are bulk handbook values;
// Sc0.3Al0.7N uses sputtered-film literature ranges (piezo and dielectric
// constants after Caro et al. 2015 and published film measurements), with
// c33 set by the one-time calibration of the 45/85/45 nm Al-electrode
// reference stack so its fundamental lands at 22.53 GHz. data/materials.txt
// carries the same table with per-entry source notes.
Catalog Catalog::builtin() {
    Catalog cat;
    auto mk = [](const char* n, double rho, double c33, double e33, double epsr, double qm) {
        Material m;
        m.name = n;
        m.rho = rho;
        m.c33 = c33;
        m.e33 = e33;
        m.eps33 = epsr * kEps0;
        m.mech_q = qm;
        return m;
    };
    cat.add(mk("Sc0.3Al0.7N", 3450, 2.0212e11, 2.80, 15.0, 50));
    cat.add(mk("AlN", 3260, 3.95e11, 1.55, 9.5, 50));
    cat.add(mk("Al", 2700, 1.13e11, 0.0, 1.0, 50));
    cat.add(mk("Pt", 21450, 3.60e11, 0.0, 1.0, 50));
    cat.add(mk("SiO2", 2200, 7.85e10, 0.0, 3.9, 50));
    cat.add(mk("Si", 2329, 1.657e11, 0.0, 11.7, 50));
    return cat;
}

Catalog Catalog::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open materials file '" + path + "'");
    return load_stream(in, path);
}

// line grammar: name rho_kg_m3 c33_pa e33_c_m2 epsr qm ('#' comments, qm may be inf)
Catalog Catalog::load_stream(std::istream& in, const std::string& origin) {
    Catalog cat;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string body = strip_comment(line, '#');
        if (body.empty()) continue;
        auto tok = split_ws(body);
        if (tok.size() != 6)
            fail(Errc::parse, where + ": expected 'name rho c33 e33 epsr Qm', got " +
                                  std::to_string(tok.size()) + " fields");
        Material m;
        m.name = tok[0];
        m.rho = parse_double(tok[1], where + " rho");
        m.c33 = parse_double(tok[2], where + " c33");
        m.e33 = parse_double(tok[3], where + " e33");
        m.eps33 = parse_double(tok[4], where + " epsr") * kEps0;
        m.mech_q = parse_double(tok[5], where + " Qm");
        if (cat.has(m.name)) fail(Errc::parse, where + ": duplicate material '" + m.name + "'");
        try {
            validate_material(m, where);
        } catch (const Error& e) {
            fail(Errc::parse, std::string(e.what()));
        }
        cat.add(m);
    }
    return cat;
}

} // namespace fbar
