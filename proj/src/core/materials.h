#pragma once

#include <cmath>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace fbar {

constexpr double kEps0 = 8.8541878128e-12; // F/m

struct Material {
    std::string name;
    double rho = 0;    // kg/m^3
    double c33 = 0;    // Pa, non-stiffened
    double e33 = 0;    // C/m^2, zero for non-piezo
    double eps33 = 0;  // F/m, absolute
    double mech_q = HUGE_VAL; // dimensionless; inf = lossless

    bool lossless() const { return std::isinf(mech_q); }
};

struct Acoustics {
    double c_stiffened = 0;      // Pa, c33 + e33^2/eps33
    double velocity = 0;         // m/s
    double specific_impedance = 0; // Pa*s/m
    double kt2 = 0;              // intrinsic coupling
    std::complex<double> c_complex; // c_stiffened * (1 + j/Qm)
};

// throws Errc::invalid on violated invariants; context names the offender
void validate_material(const Material& m, const std::string& context);

Acoustics derive_acoustics(const Material& m);

class Catalog {
public:
    void add(const Material& m);    // rejects duplicate names
    void upsert(const Material& m); // replaces on name collision
    bool has(const std::string& name) const;
    const Material& get(const std::string& name) const;
    size_t size() const { return entries_.size(); }
    const std::vector<Material>& entries() const { return entries_; }

    static Catalog builtin();
    static Catalog load_file(const std::string& path);
    static Catalog load_stream(std::istream& in, const std::string& origin);

private:
    std::vector<Material> entries_; // insertion order kept; lookups linear, catalogs are tiny
};

} // namespace fbar
