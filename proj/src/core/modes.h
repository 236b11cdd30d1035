#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "core/mason.h"
#include "core/spectrum.h"
#include "core/stack.h"

namespace fbar {

struct ResonancePair {
    double fs = 0;            // series resonance, |Y| maximum
    double fp = 0;            // parallel resonance, |Z| maximum
    double prominence_db = 0; // |Y| peak over the local capacitive baseline
};

// local |Y| / |Z| maxima, 3-point parabolic refinement on the log magnitude,
// paired in frequency order; pairs under the prominence floor are dropped
std::vector<ResonancePair> find_resonances(const Spectrum& s);

enum class K2Def {
    fractional_sq, // (pi^2/8) (fp^2 - fs^2) / fp^2, the default
    fractional,    // (pi^2/4) (fp - fs) / fp
    exact_plate,   // (pi fs / 2fp) cot(pi fs / 2fp)
};

double coupling(double fs, double fp, K2Def def = K2Def::fractional_sq);

struct ModeLabel {
    char family = 'S'; // S or A
    int order = 1;
    bool warn = false; // symmetry score was ambiguous (or order was capped)

    std::string str() const { return family + std::to_string(order); }
};

// harmonic order from stress sign changes; family from the sign of the
// mirror correlation of the phase-aligned profile, order parity as fallback
ModeLabel classify_mode(const Stack& s, double fs);
ModeLabel classify_profile(const StressProfile& prof);

// Q from the impedance phase-slope at f0: (f0/2) |dphi/df|, central difference
double q_bode(const Spectrum& s, double f0);

double fom(double k2, double q);

struct ModeRow {
    std::string label;
    double fs = 0, fp = 0, k2 = 0;
    std::optional<double> q;
    std::string q_source; // "bode" | "mbvd" | ""
    std::optional<double> fom;
    bool warn = false;
};

// simulate-then-extract report for one stack's spectrum
std::vector<ModeRow> analyze_modes(const Stack& stack, const Spectrum& spec,
                                   K2Def def = K2Def::fractional_sq);

void write_mode_csv(const std::vector<ModeRow>& rows, std::ostream& out);
void write_mode_csv_file(const std::vector<ModeRow>& rows, const std::string& path);
std::vector<ModeRow> read_mode_csv(std::istream& in, const std::string& origin);
std::vector<ModeRow> read_mode_csv_file(const std::string& path);
std::string format_mode_table(const std::vector<ModeRow>& rows);

} // namespace fbar
