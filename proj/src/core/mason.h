#pragma once

#include <span>
#include <vector>

#include "core/spectrum.h"
#include "core/stack.h"

namespace fbar {

// acoustic two-port chain matrix [[a, b], [c, d]], det = 1
struct Abcd {
    cplx a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};
};

// transmission-line matrix of one layer at f; impedances are area-scaled (N*s/m)
Abcd layer_matrix(const Layer& l, double f, double area);

// impedance seen looking outward from a piezo face through `outward` (nearest
// layer first) into the termination; free termination is a zero load
cplx face_load(std::span<const Layer> outward, double f, double area, const Termination& term);

// electrical input impedance/admittance of the full stack at one frequency
cplx input_impedance_at(const Stack& s, double f);
cplx input_admittance_at(const Stack& s, double f);

// full-grid simulation; points are evaluated independently (threaded when large)
Spectrum input_admittance(const Stack& s, const std::vector<double>& freqs);
Spectrum input_admittance(const Stack& s, const Grid& g);

struct StressProfile {
    std::vector<double> z;   // m, 0 = bottom outer face, increasing
    std::vector<cplx> tau;   // complex stress amplitude, unit drive voltage
};

// acoustic stress through the thickness at fixed f, >= min_per_layer samples per layer
StressProfile stress_profile(const Stack& s, double f, int min_per_layer = 64);

// static capacitance of the driven layer
double static_capacitance(const Stack& s);

} // namespace fbar
