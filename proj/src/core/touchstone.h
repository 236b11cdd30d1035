#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/spectrum.h"

namespace fbar {

struct Network {
    std::vector<double> f;                  // Hz, strictly increasing
    std::vector<std::array<cplx, 4>> s;     // row-major [S11 S12 S21 S22]; one-port uses [0] only
    int ports = 1;
    double z0 = 50;
};

void validate_network(const Network& n);

// Touchstone v1 only (.s1p/.s2p): option line '# <unit> S <format> R <z0>',
// RI/MA/DB formats, '!' comments; v2 bracket keywords are rejected
Network read_touchstone(std::istream& in, const std::string& origin, int ports_hint);
Network read_touchstone_file(const std::string& path);

enum class Topology { one_port, series_thru, shunt_thru };

// device admittance from the embedded measurement
Spectrum to_device_admittance(const Network& n, Topology topo);

// full S -> Y conversion for a two-port point
std::array<cplx, 4> s_to_y(const std::array<cplx, 4>& s, double z0);

} // namespace fbar
