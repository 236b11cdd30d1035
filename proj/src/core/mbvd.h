#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "core/modes.h"
#include "core/spectrum.h"

namespace fbar {

struct Branch {
    double rm = 0; // ohm
    double lm = 0; // H
    double cm = 0; // F
};

double branch_fs(const Branch& b);

// series Rs, Ls feeding C0 (+R0) in parallel with the motional branches
struct Mbvd {
    double rs = 0, ls = 0;
    double c0 = 0;
    double r0 = 0;
    std::vector<Branch> branches;
};

void validate_mbvd(const Mbvd& m);

cplx evaluate_at(const Mbvd& m, double f);
Spectrum evaluate(const Mbvd& m, const std::vector<double>& freqs);

Mbvd initial_guess(const Spectrum& s);

struct BranchMetrics {
    double fs = 0;
    double q = 0; // inf sentinel when rm = 0
    double k2 = 0;
};

std::vector<BranchMetrics> derive_metrics(const Mbvd& m);

struct StageLog {
    std::string stage;
    int iters = 0;
    bool converged = false;
};

struct FitResult {
    Mbvd model;
    double residual = 0; // weighted complex rms, S
    std::vector<StageLog> stages;
    std::vector<BranchMetrics> metrics;
    std::vector<std::string> warnings;
};

// two-stage extraction: EM parameters off resonance first, then one motional
// branch per detected pair with EM frozen, then a bounded global polish
FitResult fit_mbvd(const Spectrum& s);

void write_mbvd(const Mbvd& m, std::ostream& out);
void write_mbvd_file(const Mbvd& m, const std::string& path);
Mbvd read_mbvd(std::istream& in, const std::string& origin);
Mbvd read_mbvd_file(const std::string& path);

} // namespace fbar
