#include "core/touchstone.h"

#include <cmath>
#include <fstream>
#include <numbers>

#include "core/error.h"
#include "core/text.h"

namespace fbar {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

enum class SFormat { ri, ma, db };

cplx decode(SFormat fmt, double a, double b) {
    switch (fmt) {
        case SFormat::ri: return {a, b};
        case SFormat::ma: return std::polar(a, b * kDeg);
        case SFormat::db: return std::polar(std::pow(10.0, a / 20.0), b * kDeg);
    }
    return {};
}

} // namespace

void validate_network(const Network& n) {
    if (n.ports != 1 && n.ports != 2) fail(Errc::invalid, "only 1- or 2-port networks supported");
    if (n.f.size() != n.s.size()) fail(Errc::invalid, "network length mismatch");
    if (!(n.z0 > 0)) fail(Errc::invalid, "reference impedance must be > 0");
    for (size_t i = 0; i + 1 < n.f.size(); ++i)
        if (!(n.f[i] < n.f[i + 1])) fail(Errc::invalid, "frequencies must increase strictly");
    for (const auto& s : n.s)
        for (const auto& v : s)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                fail(Errc::invalid, "non-finite S-parameter");
}

Network read_touchstone(std::istream& in, const std::string& origin, int ports_hint) {
    Network net;
    net.ports = ports_hint;
    double unit = 1e9; // GHz default per the v1 spec
    SFormat fmt = SFormat::ma;
    bool option_seen = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string body = strip_comment(line, '!');
        if (body.empty()) continue;
        if (body[0] == '[')
            fail(Errc::parse, where + ": Touchstone v2 keywords are not supported (v1 only)");
        if (body[0] == '#') {
            if (option_seen) fail(Errc::parse, where + ": duplicate option line");
            option_seen = true;
            auto tok = split_ws(body.substr(1));
            for (size_t i = 0; i < tok.size(); ++i) {
                std::string t = lower(tok[i]);
                if (t == "hz") unit = 1;
                else if (t == "khz") unit = 1e3;
                else if (t == "mhz") unit = 1e6;
                else if (t == "ghz") unit = 1e9;
                else if (t == "s") ; // scattering parameters, the only type handled
                else if (t == "y" || t == "z" || t == "h" || t == "g")
                    fail(Errc::parse, where + ": only S-parameter files are supported");
                else if (t == "ri") fmt = SFormat::ri;
                else if (t == "ma") fmt = SFormat::ma;
                else if (t == "db") fmt = SFormat::db;
                else if (t == "r") {
                    if (i + 1 >= tok.size()) fail(Errc::parse, where + ": R needs a value");
                    net.z0 = parse_double(tok[++i], where + " z0");
                } else {
                    fail(Errc::parse, where + ": unknown option token '" + tok[i] + "'");
                }
            }
            continue;
        }
        if (!option_seen) fail(Errc::parse, where + ": data before the option line");
        auto tok = split_ws(body);
        size_t want = net.ports == 1 ? 3 : 9;
        if (tok.size() != want)
            fail(Errc::parse, where + ": expected " + std::to_string(want) + " columns, got " +
                                  std::to_string(tok.size()));
        double f = parse_double(tok[0], where + " freq") * unit;
        std::array<cplx, 4> s{};
        if (net.ports == 1) {
            s[0] = decode(fmt, parse_double(tok[1], where), parse_double(tok[2], where));
        } else {
            // v1 two-port column order: S11 S21 S12 S22
            cplx s11 = decode(fmt, parse_double(tok[1], where), parse_double(tok[2], where));
            cplx s21 = decode(fmt, parse_double(tok[3], where), parse_double(tok[4], where));
            cplx s12 = decode(fmt, parse_double(tok[5], where), parse_double(tok[6], where));
            cplx s22 = decode(fmt, parse_double(tok[7], where), parse_double(tok[8], where));
            s = {s11, s12, s21, s22};
        }
        if (!net.f.empty() && !(f > net.f.back()))
            fail(Errc::parse, where + ": frequencies must increase strictly");
        net.f.push_back(f);
        net.s.push_back(s);
    }
    if (!option_seen) fail(Errc::parse, origin + ": missing option line");
    if (net.f.empty()) fail(Errc::parse, origin + ": no data lines");
    validate_network(net);
    return net;
}

Network read_touchstone_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open '" + path + "'");
    int ports = 1;
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot));
    if (ext == ".s2p") ports = 2;
    else if (ext == ".s1p") ports = 1;
    else fail(Errc::invalid, "expected a .s1p or .s2p file, got '" + path + "'");
    return read_touchstone(in, path, ports);
}

std::array<cplx, 4> s_to_y(const std::array<cplx, 4>& s, double z0) {
    const cplx s11 = s[0], s12 = s[1], s21 = s[2], s22 = s[3];
    cplx det = (1.0 + s11) * (1.0 + s22) - s12 * s21;
    if (std::abs(det) < 1e-12) fail(Errc::numeric, "singular S to Y conversion");
    cplx y11 = ((1.0 - s11) * (1.0 + s22) + s12 * s21) / (det * z0);
    cplx y12 = -2.0 * s12 / (det * z0);
    cplx y21 = -2.0 * s21 / (det * z0);
    cplx y22 = ((1.0 + s11) * (1.0 - s22) + s12 * s21) / (det * z0);
    return {y11, y12, y21, y22};
}

Spectrum to_device_admittance(const Network& n, Topology topo) {
    validate_network(n);
    if (topo == Topology::one_port && n.ports != 1)
        fail(Errc::invalid, "one_port extraction needs a one-port file");
    if (topo != Topology::one_port && n.ports != 2)
        fail(Errc::invalid, "thru extractions need a two-port file");

    Spectrum out;
    out.provenance = Provenance::measured;
    out.f = n.f;
    out.y.reserve(n.f.size());
    for (size_t i = 0; i < n.f.size(); ++i) {
        if (topo == Topology::one_port) {
            cplx s11 = n.s[i][0];
            cplx den = 1.0 + s11;
            if (std::abs(den) < 1e-12) fail(Errc::numeric, "singular one-port conversion");
            out.y.push_back((1.0 - s11) / (den * n.z0));
        } else {
            auto y = s_to_y(n.s[i], n.z0);
            if (topo == Topology::series_thru) {
                out.y.push_back(-y[2]); // series DUT carries the through current
            } else {
                out.y.push_back(y[0] + y[2]); // pi-network shunt arm at port 1
            }
        }
    }
    return out;
}

} // namespace fbar
