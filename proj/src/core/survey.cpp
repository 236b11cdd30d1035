#include "core/survey.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.h"
#include "core/text.h"

namespace fbar {

namespace {

void finalize_entry(SurveyEntry& e, const std::string& where, bool fom_given) {
    if (!(e.freq > 0)) fail(Errc::parse, where + ": frequency must be > 0");
    if (e.k2 < 0 || e.q < 0) fail(Errc::parse, where + ": k2 and q must be >= 0");
    double product = e.k2 * e.q;
    if (fom_given) {
        double ref = std::max(std::abs(product), 1e-30);
        if (std::abs(e.fom - product) > 0.01 * ref) {
            e.fom = product; // the recomputed product wins
            e.fom_recomputed = true;
        }
    } else {
        e.fom = product;
    }
    e.below_10ghz = e.freq < 10e9;
}

} // namespace

std::vector<SurveyEntry> read_survey_csv(std::istream& in, const std::string& origin) {
    std::vector<SurveyEntry> out;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (body == "source,technology,freq_hz,k2,q,fom") continue;
        }
        auto tok = split_char(body, ',');
        if (tok.size() != 6) fail(Errc::parse, where + ": expected 6 fields");
        SurveyEntry e;
        e.source = trim(tok[0]);
        e.technology = trim(tok[1]);
        e.freq = parse_double(tok[2], where + " freq");
        e.k2 = parse_double(tok[3], where + " k2");
        e.q = parse_double(tok[4], where + " q");
        bool fom_given = !trim(tok[5]).empty();
        if (fom_given) e.fom = parse_double(tok[5], where + " fom");
        finalize_entry(e, where, fom_given);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SurveyEntry> read_survey_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open '" + path + "'");
    return read_survey_csv(in, path);
}

std::vector<SurveyEntry> entries_from_modes(const std::vector<ModeRow>& rows,
                                            const std::string& source,
                                            const std::string& technology) {
    std::vector<SurveyEntry> out;
    for (const auto& r : rows) {
        SurveyEntry e;
        e.source = source;
        e.technology = technology;
        e.freq = r.fs;
        e.k2 = r.k2;
        e.q = r.q.value_or(0);
        finalize_entry(e, source, false);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SurveyEntry> merge_survey(std::vector<SurveyEntry> own,
                                      const std::vector<SurveyEntry>& literature) {
    auto same = [](const SurveyEntry& a, const SurveyEntry& b) {
        return a.source == b.source && a.technology == b.technology && a.freq == b.freq &&
               a.k2 == b.k2 && a.q == b.q && a.fom == b.fom;
    };
    for (const auto& e : literature) {
        bool dup = false;
        for (const auto& have : own)
            if (same(have, e)) { dup = true; break; }
        if (!dup) own.push_back(e);
    }
    std::stable_sort(own.begin(), own.end(),
                     [](const SurveyEntry& a, const SurveyEntry& b) { return a.freq < b.freq; });
    return own;
}

void write_survey_csv(const std::vector<SurveyEntry>& entries, std::ostream& out) {
    out << "source,technology,freq_hz,k2,q,fom\n";
    for (const auto& e : entries) {
        out << e.source << "," << e.technology << "," << fmt_g(e.freq) << "," << fmt_g(e.k2) << ","
            << fmt_g(e.q) << "," << fmt_g(e.fom) << "\n";
    }
}

void write_survey_csv_file(const std::vector<SurveyEntry>& entries, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write '" + path + "'");
    write_survey_csv(entries, out);
    if (!out.good()) fail(Errc::io, "write failed for '" + path + "'");
}

std::string format_survey_table(const std::vector<SurveyEntry>& entries) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s %-12s %10s %8s %9s %8s\n", "source", "technology",
                  "freq_ghz", "k2_pct", "q", "fom");
    out << buf;
    bool any_low = false;
    for (const auto& e : entries) {
        std::string src = e.source + (e.below_10ghz ? " ^" : "");
        any_low |= e.below_10ghz;
        std::snprintf(buf, sizeof buf, "%-24s %-12s %10.3f %8.2f %9.1f %8.2f\n", src.c_str(),
                      e.technology.c_str(), e.freq / 1e9, e.k2 * 100, e.q, e.fom);
        out << buf;
    }
    if (any_low) out << "^ below the 10 GHz survey floor\n";
    return out.str();
}

} // namespace fbar
