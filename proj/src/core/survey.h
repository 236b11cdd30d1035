#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "core/modes.h"

namespace fbar {

struct SurveyEntry {
    std::string source;
    std::string technology;
    double freq = 0; // Hz
    double k2 = 0;   // fraction
    double q = 0;
    double fom = 0;  // k2 * q, recomputed when absent or inconsistent
    bool below_10ghz = false;
    bool fom_recomputed = false;
};

std::vector<SurveyEntry> read_survey_csv(std::istream& in, const std::string& origin);
std::vector<SurveyEntry> read_survey_csv_file(const std::string& path);

// own results become survey rows under the given source/technology labels
std::vector<SurveyEntry> entries_from_modes(const std::vector<ModeRow>& rows,
                                            const std::string& source,
                                            const std::string& technology);

// unified frequency-sorted list; exact duplicates collapse so repeated merges
// of the same table are idempotent
std::vector<SurveyEntry> merge_survey(std::vector<SurveyEntry> own,
                                      const std::vector<SurveyEntry>& literature);

void write_survey_csv(const std::vector<SurveyEntry>& entries, std::ostream& out);
void write_survey_csv_file(const std::vector<SurveyEntry>& entries, const std::string& path);
std::string format_survey_table(const std::vector<SurveyEntry>& entries);

} // namespace fbar
