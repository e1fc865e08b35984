#pragma once

#include "relaysim/experiment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace relaysim {

/// Column order of every BER table written by the harness.
inline constexpr const char* kBerCsvHeader =
    "snr_db,protocol,receiver,bits,errors,ber,stderr,seconds";

/// Writes the header and one row per record, LF line endings, %.6g reals.
void write_ber_csv(std::ostream& out, const std::vector<BerRecord>& records);

/// Same, to a file. Throws RuntimeFailure naming the path if it cannot be written.
void write_ber_csv(const std::string& path, const std::vector<BerRecord>& records);

/// Parses a table produced by write_ber_csv. Only the CSV columns are filled.
std::vector<BerRecord> read_ber_csv(std::istream& in);

struct AnalyticPoint {
    double snr_db = 0.0;
    std::string curve;
    double value = 0.0;
};

void write_analytic_csv(std::ostream& out, const std::vector<AnalyticPoint>& points);
void write_analytic_csv(const std::string& path, const std::vector<AnalyticPoint>& points);

std::string format_real(double value);

} // namespace relaysim
