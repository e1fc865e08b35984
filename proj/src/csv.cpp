#include "relaysim/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace relaysim {
namespace {

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw RuntimeFailure("cannot open '" + path + "' for writing: " + std::strerror(errno));
    }
    writer(out);
    out.flush();
    if (!out) throw RuntimeFailure("write to '" + path + "' failed");
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

} // namespace

std::string format_real(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

void write_ber_csv(std::ostream& out, const std::vector<BerRecord>& records) {
    out << kBerCsvHeader << '\n';
    for (const auto& r : records) {
        out << format_real(r.snr_db) << ',' << r.scheme << ',' << r.receiver << ',' << r.bits
            << ',' << r.errors << ',' << format_real(r.ber) << ',' << format_real(r.stderr_ber)
            << ',' << format_real(r.seconds) << '\n';
    }
}

void write_ber_csv(const std::string& path, const std::vector<BerRecord>& records) {
    write_file(path, [&](std::ostream& out) { write_ber_csv(out, records); });
}

std::vector<BerRecord> read_ber_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kBerCsvHeader) {
        throw std::runtime_error("csv: missing or unexpected header");
    }
    std::vector<BerRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 8) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(f.size()) + " fields");
        }
        BerRecord r;
        try {
            r.snr_db = std::stod(f[0]);
            r.scheme = f[1];
            r.receiver = f[2];
            r.bits = std::stoull(f[3]);
            r.errors = std::stoull(f[4]);
            r.ber = std::stod(f[5]);
            r.stderr_ber = std::stod(f[6]);
            r.seconds = std::stod(f[7]);
        } catch (const std::logic_error&) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + " is malformed");
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_analytic_csv(std::ostream& out, const std::vector<AnalyticPoint>& points) {
    out << "snr_db,curve,value\n";
    for (const auto& p : points) {
        out << format_real(p.snr_db) << ',' << p.curve << ',' << format_real(p.value) << '\n';
    }
}

void write_analytic_csv(const std::string& path, const std::vector<AnalyticPoint>& points) {
    write_file(path, [&](std::ostream& out) { write_analytic_csv(out, points); });
}

} // namespace relaysim
