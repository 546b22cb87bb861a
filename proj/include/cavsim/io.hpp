// io.hpp — CSV and JSON-lines serialization of fidelity reports.
//
// CSV: RFC-4180-style quoting, fixed column order per scenario, one metadata
// comment line carrying the run parameters (never timestamps), then a header
// row, then data rows. Doubles print with %.17g so identical runs produce
// byte-identical files.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavsim/report.hpp"

namespace cavsim::io {

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

struct Table {
    std::string metadata;             // one "# key=value ..." comment line
    std::vector<std::string> header;  // column names
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const {
        std::ostringstream os;
        if (!metadata.empty()) os << "# " << metadata << "\n";
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << csv_escape(header[i]);
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
            os << "\n";
        }
        return os.str();
    }
};

inline nlohmann::json report_to_json(const FidelityReport& rep) {
    nlohmann::json j;
    j["fidelity"] = rep.fidelity;
    j["model"] = rep.model;
    j["n_atoms"] = rep.n_atoms;
    j["fock_cutoff"] = rep.fock_cutoff;
    j["g"] = rep.g;
    j["delta"] = rep.delta;
    j["omega_rabi"] = rep.omega_rabi;
    j["t"] = rep.t;
    j["nbar"] = rep.nbar;
    j["k"] = rep.k;
    j["truncation_leakage"] = rep.truncation_leakage;
    j["integrator"] = {{"steps", rep.steps},
                       {"refinements", rep.refinements},
                       {"richardson_diff", rep.richardson_diff}};
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [k, v] : rep.per_input) per[k] = v;
    j["per_input"] = per;
    nlohmann::json df = nlohmann::json::object();
    for (const auto& [k, v] : rep.delta_f) df[k] = v;
    j["delta_f"] = df;
    nlohmann::json ex = nlohmann::json::object();
    for (const auto& [k, v] : rep.extra) ex[k] = v;
    j["extra"] = ex;
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

}  // namespace cavsim::io
