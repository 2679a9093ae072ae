#include "mterm/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mterm/kernels.hpp"

namespace mterm {

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

nlohmann::json report_skeleton(const std::string& command, std::uint64_t seed,
                               const nlohmann::json& params) {
    return {{"schema", kReportSchema},
            {"command", command},
            {"version", kVersion},
            {"seed", seed},
            {"params", params},
            {"kernel", kernels::active().name}};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mterm
