#include "dsch/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dsch::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

nlohmann::json potential_to_json(const Potential& V) {
    return nlohmann::json{{"offset", V.offset()}, {"values", V.values()}};
}

Potential potential_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("offset") || !j.contains("values"))
        throw std::invalid_argument("potential JSON must be an object {\"offset\": int, \"values\": [...]}");
    return Potential(j.at("offset").get<int>(), j.at("values").get<std::vector<double>>());
}

Potential load_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open potential file: " + path);
    nlohmann::json j;
    in >> j;
    return potential_from_json(j);
}

void write_sequence_csv(const std::string& path, const Sequence& u, const std::string& config_echo) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (!config_echo.empty()) out << "# config " << config_echo << "\n";
    out << "n,re,im\n";
    for (int n = u.window.n_min; n <= u.window.n_max; ++n) {
        Complex c = u.at(n);
        out << n << "," << format_double(c.real()) << "," << format_double(c.imag()) << "\n";
    }
}

void write_kernel_csv(const std::string& path, const Kernel& K, const std::string& config_echo) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (!config_echo.empty()) out << "# config " << config_echo << "\n";
    out << "n,m,re,im\n";
    for (int n = K.window.n_min; n <= K.window.n_max; ++n)
        for (int m = K.window.n_min; m <= K.window.n_max; ++m) {
            Complex c = K.at(n, m);
            out << n << "," << m << "," << format_double(c.real()) << "," << format_double(c.imag()) << "\n";
        }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

}  // namespace dsch::io
