// io.hpp — JSON/CSV serialization. Outputs are byte-deterministic for a fixed
// config: numbers printed with %.17g, newline-terminated lines, no timestamps
// (those go in a sidecar log).

#pragma once

#include <string>

#include <json.hpp>

#include "dsch/lattice.hpp"

namespace dsch::io {

std::string format_double(double x);

nlohmann::json potential_to_json(const Potential& V);
Potential potential_from_json(const nlohmann::json& j);
Potential load_potential(const std::string& path);

// CSV with columns n,re,im; `config_echo` (if nonempty) is embedded as a
// leading "# config ..." comment line.
void write_sequence_csv(const std::string& path, const Sequence& u, const std::string& config_echo = "");
void write_kernel_csv(const std::string& path, const Kernel& K, const std::string& config_echo = "");

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dsch::io
