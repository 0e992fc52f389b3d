#pragma once

#include <map>
#include <string>
#include <vector>

#include "avseq/types.hpp"

namespace avseq {

// Shortest round-trip decimal formatting (%.17g trimmed); CSV bodies must be
// byte-identical across reruns of the same config.
std::string format_double(double v);

std::string join_csv_row(const std::vector<std::string>& cells);

// Flat key=value config text, sorted by key; '#' starts a comment line.
std::string render_config(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> parse_config(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& body);

}  // namespace avseq
