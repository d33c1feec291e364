#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace facebn {

// Shortest decimal form that parses back to the same double. All persisted
// artifacts use this so that identical runs produce identical bytes.
std::string format_double(double value);

double parse_double(std::string_view text);        // FormatError on garbage
std::int64_t parse_int(std::string_view text);     // FormatError on garbage

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char separator);
std::vector<std::string> split_whitespace(std::string_view text);

std::string read_text_file(const std::string& path);                 // IoError
void write_text_file(const std::string& path, const std::string& content);

}  // namespace facebn
