#ifndef ANNC_CURVE_FILE_HPP
#define ANNC_CURVE_FILE_HPP

#include "annc/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace annc {

/// One record per line: {"id": "...", "points": [[x, ...], ...]}. Blank lines
/// are skipped. Throws parse_error with the 1-based line number.
curve parse_curve_line(const std::string& text, std::size_t line);

/// Reads a whole file and additionally requires one dimension throughout.
std::vector<curve> read_curves(std::istream& is);
std::vector<curve> read_curves(const std::filesystem::path& path);

/// Calls f with each non-blank line and its 1-based number, so a caller can
/// report and skip bad records instead of failing the whole file.
void for_each_curve_line(std::istream& is,
                         const std::function<void(std::size_t line, const std::string& text)>& f);

void write_curve_line(std::ostream& os, const curve& c);

} // namespace annc

#endif // ANNC_CURVE_FILE_HPP
