#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ipursuit/datagen.hpp"

namespace ipursuit {

// One point per row, comma separated. An optional single header row is
// recognised by having no numeric cell; if its last name is "label" that column
// holds integer labels. Points become unit-norm columns.
// Errors: EmptyFile, ParseError(line), ZeroRow(line), IoError. Lines are 1-based.
DataMatrix parse_csv(std::string_view text);
DataMatrix load_csv(const std::filesystem::path& path);

// Shortest text that reads back to the same double.
std::string format_double(double x);

// One integer per line.
std::string labels_csv(const Labels& labels);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace ipursuit
