#pragma once

#include <string>
#include <vector>

namespace vflow {

/** Shortest representation that round-trips a double exactly ("%.17g"). */
std::string format_double(double v);

/** One CSV row from doubles, comma separated, newline terminated. */
std::string csv_row(const std::vector<double>& values);

/** Write a whole file atomically: temp file in the same directory, fsync,
 *  rename over the target. */
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

} // namespace vflow
