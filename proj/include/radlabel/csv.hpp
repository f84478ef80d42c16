#ifndef RADLABEL_CSV_HPP
#define RADLABEL_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace radlabel::csv {

// Minimal RFC-4180 reader/writer. Fields containing commas, quotes or line
// breaks are quoted; embedded quotes are doubled. CRLF and LF both accepted.

// Reads all records, including the header row. Throws FormatError on a
// dangling quote.
std::vector<std::vector<std::string>> read_all(std::istream& in);
std::vector<std::vector<std::string>> read_file(const std::string& path);

std::string escape_field(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace radlabel::csv

#endif  // RADLABEL_CSV_HPP
