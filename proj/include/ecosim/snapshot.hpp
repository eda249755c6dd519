#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ecosim/core.hpp"

namespace ecosim {

/// Malformed snapshot text; `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Snapshot text format:
//
//   alphabet <agent>|<agent>|...
//   <agent>|<agent>|...          one line per sequence
//
// where <agent> is a comma-separated attribute list, e.g. `12,5,77|3,4`.

void write_snapshot(std::ostream& out, const Population& pop);
Population read_snapshot(std::istream& in);

void snapshot_write(const Population& pop, const std::filesystem::path& path);
Population snapshot_read(const std::filesystem::path& path);

}  // namespace ecosim
