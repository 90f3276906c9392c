#pragma once

#include "factorarg/network.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace factorarg {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses a BIF 0.15 network. Supports `variable` blocks of type discrete
/// and `probability` blocks given either as a `table` or as one row per
/// parent assignment (with an optional `default` row). Property lines and
/// comments are ignored. Conditionals must sum to one within 1e-4 and are
/// renormalised exactly.
///
/// A conditional `table` lists the child distribution for each parent
/// assignment in turn, the last parent varying fastest.
DiscreteNetwork parse_bif(std::string_view text);

DiscreteNetwork load_bif_file(const std::filesystem::path& path);

/// Writes the network back as BIF with per-parent-assignment rows.
std::string write_bif(const DiscreteNetwork& net);

} // namespace factorarg
