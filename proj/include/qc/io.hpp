#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace qc {

// Splits a line on single tab characters; empty fields are preserved.
std::vector<std::string> split_tabs(const std::string& line);

// Splits on a separator character, dropping empty pieces.
std::vector<std::string> split_char(const std::string& s, char sep);

// Streams a UTF-8 TSV file, skipping blank lines and '#' comment lines.
// fn receives the 1-based line number and the tab-separated fields.
void for_each_tsv_row(const std::filesystem::path& path,
                      const std::function<void(std::size_t, const std::vector<std::string>&)>& fn);

// Streams every line of a text file (no comment handling).
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, const std::string&)>& fn);

std::string read_file(const std::filesystem::path& path);

// Writes content to a temp file in the target directory, then renames it into
// place, so readers never observe a partially written output.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace qc
