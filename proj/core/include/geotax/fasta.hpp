#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace geotax::ingest {

struct FastaRecord {
  std::string header;  // without the leading '>'
  std::string sequence;

  bool operator==(const FastaRecord&) const = default;
};

// Multi-record FASTA with wrapped or unwrapped sequence lines; CRLF accepted.
// Throws MalformedHeader for data before the first header or an empty
// header, MalformedRecord for a record with no sequence.
std::vector<FastaRecord> parse_fasta_text(std::string_view text);
std::vector<FastaRecord> parse_fasta(const std::filesystem::path& path);

// width 0 writes each sequence on one line.
std::string format_fasta(const std::vector<FastaRecord>& records, std::size_t width = 0);
void write_fasta(const std::vector<FastaRecord>& records, const std::filesystem::path& path,
                 std::size_t width = 0);

}  // namespace geotax::ingest
