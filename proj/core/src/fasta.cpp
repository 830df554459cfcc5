#include "geotax/fasta.hpp"

#include "geotax/error.hpp"
#include "geotax/io.hpp"

namespace geotax::ingest {

std::vector<FastaRecord> parse_fasta_text(std::string_view text) {
  std::vector<FastaRecord> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  auto close_record = [&]() {
    if (!out.empty() && out.back().sequence.empty()) {
      fail(ErrorCode::MalformedRecord, "record '" + out.back().header + "' has no sequence");
    }
  };
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '>') {
      close_record();
      std::string_view header = line.substr(1);
      if (header.empty())
        fail(ErrorCode::MalformedHeader, "line " + std::to_string(line_no) + ": empty header");
      out.push_back({std::string(header), {}});
      continue;
    }
    if (out.empty()) {
      fail(ErrorCode::MalformedHeader,
           "line " + std::to_string(line_no) + ": sequence data before the first header");
    }
    out.back().sequence.append(line);
  }
  close_record();
  return out;
}

std::vector<FastaRecord> parse_fasta(const std::filesystem::path& path) {
  return parse_fasta_text(read_file(path));
}

std::string format_fasta(const std::vector<FastaRecord>& records, std::size_t width) {
  std::string out;
  for (const auto& r : records) {
    out += '>';
    out += r.header;
    out += '\n';
    if (width == 0) {
      out += r.sequence;
      out += '\n';
      continue;
    }
    for (std::size_t i = 0; i < r.sequence.size(); i += width) {
      out.append(r.sequence, i, width);
      out += '\n';
    }
  }
  return out;
}

void write_fasta(const std::vector<FastaRecord>& records, const std::filesystem::path& path,
                 std::size_t width) {
  write_file_atomic(path, format_fasta(records, width));
}

}  // namespace geotax::ingest
