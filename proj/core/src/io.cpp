#include "geotax/io.hpp"

#include <atomic>
#include <bit>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "geotax/error.hpp"

namespace geotax {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) fail(ErrorCode::TruncatedFile, "unexpected end of EMB1 data");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 4;
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split_line(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                   : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string encode_emb1(const EmbeddingMatrix& x) {
  const Matrix& m = x.values();
  std::string out;
  out.reserve(12 + m.data().size() * 4 + (x.has_labels() ? 1 + 4 * x.n() : 0));
  out.append(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(x.n()));
  put_u32(out, static_cast<std::uint32_t>(x.d()));
  for (double v : m.data()) {
    require(std::abs(v) <= FLT_MAX, ErrorCode::InvalidArgument,
            "value " + format_double(v) + " does not fit in f32");
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (x.has_labels()) {
    out.push_back(static_cast<char>(1));
    for (std::uint32_t label : *x.labels()) put_u32(out, label);
  }
  return out;
}

EmbeddingMatrix decode_emb1(const std::string& bytes) {
  if (bytes.size() < 4) fail(ErrorCode::TruncatedFile, "EMB1 header is truncated");
  if (bytes.compare(0, 4, kMagic, 4) != 0) fail(ErrorCode::BadMagic, "missing EMB1 magic");
  std::size_t pos = 4;
  const std::uint32_t n = get_u32(bytes, pos);
  const std::uint32_t d = get_u32(bytes, pos);
  if (n == 0 || d == 0) fail(ErrorCode::DimensionMismatch, "EMB1 declares an empty matrix");
  const std::uint64_t count = static_cast<std::uint64_t>(n) * d;
  if (pos + count * 4 > bytes.size()) {
    fail(ErrorCode::TruncatedFile, "EMB1 declares " + std::to_string(n) + "x" +
                                       std::to_string(d) + " but the value block is short");
  }
  std::vector<double> values(count);
  for (std::uint64_t i = 0; i < count; ++i)
    values[i] = static_cast<double>(std::bit_cast<float>(get_u32(bytes, pos)));
  std::optional<std::vector<std::uint32_t>> labels;
  if (pos < bytes.size()) {
    const auto flag = static_cast<unsigned char>(bytes[pos++]);
    if (flag != 0) {
      if (pos + static_cast<std::uint64_t>(n) * 4 > bytes.size())
        fail(ErrorCode::TruncatedFile, "EMB1 label block is short");
      labels.emplace(n);
      for (std::uint32_t i = 0; i < n; ++i) (*labels)[i] = get_u32(bytes, pos);
    }
    if (pos != bytes.size())
      fail(ErrorCode::DimensionMismatch, "trailing bytes after EMB1 payload");
  }
  return EmbeddingMatrix(Matrix(n, d, std::move(values)), std::move(labels));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  static std::atomic<std::uint64_t> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) + "." +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_emb1(const std::filesystem::path& path, const EmbeddingMatrix& x) {
  write_file_atomic(path, encode_emb1(x));
}

EmbeddingMatrix read_emb1(const std::filesystem::path& path) { return decode_emb1(read_file(path)); }

void write_csv(const std::filesystem::path& path, const Matrix& x) {
  std::string out;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (c) out.push_back(',');
      out += format_double(x(r, c));
    }
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

Matrix read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  const std::string text = read_file(path);
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool skipped_header = !options.header;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line = trim(std::string_view(text).substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    const auto fields = split_line(line, options.delimiter);
    if (cols == 0) cols = fields.size();
    if (fields.size() != cols) {
      fail(ErrorCode::DimensionMismatch, path.string() + ":" + std::to_string(line_no) +
                                             ": expected " + std::to_string(cols) +
                                             " fields, found " + std::to_string(fields.size()));
    }
    for (auto field : fields) {
      field = trim(field);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) +
                                        ": cannot parse '" + std::string(field) + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) fail(ErrorCode::DimensionMismatch, path.string() + " has no data rows");
  return Matrix(rows, cols, std::move(values));
}

MatrixFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? MatrixFormat::Csv : MatrixFormat::Emb1;
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path, const CsvOptions& options) {
  if (format_for_path(path) == MatrixFormat::Csv) return EmbeddingMatrix(read_csv(path, options));
  return read_emb1(path);
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& x,
                      MatrixFormat format) {
  if (format == MatrixFormat::Csv)
    write_csv(path, x.values());
  else
    write_emb1(path, x);
}

}  // namespace geotax
