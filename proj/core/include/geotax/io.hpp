#pragma once

#include <filesystem>
#include <string>

#include "geotax/matrix.hpp"

namespace geotax {

// EMB1: "EMB1", u32 LE n, u32 LE d, n*d f32 LE row-major, then optionally
// u8 flag (1) followed by n u32 LE labels.
void write_emb1(const std::filesystem::path& path, const EmbeddingMatrix& x);
EmbeddingMatrix read_emb1(const std::filesystem::path& path);

std::string encode_emb1(const EmbeddingMatrix& x);
EmbeddingMatrix decode_emb1(const std::string& bytes);

struct CsvOptions {
  bool header = false;  // skip the first line
  char delimiter = ',';
};

// Values are written with 17 significant digits, so CSV round-trips exactly.
void write_csv(const std::filesystem::path& path, const Matrix& x);
Matrix read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

enum class MatrixFormat { Emb1, Csv };

// Chooses the format from the extension (.csv) or the EMB1 magic.
EmbeddingMatrix read_embeddings(const std::filesystem::path& path, const CsvOptions& options = {});
void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& x,
                      MatrixFormat format);
MatrixFormat format_for_path(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary file and rename so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace geotax
