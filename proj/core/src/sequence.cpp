#include "geotax/sequence.hpp"

#include <cctype>
#include <string>

#include "geotax/error.hpp"

namespace geotax {

Alphabet Alphabet::dna() { return Alphabet(AlphabetKind::Dna, 4, std::string(kDnaLetters)); }

Alphabet Alphabet::protein() {
  return Alphabet(AlphabetKind::Protein, 20, std::string(kProteinLetters));
}

Alphabet Alphabet::bins(std::size_t n) {
  require(n >= 1 && n <= 65536, ErrorCode::InvalidArgument, "bin alphabet size out of range");
  return Alphabet(AlphabetKind::Bins, n, {});
}

char Alphabet::letter(std::uint16_t code) const {
  require(code < size_, ErrorCode::BadSymbol, "symbol " + std::to_string(code) + " out of range");
  require(!letters_.empty(), ErrorCode::InvalidArgument, "bin alphabets have no letters");
  return letters_[code];
}

std::optional<std::uint16_t> Alphabet::code(char letter) const {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(letter)));
  const auto pos = letters_.find(up);
  if (pos == std::string::npos) return std::nullopt;
  return static_cast<std::uint16_t>(pos);
}

std::string SymbolSequence::to_string() const {
  std::string out;
  if (alphabet.kind() == AlphabetKind::Bins) {
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i) out.push_back(' ');
      out += std::to_string(symbols[i]);
    }
    return out;
  }
  out.reserve(symbols.size());
  for (auto s : symbols) out.push_back(alphabet.letter(s));
  return out;
}

SymbolSequence SymbolSequence::from_string(std::string_view text, const Alphabet& alphabet) {
  require(alphabet.kind() != AlphabetKind::Bins, ErrorCode::InvalidArgument,
          "bin sequences have no text form");
  SymbolSequence seq{alphabet, {}};
  seq.symbols.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto code = alphabet.code(text[i]);
    if (!code) {
      fail(alphabet.kind() == AlphabetKind::Dna ? ErrorCode::BadBase : ErrorCode::BadResidue,
           std::string("invalid letter '") + text[i] + "' at position " + std::to_string(i));
    }
    seq.symbols.push_back(*code);
  }
  return seq;
}

std::size_t hamming(const SymbolSequence& a, const SymbolSequence& b) {
  require(a.size() == b.size(), ErrorCode::LengthMismatch, "hamming distance needs equal lengths");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a.symbols[i] != b.symbols[i];
  return diff;
}

}  // namespace geotax
