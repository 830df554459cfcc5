#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geotax {

enum class AlphabetKind { Dna, Protein, Bins };

// DNA letters are ordered A<C<G<T (codes 0..3) so that k-mer ranks are
// lexicographic. Protein uses the 20 standard residues in alphabetical order.
class Alphabet {
 public:
  static Alphabet dna();
  static Alphabet protein();
  static Alphabet bins(std::size_t n);

  AlphabetKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return size_; }
  // Letter for a code; Bins alphabets have no letters.
  char letter(std::uint16_t code) const;
  std::optional<std::uint16_t> code(char letter) const;
  std::string_view letters() const noexcept { return letters_; }

  bool operator==(const Alphabet&) const = default;

 private:
  Alphabet(AlphabetKind kind, std::size_t size, std::string letters)
      : kind_(kind), size_(size), letters_(std::move(letters)) {}

  AlphabetKind kind_;
  std::size_t size_;
  std::string letters_;
};

inline constexpr std::string_view kDnaLetters = "ACGT";
inline constexpr std::string_view kProteinLetters = "ACDEFGHIKLMNPQRSTVWY";

struct SymbolSequence {
  Alphabet alphabet = Alphabet::dna();
  std::vector<std::uint16_t> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
  std::string to_string() const;

  // Upper- or lower-case letters; throws BadBase (DNA) or BadResidue (protein).
  static SymbolSequence from_string(std::string_view text, const Alphabet& alphabet);

  bool operator==(const SymbolSequence&) const = default;
};

inline SymbolSequence dna(std::string_view text) {
  return SymbolSequence::from_string(text, Alphabet::dna());
}

std::size_t hamming(const SymbolSequence& a, const SymbolSequence& b);

}  // namespace geotax
