#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geotax/cache.hpp"
#include "geotax/rng.hpp"
#include "geotax/sequence.hpp"

namespace geotax::ingest {

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Seam for the genome REST client. Implementations throw HttpError when the
// request cannot be made at all.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

// Serves canned responses and records every request. Unknown URLs throw
// HttpError, which is what an offline machine looks like.
class RecordedTransport : public Transport {
 public:
  void add(const std::string& url, HttpResponse response);
  HttpResponse get(const std::string& url) override;

  const std::vector<std::string>& calls() const noexcept { return calls_; }

 private:
  std::map<std::string, HttpResponse> responses_;
  std::vector<std::string> calls_;
};

enum class Source { GenomeRest, LocalFasta, Synthetic };
enum class NPolicy { Reject, Replace };

const char* to_string(Source source);
Source source_from_string(std::string_view name);

struct FetchSpec {
  Source source = Source::GenomeRest;
  std::string assembly = "hg38";
  std::string chromosome = "chr1";
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  double max_n_fraction = 0.05;
  double telomeric_margin = 0.10;
  NPolicy n_policy = NPolicy::Reject;
  std::uint64_t n_seed = 320;
  std::string fasta_path;       // LocalFasta: first record is used
  std::uint64_t synthetic_seed = 320;
  bool synthetic_fallback = false;

  // Throws ConfigError unless end > start and margin is in [0, 0.5).
  void validate() const;
  std::size_t length() const { return static_cast<std::size_t>(end - start); }
};

std::string genome_url(const FetchSpec& spec);

// Extracts the `dna` field; an `error` field or a missing `dna` field is
// RangeUnavailable.
std::string parse_sequence_response(const std::string& body);

// Uppercases, treats IUPAC ambiguity codes as ambiguous and any other
// non-ACGT character as BadBase, then applies the N policy: Reject throws TooManyAmbiguous when
// the ambiguous fraction exceeds max_n_fraction; otherwise every ambiguous
// base is replaced by a uniform base drawn from n_seed.
SymbolSequence apply_n_policy(const std::string& raw, const FetchSpec& spec,
                              std::size_t* ambiguous = nullptr);

struct FetchResult {
  SymbolSequence sequence;
  std::size_t ambiguous = 0;
  bool from_cache = false;
  bool synthetic = false;
  CacheKey key;
};

class GenomeClient {
 public:
  // Either pointer may be null: no transport means offline, no cache means
  // every fetch goes to the transport.
  GenomeClient(Transport* transport, const Cache* cache);

  FetchResult fetch(const FetchSpec& spec);
  std::size_t network_calls() const noexcept { return network_calls_; }

 private:
  Transport* transport_;
  const Cache* cache_;
  std::size_t network_calls_ = 0;
};

CacheKey fetch_cache_key(const FetchSpec& spec);

// hg38 autosome lengths, chr1..chr22.
const std::vector<std::pair<std::string, std::uint64_t>>& hg38_autosomes();

// Windows drawn uniformly across the given chromosomes (chromosome first,
// then position), avoiding the telomeric margin at both ends.
std::vector<FetchSpec> sample_regions(const std::vector<std::pair<std::string, std::uint64_t>>& chromosomes,
                                      std::size_t count, std::size_t length, const FetchSpec& base,
                                      const SeedSpec& seed);

struct ProteinRecord {
  std::string accession;
  std::string species;
  std::string sequence;

  bool operator==(const ProteinRecord&) const = default;
};

// Tab-separated `accession  species  sequence` lines; `#` comments and
// blank lines skipped. Throws MalformedRecord naming the line.
std::vector<ProteinRecord> parse_protein_list(std::string_view text);

}  // namespace geotax::ingest
