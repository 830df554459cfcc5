#include "geotax/genome.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "geotax/error.hpp"
#include "geotax/fasta.hpp"

namespace geotax::ingest {

void RecordedTransport::add(const std::string& url, HttpResponse response) {
  responses_[url] = std::move(response);
}

HttpResponse RecordedTransport::get(const std::string& url) {
  calls_.push_back(url);
  auto it = responses_.find(url);
  if (it == responses_.end()) fail(ErrorCode::HttpError, "no recorded response for " + url);
  return it->second;
}

const char* to_string(Source source) {
  switch (source) {
    case Source::GenomeRest: return "genome-rest";
    case Source::LocalFasta: return "local-fasta";
    case Source::Synthetic: return "synthetic";
  }
  return "?";
}

Source source_from_string(std::string_view name) {
  if (name == "genome-rest") return Source::GenomeRest;
  if (name == "local-fasta") return Source::LocalFasta;
  if (name == "synthetic") return Source::Synthetic;
  fail(ErrorCode::ConfigError, "unknown source '" + std::string(name) + "'");
}

void FetchSpec::validate() const {
  require(end > start, ErrorCode::ConfigError, "fetch end must exceed start");
  require(telomeric_margin >= 0.0 && telomeric_margin < 0.5, ErrorCode::ConfigError,
          "telomeric margin must be in [0, 0.5)");
  require(max_n_fraction >= 0.0 && max_n_fraction <= 1.0, ErrorCode::ConfigError,
          "max N fraction must be in [0, 1]");
}

std::string genome_url(const FetchSpec& spec) {
  return "https://api.genome.ucsc.edu/getData/sequence?genome=" + spec.assembly +
         ";chrom=" + spec.chromosome + ";start=" + std::to_string(spec.start) +
         ";end=" + std::to_string(spec.end);
}

std::string parse_sequence_response(const std::string& body) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorCode::RangeUnavailable, "response is not a JSON object");
  if (doc.contains("error")) fail(ErrorCode::RangeUnavailable, doc["error"].dump());
  if (!doc.contains("dna") || !doc["dna"].is_string()) fail(ErrorCode::RangeUnavailable, "response has no dna field");
  return doc["dna"].get<std::string>();
}

SymbolSequence apply_n_policy(const std::string& raw, const FetchSpec& spec, std::size_t* ambiguous) {
  require(!raw.empty(), ErrorCode::RangeUnavailable, "empty sequence");
  const Alphabet dna = Alphabet::dna();
  SymbolSequence out{dna, std::vector<std::uint16_t>(raw.size())};
  std::vector<std::size_t> unknown;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw[i])));
    if (c == 'A' || c == 'C' || c == 'G' || c == 'T') {
      out.symbols[i] = *dna.code(c);
    } else if (std::string_view("NRYKMSWBDHV").find(c) != std::string_view::npos) {
      unknown.push_back(i);
    } else {
      fail(ErrorCode::BadBase, "invalid base '" + std::string(1, raw[i]) + "' at offset " + std::to_string(i));
    }
  }
  if (ambiguous) *ambiguous = unknown.size();
  const double fraction = static_cast<double>(unknown.size()) / static_cast<double>(raw.size());
  if (spec.n_policy == NPolicy::Reject && fraction > spec.max_n_fraction) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.2f%% ambiguous bases exceeds %.2f%%", 100.0 * fraction,
                  100.0 * spec.max_n_fraction);
    fail(ErrorCode::TooManyAmbiguous, buf);
  }
  Rng rng(spec.n_seed, "ambiguous");
  for (auto i : unknown) out.symbols[i] = static_cast<std::uint16_t>(rng.below(4));
  return out;
}

CacheKey fetch_cache_key(const FetchSpec& spec) {
  return make_cache_key("fetch_genome", {{"assembly", spec.assembly},
                                         {"chrom", spec.chromosome},
                                         {"start", std::to_string(spec.start)},
                                         {"end", std::to_string(spec.end)}});
}

GenomeClient::GenomeClient(Transport* transport, const Cache* cache) : transport_(transport), cache_(cache) {}

namespace {

SymbolSequence synthetic_sequence(const FetchSpec& spec) {
  Rng rng(spec.synthetic_seed, "synthetic-genome/" + spec.chromosome + ":" + std::to_string(spec.start));
  SymbolSequence out{Alphabet::dna(), std::vector<std::uint16_t>(spec.length())};
  for (auto& b : out.symbols) b = static_cast<std::uint16_t>(rng.below(4));
  return out;
}

}  // namespace

FetchResult GenomeClient::fetch(const FetchSpec& spec) {
  spec.validate();
  FetchResult result;
  if (spec.source == Source::Synthetic) {
    result.sequence = synthetic_sequence(spec);
    result.synthetic = true;
    return result;
  }
  if (spec.source == Source::LocalFasta) {
    const auto records = parse_fasta(spec.fasta_path);
    require(!records.empty(), ErrorCode::MalformedRecord, "no records in " + spec.fasta_path);
    result.sequence = apply_n_policy(records.front().sequence, spec, &result.ambiguous);
    return result;
  }

  result.key = fetch_cache_key(spec);
  std::string raw;
  if (cache_) {
    if (auto hit = cache_->get(result.key)) {
      raw = std::move(*hit);
      result.from_cache = true;
    }
  }
  if (!result.from_cache) {
    try {
      if (!transport_) fail(ErrorCode::HttpError, "no network transport available");
      ++network_calls_;
      const HttpResponse response = transport_->get(genome_url(spec));
      if (response.status == 400 || response.status == 404)
        fail(ErrorCode::RangeUnavailable, "range not served (HTTP " + std::to_string(response.status) + ")");
      if (response.status != 200) fail(ErrorCode::HttpError, "HTTP status " + std::to_string(response.status));
      raw = parse_sequence_response(response.body);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HttpError || !spec.synthetic_fallback) throw;
      result.sequence = synthetic_sequence(spec);
      result.synthetic = true;
      return result;
    }
    if (cache_) cache_->put(result.key, raw);
  }
  result.sequence = apply_n_policy(raw, spec, &result.ambiguous);
  return result;
}

const std::vector<std::pair<std::string, std::uint64_t>>& hg38_autosomes() {
  static const std::vector<std::pair<std::string, std::uint64_t>> table = {
      {"chr1", 248956422}, {"chr2", 242193529}, {"chr3", 198295559}, {"chr4", 190214555},
      {"chr5", 181538259}, {"chr6", 170805979}, {"chr7", 159345973}, {"chr8", 145138636},
      {"chr9", 138394717}, {"chr10", 133797422}, {"chr11", 135086622}, {"chr12", 133275309},
      {"chr13", 114364328}, {"chr14", 107043718}, {"chr15", 101991189}, {"chr16", 90338345},
      {"chr17", 83257441}, {"chr18", 80373285}, {"chr19", 58617616}, {"chr20", 64444167},
      {"chr21", 46709983}, {"chr22", 50818468}};
  return table;
}

std::vector<FetchSpec> sample_regions(const std::vector<std::pair<std::string, std::uint64_t>>& chromosomes,
                                      std::size_t count, std::size_t length, const FetchSpec& base,
                                      const SeedSpec& seed) {
  require(!chromosomes.empty(), ErrorCode::InvalidArgument, "no chromosomes to sample from");
  require(length > 0, ErrorCode::InvalidArgument, "region length must be positive");
  Rng rng(seed);
  std::vector<FetchSpec> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& [name, size] = chromosomes[rng.below(chromosomes.size())];
    const auto margin = static_cast<std::uint64_t>(std::floor(base.telomeric_margin * static_cast<double>(size)));
    require(size > 2 * margin + length, ErrorCode::InvalidArgument, "chromosome " + name + " too short for region");
    FetchSpec spec = base;
    spec.chromosome = name;
    spec.start = margin + rng.below(size - 2 * margin - length + 1);
    spec.end = spec.start + length;
    out.push_back(spec);
  }
  return out;
}

std::vector<ProteinRecord> parse_protein_list(std::string_view text) {
  std::vector<ProteinRecord> out;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string line(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      fail(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    ProteinRecord r{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)};
    if (r.accession.empty() || r.sequence.empty())
      fail(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": empty accession or sequence");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace geotax::ingest
