#include "geotax/texture.hpp"

#include <cmath>
#include <cstdio>

#include "geotax/error.hpp"
#include "geotax/perturb.hpp"

namespace geotax::texture {

namespace {

void check_dna(const SymbolSequence& seq) {
  require(seq.alphabet.kind() == AlphabetKind::Dna, ErrorCode::BadBase, "expected a DNA sequence");
}

constexpr std::size_t kSegment = 50;

std::size_t pow4(std::size_t k) { return std::size_t{1} << (2 * k); }

std::uint16_t draw(const std::array<double, 4>& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::uint16_t b = 0; b < 3; ++b) {
    acc += p[b];
    if (u < acc) return b;
  }
  return 3;
}

}  // namespace

std::vector<double> KmerHistogram::frequencies() const {
  std::vector<double> out(counts.size(), 0.0);
  if (total == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i)
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return out;
}

KmerHistogram kmer_histogram(const SymbolSequence& seq, std::size_t k) {
  check_dna(seq);
  require(k >= 1 && k <= 12, ErrorCode::InvalidArgument, "k must be in [1, 12]");
  require(seq.size() >= k, ErrorCode::TooShort, "sequence shorter than k");
  KmerHistogram h{k, std::vector<std::uint64_t>(pow4(k), 0), seq.size() - k + 1};
  const std::size_t mask = pow4(k) - 1;
  std::size_t rank = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    require(seq.symbols[i] < 4, ErrorCode::BadBase, "base code out of range");
    rank = ((rank << 2) | seq.symbols[i]) & mask;
    if (i + 1 >= k) ++h.counts[rank];
  }
  return h;
}

std::vector<std::size_t> complement_permutation(std::size_t k) {
  std::vector<std::size_t> perm(pow4(k));
  for (std::size_t r = 0; r < perm.size(); ++r) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t base = (r >> (2 * i)) & 3;  // read from the last position
      out = (out << 2) | (3 - base);
    }
    perm[r] = out;
  }
  return perm;
}

SymbolSequence dinucleotide_shuffle(const SymbolSequence& seq, const SeedSpec& seed) {
  check_dna(seq);
  require(seq.size() >= 2, ErrorCode::TooShort, "shuffle needs at least 2 bases");
  const std::size_t n = seq.size();
  std::array<std::vector<std::uint16_t>, 4> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    require(seq.symbols[i] < 4, ErrorCode::BadBase, "base code out of range");
    edges[seq.symbols[i]].push_back(seq.symbols[i + 1]);
  }
  const std::uint16_t first = seq.symbols.front();
  const std::uint16_t last = seq.symbols.back();
  Rng rng(seed);

  // Last-exit edges must form an arborescence rooted at the final base.
  std::array<std::size_t, 4> exit_index{};
  for (int attempt = 0;; ++attempt) {
    if (attempt > 100000) fail(ErrorCode::DegenerateInput, "no Eulerian path found");
    for (std::uint16_t u = 0; u < 4; ++u)
      if (u != last && !edges[u].empty()) exit_index[u] = static_cast<std::size_t>(rng.below(edges[u].size()));
    bool ok = true;
    for (std::uint16_t u = 0; u < 4 && ok; ++u) {
      if (u == last || edges[u].empty()) continue;
      std::uint16_t v = u;
      for (int steps = 0; v != last; ++steps) {
        if (steps > 4) {
          ok = false;
          break;
        }
        v = edges[v][exit_index[v]];
      }
    }
    if (ok) break;
  }
  for (std::uint16_t u = 0; u < 4; ++u) {
    auto& e = edges[u];
    if (e.empty()) continue;
    if (u != last) {
      std::swap(e[exit_index[u]], e.back());
      rng.shuffle(std::span<std::uint16_t>(e.data(), e.size() - 1));
    } else {
      rng.shuffle(e);
    }
  }
  SymbolSequence out{seq.alphabet, {}};
  out.symbols.reserve(n);
  std::array<std::size_t, 4> used{};
  std::uint16_t cur = first;
  out.symbols.push_back(cur);
  for (std::size_t i = 1; i < n; ++i) {
    require(used[cur] < edges[cur].size(), ErrorCode::DegenerateInput, "Eulerian walk stalled");
    cur = edges[cur][used[cur]++];
    out.symbols.push_back(cur);
  }
  return out;
}

MarkovModel fit_markov(std::span<const SymbolSequence> corpus) {
  require(!corpus.empty(), ErrorCode::InvalidArgument, "Markov fit needs a nonempty corpus");
  std::array<double, 4> base{};
  std::array<std::array<double, 4>, 4> pair{};
  double total = 0.0;
  for (const auto& s : corpus) {
    check_dna(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      require(s.symbols[i] < 4, ErrorCode::BadBase, "base code out of range");
      base[s.symbols[i]] += 1.0;
      total += 1.0;
      if (i + 1 < s.size()) pair[s.symbols[i]][s.symbols[i + 1]] += 1.0;
    }
  }
  require(total > 0.0, ErrorCode::InvalidArgument, "corpus has no bases");
  MarkovModel m;
  for (int b = 0; b < 4; ++b) {
    m.initial[b] = base[b] / total;
    const double row = pair[b][0] + pair[b][1] + pair[b][2] + pair[b][3];
    m.fallback[b] = row == 0.0;
    for (int c = 0; c < 4; ++c) m.transition[b][c] = row > 0.0 ? pair[b][c] / row : 0.25;
  }
  return m;
}

SymbolSequence gen_markov(const MarkovModel& model, std::size_t length, const SeedSpec& seed) {
  Rng rng(seed);
  SymbolSequence out{Alphabet::dna(), {}};
  out.symbols.reserve(length);
  if (length == 0) return out;
  out.symbols.push_back(draw(model.initial, rng));
  while (out.symbols.size() < length) out.symbols.push_back(draw(model.transition[out.symbols.back()], rng));
  return out;
}

double rc_kmer_cosine(const SymbolSequence& seq, std::size_t k) {
  const auto a = kmer_histogram(seq, k);
  const auto b = kmer_histogram(perturb::reverse_complement(seq), k);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    const double x = static_cast<double>(a.counts[i]);
    const double y = static_cast<double>(b.counts[i]);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  return dot / std::sqrt(na * nb);
}

double recovery_fraction(double real, double condition, double random) {
  if (real == random) fail(ErrorCode::DegenerateGap, "real and random scores are equal");
  return (condition - random) / (real - random);
}

std::vector<SymbolSequence> synthetic_corpus(std::size_t count, std::size_t length,
                                             const SeedSpec& seed) {
  const Rng root(seed);
  std::vector<SymbolSequence> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    MarkovModel m;
    auto random_row = [&]() {
      std::array<double, 4> p{};
      double s = 0.0;
      // Squared uniforms give rows with clearly uneven composition.
      for (double& v : p) {
        const double u = rng.uniform();
        v = u * u + 0.02;
        s += v;
      }
      for (double& v : p) v /= s;
      return p;
    };
    m.initial = random_row();
    for (auto& row : m.transition) row = random_row();
    // Segments are written on a random strand.
    SymbolSequence seq{Alphabet::dna(), {}};
    seq.symbols.reserve(length);
    for (std::uint64_t seg = 0; seq.size() < length; ++seg) {
      const std::size_t n = std::min<std::size_t>(kSegment, length - seq.size());
      SymbolSequence part = gen_markov(m, n, {rng.split(seg).key(), "segment"});
      if (rng.below(2) == 1 && n >= 1) part = perturb::reverse_complement(part);
      seq.symbols.insert(seq.symbols.end(), part.symbols.begin(), part.symbols.end());
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<SymbolSequence> uniform_corpus(std::size_t count, std::size_t length,
                                           const SeedSpec& seed) {
  const Rng root(seed);
  std::vector<SymbolSequence> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    SymbolSequence s{Alphabet::dna(), std::vector<std::uint16_t>(length)};
    for (auto& b : s.symbols) b = static_cast<std::uint16_t>(rng.below(4));
    out.push_back(std::move(s));
  }
  return out;
}

Embedder kmer_embedder(std::vector<std::size_t> ks) {
  return [ks = std::move(ks)](std::span<const SymbolSequence> seqs) {
    std::size_t width = 0;
    for (auto k : ks) width += pow4(k);
    Matrix out(seqs.size(), width);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      std::size_t col = 0;
      for (auto k : ks) {
        for (double f : kmer_histogram(seqs[i], k).frequencies()) out(i, col++) = f;
      }
    }
    return out;
  };
}

Embedder projected_kmer_embedder(std::vector<std::size_t> ks, std::size_t dim, const SeedSpec& seed) {
  require(dim >= 1, ErrorCode::InvalidArgument, "projection dimension must be positive");
  std::size_t width = 0;
  for (auto k : ks) width += pow4(k);
  Rng rng(seed);
  Matrix w(width, dim);
  for (double& v : w.data()) v = rng.normal();
  return [ks = std::move(ks), w = std::move(w)](std::span<const SymbolSequence> seqs) {
    Matrix f(seqs.size(), w.rows());
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      std::size_t col = 0;
      for (auto k : ks) {
        const double uniform = 1.0 / static_cast<double>(pow4(k));
        for (double v : kmer_histogram(seqs[i], k).frequencies()) f(i, col++) = v - uniform;
      }
    }
    return f * w;
  };
}

std::vector<ConditionRow> texture_experiment(std::span<const SymbolSequence> real,
                                             const Embedder& embed,
                                             const stability::SplitConfig& cfg,
                                             const SeedSpec& seed) {
  require(real.size() >= 10, ErrorCode::TooFewSamples, "texture test needs at least 10 sequences");
  const Rng root(seed);
  std::vector<SymbolSequence> shuffled, markov, random;
  const MarkovModel pooled = fit_markov(real);
  for (std::size_t i = 0; i < real.size(); ++i) {
    shuffled.push_back(dinucleotide_shuffle(real[i], {root.split("shuffle").split(i).key(), "shuffle"}));
    markov.push_back(gen_markov(pooled, real[i].size(), {root.split("markov").split(i).key(), "markov"}));
    Rng r = root.split("random").split(static_cast<std::uint64_t>(i));
    SymbolSequence s{Alphabet::dna(), std::vector<std::uint16_t>(real[i].size())};
    for (auto& b : s.symbols) b = static_cast<std::uint16_t>(r.below(4));
    random.push_back(std::move(s));
  }
  const std::vector<std::pair<std::string, const std::vector<SymbolSequence>*>> conditions = {
      {"Real", nullptr}, {"Shuffled", &shuffled}, {"Markov", &markov}, {"Random", &random}};

  std::vector<ConditionRow> rows;
  for (const auto& [name, corpus] : conditions) {
    std::span<const SymbolSequence> fwd = corpus ? std::span<const SymbolSequence>(*corpus) : real;
    std::vector<SymbolSequence> rc;
    for (const auto& s : fwd) rc.push_back(perturb::reverse_complement(s));
    const EmbeddingMatrix xf(embed(fwd));
    const EmbeddingMatrix xr(embed(rc));
    ConditionRow row;
    row.condition = name;
    row.rc_rdm = stability::rdm_similarity(xf.values(), xr.values()).value;
    const auto rep = stability::evaluate(xf, xr, {}, cfg, {seed.seed, seed.stream + "/" + name}, name);
    row.rc_composite = rep.mean.composite;
    rows.push_back(row);
  }
  for (auto& row : rows) row.recovery = recovery_fraction(rows[0].rc_rdm, row.rc_rdm, rows[3].rc_rdm);
  return rows;
}

std::string texture_table_csv(std::span<const ConditionRow> rows) {
  std::string out = "Condition,RC RDM,RC Composite,Recovery\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.3f,%.3f,%.0f%%\n", r.rc_rdm, r.rc_composite, 100.0 * r.recovery);
    out += r.condition + buf;
  }
  return out;
}

}  // namespace geotax::texture
