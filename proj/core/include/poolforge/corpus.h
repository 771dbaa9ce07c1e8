#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace poolforge {

// ---------------------------------------------------------------------------
// Documents and text analysis
// ---------------------------------------------------------------------------

struct Document {
  std::string doc_id;
  std::string text;
};

using StopwordSet = std::unordered_set<std::string>;
using Stemmer = std::function<std::string(std::string_view)>;

// English s-stemmer: "ies" -> "y" (not after a/e), "es" -> "e" (not after
// a/e/o), "s" -> "" (not after u/s). Words shorter than three bytes are left
// alone. Idempotent: s_stem(s_stem(w)) == s_stem(w).
std::string s_stem(std::string_view word);

// Identity stemmer, for callers that want raw tokens.
std::string no_stem(std::string_view word);

// Maximal runs of letters/digits (UTF-8 aware), lowercased, stopwords removed,
// then stemmed. A token is dropped when either its raw form or its stem is a
// stopword.
std::vector<std::string> tokenize(std::string_view text,
                                  const StopwordSet &stopwords,
                                  const Stemmer &stemmer = s_stem);

// The built-in English stopword list (data/stopwords.txt).
const StopwordSet &default_stopwords();
StopwordSet load_stopwords(const std::filesystem::path &path);

class Analyzer {
 public:
  Analyzer() : stopwords_(default_stopwords()), stemmer_(s_stem) {}
  Analyzer(StopwordSet stopwords, Stemmer stemmer = s_stem)
      : stopwords_(std::move(stopwords)), stemmer_(std::move(stemmer)) {}

  std::vector<std::string> tokenize(std::string_view text) const {
    return poolforge::tokenize(text, stopwords_, stemmer_);
  }

 private:
  StopwordSet stopwords_;
  Stemmer stemmer_;
};

// ---------------------------------------------------------------------------
// Vocabulary and TF-IDF vectors
// ---------------------------------------------------------------------------

inline constexpr std::int64_t kDefaultMaxFeatures = 15000;

struct VocabularyTerm {
  std::string term;
  std::size_t index = 0;
  double idf = 0.0;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Terms must carry indices 0..n-1 in order.
  Vocabulary(std::vector<VocabularyTerm> terms, std::int64_t max_features);

  std::size_t size() const { return terms_.size(); }
  std::int64_t max_features() const { return max_features_; }
  const std::vector<VocabularyTerm> &terms() const { return terms_; }
  std::optional<std::size_t> find(std::string_view term) const;

  bool operator==(const Vocabulary &other) const;

 private:
  std::vector<VocabularyTerm> terms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::int64_t max_features_ = kDefaultMaxFeatures;
};

struct SparseEntry {
  std::uint32_t index = 0;
  double value = 0.0;

  bool operator==(const SparseEntry &) const = default;
};

// Entries strictly increasing by index.
struct SparseVector {
  std::vector<SparseEntry> entries;

  bool empty() const { return entries.empty(); }
  double norm() const;
  double dot(std::span<const double> dense) const;

  bool operator==(const SparseVector &) const = default;
};

// Keeps the max_features terms with the highest collection term frequency
// (ties lexicographic), then assigns indices in lexicographic term order.
// idf(t) = ln((1 + m) / (1 + df(t))) + 1.
Vocabulary build_vocabulary(std::span<const Document> docs,
                            std::int64_t max_features,
                            const Analyzer &analyzer = Analyzer());

// Raw term count times idf, L2-normalized. Out-of-vocabulary terms dropped.
SparseVector vectorize(const Document &doc, const Vocabulary &vocab,
                       const Analyzer &analyzer = Analyzer());

// doc_id -> vector, plus the vocabulary that produced them.
struct VectorStore {
  Vocabulary vocabulary;
  std::map<std::string, SparseVector, std::less<>> vectors;

  const SparseVector *find(std::string_view doc_id) const;
};

VectorStore build_vector_store(std::span<const Document> docs,
                               std::int64_t max_features,
                               const Analyzer &analyzer = Analyzer());

// Writes vocabulary.tsv and vectors.jsonl into dir.
void write_vector_store(const VectorStore &store,
                        const std::filesystem::path &dir);
VectorStore load_vector_store(const std::filesystem::path &dir);

// ---------------------------------------------------------------------------
// Corpus, qrels and run files
// ---------------------------------------------------------------------------

// JSON lines: {"doc_id": ..., "text": ...}
std::vector<Document> parse_corpus(std::istream &in, std::string_view name);
std::vector<Document> load_corpus(const std::filesystem::path &path);
void write_corpus(std::ostream &out, std::span<const Document> docs);

enum class JudgmentSource { kHuman, kMachine };

std::string_view judgment_source_name(JudgmentSource source);

struct Judgment {
  int label = 0;  // 0 or 1
  JudgmentSource source = JudgmentSource::kHuman;

  bool operator==(const Judgment &) const = default;
};

class Qrels {
 public:
  using TopicJudgments = std::map<std::string, Judgment, std::less<>>;

  // Labels other than 0/1 are rejected; binarize before calling.
  void set(std::string_view topic, std::string_view doc_id, int label,
           JudgmentSource source = JudgmentSource::kHuman);

  const TopicJudgments *topic(std::string_view topic) const;
  std::optional<Judgment> find(std::string_view topic,
                               std::string_view doc_id) const;

  std::vector<std::string> topics() const;
  // Sorted doc ids with a judgment for the topic.
  std::vector<std::string> pool(std::string_view topic) const;
  std::size_t num_relevant(std::string_view topic) const;
  std::size_t size() const;

  const std::map<std::string, TopicJudgments, std::less<>> &data() const {
    return judgments_;
  }

  bool operator==(const Qrels &) const = default;

 private:
  std::map<std::string, TopicJudgments, std::less<>> judgments_;
};

enum class QrelsFormat {
  kTrec,        // topic iter doc_id label
  kWithSource,  // topic iter doc_id label source
};

// Accepts both formats; graded labels > 0 collapse to 1, everything else to 0.
Qrels parse_qrels(std::istream &in, std::string_view name);
Qrels load_qrels(const std::filesystem::path &path);
void write_qrels(std::ostream &out, const Qrels &qrels,
                 QrelsFormat format = QrelsFormat::kWithSource);

struct RankedDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const RankedDoc &) const = default;
};

struct SystemRun {
  std::string system_id;
  std::map<std::string, std::vector<RankedDoc>, std::less<>> rankings;

  const std::vector<RankedDoc> *ranking(std::string_view topic) const;
  bool operator==(const SystemRun &) const = default;
};

// "topic Q0 doc_id rank score tag". Within a topic, documents are ordered as
// trec_eval orders them: score descending, then doc_id descending.
SystemRun parse_run(std::istream &in, std::string_view name);
SystemRun load_run(const std::filesystem::path &path);
void write_run(std::ostream &out, const SystemRun &run);

// Loads every regular file in a directory (sorted by name) or a single file.
std::vector<SystemRun> load_runs(const std::filesystem::path &path);

}  // namespace poolforge
