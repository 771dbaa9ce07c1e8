#include "poolforge/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "poolforge/error.h"
#include "poolforge/io.h"

namespace poolforge {

extern const char *const kBuiltinStopwords;  // generated from data/

namespace {

using json = nlohmann::json;

// ---- UTF-8 helpers -------------------------------------------------------

// Decodes one code point starting at text[pos]. Invalid sequences yield
// U+FFFD and consume one byte.
char32_t decode_utf8(std::string_view text, std::size_t &pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(text[i]);
  };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + len > text.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

void encode_utf8(char32_t cp, std::string &out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in_range(char32_t cp, char32_t lo, char32_t hi) {
  return cp >= lo && cp <= hi;
}

// Letters and digits. Outside ASCII, code points are word characters unless
// they fall in a punctuation, symbol, space, control or private-use block.
bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
  }
  if (cp < 0xC0) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (in_range(cp, 0x2000, 0x2BFF)) return false;  // punctuation, symbols
  if (in_range(cp, 0x2E00, 0x2E7F)) return false;
  if (in_range(cp, 0x3000, 0x303F)) return false;
  if (in_range(cp, 0xD800, 0xF8FF)) return false;  // surrogates, private use
  if (in_range(cp, 0xFE30, 0xFE4F)) return false;
  if (in_range(cp, 0xFF00, 0xFF0F) || in_range(cp, 0xFF1A, 0xFF20) ||
      in_range(cp, 0xFF3B, 0xFF40) || in_range(cp, 0xFF5B, 0xFF65)) {
    return false;
  }
  if (cp >= 0xFFF0 && cp <= 0xFFFF) return false;
  if (in_range(cp, 0x1F000, 0x1FAFF)) return false;  // emoji, pictographs
  return true;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0xC0) return cp;
  if (in_range(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (cp == 0x130) return 'i';
  if (cp == 0x178) return 0xFF;
  if (in_range(cp, 0x100, 0x137) || in_range(cp, 0x14A, 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (in_range(cp, 0x139, 0x148) || in_range(cp, 0x179, 0x17E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp == 0x386) return 0x3AC;  // accented Greek capitals
  if (in_range(cp, 0x388, 0x38A)) return cp + 0x25;
  if (cp == 0x38C) return 0x3CC;
  if (in_range(cp, 0x38E, 0x38F)) return cp + 0x3F;
  if (in_range(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
  if (in_range(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in_range(cp, 0x400, 0x40F)) return cp + 0x50;
  return cp;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

[[noreturn]] void parse_fail(std::string_view name, std::size_t line,
                             const std::string &what) {
  throw Error(ErrorCode::kParse, std::string(name) + ":" +
                                     std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool parse_number(std::string_view field, double &out) {
  std::string tmp(field);
  char *end = nullptr;
  errno = 0;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && errno == 0 && std::isfinite(out);
}

bool parse_int(std::string_view field, long long &out) {
  std::string tmp(field);
  char *end = nullptr;
  errno = 0;
  out = std::strtoll(tmp.c_str(), &end, 10);
  return !tmp.empty() && end == tmp.c_str() + tmp.size() && errno == 0;
}

StopwordSet parse_stopwords(std::istream &in) {
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = split_ws(line);
    if (fields.empty() || fields[0].starts_with("#")) continue;
    for (auto f : fields) {
      // Stopwords go through the same lowercasing as document text.
      for (auto &tok : tokenize(f, {}, no_stem)) words.insert(tok);
    }
  }
  return words;
}

}  // namespace

// ---- Analysis --------------------------------------------------------------

std::string s_stem(std::string_view word) {
  if (word.size() < 3) return std::string(word);
  if (ends_with(word, "ies") && !ends_with(word, "eies") &&
      !ends_with(word, "aies")) {
    return std::string(word.substr(0, word.size() - 3)) + "y";
  }
  if (ends_with(word, "es") && !ends_with(word, "aes") &&
      !ends_with(word, "ees") && !ends_with(word, "oes")) {
    return std::string(word.substr(0, word.size() - 1));
  }
  if (ends_with(word, "s") && !ends_with(word, "us") &&
      !ends_with(word, "ss")) {
    return std::string(word.substr(0, word.size() - 1));
  }
  return std::string(word);
}

std::string no_stem(std::string_view word) { return std::string(word); }

std::vector<std::string> tokenize(std::string_view text,
                                  const StopwordSet &stopwords,
                                  const Stemmer &stemmer) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!stopwords.contains(current)) {
      std::string stemmed = stemmer ? stemmer(current) : current;
      // A stem that lands on a stopword is dropped too, so tokenize is
      // idempotent on its own output.
      if (!stemmed.empty() && !stopwords.contains(stemmed)) {
        tokens.push_back(std::move(stemmed));
      }
    }
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = decode_utf8(text, pos);
    if (cp != 0xFFFD && is_word_char(cp)) {
      encode_utf8(to_lower(cp), current);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

const StopwordSet &default_stopwords() {
  static const StopwordSet words = [] {
    std::istringstream in(kBuiltinStopwords);
    return parse_stopwords(in);
  }();
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_stopwords(in);
}

// ---- Vocabulary ------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<VocabularyTerm> terms,
                       std::int64_t max_features)
    : terms_(std::move(terms)), max_features_(max_features) {
  if (max_features_ <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "max_features must be positive");
  }
  if (static_cast<std::int64_t>(terms_.size()) > max_features_) {
    throw Error(ErrorCode::kInvalidConfig,
                "vocabulary larger than max_features");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].index != i) {
      throw Error(ErrorCode::kInvalidConfig,
                  "vocabulary indices must be contiguous");
    }
    if (!(terms_[i].idf >= 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "idf must be non-negative");
    }
    if (!index_.emplace(terms_[i].term, i).second) {
      throw Error(ErrorCode::kInvalidConfig,
                  "duplicate vocabulary term: " + terms_[i].term);
    }
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::operator==(const Vocabulary &other) const {
  if (max_features_ != other.max_features_ ||
      terms_.size() != other.terms_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].term != other.terms_[i].term ||
        terms_[i].idf != other.terms_[i].idf) {
      return false;
    }
  }
  return true;
}

double SparseVector::norm() const {
  double sum = 0.0;
  for (const auto &e : entries) sum += e.value * e.value;
  return std::sqrt(sum);
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto &e : entries) sum += e.value * dense[e.index];
  return sum;
}

Vocabulary build_vocabulary(std::span<const Document> docs,
                            std::int64_t max_features,
                            const Analyzer &analyzer) {
  if (max_features <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "max_features must be positive");
  }
  if (docs.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "cannot build vocabulary from "
                                           "an empty corpus");
  }
  struct Stats {
    std::uint64_t ctf = 0;
    std::uint64_t df = 0;
  };
  std::unordered_map<std::string, Stats> stats;
  for (const auto &doc : docs) {
    auto tokens = analyzer.tokenize(doc.text);
    std::sort(tokens.begin(), tokens.end());
    for (std::size_t i = 0; i < tokens.size();) {
      std::size_t j = i;
      while (j < tokens.size() && tokens[j] == tokens[i]) ++j;
      auto &s = stats[tokens[i]];
      s.ctf += j - i;
      s.df += 1;
      i = j;
    }
  }
  std::vector<std::pair<std::string, Stats>> ranked(stats.begin(),
                                                    stats.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    if (a.second.ctf != b.second.ctf) return a.second.ctf > b.second.ctf;
    return a.first < b.first;
  });
  if (static_cast<std::int64_t>(ranked.size()) > max_features) {
    ranked.resize(static_cast<std::size_t>(max_features));
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });

  const double m = static_cast<double>(docs.size());
  std::vector<VocabularyTerm> terms;
  terms.reserve(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const double df = static_cast<double>(ranked[i].second.df);
    terms.push_back({ranked[i].first, i, std::log((1.0 + m) / (1.0 + df)) + 1.0});
  }
  return Vocabulary(std::move(terms), max_features);
}

SparseVector vectorize(const Document &doc, const Vocabulary &vocab,
                       const Analyzer &analyzer) {
  std::map<std::size_t, double> tf;
  for (const auto &tok : analyzer.tokenize(doc.text)) {
    if (auto idx = vocab.find(tok)) tf[*idx] += 1.0;
  }
  SparseVector out;
  out.entries.reserve(tf.size());
  double sq = 0.0;
  for (auto [idx, count] : tf) {
    const double v = count * vocab.terms()[idx].idf;
    if (v == 0.0) continue;
    out.entries.push_back({static_cast<std::uint32_t>(idx), v});
    sq += v * v;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto &e : out.entries) e.value *= inv;
  }
  return out;
}

const SparseVector *VectorStore::find(std::string_view doc_id) const {
  auto it = vectors.find(doc_id);
  return it == vectors.end() ? nullptr : &it->second;
}

VectorStore build_vector_store(std::span<const Document> docs,
                               std::int64_t max_features,
                               const Analyzer &analyzer) {
  VectorStore store;
  store.vocabulary = build_vocabulary(docs, max_features, analyzer);
  for (const auto &doc : docs) {
    store.vectors[doc.doc_id] = vectorize(doc, store.vocabulary, analyzer);
  }
  return store;
}

void write_vector_store(const VectorStore &store,
                        const std::filesystem::path &dir) {
  std::ostringstream vocab;
  vocab << "# max_features\t" << store.vocabulary.max_features() << "\n";
  vocab << "index\tterm\tidf\n";
  for (const auto &t : store.vocabulary.terms()) {
    vocab << t.index << '\t' << t.term << '\t' << format_double(t.idf) << '\n';
  }
  std::ostringstream vecs;
  for (const auto &[doc_id, vec] : store.vectors) {
    json entries = json::array();
    for (const auto &e : vec.entries) entries.push_back({e.index, e.value});
    vecs << json{{"doc_id", doc_id}, {"entries", entries}}.dump() << '\n';
  }
  atomic_write_file(dir / "vocabulary.tsv", vocab.str());
  atomic_write_file(dir / "vectors.jsonl", vecs.str());
}

VectorStore load_vector_store(const std::filesystem::path &dir) {
  const auto vocab_path = dir / "vocabulary.tsv";
  std::ifstream vin(vocab_path);
  if (!vin) throw Error(ErrorCode::kIo, "cannot open " + vocab_path.string());
  std::string line;
  std::size_t lineno = 0;
  std::int64_t max_features = kDefaultMaxFeatures;
  std::vector<VocabularyTerm> terms;
  while (std::getline(vin, line)) {
    ++lineno;
    if (line.starts_with("# max_features\t")) {
      max_features = std::stoll(line.substr(15));
      continue;
    }
    if (line.empty() || line == "index\tterm\tidf") continue;
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
    long long idx = 0;
    double idf = 0.0;
    if (t1 == std::string::npos || t2 == std::string::npos ||
        !parse_int(std::string_view(line).substr(0, t1), idx) ||
        !parse_number(std::string_view(line).substr(t2 + 1), idf)) {
      parse_fail(vocab_path.string(), lineno, "malformed vocabulary line");
    }
    terms.push_back({line.substr(t1 + 1, t2 - t1 - 1),
                     static_cast<std::size_t>(idx), idf});
  }
  VectorStore store;
  store.vocabulary = Vocabulary(std::move(terms), max_features);

  const auto vec_path = dir / "vectors.jsonl";
  std::ifstream in(vec_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + vec_path.string());
  lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json obj = json::parse(line);
      SparseVector vec;
      for (const auto &e : obj.at("entries")) {
        vec.entries.push_back({e.at(0).get<std::uint32_t>(),
                               e.at(1).get<double>()});
      }
      store.vectors[obj.at("doc_id").get<std::string>()] = std::move(vec);
    } catch (const json::exception &e) {
      parse_fail(vec_path.string(), lineno, e.what());
    }
  }
  return store;
}

// ---- Corpus ----------------------------------------------------------------

std::vector<Document> parse_corpus(std::istream &in, std::string_view name) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Document doc;
    try {
      json obj = json::parse(line);
      doc.doc_id = obj.at("doc_id").get<std::string>();
      doc.text = obj.value("text", std::string());
    } catch (const json::exception &e) {
      parse_fail(name, lineno, e.what());
    }
    if (doc.doc_id.empty()) parse_fail(name, lineno, "empty doc_id");
    if (!seen.insert(doc.doc_id).second) {
      parse_fail(name, lineno, "duplicate doc_id " + doc.doc_id);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_corpus(in, path.string());
}

void write_corpus(std::ostream &out, std::span<const Document> docs) {
  for (const auto &d : docs) {
    out << json{{"doc_id", d.doc_id}, {"text", d.text}}.dump() << '\n';
  }
}

// ---- Qrels -------------------------------------------------------------------

std::string_view judgment_source_name(JudgmentSource source) {
  return source == JudgmentSource::kHuman ? "human" : "machine";
}

void Qrels::set(std::string_view topic, std::string_view doc_id, int label,
                JudgmentSource source) {
  if (label != 0 && label != 1) {
    throw Error(ErrorCode::kValidation, "qrels labels must be 0 or 1");
  }
  auto it = judgments_.find(topic);
  if (it == judgments_.end()) {
    it = judgments_.emplace(std::string(topic), TopicJudgments{}).first;
  }
  it->second.insert_or_assign(std::string(doc_id), Judgment{label, source});
}

const Qrels::TopicJudgments *Qrels::topic(std::string_view topic) const {
  auto it = judgments_.find(topic);
  return it == judgments_.end() ? nullptr : &it->second;
}

std::optional<Judgment> Qrels::find(std::string_view topic,
                                    std::string_view doc_id) const {
  const auto *t = this->topic(topic);
  if (!t) return std::nullopt;
  auto it = t->find(doc_id);
  if (it == t->end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Qrels::topics() const {
  std::vector<std::string> out;
  for (const auto &[t, _] : judgments_) out.push_back(t);
  return out;
}

std::vector<std::string> Qrels::pool(std::string_view topic) const {
  std::vector<std::string> out;
  if (const auto *t = this->topic(topic)) {
    for (const auto &[doc, _] : *t) out.push_back(doc);
  }
  return out;
}

std::size_t Qrels::num_relevant(std::string_view topic) const {
  std::size_t n = 0;
  if (const auto *t = this->topic(topic)) {
    for (const auto &[_, j] : *t) n += j.label;
  }
  return n;
}

std::size_t Qrels::size() const {
  std::size_t n = 0;
  for (const auto &[_, t] : judgments_) n += t.size();
  return n;
}

Qrels parse_qrels(std::istream &in, std::string_view name) {
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 4 && f.size() != 5) {
      parse_fail(name, lineno, "expected 'topic iter doc_id grade [source]'");
    }
    double grade = 0.0;
    if (!parse_number(f[3], grade)) {
      parse_fail(name, lineno, "bad relevance grade '" + std::string(f[3]) + "'");
    }
    JudgmentSource source = JudgmentSource::kHuman;
    if (f.size() == 5) {
      if (f[4] == "human") {
        source = JudgmentSource::kHuman;
      } else if (f[4] == "machine") {
        source = JudgmentSource::kMachine;
      } else {
        parse_fail(name, lineno, "bad source '" + std::string(f[4]) + "'");
      }
    }
    qrels.set(f[0], f[2], grade > 0.0 ? 1 : 0, source);
  }
  return qrels;
}

Qrels load_qrels(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_qrels(in, path.string());
}

void write_qrels(std::ostream &out, const Qrels &qrels, QrelsFormat format) {
  for (const auto &[topic, docs] : qrels.data()) {
    for (const auto &[doc, j] : docs) {
      out << topic << " 0 " << doc << ' ' << j.label;
      if (format == QrelsFormat::kWithSource) {
        out << ' ' << judgment_source_name(j.source);
      }
      out << '\n';
    }
  }
}

// ---- Runs ------------------------------------------------------------------

const std::vector<RankedDoc> *SystemRun::ranking(std::string_view topic) const {
  auto it = rankings.find(topic);
  return it == rankings.end() ? nullptr : &it->second;
}

SystemRun parse_run(std::istream &in, std::string_view name) {
  SystemRun run;
  std::map<std::string, std::unordered_set<std::string>, std::less<>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 6) {
      parse_fail(name, lineno, "expected 'topic Q0 doc_id rank score tag'");
    }
    long long rank = 0;
    double score = 0.0;
    if (!parse_int(f[3], rank)) parse_fail(name, lineno, "bad rank");
    if (!parse_number(f[4], score)) parse_fail(name, lineno, "bad score");
    if (run.system_id.empty()) {
      run.system_id = std::string(f[5]);
    } else if (run.system_id != f[5]) {
      parse_fail(name, lineno, "mixed run tags '" + run.system_id + "' and '" +
                                   std::string(f[5]) + "'");
    }
    std::string topic(f[0]);
    if (!seen[topic].insert(std::string(f[2])).second) {
      parse_fail(name, lineno, "duplicate document " + std::string(f[2]) +
                                   " for topic " + topic);
    }
    run.rankings[topic].push_back({std::string(f[2]), score});
  }
  for (auto &[_, docs] : run.rankings) {
    std::stable_sort(docs.begin(), docs.end(),
                     [](const RankedDoc &a, const RankedDoc &b) {
                       if (a.score != b.score) return a.score > b.score;
                       return a.doc_id > b.doc_id;
                     });
  }
  return run;
}

SystemRun load_run(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_run(in, path.string());
}

void write_run(std::ostream &out, const SystemRun &run) {
  for (const auto &[topic, docs] : run.rankings) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      out << topic << " Q0 " << docs[i].doc_id << ' ' << (i + 1) << ' '
          << format_double(docs[i].score) << ' ' << run.system_id << '\n';
    }
  }
}

std::vector<SystemRun> load_runs(const std::filesystem::path &path) {
  std::vector<SystemRun> runs;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto &f : files) runs.push_back(load_run(f));
  } else {
    runs.push_back(load_run(path));
  }
  return runs;
}

}  // namespace poolforge
