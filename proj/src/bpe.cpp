#include "tagmt/bpe.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"
#include "tagmt/io.hpp"
#include "tagmt/text.hpp"

namespace tagmt {
namespace bpe {

namespace {

using SymbolPair = std::pair<std::string, std::string>;

std::vector<std::string> word_symbols(const std::string& word) {
  std::vector<std::string> symbols = utf8_chars(word);
  symbols.back() += kEndOfWord;
  return symbols;
}

// Merges all non-overlapping occurrences of `pair`, left to right.
void merge_in_place(std::vector<std::string>& symbols, const SymbolPair& pair) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  std::size_t i = 0;
  while (i < symbols.size()) {
    if (i + 1 < symbols.size() && symbols[i] == pair.first &&
        symbols[i + 1] == pair.second) {
      out.push_back(symbols[i] + symbols[i + 1]);
      i += 2;
    } else {
      out.push_back(std::move(symbols[i]));
      i += 1;
    }
  }
  symbols = std::move(out);
}

std::string render_segments(const std::vector<std::string>& symbols,
                            const std::string& marker) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    std::string piece = symbols[i];
    if (i + 1 == symbols.size()) {
      piece.resize(piece.size() - std::char_traits<char>::length(kEndOfWord));
    } else {
      piece += marker;
    }
    if (i) out.push_back(' ');
    out += piece;
  }
  return out;
}

}  // namespace

BpeModel learn_bpe(std::span<const std::string> corpus_lines,
                   std::size_t num_merges,
                   std::set<std::string> protected_tokens) {
  std::unordered_map<std::string, std::size_t> word_counts;
  for (const auto& line : corpus_lines) {
    for (auto& tok : split_ws(line)) {
      if (protected_tokens.count(tok)) continue;
      ++word_counts[tok];
    }
  }
  if (word_counts.empty()) {
    throw EmptyCorpus("learn_bpe: no trainable words in corpus");
  }

  struct Word {
    std::vector<std::string> symbols;
    std::size_t count;
  };
  std::vector<Word> words;
  words.reserve(word_counts.size());
  for (const auto& [word, count] : word_counts) {
    words.push_back({word_symbols(word), count});
  }

  BpeModel model;
  model.protected_tokens = std::move(protected_tokens);
  for (std::size_t step = 0; step < num_merges; ++step) {
    // std::map iteration is ascending, so the first maximum seen is the
    // lexicographically smallest pair among ties.
    std::map<SymbolPair, std::size_t> pair_counts;
    for (const auto& w : words) {
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        pair_counts[{w.symbols[i], w.symbols[i + 1]}] += w.count;
      }
    }
    const SymbolPair* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (!best || best_count < 2) break;
    model.merges.push_back(*best);
    for (auto& w : words) merge_in_place(w.symbols, *best);
  }
  return model;
}

std::size_t BpeApplier::PairHash::operator()(const SymbolPair& p) const {
  std::size_t h1 = std::hash<std::string>()(p.first);
  std::size_t h2 = std::hash<std::string>()(p.second);
  return h1 ^ (h2 + 0x9E3779B97F4A7C15ull + (h1 << 6) + (h1 >> 2));
}

BpeApplier::BpeApplier(const BpeModel& model) : model_(model) {
  rank_.reserve(model.merges.size());
  for (std::size_t i = 0; i < model.merges.size(); ++i) {
    rank_.emplace(model.merges[i], i);
  }
}

std::vector<std::string> BpeApplier::segment(const std::string& word) {
  auto cached = cache_.find(word);
  if (cached != cache_.end()) return cached->second;

  std::vector<std::string> symbols = word_symbols(word);
  for (;;) {
    std::size_t best_rank = rank_.size();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = rank_.find({symbols[i], symbols[i + 1]});
      if (it != rank_.end() && it->second < best_rank) best_rank = it->second;
    }
    if (best_rank == rank_.size()) break;
    merge_in_place(symbols, model_.merges[best_rank]);
  }
  cache_.emplace(word, symbols);
  return symbols;
}

std::string BpeApplier::apply(std::string_view line) {
  std::string out;
  bool first = true;
  for (const auto& tok : split_ws(line)) {
    if (!first) out.push_back(' ');
    first = false;
    if (model_.protected_tokens.count(tok)) {
      out += tok;
    } else {
      out += render_segments(segment(tok), model_.continuation_marker);
    }
  }
  return out;
}

std::string apply_bpe(const BpeModel& model, std::string_view line) {
  BpeApplier applier(model);
  return applier.apply(line);
}

std::string undo_bpe(std::string_view line, std::string_view marker) {
  std::string out;
  std::string word;
  bool open = false;
  for (const auto& tok : split_ws(line)) {
    if (tok.size() >= marker.size() &&
        std::string_view(tok).substr(tok.size() - marker.size()) == marker) {
      word += tok.substr(0, tok.size() - marker.size());
      open = true;
    } else {
      word += tok;
      if (!out.empty()) out.push_back(' ');
      out += word;
      word.clear();
      open = false;
    }
  }
  if (open) {
    throw DanglingMarker("line ends with continuation marker: " +
                         std::string(line));
  }
  return out;
}

void save_bpe(const BpeModel& model, const std::filesystem::path& codes_path) {
  std::string buf = "#version: " + std::to_string(model.version) + "\n";
  for (const auto& [left, right] : model.merges) {
    buf += left;
    buf.push_back(' ');
    buf += right;
    buf.push_back('\n');
  }
  write_file(codes_path, buf);

  nlohmann::json meta;
  meta["version"] = model.version;
  meta["continuation_marker"] = model.continuation_marker;
  meta["protected_tokens"] = model.protected_tokens;
  write_file(codes_path.string() + ".meta.json", meta.dump(2) + "\n");
}

BpeModel load_bpe(const std::filesystem::path& codes_path) {
  auto lines = read_lines(codes_path);
  if (lines.empty() || lines[0].rfind("#version:", 0) != 0) {
    throw BpeFormatError("missing #version header in " + codes_path.string());
  }
  BpeModel model;
  model.version = std::stoi(trim(lines[0].substr(9)));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::size_t space = lines[i].find(' ');
    if (space == std::string::npos || space == 0 ||
        space + 1 == lines[i].size() ||
        lines[i].find(' ', space + 1) != std::string::npos) {
      throw BpeFormatError(codes_path.string() + ":" + std::to_string(i + 1) +
                           ": expected 'left right'");
    }
    model.merges.emplace_back(lines[i].substr(0, space),
                              lines[i].substr(space + 1));
  }
  const auto meta_path =
      std::filesystem::path(codes_path.string() + ".meta.json");
  if (std::filesystem::exists(meta_path)) {
    nlohmann::json meta = nlohmann::json::parse(read_file(meta_path));
    model.continuation_marker =
        meta.value("continuation_marker", std::string("@@"));
    if (meta.contains("protected_tokens")) {
      for (const auto& tok : meta["protected_tokens"]) {
        model.protected_tokens.insert(tok.get<std::string>());
      }
    }
  }
  return model;
}

}  // namespace bpe
}  // namespace tagmt
