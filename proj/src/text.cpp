#include "tagmt/text.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace tagmt {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

struct Utf8Unit {
  char32_t cp = 0;
  std::size_t len = 1;
  bool valid = false;
};

Utf8Unit decode_utf8(std::string_view s, std::size_t i) {
  const auto b = [&](std::size_t k) {
    return static_cast<unsigned char>(s[i + k]);
  };
  unsigned char c0 = b(0);
  if (c0 < 0x80) return {c0, 1, true};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((c0 & 0xE0) == 0xC0) {
    len = 2;
    cp = c0 & 0x1F;
  } else if ((c0 & 0xF0) == 0xE0) {
    len = 3;
    cp = c0 & 0x0F;
  } else if ((c0 & 0xF8) == 0xF0) {
    len = 4;
    cp = c0 & 0x07;
  } else {
    return {};
  }
  if (i + len > s.size()) return {};
  for (std::size_t k = 1; k < len; ++k) {
    if ((b(k) & 0xC0) != 0x80) return {};
    cp = (cp << 6) | (b(k) & 0x3F);
  }
  return {cp, len, true};
}

void encode_utf8(char32_t cp, std::string& out) {
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

// Lowercase mapping for ASCII, Latin-1 Supplement and Latin Extended-A.
char32_t lower_cp(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  if (cp == 0x0130) return 'i';  // dotted capital I
  if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x0178) return 0x00FF;  // Y with diaeresis
  if (cp >= 0x0179 && cp <= 0x017D) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x0218 || cp == 0x021A) return cp + 1;  // Romanian S/T comma
  return cp;
}

// ASCII base letters for accented Latin codepoints; nullptr when unmapped.
const char* fold_ascii(char32_t cp) {
  cp = lower_cp(cp);
  switch (cp) {
    case 0x00E0: case 0x00E1: case 0x00E2: case 0x00E3: case 0x00E4:
    case 0x00E5: case 0x0101: case 0x0103: case 0x0105:
      return "a";
    case 0x00E6: return "ae";
    case 0x00E7: case 0x0107: case 0x0109: case 0x010B: case 0x010D:
      return "c";
    case 0x00F0: case 0x010F: case 0x0111: return "d";
    case 0x00E8: case 0x00E9: case 0x00EA: case 0x00EB: case 0x0113:
    case 0x0115: case 0x0117: case 0x0119: case 0x011B:
      return "e";
    case 0x011D: case 0x011F: case 0x0121: case 0x0123: return "g";
    case 0x0125: case 0x0127: return "h";
    case 0x00EC: case 0x00ED: case 0x00EE: case 0x00EF: case 0x0129:
    case 0x012B: case 0x012D: case 0x012F: case 0x0131:
      return "i";
    case 0x0133: return "ij";
    case 0x0135: return "j";
    case 0x0137: case 0x0138: return "k";
    case 0x013A: case 0x013C: case 0x013E: case 0x0140: case 0x0142:
      return "l";
    case 0x00F1: case 0x0144: case 0x0146: case 0x0148: case 0x0149:
    case 0x014B:
      return "n";
    case 0x00F2: case 0x00F3: case 0x00F4: case 0x00F5: case 0x00F6:
    case 0x00F8: case 0x014D: case 0x014F: case 0x0151:
      return "o";
    case 0x0153: return "oe";
    case 0x0155: case 0x0157: case 0x0159: return "r";
    case 0x015B: case 0x015D: case 0x015F: case 0x0161: case 0x017F:
    case 0x0219:
      return "s";
    case 0x00DF: return "ss";
    case 0x0163: case 0x0165: case 0x0167: case 0x021B: return "t";
    case 0x00FE: return "th";
    case 0x00F9: case 0x00FA: case 0x00FB: case 0x00FC: case 0x0169:
    case 0x016B: case 0x016D: case 0x016F: case 0x0171: case 0x0173:
      return "u";
    case 0x0175: return "w";
    case 0x00FD: case 0x00FF: case 0x0177: return "y";
    case 0x017A: case 0x017C: case 0x017E: return "z";
    default: return nullptr;
  }
}

}  // namespace

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_ws(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_ws(s[i])) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ws(s[b])) ++b;
  while (e > b && is_ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    Utf8Unit u = decode_utf8(s, i);
    out.emplace_back(s.substr(i, u.len));
    i += u.len;
  }
  return out;
}

std::string utf8_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    Utf8Unit u = decode_utf8(s, i);
    if (u.valid) {
      encode_utf8(lower_cp(u.cp), out);
    } else {
      out.push_back(s[i]);
    }
    i += u.len;
  }
  return out;
}

std::string normalize_name(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  auto emit = [&](std::string_view word) {
    if (pending_space && !out.empty()) out.push_back(' ');
    out += word;
    pending_space = false;
  };
  std::size_t i = 0;
  while (i < s.size()) {
    Utf8Unit u = decode_utf8(s, i);
    if (!u.valid) {
      emit(s.substr(i, 1));
      i += 1;
      continue;
    }
    if (u.cp < 0x80) {
      char c = static_cast<char>(u.cp);
      if (std::isalnum(static_cast<unsigned char>(c))) {
        char lowered = static_cast<char>(
            std::tolower(static_cast<unsigned char>(c)));
        emit(std::string_view(&lowered, 1));
      } else {
        pending_space = true;
      }
    } else if (const char* folded = fold_ascii(u.cp)) {
      emit(folded);
    } else {
      emit(s.substr(i, u.len));
    }
    i += u.len;
  }
  return out;
}

std::size_t levenshtein_capped(std::string_view a, std::string_view b,
                               std::size_t cap) {
  if (a.size() > b.size()) std::swap(a, b);
  if (b.size() - a.size() > cap) return cap + 1;
  std::vector<std::size_t> row(a.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t j = 1; j <= b.size(); ++j) {
    std::size_t prev_diag = row[0];
    row[0] = j;
    std::size_t row_min = row[0];
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t del = row[i] + 1;
      std::size_t ins = row[i - 1] + 1;
      std::size_t sub = prev_diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      prev_diag = row[i];
      row[i] = std::min({del, ins, sub});
      row_min = std::min(row_min, row[i]);
    }
    if (row_min > cap) return cap + 1;
  }
  return std::min(row.back(), cap + 1);
}

}  // namespace tagmt
