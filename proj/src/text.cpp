// Copyright 2026 The adsem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adsem/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>

#include <algorithm>
#include <sstream>

#include "adsem/error.hpp"

namespace adsem {

namespace builtin {
std::string_view stopwords_text();
}

namespace {

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

void ascii_tokens(std::string_view text, std::vector<std::string>& out) {
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2) out.push_back(current);
    current.clear();
  };
  for (char c : text) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current.push_back(c);
    } else if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      flush();
    }
  }
  flush();
}

void unicode_tokens(std::string_view text, std::vector<std::string>& out) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kUnavailable, "ICU NFKC normalizer unavailable");
  }
  const icu::UnicodeString source =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfkc->normalize(source, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kParse, "text is not normalizable");
  }
  normalized.toLower(icu::Locale::getRoot());

  icu::UnicodeString current;
  int32_t code_points = 0;
  auto flush = [&] {
    if (code_points >= 2) {
      std::string utf8;
      current.toUTF8String(utf8);
      out.push_back(std::move(utf8));
    }
    current.remove();
    code_points = 0;
  };
  for (int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    if (u_isalnum(c)) {
      current.append(c);
      ++code_points;
    } else {
      flush();
    }
    i += U16_LENGTH(c);
  }
  flush();
}

}  // namespace

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> token_sequence(std::string_view text) {
  std::vector<std::string> out;
  if (is_ascii(text)) {
    ascii_tokens(text, out);
  } else {
    unicode_tokens(text, out);
  }
  return out;
}

StringSet tokenize(std::string_view text) {
  auto seq = token_sequence(text);
  return StringSet(std::make_move_iterator(seq.begin()), std::make_move_iterator(seq.end()));
}

StringSet extract_phrases(std::string_view text, int n_max) {
  if (n_max < 2) {
    throw Error(ErrorCode::kInvalidArgument, "phrase n_max must be >= 2");
  }
  const StringSet& stop = stopwords();
  std::vector<std::string> seq;
  for (auto& t : token_sequence(text)) {
    if (!stop.contains(t)) seq.push_back(std::move(t));
  }
  StringSet phrases;
  for (std::size_t start = 0; start < seq.size(); ++start) {
    std::string phrase = seq[start];
    for (int n = 2; n <= n_max && start + n <= seq.size(); ++n) {
      phrase += ' ';
      phrase += seq[start + n - 1];
      phrases.insert(phrase);
    }
  }
  return phrases;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && i + 1 < text.size() && is_space(text[i + 1])) {
      auto piece = trim(text.substr(start, i + 1 - start));
      if (!piece.empty()) out.emplace_back(piece);
      start = i + 1;
    }
  }
  auto tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

StringSet raw_tokens(std::string_view text) {
  StringSet out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace(text.substr(i, j - i));
    i = j;
  }
  return out;
}

const StringSet& stopwords() {
  static const StringSet words = [] {
    StringSet s;
    std::istringstream in{std::string(builtin::stopwords_text())};
    std::string line;
    while (std::getline(in, line)) {
      auto w = trim(line);
      if (!w.empty() && w.front() != '#') s.emplace(w);
    }
    return s;
  }();
  return words;
}

}  // namespace adsem
