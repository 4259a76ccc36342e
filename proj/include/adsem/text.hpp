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

#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace adsem {

using StringSet = std::set<std::string>;

// Normalized tokens in text order: NFKC, lowercased, split on runs of
// non-alphanumeric code points, tokens shorter than two code points dropped.
std::vector<std::string> token_sequence(std::string_view text);

// Deduplicated token_sequence. Empty text yields an empty set.
StringSet tokenize(std::string_view text);

// Contiguous n-grams (2 <= n <= n_max) over the stopword-free token sequence,
// joined by single spaces. Throws kInvalidArgument when n_max < 2.
StringSet extract_phrases(std::string_view text, int n_max = 3);

// Splits on '.', '!' or '?' followed by whitespace. Terminators stay with their
// sentence; surrounding whitespace is trimmed; empty pieces are dropped.
std::vector<std::string> split_sentences(std::string_view text);

// Whitespace-separated tokens with no normalization at all.
StringSet raw_tokens(std::string_view text);

std::string_view trim(std::string_view s);

// The builtin 50-word stopword list.
const StringSet& stopwords();

}  // namespace adsem
