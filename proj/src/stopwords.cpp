// Copyright 2026 The ottopics Authors.
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

#include <string>
#include <unordered_set>

#include "ottopics/corpus.hpp"

namespace ottopics {

// Lowercase English function words. Entries shorter than the default minimum
// token length are kept so the list stays usable with min_token_len = 1.
const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am",
      "an", "and", "any", "are", "aren", "as", "at", "be", "because", "been",
      "before", "being", "below", "between", "both", "but", "by", "can",
      "cannot", "could", "couldn", "did", "didn", "do", "does", "doesn",
      "doing", "don", "down", "during", "each", "either", "else", "ever",
      "every", "few", "for", "from", "further", "get", "gets", "got", "had",
      "hadn", "has", "hasn", "have", "haven", "having", "he", "her", "here",
      "hers", "herself", "him", "himself", "his", "how", "however", "i", "if",
      "in", "into", "is", "isn", "it", "its", "itself", "just", "let", "ll",
      "may", "me", "might", "mightn", "more", "most", "must", "mustn", "my",
      "myself", "neither", "no", "nor", "not", "now", "of", "off", "often",
      "on", "once", "only", "or", "other", "others", "otherwise", "our",
      "ours", "ourselves", "out", "over", "own", "per", "rather", "re", "same",
      "shall", "shan", "she", "should", "shouldn", "since", "so", "some",
      "such", "than", "that", "the", "their", "theirs", "them", "themselves",
      "then", "there", "therefore", "these", "they", "this", "those",
      "though", "through", "thus", "to", "too", "under", "until", "up", "upon",
      "us", "ve", "very", "was", "wasn", "we", "were", "weren", "what",
      "whatever", "when", "where", "whether", "which", "while", "who", "whom",
      "whose", "why", "will", "with", "within", "without", "won", "would",
      "wouldn", "yet", "you", "your", "yours", "yourself", "yourselves",
  };
  return kWords;
}

}  // namespace ottopics
