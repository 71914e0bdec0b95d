// Copyright 2026-present the relm project
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

#include <string>
#include <vector>

namespace relm::bench {

// The five benchmark queries. The copies under queries/*.sql are kept
// byte-identical (a test enforces it).

inline constexpr const char *kQ1 = R"sql(SELECT LLM("Recommend movies for the user based on {movie information} and {user review}",
     m.movie_info, r.review_content)
FROM reviews r
JOIN movies m ON r.rotten_tomatoes_link ==
m.rotten_tomatoes_link
)sql";

inline constexpr const char *kQ2 = R"sql(SELECT m.movie_title
FROM movies m
JOIN reviews r ON r.rotten_tomatoes_link =
m.rotten_tomatoes_link
WHERE LLM("Analyze whether this movie would be suitable for kids based on {movie information} and {user review}", m.movie_info, r.review_content) == "Yes"
AND r.review_type == "Fresh"
)sql";

inline constexpr const char *kQ3 = R"sql(SELECT LLM("Recommend movies for the user based on {movie information} and {user review}", m.movie_info, r.review_content) AS recommendations
FROM movies m
JOIN reviews r ON r.rotten_tomatoes_link =
m.rotten_tomatoes_link
WHERE LLM("Analyze whether this movie would be suitable for kids based on {movie information} and {user review}", m.movie_info, r.review_content) == "Yes"
AND r.review_type == "Fresh"
)sql";

inline constexpr const char *kQ4 = R"sql(SELECT AVG(LLM("Rate a satisfaction score between 0 (bad) and 5 (good) based on {review} and {info}: ", r.review_content, m.movie_info)) as AverageScore
FROM reviews r
JOIN movies m ON r.rotten_tomatoes_link =
m.rotten_tomatoes_link
GROUP BY m.movie_title
)sql";

inline constexpr const char *kQ5 = R"sql(SELECT LLM("Given the following {context}, answer this {question}",
     SIMILARITY_SEARCH(s.question),
     s.question)
FROM squad s
WHERE s.is_impossible == FALSE;
)sql";

/// "q1".."q5" lookup; throws ConfigError on anything else.
const char *query_by_name(const std::string &name);

inline const std::vector<std::string> &all_query_names() {
  static const std::vector<std::string> names = {"q1", "q2", "q3", "q4", "q5"};
  return names;
}

}  // namespace relm::bench
