#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mhrag/evaluation.hpp"
#include "mhrag/llm.hpp"

namespace mhrag {

struct Document {
  std::string id;
  std::string title;
  std::string text;

  bool operator==(const Document&) const = default;
};

inline constexpr std::size_t kDefaultMinDocumentChars = 800;

struct CategorySpec {
  std::string name;
  std::vector<Document> documents;

  /// Every text has at least `min_chars` characters; ids are unique.
  void validate(std::size_t min_chars = kDefaultMinDocumentChars) const;
};

/// Reads {"id", "title", "text", "category"} lines, grouped by category in
/// order of first appearance. Document ids must be unique corpus-wide.
std::vector<CategorySpec> read_documents(const std::filesystem::path& path,
                                         std::size_t min_chars = kDefaultMinDocumentChars);

struct PlanPick {
  std::string category;
  std::string document_id;

  bool operator==(const PlanPick&) const = default;
};

struct QueryPlan {
  std::size_t aspects = 0;
  std::vector<PlanPick> picks;

  bool operator==(const QueryPlan&) const = default;
};

inline const std::vector<std::size_t> kDefaultAspectCounts{1, 5, 10, 15, 20};
inline constexpr std::size_t kDefaultQueriesPerCount = 25;

/// For every aspect count n, `queries_per_count` plans that each pick n
/// distinct categories and one document from each. Within the batch of one
/// aspect count no document is picked twice.
std::vector<QueryPlan> sample_query_plans(std::span<const CategorySpec> categories,
                                          std::span<const std::size_t> aspect_counts,
                                          std::size_t queries_per_count, std::uint64_t seed);

/// The query-generation prompt for a set of articles.
std::string build_story_prompt(std::span<const Document> articles);

struct StoryOptions {
  std::size_t max_attempts = 3;
  std::size_t min_length = 400;
};

struct StoryOutcome {
  std::string text;  // last response received
  std::size_t attempts = 0;
  bool flagged = false;  // validation never passed; needs manual review
  std::vector<std::string> missing_titles;
};

/// Titles (case-insensitive) that `story` does not mention.
std::vector<std::string> missing_titles(std::string_view story, std::span<const Document> articles);

/// Asks the LLM for a story covering `articles`, retrying until every title
/// is mentioned and the text is long enough. Transport errors propagate.
StoryOutcome generate_story_query(std::span<const Document> articles, ChatCompletionClient& llm,
                                  const StoryOptions& options = {});

struct StoryBatch {
  std::vector<EvalQuery> queries;      // accepted stories
  std::vector<EvalQuery> flagged;      // stories that failed validation
  std::vector<StoryOutcome> outcomes;  // one per plan, plan order
};

/// Runs generate_story_query for every plan with at most `parallelism`
/// requests in flight. Query ids are "a<aspects>-q<index>".
StoryBatch generate_story_queries(std::span<const QueryPlan> plans,
                                  std::span<const CategorySpec> categories,
                                  ChatCompletionClient& llm, const StoryOptions& options = {},
                                  std::size_t parallelism = 1);

}  // namespace mhrag
