#include "mhrag/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "mhrag/error.hpp"
#include "mhrag/parallel.hpp"
#include "mhrag/random.hpp"

namespace mhrag {

void CategorySpec::validate(std::size_t min_chars) const {
  std::unordered_set<std::string> ids;
  for (const auto& d : documents) {
    if (!ids.insert(d.id).second) {
      throw DataError("category '" + name + "': duplicate document id '" + d.id + "'");
    }
    if (d.text.size() < min_chars) {
      throw DataError("document '" + d.id + "' has " + std::to_string(d.text.size()) +
                      " characters, fewer than " + std::to_string(min_chars));
    }
  }
}

std::vector<CategorySpec> read_documents(const std::filesystem::path& path,
                                         std::size_t min_chars) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<CategorySpec> categories;
  std::unordered_map<std::string, std::size_t> by_name;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Document d{j.at("id").get<std::string>(), j.value("title", std::string()),
                 j.at("text").get<std::string>()};
      if (d.title.empty()) d.title = d.id;
      const auto category = j.at("category").get<std::string>();
      if (!ids.insert(d.id).second) throw DataError("duplicate document id '" + d.id + "'");
      auto [it, inserted] = by_name.emplace(category, categories.size());
      if (inserted) categories.push_back({category, {}});
      categories[it->second].documents.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& c : categories) c.validate(min_chars);
  return categories;
}

std::vector<QueryPlan> sample_query_plans(std::span<const CategorySpec> categories,
                                          std::span<const std::size_t> aspect_counts,
                                          std::size_t queries_per_count, std::uint64_t seed) {
  for (std::size_t n : aspect_counts) {
    if (n == 0) throw UsageError("aspect counts must be positive");
    if (n > categories.size()) {
      throw DataError("aspect count " + std::to_string(n) + " exceeds the " +
                      std::to_string(categories.size()) + " available categories");
    }
  }

  Rng rng(seed);
  std::vector<QueryPlan> plans;
  plans.reserve(aspect_counts.size() * queries_per_count);
  for (std::size_t n : aspect_counts) {
    // Unused documents per category for this batch.
    std::vector<std::vector<std::size_t>> remaining(categories.size());
    for (std::size_t c = 0; c < categories.size(); ++c) {
      remaining[c].resize(categories[c].documents.size());
      for (std::size_t d = 0; d < remaining[c].size(); ++d) remaining[c][d] = d;
    }
    for (std::size_t q = 0; q < queries_per_count; ++q) {
      std::vector<std::size_t> eligible;
      for (std::size_t c = 0; c < categories.size(); ++c) {
        if (!remaining[c].empty()) eligible.push_back(c);
      }
      if (eligible.size() < n) {
        throw DataError("not enough unused documents to build " +
                        std::to_string(queries_per_count) + " plans with " + std::to_string(n) +
                        " aspects");
      }
      QueryPlan plan;
      plan.aspects = n;
      for (std::size_t i = 0; i < n; ++i) {
        // Partial Fisher-Yates over the eligible categories.
        const auto j = i + static_cast<std::size_t>(rng.below(eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
        const std::size_t c = eligible[i];
        auto& pool = remaining[c];
        const auto pick = static_cast<std::size_t>(rng.below(pool.size()));
        plan.picks.push_back({categories[c].name, categories[c].documents[pool[pick]].id});
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

namespace {

std::string join_titles(std::span<const Document> articles) {
  std::string out;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    if (i) out += ", ";
    out += articles[i].title;
  }
  return out;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string build_story_prompt(std::span<const Document> articles) {
  const std::string titles = join_titles(articles);
  std::string p;
  p += "Please create a story about the attached " + std::to_string(articles.size()) +
       " articles on the topics " + titles + ".\n\n";
  p +=
      "It is very important that each of the attached articles is relevant to the story, in a "
      "way that references the content of the article, not just its title. But please also "
      "mention each title at least once. Please make sure that all of the attached articles are "
      "relevant to your story, and that each article is referenced in at least two sentences! "
      "They do not necessarily have to be referenced in the same order, but make sure no "
      "article is forgotten.\n\n";
  p +=
      "Important: Output only the story, no additional text. And do not use bullet points, or "
      "paragraphs.\n\n";
  p += "Articles:\n---------\n";
  for (const auto& a : articles) {
    p += "Article " + a.title + ":\n" + a.text + "\n\n";
  }
  p += "---------\n";
  p += "Again, make sure that you reference all the following topics in your story: " + titles +
       "\n";
  return p;
}

std::vector<std::string> missing_titles(std::string_view story,
                                        std::span<const Document> articles) {
  const std::string haystack = lowercase(story);
  std::vector<std::string> missing;
  for (const auto& a : articles) {
    if (haystack.find(lowercase(a.title)) == std::string::npos) missing.push_back(a.title);
  }
  return missing;
}

StoryOutcome generate_story_query(std::span<const Document> articles, ChatCompletionClient& llm,
                                  const StoryOptions& options) {
  if (articles.empty()) throw UsageError("story generation needs at least one article");
  if (options.max_attempts == 0) throw UsageError("max_attempts must be positive");
  const std::vector<ChatMessage> messages{{"user", build_story_prompt(articles)}};
  StoryOutcome outcome;
  while (outcome.attempts < options.max_attempts) {
    ++outcome.attempts;
    outcome.text = llm.complete(messages);
    outcome.missing_titles = missing_titles(outcome.text, articles);
    if (outcome.missing_titles.empty() && outcome.text.size() >= options.min_length) {
      outcome.flagged = false;
      return outcome;
    }
  }
  outcome.flagged = true;
  return outcome;
}

StoryBatch generate_story_queries(std::span<const QueryPlan> plans,
                                  std::span<const CategorySpec> categories,
                                  ChatCompletionClient& llm, const StoryOptions& options,
                                  std::size_t parallelism) {
  std::unordered_map<std::string, const Document*> docs;
  for (const auto& c : categories) {
    for (const auto& d : c.documents) docs.emplace(d.id, &d);
  }
  std::vector<std::vector<Document>> articles(plans.size());
  std::vector<EvalQuery> queries(plans.size());
  std::map<std::size_t, std::size_t> per_count;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& plan = plans[i];
    char id[32];
    std::snprintf(id, sizeof(id), "a%02zu-q%03zu", plan.aspects, per_count[plan.aspects]++);
    queries[i].id = id;
    queries[i].aspects = plan.aspects;
    for (const auto& pick : plan.picks) {
      auto it = docs.find(pick.document_id);
      if (it == docs.end()) throw DataError("plan references unknown document '" + pick.document_id + "'");
      articles[i].push_back(*it->second);
      queries[i].ground_truth.push_back({pick.document_id, pick.category});
    }
  }

  StoryBatch batch;
  batch.outcomes.resize(plans.size());
  parallel_for(plans.size(), parallelism, [&](std::size_t i) {
    batch.outcomes[i] = generate_story_query(articles[i], llm, options);
  });
  for (std::size_t i = 0; i < plans.size(); ++i) {
    queries[i].text = batch.outcomes[i].text;
    (batch.outcomes[i].flagged ? batch.flagged : batch.queries).push_back(std::move(queries[i]));
  }
  return batch;
}

}  // namespace mhrag
