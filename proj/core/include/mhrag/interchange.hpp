#pragma once

// Interchange format shared with the embedding extractor:
//   manifest.json  - one JSON object with the StoreManifest fields
//   records.jsonl  - one object per chunk:
//     {"id", "text", "category", "source", "heads": [[d_head] x h], "standard": [d_full]}
// "source" and "standard" are omitted when absent. Numbers are written as
// shortest round-trip decimals.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhrag/store.hpp"
#include "mhrag/types.hpp"

namespace mhrag {

std::string format_double(double value);

StoreManifest parse_manifest(std::string_view json_text);
std::string manifest_to_json(const StoreManifest& manifest);
StoreManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const StoreManifest& manifest);

CorpusRecord parse_record(std::string_view json_line);
std::string record_to_json(const CorpusRecord& record);

/// Parses JSON-Lines; blank lines are skipped. Errors name the 1-based line.
std::vector<CorpusRecord> read_records(std::istream& in);
std::vector<CorpusRecord> read_records(const std::filesystem::path& path);
void write_records(std::ostream& out, std::span<const CorpusRecord> records);
void write_records(const std::filesystem::path& path, std::span<const CorpusRecord> records);

/// Query-side embeddings: {"id", "text", "heads", "standard"} per line.
std::vector<QueryEmbedding> read_query_embeddings(const std::filesystem::path& path);
std::string query_embedding_to_json(const QueryEmbedding& query);
void write_query_embeddings(const std::filesystem::path& path,
                            std::span<const QueryEmbedding> queries);

/// Store directory layout: <dir>/manifest.json and <dir>/records.jsonl.
void write_store(const std::filesystem::path& dir, const MultiSpaceStore& store);
MultiSpaceStore read_store(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it over `path`.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace mhrag
