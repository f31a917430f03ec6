#include "mhrag/interchange.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mhrag/error.hpp"

namespace mhrag {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

Vector to_vector(const json& j, std::string_view what) {
  if (!j.is_array()) throw DataError(std::string(what) + " must be an array of numbers");
  Vector out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw DataError(std::string(what) + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

ordered_json vector_json(std::span<const double> v) {
  auto arr = ordered_json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename F>
auto read_jsonl(std::istream& in, F&& parse_line) {
  std::vector<decltype(parse_line(std::string_view{}))> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_line(line));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

StoreManifest parse_manifest(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw DataError("manifest must be a JSON object");
  StoreManifest m;
  try {
    m.h = require(j, "h").get<std::size_t>();
    m.d_head = require(j, "d_head").get<std::size_t>();
    m.d_full = require(j, "d_full").get<std::size_t>();
    m.distance = j.value("distance", std::string(kCosineDistance));
    m.model_tag = j.value("model_tag", std::string());
    m.layer_index = j.value("layer_index", -1);
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
  m.validate();
  return m;
}

std::string manifest_to_json(const StoreManifest& m) {
  ordered_json j;
  j["h"] = m.h;
  j["d_head"] = m.d_head;
  j["d_full"] = m.d_full;
  j["distance"] = m.distance;
  j["model_tag"] = m.model_tag;
  j["layer_index"] = m.layer_index;
  return j.dump(2) + "\n";
}

StoreManifest read_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const StoreManifest& manifest) {
  write_text_file(path, manifest_to_json(manifest));
}

CorpusRecord parse_record(std::string_view json_line) {
  const json j = parse_json(json_line);
  if (!j.is_object()) throw DataError("record must be a JSON object");
  CorpusRecord rec;
  rec.chunk.id = require_string(j, "id");
  rec.chunk.text = require_string(j, "text");
  if (auto it = j.find("category"); it != j.end() && !it->is_null()) {
    rec.chunk.category = it->get<std::string>();
  }
  if (auto it = j.find("source"); it != j.end() && !it->is_null()) {
    rec.chunk.source = it->get<std::string>();
  }
  const auto& heads = require(j, "heads");
  if (!heads.is_array()) throw DataError("'heads' must be an array of arrays");
  std::vector<Vector> hv;
  hv.reserve(heads.size());
  for (const auto& h : heads) hv.push_back(to_vector(h, "'heads' entry"));
  rec.embedding = MultiAspectEmbedding(std::move(hv));
  if (auto it = j.find("standard"); it != j.end() && !it->is_null()) {
    rec.standard = to_vector(*it, "'standard'");
  }
  return rec;
}

std::string record_to_json(const CorpusRecord& rec) {
  ordered_json j;
  j["id"] = rec.chunk.id;
  j["text"] = rec.chunk.text;
  j["category"] = rec.chunk.category;
  if (rec.chunk.source) j["source"] = *rec.chunk.source;
  auto heads = ordered_json::array();
  for (const auto& h : rec.embedding.heads()) heads.push_back(vector_json(h));
  j["heads"] = std::move(heads);
  if (rec.standard) j["standard"] = vector_json(*rec.standard);
  return j.dump();
}

std::vector<CorpusRecord> read_records(std::istream& in) {
  return read_jsonl(in, [](std::string_view line) { return parse_record(line); });
}

std::vector<CorpusRecord> read_records(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_records(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_records(std::ostream& out, std::span<const CorpusRecord> records) {
  for (const auto& r : records) out << record_to_json(r) << '\n';
}

void write_records(const std::filesystem::path& path, std::span<const CorpusRecord> records) {
  std::ostringstream os;
  write_records(os, records);
  write_text_file(path, os.str());
}

std::vector<QueryEmbedding> read_query_embeddings(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_jsonl(in, [](std::string_view line) {
      const json j = parse_json(line);
      QueryEmbedding q;
      q.id = j.value("id", std::string());
      q.text = j.value("text", std::string());
      const auto& heads = require(j, "heads");
      if (!heads.is_array()) throw DataError("'heads' must be an array of arrays");
      std::vector<Vector> hv;
      for (const auto& h : heads) hv.push_back(to_vector(h, "'heads' entry"));
      q.heads = MultiAspectEmbedding(std::move(hv));
      if (auto it = j.find("standard"); it != j.end() && !it->is_null()) {
        q.standard = to_vector(*it, "'standard'");
      }
      return q;
    });
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string query_embedding_to_json(const QueryEmbedding& q) {
  ordered_json j;
  j["id"] = q.id;
  j["text"] = q.text;
  auto heads = ordered_json::array();
  for (const auto& h : q.heads.heads()) heads.push_back(vector_json(h));
  j["heads"] = std::move(heads);
  if (q.standard) j["standard"] = vector_json(*q.standard);
  return j.dump();
}

void write_query_embeddings(const std::filesystem::path& path,
                            std::span<const QueryEmbedding> queries) {
  std::string out;
  for (const auto& q : queries) {
    out += query_embedding_to_json(q);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_store(const std::filesystem::path& dir, const MultiSpaceStore& store) {
  const auto records = store.export_records();
  write_records(dir / "records.jsonl", records);
  write_manifest(dir / "manifest.json", store.manifest());
}

MultiSpaceStore read_store(const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir / "manifest.json");
  const auto path = dir / "records.jsonl";
  try {
    return ingest(manifest, read_records(path));
  } catch (const DataError& e) {
    const std::string what = e.what();
    if (what.starts_with(path.string())) throw;
    throw DataError(path.string() + ": " + what);
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mhrag
