#include "mhrag/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "mhrag/error.hpp"
#include "mhrag/interchange.hpp"
#include "mhrag/parallel.hpp"
#include "mhrag/random.hpp"

namespace mhrag {

namespace {

using Pair = std::pair<std::size_t, std::size_t>;

// Floyd's algorithm: `count` distinct values from [0, total), returned sorted.
std::vector<std::uint64_t> sample_distinct(std::uint64_t total, std::uint64_t count, Rng& rng) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(count * 2);
  for (std::uint64_t j = total - count; j < total; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

double pair_distance(std::span<const double> u, double u_sq, std::span<const double> v,
                     double v_sq) {
  return cosine_distance(dot(u, v), u_sq, v_sq);
}

}  // namespace

RawHeadStats raw_head_stats(const MultiSpaceStore& store, std::optional<std::size_t> sample_size,
                            std::uint64_t seed, std::size_t jobs) {
  if (store.empty()) throw DataError("cannot score an empty store");
  if (sample_size && *sample_size == 0) throw UsageError("sample size must be positive");

  const std::size_t n = store.size();
  const std::size_t h = store.space_count();
  const std::uint64_t total_pairs = static_cast<std::uint64_t>(n) * n;

  std::vector<Pair> sampled;
  const bool exact = !sample_size || n == 1 || *sample_size >= total_pairs;
  if (!exact) {
    Rng rng(seed);
    for (std::uint64_t code : sample_distinct(total_pairs, *sample_size, rng)) {
      sampled.emplace_back(code / n, code % n);
    }
  }

  RawHeadStats raw{Vector(h, 0.0), Vector(h, 0.0)};
  parallel_for(h, jobs, [&](std::size_t space) {
    Vector sq(n);
    double norm_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sq[j] = dot(store.head_vector(space, j), store.head_vector(space, j));
      norm_sum += std::sqrt(sq[j]);
    }
    raw.mean_norm[space] = norm_sum / static_cast<double>(n);

    double dist_sum = 0.0;
    if (exact) {
      // d(j, j') = d(j', j): visit each unordered pair once, count it twice.
      for (std::size_t j = 0; j < n; ++j) {
        auto ej = store.head_vector(space, j);
        dist_sum += pair_distance(ej, sq[j], ej, sq[j]);
        for (std::size_t k = j + 1; k < n; ++k) {
          dist_sum += 2.0 * pair_distance(ej, sq[j], store.head_vector(space, k), sq[k]);
        }
      }
      raw.mean_distance[space] = dist_sum / static_cast<double>(total_pairs);
    } else {
      for (auto [j, k] : sampled) {
        dist_sum += pair_distance(store.head_vector(space, j), sq[j],
                                  store.head_vector(space, k), sq[k]);
      }
      raw.mean_distance[space] = dist_sum / static_cast<double>(sampled.size());
    }
  });
  return raw;
}

HeadScores scale_scores(const RawHeadStats& raw) {
  if (raw.mean_norm.size() != raw.mean_distance.size()) {
    throw UsageError("raw statistics have mismatched lengths");
  }
  auto scaled = [](const Vector& v) {
    const double max = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    Vector out(v.size(), 0.0);
    if (max > 0.0) {
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / max;
    }
    return out;
  };
  HeadScores scores;
  scores.a = scaled(raw.mean_norm);
  scores.b = scaled(raw.mean_distance);
  scores.s.resize(scores.a.size());
  for (std::size_t i = 0; i < scores.s.size(); ++i) scores.s[i] = scores.a[i] * scores.b[i];
  return scores;
}

HeadScores compute_scores(const MultiSpaceStore& store, std::optional<std::size_t> sample_size,
                          std::uint64_t seed, std::size_t jobs) {
  HeadScores scores = scale_scores(raw_head_stats(store, sample_size, seed, jobs));
  scores.sample_size = sample_size;
  scores.seed = seed;
  return scores;
}

std::string scores_to_json(const HeadScores& scores) {
  nlohmann::ordered_json j;
  j["a"] = scores.a;
  j["b"] = scores.b;
  j["s"] = scores.s;
  j["sample_size"] = scores.sample_size ? nlohmann::ordered_json(*scores.sample_size) : nullptr;
  j["seed"] = scores.seed;
  return j.dump(2) + "\n";
}

HeadScores parse_scores(std::string_view json_text) {
  HeadScores scores;
  try {
    const auto j = nlohmann::json::parse(json_text);
    scores.a = j.at("a").get<Vector>();
    scores.b = j.at("b").get<Vector>();
    scores.s = j.at("s").get<Vector>();
    if (auto it = j.find("sample_size"); it != j.end() && !it->is_null()) {
      scores.sample_size = it->get<std::size_t>();
    }
    scores.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("scores: ") + e.what());
  }
  if (scores.a.size() != scores.s.size() || scores.b.size() != scores.s.size()) {
    throw DataError("scores: a, b and s must have equal length");
  }
  for (std::size_t i = 0; i < scores.s.size(); ++i) {
    if (!std::isfinite(scores.s[i]) || scores.s[i] < 0.0) {
      throw DataError("scores: entries must be finite and non-negative");
    }
  }
  return scores;
}

HeadScores read_scores(const std::filesystem::path& path) {
  try {
    return parse_scores(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_scores(const std::filesystem::path& path, const HeadScores& scores) {
  write_text_file(path, scores_to_json(scores));
}

}  // namespace mhrag
