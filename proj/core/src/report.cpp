#include "mhrag/report.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "mhrag/interchange.hpp"

namespace mhrag {

std::vector<RelativeImprovement> relative_improvements(std::span<const AggregateRow> aggregates,
                                                       const std::string& baseline) {
  std::map<std::pair<std::size_t, std::size_t>, double> base;
  for (const auto& a : aggregates) {
    if (a.metric == "xi_w" && a.strategy_tag == baseline) base[{a.aspects, a.k}] = a.summary.mean;
  }
  std::vector<RelativeImprovement> out;
  for (const auto& a : aggregates) {
    if (a.metric != "xi_w" || a.strategy_tag == baseline) continue;
    auto it = base.find({a.aspects, a.k});
    if (it == base.end() || it->second == 0.0) continue;
    out.push_back({a.strategy_tag, a.aspects, a.k, a.summary.mean, it->second,
                   a.summary.mean / it->second - 1.0});
  }
  return out;
}

void write_relative_csv(std::ostream& out, std::span<const RelativeImprovement> rows) {
  out << "strategy,aspects,k,mean_xi_w,baseline_mean_xi_w,relative\n";
  for (const auto& r : rows) {
    out << r.strategy_tag << ',' << r.aspects << ',' << r.k << ',' << format_double(r.mean) << ','
        << format_double(r.baseline_mean) << ',' << format_double(r.relative) << '\n';
  }
}

namespace {

constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

class Svg {
 public:
  Svg(const std::string& title, double y_min, double y_max) : y_min_(y_min), y_max_(y_max) {
    if (y_max_ <= y_min_) y_max_ = y_min_ + 1.0;
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
         << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
         << "</text>\n";
    axis();
  }

  double y(double v) const {
    return kTop + (kHeight - kTop - kBottom) * (1.0 - (v - y_min_) / (y_max_ - y_min_));
  }
  static double plot_width() { return kWidth - kLeft - kRight; }

  void line(double x1, double y1, double x2, double y2, const char* color, double width = 1.0) {
    out_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
         << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
  }
  void text(double x, double yy, const std::string& s, const char* anchor = "middle") {
    out_ << "<text x=\"" << x << "\" y=\"" << yy << "\" text-anchor=\"" << anchor << "\">" << s
         << "</text>\n";
  }
  void raw(const std::string& s) { out_ << s; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  void axis() {
    line(kLeft, kTop, kLeft, kHeight - kBottom, "black");
    line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "black");
    for (int i = 0; i <= 4; ++i) {
      const double v = y_min_ + (y_max_ - y_min_) * i / 4.0;
      std::ostringstream label;
      label.precision(3);
      label << v;
      line(kLeft - 4, y(v), kLeft, y(v), "black");
      text(kLeft - 6, y(v) + 4, label.str(), "end");
    }
  }

  std::ostringstream out_;
  double y_min_;
  double y_max_;
};

std::string improvement_plot(std::size_t aspects, std::span<const RelativeImprovement> rows) {
  std::map<std::string, std::vector<std::pair<std::size_t, double>>> series;
  std::set<std::size_t> ks;
  double lo = 0.0, hi = 0.0;
  for (const auto& r : rows) {
    if (r.aspects != aspects) continue;
    series[r.strategy_tag].emplace_back(r.k, r.relative);
    ks.insert(r.k);
    lo = std::min(lo, r.relative);
    hi = std::max(hi, r.relative);
  }
  Svg svg("Relative Xi_w improvement over baseline, " + std::to_string(aspects) + " aspects",
          lo, hi);
  const std::vector<std::size_t> kv(ks.begin(), ks.end());
  auto x = [&](std::size_t k) {
    const auto idx = static_cast<double>(std::find(kv.begin(), kv.end(), k) - kv.begin());
    return kLeft + Svg::plot_width() * (kv.size() > 1 ? idx / (kv.size() - 1) : 0.5);
  };
  for (std::size_t k : kv) svg.text(x(k), kHeight - kBottom + 18, std::to_string(k));
  svg.text(kLeft + Svg::plot_width() / 2, kHeight - 10, "documents fetched (k)");
  svg.line(kLeft, svg.y(0.0), kWidth - kRight, svg.y(0.0), "#999999");
  std::size_t color = 0;
  for (auto& [tag, pts] : series) {
    const char* c = kPalette[color++ % kPalette.size()];
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      svg.line(x(pts[i].first), svg.y(pts[i].second), x(pts[i + 1].first),
               svg.y(pts[i + 1].second), c, 2.0);
    }
    const double ly = kTop + 16.0 * static_cast<double>(color);
    svg.line(kWidth - kRight + 10, ly - 4, kWidth - kRight + 30, ly - 4, c, 2.0);
    svg.text(kWidth - kRight + 35, ly, tag, "start");
  }
  return svg.finish();
}

std::string boxplot(std::size_t k, std::span<const AggregateRow> aggregates) {
  std::vector<const AggregateRow*> boxes;
  std::set<std::string> tags;
  for (const auto& a : aggregates) {
    if (a.metric == "xi_w" && a.k == k) {
      boxes.push_back(&a);
      tags.insert(a.strategy_tag);
    }
  }
  std::sort(boxes.begin(), boxes.end(), [](const AggregateRow* a, const AggregateRow* b) {
    return std::tie(a->aspects, a->strategy_tag) < std::tie(b->aspects, b->strategy_tag);
  });
  Svg svg("Xi_w per aspect count, k = " + std::to_string(k), 0.0, 1.0);
  const std::vector<std::string> tagv(tags.begin(), tags.end());
  const double slot = Svg::plot_width() / std::max<std::size_t>(1, boxes.size());
  std::size_t last_aspects = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = *boxes[i];
    const auto& s = b.summary;
    const auto color_idx = static_cast<std::size_t>(
        std::find(tagv.begin(), tagv.end(), b.strategy_tag) - tagv.begin());
    const char* c = kPalette[color_idx % kPalette.size()];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = slot * 0.3;
    svg.line(cx, svg.y(s.min), cx, svg.y(s.q1), c);
    svg.line(cx, svg.y(s.q3), cx, svg.y(s.max), c);
    std::ostringstream rect;
    rect << "<rect x=\"" << cx - half << "\" y=\"" << svg.y(s.q3) << "\" width=\"" << 2 * half
         << "\" height=\"" << std::max(0.5, svg.y(s.q1) - svg.y(s.q3)) << "\" fill=\"none\" stroke=\""
         << c << "\"/>\n";
    svg.raw(rect.str());
    svg.line(cx - half, svg.y(s.median), cx + half, svg.y(s.median), c, 2.0);
    if (b.aspects != last_aspects) {
      svg.text(cx, kHeight - kBottom + 18, std::to_string(b.aspects));
      last_aspects = b.aspects;
    }
  }
  svg.text(kLeft + Svg::plot_width() / 2, kHeight - 10, "aspects");
  for (std::size_t i = 0; i < tagv.size(); ++i) {
    const double ly = kTop + 16.0 * static_cast<double>(i + 1);
    const char* c = kPalette[i % kPalette.size()];
    svg.line(kWidth - kRight + 10, ly - 4, kWidth - kRight + 30, ly - 4, c, 2.0);
    svg.text(kWidth - kRight + 35, ly, tagv[i], "start");
  }
  return svg.finish();
}

}  // namespace

std::vector<std::filesystem::path> write_plots(const std::filesystem::path& dir,
                                               std::span<const AggregateRow> aggregates,
                                               std::span<const RelativeImprovement> relative) {
  std::vector<std::filesystem::path> written;
  std::set<std::size_t> aspect_counts, ks;
  for (const auto& r : relative) aspect_counts.insert(r.aspects);
  for (const auto& a : aggregates) ks.insert(a.k);
  for (std::size_t n : aspect_counts) {
    auto path = dir / ("improvement_aspects_" + std::to_string(n) + ".svg");
    write_text_file(path, improvement_plot(n, relative));
    written.push_back(std::move(path));
  }
  for (std::size_t k : ks) {
    auto path = dir / ("boxplot_xi_w_k" + std::to_string(k) + ".svg");
    write_text_file(path, boxplot(k, aggregates));
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace mhrag
