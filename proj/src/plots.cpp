/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cstdio>
#include <sstream>
#include <string>

#include "overlapix/io.hpp"

// Everything here is plain text assembled from integers and exact rationals,
// so byte-identical output across runs and platforms comes for free.

namespace overlapix {

namespace {

constexpr int kCell = 56;
constexpr int kLeftMargin = 110;
constexpr int kTopMargin = 96;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// linear ramp white -> deep red, computed in integer arithmetic
std::string fill_color(const Rational& value) {
  BigInt num = rational_num(value);
  BigInt den = rational_den(value);
  auto channel = [&](int from, int to) {
    BigInt scaled = BigInt(from) * den + BigInt(to - from) * num;
    BigInt rounded = (scaled * 2 + den) / (den * 2);
    return rounded.convert_to<int>();
  };
  char buf[32];
  std::snprintf(buf, sizeof buf, "rgb(%d,%d,%d)", channel(255, 178),
                channel(255, 24), channel(255, 43));
  return buf;
}

const char* text_color(const Rational& value) {
  return 2 * value > 1 ? "#ffffff" : "#000000";
}

void svg_open(std::ostringstream& svg, int width, int height) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\" font-family=\"monospace\" font-size=\"12\">\n";
}

} // namespace

std::string render_heatmap_csv(const std::vector<std::string>& study_ids,
                               const std::vector<std::vector<Rational>>& matrix) {
  std::ostringstream csv;
  csv << "study_i,study_j,numerator,denominator,value\n";
  for (std::size_t i = 0; i < study_ids.size(); ++i) {
    for (std::size_t j = i + 1; j < study_ids.size(); ++j) {
      const Rational& v = matrix[i][j];
      csv << study_ids[i] << "," << study_ids[j] << "," << rational_num(v).str() << ","
          << rational_den(v).str() << "," << to_decimal_string(v, 6) << "\n";
    }
  }
  return csv.str();
}

std::string render_heatmap_svg(const std::vector<std::string>& study_ids,
                               const std::vector<std::vector<Rational>>& matrix) {
  std::size_t n = study_ids.size();
  int width = kLeftMargin + static_cast<int>(n) * kCell + 16;
  int height = kTopMargin + static_cast<int>(n) * kCell + 16;

  std::ostringstream svg;
  svg_open(svg, width, height);
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";

  for (std::size_t j = 0; j < n; ++j) {
    int x = kLeftMargin + static_cast<int>(j) * kCell + kCell / 2;
    svg << "<text x=\"" << x << "\" y=\"" << kTopMargin - 10
        << "\" text-anchor=\"start\" transform=\"rotate(-55 " << x << " "
        << kTopMargin - 10 << ")\">" << xml_escape(study_ids[j]) << "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    int y = kTopMargin + static_cast<int>(i) * kCell + kCell / 2 + 4;
    svg << "<text x=\"" << kLeftMargin - 8 << "\" y=\"" << y
        << "\" text-anchor=\"end\">" << xml_escape(study_ids[i]) << "</text>\n";
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      int x = kLeftMargin + static_cast<int>(j) * kCell;
      int y = kTopMargin + static_cast<int>(i) * kCell;
      if (i == j) {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
            << "\" height=\"" << kCell
            << "\" fill=\"#dddddd\" stroke=\"#999999\"/>\n";
        continue;
      }
      const Rational& v = matrix[i][j];
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
          << "\" height=\"" << kCell << "\" fill=\"" << fill_color(v)
          << "\" stroke=\"#999999\"/>\n";
      svg << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
          << "\" text-anchor=\"middle\" fill=\"" << text_color(v) << "\">"
          << xml_escape(to_fraction_string(v)) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_gridplot_svg(const std::vector<std::string>& study_ids,
                                const EnumerationResult& result) {
  std::size_t n = study_ids.size();
  std::size_t cols = result.reports.size();

  if (cols == 0) {
    std::ostringstream svg;
    svg_open(svg, 480, 120);
    svg << "<rect width=\"480\" height=\"120\" fill=\"#ffffff\"/>\n"
        << "<text x=\"240\" y=\"64\" text-anchor=\"middle\">no combinations with "
           "potential above the threshold</text>\n"
        << "</svg>\n";
    return svg.str();
  }

  const int col_w = 36;
  const int row_h = 28;
  int width = kLeftMargin + static_cast<int>(cols) * col_w + 16;
  int height = kTopMargin + static_cast<int>(n) * row_h + 48;

  std::ostringstream svg;
  svg_open(svg, width, height);
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";

  for (std::size_t c = 0; c < cols; ++c) {
    int x = kLeftMargin + static_cast<int>(c) * col_w + col_w / 2;
    svg << "<text x=\"" << x << "\" y=\"" << kTopMargin - 10
        << "\" text-anchor=\"start\" transform=\"rotate(-55 " << x << " "
        << kTopMargin - 10 << ")\">"
        << xml_escape(to_fraction_string(result.reports[c].overall)) << "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    int y = kTopMargin + static_cast<int>(i) * row_h + row_h / 2 + 4;
    svg << "<text x=\"" << kLeftMargin - 8 << "\" y=\"" << y
        << "\" text-anchor=\"end\">" << xml_escape(study_ids[i]) << "</text>\n";
    // zebra stripe for readability
    if (i % 2 == 0)
      svg << "<rect x=\"" << kLeftMargin << "\" y=\""
          << kTopMargin + static_cast<int>(i) * row_h << "\" width=\""
          << static_cast<int>(cols) * col_w << "\" height=\"" << row_h
          << "\" fill=\"#f2f2f2\"/>\n";
  }

  for (std::size_t c = 0; c < cols; ++c) {
    const auto& report = result.reports[c];
    int cx = kLeftMargin + static_cast<int>(c) * col_w + col_w / 2;
    auto members = report.subset.members();
    int y_first = kTopMargin + static_cast<int>(members.front()) * row_h + row_h / 2;
    int y_last = kTopMargin + static_cast<int>(members.back()) * row_h + row_h / 2;
    if (members.size() > 1)
      svg << "<line x1=\"" << cx << "\" y1=\"" << y_first << "\" x2=\"" << cx
          << "\" y2=\"" << y_last << "\" stroke=\"#555555\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
      int cy = kTopMargin + static_cast<int>(i) * row_h + row_h / 2;
      bool member = report.subset.contains(i);
      svg << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"8\" fill=\""
          << (member ? "#333333" : "#dddddd") << "\"/>\n";
    }
  }

  if (result.truncated) {
    svg << "<text x=\"" << kLeftMargin << "\" y=\""
        << kTopMargin + static_cast<int>(n) * row_h + 24 << "\">showing top "
        << cols << " of " << result.total_found << " combinations</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_gridplot_text(const std::vector<std::string>& study_ids,
                                 const EnumerationResult& result) {
  std::ostringstream out;
  if (result.reports.empty()) {
    out << "no combinations with potential above the threshold\n";
    return out.str();
  }

  std::size_t width = 0;
  for (const auto& id : study_ids) width = std::max(width, id.size());

  out << "columns ordered by decreasing potential\n";
  out << std::string(width, ' ');
  for (std::size_t c = 1; c <= result.reports.size(); ++c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, " %4zu", c);
    out << buf;
  }
  out << "\n";
  for (std::size_t i = 0; i < study_ids.size(); ++i) {
    out << study_ids[i] << std::string(width - study_ids[i].size(), ' ');
    for (const auto& report : result.reports)
      out << (report.subset.contains(i) ? "    #" : "    .");
    out << "\n";
  }
  for (std::size_t c = 0; c < result.reports.size(); ++c) {
    const auto& report = result.reports[c];
    out << c + 1 << ": potential " << to_fraction_string(report.overall) << " ("
        << to_decimal_string(report.overall, 6) << "), studies";
    for (auto i : report.subset.members()) out << " " << study_ids[i];
    out << ", naive pooled size " << report.pooled_size_naive << "\n";
  }
  if (result.truncated)
    out << "truncated: showing " << result.reports.size() << " of "
        << result.total_found << " combinations\n";
  return out.str();
}

} // namespace overlapix
