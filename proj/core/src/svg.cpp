#include "timeset/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace timeset {

namespace {

std::string num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string svg_open(double width, double height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
         num(height) + "\">\n";
}

}  // namespace

std::string render_timeline_svg(const DocumentRecord& doc) {
  const auto expanded = expand_coex(doc.graph);
  if (!detect_cycles(expanded).empty()) {
    std::string svg = svg_open(420, 80);
    svg += "<rect x=\"0\" y=\"0\" width=\"420\" height=\"80\" fill=\"#fff0f0\" "
           "stroke=\"#c00\"/>\n";
    svg += "<text x=\"12\" y=\"34\" font-family=\"sans-serif\" font-size=\"14\" "
           "fill=\"#c00\">" +
           escape(doc.id) + ": cycle after COEX expansion</text>\n";
    svg += "<text x=\"12\" y=\"56\" font-family=\"sans-serif\" font-size=\"11\">run "
           "validate for the vertex list</text>\n";
    svg += "</svg>\n";
    return svg;
  }

  const auto layers = layering(doc.graph);
  std::size_t tallest = 1;
  for (const auto& layer : layers) tallest = std::max(tallest, layer.size());

  const double col_width = 150.0;
  const double row_height = 64.0;
  const double width = 60.0 + col_width * static_cast<double>(layers.size());
  const double height = 70.0 + row_height * static_cast<double>(tallest);

  std::map<std::string, std::pair<double, double>> position;
  for (std::size_t col = 0; col < layers.size(); ++col) {
    for (std::size_t row = 0; row < layers[col].size(); ++row) {
      position[layers[col][row]] = {60.0 + col_width * static_cast<double>(col),
                                    60.0 + row_height * static_cast<double>(row)};
    }
  }

  std::string svg = svg_open(width, height);
  svg += "<text x=\"12\" y=\"22\" font-family=\"sans-serif\" font-size=\"13\" "
         "font-weight=\"bold\">" +
         escape(doc.id) + "</text>\n";
  for (std::size_t col = 0; col < layers.size(); ++col) {
    svg += "<text x=\"" + num(60.0 + col_width * static_cast<double>(col)) +
           "\" y=\"40\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#666\" "
           "text-anchor=\"middle\">T" +
           std::to_string(col + 1) + "</text>\n";
  }
  // Direct annotated edges only; expansion and closure stay implicit.
  for (const auto& [a, b] : doc.graph.edges()) {
    const auto [x1, y1] = position.at(a);
    const auto [x2, y2] = position.at(b);
    svg += "<line x1=\"" + num(x1 + 14) + "\" y1=\"" + num(y1) + "\" x2=\"" +
           num(x2 - 14) + "\" y2=\"" + num(y2) +
           "\" stroke=\"#333\" stroke-width=\"1.2\"/>\n";
    svg += "<circle cx=\"" + num(x2 - 14) + "\" cy=\"" + num(y2) +
           "\" r=\"2.4\" fill=\"#333\"/>\n";
  }
  for (const auto& [a, b] : doc.graph.coex_links()) {
    const auto [x1, y1] = position.at(a);
    const auto [x2, y2] = position.at(b);
    svg += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
           "\" y2=\"" + num(y2) +
           "\" stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (const auto& [id, pos] : position) {
    const auto& ev = doc.graph.event(id);
    svg += "<circle cx=\"" + num(pos.first) + "\" cy=\"" + num(pos.second) +
           "\" r=\"14\" fill=\"#e8f0fe\" stroke=\"#3367d6\"/>\n";
    svg += "<text x=\"" + num(pos.first) + "\" y=\"" + num(pos.second + 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">e" +
           std::to_string(ev.index) + "</text>\n";
    svg += "<text x=\"" + num(pos.first) + "\" y=\"" + num(pos.second + 28) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" +
           escape(ev.mention) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_boxplot_svg(const std::string& title,
                               const std::vector<BoxplotBox>& boxes) {
  const double box_width = 46.0;
  const double slot_width = 96.0;
  const double plot_left = 64.0;
  const double plot_top = 48.0;
  const double plot_height = 280.0;
  const double width =
      plot_left + slot_width * static_cast<double>(std::max<std::size_t>(boxes.size(), 1)) +
      30.0;
  const double height = plot_top + plot_height + 64.0;

  auto y_of = [&](double value) { return plot_top + plot_height * (1.0 - value); };

  std::string svg = svg_open(width, height);
  svg += "<text x=\"" + num(width / 2) +
         "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" font-weight=\"bold\" "
         "text-anchor=\"middle\">" +
         escape(title) + "</text>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double value = 0.25 * tick;
    svg += "<line x1=\"" + num(plot_left) + "\" y1=\"" + num(y_of(value)) + "\" x2=\"" +
           num(width - 20) + "\" y2=\"" + num(y_of(value)) +
           "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(plot_left - 8) + "\" y=\"" + num(y_of(value) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" +
           num(value) + "</text>\n";
  }

  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& box = boxes[i];
    const double cx = plot_left + slot_width * (static_cast<double>(i) + 0.5);
    svg += "<line x1=\"" + num(cx) + "\" y1=\"" + num(y_of(box.whisker_lo)) + "\" x2=\"" +
           num(cx) + "\" y2=\"" + num(y_of(box.whisker_hi)) +
           "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    for (double w : {box.whisker_lo, box.whisker_hi}) {
      svg += "<line x1=\"" + num(cx - 10) + "\" y1=\"" + num(y_of(w)) + "\" x2=\"" +
             num(cx + 10) + "\" y2=\"" + num(y_of(w)) +
             "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    }
    svg += "<rect x=\"" + num(cx - box_width / 2) + "\" y=\"" + num(y_of(box.q3)) +
           "\" width=\"" + num(box_width) + "\" height=\"" +
           num(y_of(box.q1) - y_of(box.q3)) +
           "\" fill=\"#e8f0fe\" stroke=\"#3367d6\" stroke-width=\"1.2\"/>\n";
    svg += "<line x1=\"" + num(cx - box_width / 2) + "\" y1=\"" + num(y_of(box.median)) +
           "\" x2=\"" + num(cx + box_width / 2) + "\" y2=\"" + num(y_of(box.median)) +
           "\" stroke=\"#c5221f\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(cx) + "\" y=\"" + num(plot_top + plot_height + 22) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
           escape(box.label) + "</text>\n";
    svg += "<text x=\"" + num(cx) + "\" y=\"" + num(plot_top + plot_height + 38) +
           "\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#666\" "
           "text-anchor=\"middle\">n=" +
           std::to_string(box.count) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace timeset
