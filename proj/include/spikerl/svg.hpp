// Line-chart SVG emission for learning curves: one polyline per seed
// (smoothed column) plus the across-seed mean. Pure function of the curve.

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "spikerl/curve.hpp"

namespace spikerl {

inline std::string svg_render(const CurveFile& cf, const std::string& title = "") {
  constexpr int kW = 800, kH = 500, kPad = 50;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kW) +
         "\" height=\"" + std::to_string(kH) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (cf.rows.empty()) {
    out += "</svg>\n";
    return out;
  }
  int max_episode = 1;
  double lo = cf.rows.front().moving_avg, hi = lo;
  for (const auto& r : cf.rows) {
    max_episode = std::max(max_episode, r.episode);
    lo = std::min(lo, r.moving_avg);
    hi = std::max(hi, r.moving_avg);
  }
  if (hi == lo) hi = lo + 1.0;
  auto px = [&](double episode) {
    return kPad + (episode - 1.0) / std::max(1, max_episode - 1) * (kW - 2 * kPad);
  };
  auto py = [&](double v) { return kH - kPad - (v - lo) / (hi - lo) * (kH - 2 * kPad); };

  std::map<std::uint64_t, std::vector<const CurveRow*>> by_seed;
  for (const auto& r : cf.rows) by_seed[r.seed].push_back(&r);

  for (const auto& [seed, rows] : by_seed) {
    out += "<polyline fill=\"none\" stroke=\"#9dbcd4\" stroke-width=\"1\" points=\"";
    for (const auto* r : rows) {
      out += format_double(px(r->episode)) + "," + format_double(py(r->moving_avg)) + " ";
    }
    out += "\"/>\n";
  }

  // across-seed mean of the smoothed column per episode
  std::vector<double> sums(static_cast<std::size_t>(max_episode) + 1, 0.0);
  std::vector<int> counts(static_cast<std::size_t>(max_episode) + 1, 0);
  for (const auto& r : cf.rows) {
    sums[static_cast<std::size_t>(r.episode)] += r.moving_avg;
    counts[static_cast<std::size_t>(r.episode)] += 1;
  }
  out += "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"2\" points=\"";
  for (int e = 1; e <= max_episode; ++e) {
    if (counts[static_cast<std::size_t>(e)] == 0) continue;
    const double m =
        sums[static_cast<std::size_t>(e)] / counts[static_cast<std::size_t>(e)];
    out += format_double(px(e)) + "," + format_double(py(m)) + " ";
  }
  out += "\"/>\n";

  out += "<line x1=\"" + std::to_string(kPad) + "\" y1=\"" + std::to_string(kH - kPad) +
         "\" x2=\"" + std::to_string(kW - kPad) + "\" y2=\"" + std::to_string(kH - kPad) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + std::to_string(kPad) + "\" y1=\"" + std::to_string(kPad) + "\" x2=\"" +
         std::to_string(kPad) + "\" y2=\"" + std::to_string(kH - kPad) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + std::to_string(kPad) + "\" y=\"" + std::to_string(kH - kPad + 20) +
         "\" font-size=\"12\">episode 1</text>\n";
  out += "<text x=\"" + std::to_string(kW - kPad - 60) + "\" y=\"" +
         std::to_string(kH - kPad + 20) + "\" font-size=\"12\">" + std::to_string(max_episode) +
         "</text>\n";
  out += "<text x=\"5\" y=\"" + std::to_string(kH - kPad) + "\" font-size=\"12\">" +
         format_double(lo) + "</text>\n";
  out += "<text x=\"5\" y=\"" + std::to_string(kPad) + "\" font-size=\"12\">" + format_double(hi) +
         "</text>\n";
  if (!title.empty()) {
    out += "<text x=\"" + std::to_string(kW / 2 - 100) + "\" y=\"20\" font-size=\"14\">" + title +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace spikerl
