// Learning-curve records and their CSV form.
//
// Schema: `seed,episode,return,steps,moving_avg_100`, LF line endings, '.'
// decimal separator, shortest round-trip float formatting - so reruns of
// the same configuration are byte-identical.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikerl {

struct CurveRow {
  std::uint64_t seed = 0;
  int episode = 0;  // 1-based, contiguous per seed
  double episode_return = 0.0;
  int steps = 0;
  double moving_avg = 0.0;  // trailing mean of return over min(episode, 100)
};

inline constexpr const char* kCurveHeader = "seed,episode,return,steps,moving_avg_100";

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct CurveFile {
  std::vector<CurveRow> rows;

  static std::string row_csv(const CurveRow& r) {
    std::string line = std::to_string(r.seed);
    line += ',';
    line += std::to_string(r.episode);
    line += ',';
    line += format_double(r.episode_return);
    line += ',';
    line += std::to_string(r.steps);
    line += ',';
    line += format_double(r.moving_avg);
    line += '\n';
    return line;
  }

  std::string to_csv() const {
    std::string out = kCurveHeader;
    out += '\n';
    for (const auto& r : rows) out += row_csv(r);
    return out;
  }

  static CurveFile from_csv(std::istream& in) {
    CurveFile cf;
    std::string line;
    if (!std::getline(in, line) || line != kCurveHeader) {
      throw std::runtime_error("curve file: unexpected schema header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') continue;  // truncation / comment marker
      CurveRow r;
      std::istringstream ls(line);
      std::string field;
      auto next = [&]() {
        if (!std::getline(ls, field, ',')) {
          throw std::runtime_error("curve file: short row");
        }
        return field;
      };
      r.seed = std::stoull(next());
      r.episode = std::stoi(next());
      r.episode_return = std::stod(next());
      r.steps = std::stoi(next());
      r.moving_avg = std::stod(next());
      cf.rows.push_back(r);
    }
    return cf;
  }
};

// Trailing moving average helper used while emitting rows.
class MovingAverage {
 public:
  explicit MovingAverage(int window = 100) : window_(window) {}

  double push(double v) {
    values_.push_back(v);
    sum_ += v;
    if (static_cast<int>(values_.size()) > window_) {
      sum_ -= values_[static_cast<std::size_t>(head_)];
      ++head_;
    }
    return sum_ / static_cast<double>(static_cast<int>(values_.size()) - head_);
  }

  void reset() {
    values_.clear();
    sum_ = 0.0;
    head_ = 0;
  }

 private:
  int window_;
  std::vector<double> values_;
  double sum_ = 0.0;
  int head_ = 0;
};

struct CurveSummary {
  std::size_t rows = 0;
  int seeds = 0;
  double final_mean = 0.0;  // pooled over each seed's last 100 episodes
  double final_std = 0.0;
  double mean_episodes_to_threshold = 0.0;  // never reached counts as max+1
  int seeds_reaching_threshold = 0;
};

inline CurveSummary summarize_curve(const CurveFile& cf, double threshold) {
  CurveSummary s;
  s.rows = cf.rows.size();
  std::vector<std::uint64_t> seeds;
  for (const auto& r : cf.rows) {
    bool found = false;
    for (auto sd : seeds) found = found || sd == r.seed;
    if (!found) seeds.push_back(r.seed);
  }
  s.seeds = static_cast<int>(seeds.size());
  std::vector<double> tail;
  double to_threshold_sum = 0.0;
  for (auto sd : seeds) {
    int max_episode = 0;
    for (const auto& r : cf.rows) {
      if (r.seed == sd) max_episode = std::max(max_episode, r.episode);
    }
    int reach = max_episode + 1;
    for (const auto& r : cf.rows) {
      if (r.seed != sd) continue;
      if (r.episode > max_episode - 100) tail.push_back(r.episode_return);
      if (r.moving_avg >= threshold && r.episode < reach) reach = r.episode;
    }
    if (reach <= max_episode) ++s.seeds_reaching_threshold;
    to_threshold_sum += reach;
  }
  if (!tail.empty()) {
    double mean = 0.0;
    for (double v : tail) mean += v;
    mean /= static_cast<double>(tail.size());
    double var = 0.0;
    for (double v : tail) var += (v - mean) * (v - mean);
    var /= static_cast<double>(tail.size());
    s.final_mean = mean;
    s.final_std = std::sqrt(var);
  }
  if (s.seeds > 0) s.mean_episodes_to_threshold = to_threshold_sum / s.seeds;
  return s;
}

// Aggregate table for several named curves; threshold drives the
// episodes-to-threshold column.
inline std::string compare_table(const std::vector<std::pair<std::string, CurveFile>>& curves,
                                 double threshold) {
  if (curves.size() < 2) throw std::invalid_argument("compare: need at least two curve files");
  std::ostringstream os;
  os << "curve,rows,seeds,final100_mean,final100_std,episodes_to_threshold,threshold\n";
  for (const auto& [name, cf] : curves) {
    const auto s = summarize_curve(cf, threshold);
    os << name << ',' << s.rows << ',' << s.seeds << ',' << format_double(s.final_mean) << ','
       << format_double(s.final_std) << ',' << format_double(s.mean_episodes_to_threshold) << ','
       << format_double(threshold) << '\n';
  }
  return os.str();
}

}  // namespace spikerl
