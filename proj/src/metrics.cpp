#include "metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"

namespace silhuetta {

double relative_error(double real, double experimental) {
  if (experimental == 0.0)
    throw Error(ErrorCode::DivideByZero, "relative error undefined for zero experimental volume");
  return (real - experimental) / experimental * 100.0;
}

double precision_metric(double real, double experimental) {
  if (!(real > 0.0) || !(experimental > 0.0))
    throw Error(ErrorCode::DivideByZero, "precision needs positive real and experimental volumes");
  return std::abs(relative_error(real, experimental)) / real * 100.0;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // nudge representation error (e.g. 0.185 stored as 0.18499..) past the tie
  const double scaled = value * scale;
  return std::round(scaled + std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled)) / scale;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  double r = round_half_up(v, 2);
  if (r == 0.0) r = 0.0;  // no "-0.00"
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError,
                "records line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::string report_csv(std::span<const VolumeRecord> records) {
  std::string out = "experiment,method,exp_volume_cm3,real_volume_cm3,RE_pct,precision_pct\n";
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, double>> sums;
  std::map<std::string, std::size_t> counts;

  for (const auto& r : records) {
    const double re = relative_error(r.real_volume, r.experimental_volume);
    const double prec = precision_metric(r.real_volume, r.experimental_volume);
    out += r.experiment + ',' + r.method + ',' + shortest(r.experimental_volume) + ',' +
           shortest(r.real_volume) + ',' + fixed2(re) + ',' + fixed2(prec) + '\n';
    if (!counts.count(r.method)) order.push_back(r.method);
    sums[r.method].first += re;
    sums[r.method].second += prec;
    ++counts[r.method];
  }
  for (const auto& m : order) {
    const double n = static_cast<double>(counts[m]);
    out += "AVERAGE," + m + ",,," + fixed2(sums[m].first / n) + ',' + fixed2(sums[m].second / n) + '\n';
  }
  return out;
}

std::vector<VolumeRecord> parse_records_csv(const std::string& text) {
  std::vector<VolumeRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("experiment", 0) == 0) continue;
    }
    const auto f = split_csv(line);
    if (f.size() < 4 || f.size() > 5)
      throw Error(ErrorCode::ParseError,
                  "records line " + std::to_string(line_no) + ": expected 4 or 5 fields");
    VolumeRecord r;
    r.experiment = f[0];
    r.method = f[1];
    r.experimental_volume = parse_number(f[2], line_no);
    r.real_volume = parse_number(f[3], line_no);
    if (f.size() == 5 && !f[4].empty()) r.real_uncertainty = parse_number(f[4], line_no);
    if (!(r.experimental_volume > 0.0) || !(r.real_volume > 0.0))
      throw Error(ErrorCode::ParseError,
                  "records line " + std::to_string(line_no) + ": volumes must be > 0");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<VolumeRecord> load_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_records_csv(ss.str());
}

}  // namespace silhuetta
