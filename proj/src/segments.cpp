#include "causal_cpd/segments.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "causal_cpd/error.hpp"
#include "causal_cpd/file_util.hpp"

namespace ccpd {

namespace fs = std::filesystem;

Eigen::Index configuration_count(std::size_t parents, int domain_size) {
  constexpr Eigen::Index kLimit = Eigen::Index{1} << 24;
  Eigen::Index count = 1;
  for (std::size_t k = 0; k < parents; ++k) {
    count *= domain_size;
    if (count > kLimit)
      throw std::invalid_argument("parent set of size " + std::to_string(parents) + " has more than 2^24 configurations");
  }
  return count;
}

ConfigMatrix ConfigMatrix::build(const LaggedParentSet& parents, int domain_size) {
  ConfigMatrix m{parents, domain_size, {}};
  const Eigen::Index rows = configuration_count(parents.size(), domain_size);
  const auto cols = static_cast<Eigen::Index>(parents.size());
  m.rows.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    Eigen::Index rest = r;
    for (Eigen::Index c = cols - 1; c >= 0; --c) {
      m.rows(r, c) = static_cast<int>(rest % domain_size);
      rest /= domain_size;
    }
  }
  return m;
}

int configuration_at(const Dataset& ds, const LaggedParentSet& parents, int t) {
  int idx = 0;
  const int s = ds.domain_size();
  for (const auto& l : parents) idx = idx * s + ds.code(l.component, t - l.lag);
  return idx;
}

std::vector<Segment> build_segments(const Dataset& ds, const LaggedParentSet& spa, int component, int tau_max_eff) {
  if (component < 0 || component >= ds.components()) throw std::invalid_argument("segment component out of range");
  if (tau_max_eff < spa.max_lag()) throw std::invalid_argument("tau_max_eff is smaller than the largest parent lag");
  for (const auto& l : spa)
    if (l.component < 0 || l.component >= ds.components() || l.lag < 1)
      throw std::invalid_argument("segment parent set references an invalid lagged variable");
  const Eigen::Index count = configuration_count(spa.size(), ds.domain_size());
  std::vector<Segment> segments(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    segments[static_cast<std::size_t>(k)].component = component;
    segments[static_cast<std::size_t>(k)].config_index = static_cast<int>(k);
  }
  const auto series = ds.series(component);
  for (int t = std::max(tau_max_eff, 0); t < ds.length(); ++t) {
    auto& seg = segments[static_cast<std::size_t>(configuration_at(ds, spa, t))];
    seg.values.push_back(series[static_cast<std::size_t>(t)]);
    seg.time_indices.push_back(t);
  }
  return segments;
}

void dump_segments(const Dataset& ds, std::span<const Segment> segments, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create segment dump directory '" + dir.string() + "'");
  for (const auto& seg : segments) {
    if (seg.empty()) continue;
    std::ostringstream out;
    out << "t,value\n";
    for (std::size_t k = 0; k < seg.values.size(); ++k)
      out << seg.time_indices[k] << ',' << ds.domain().symbol(seg.values[k]) << '\n';
    char index[16];
    std::snprintf(index, sizeof index, "%05d", seg.config_index);
    write_file_atomic(dir / (ds.name(seg.component) + "_L" + index + ".csv"), out.str());
  }
}

std::vector<SegmentFile> load_segment_dump(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError("segment dump '" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv" &&
        entry.path().filename().string().find(".pe.") == std::string::npos)
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("segment dump '" + dir.string() + "' holds no CSV files");

  std::vector<SegmentFile> out;
  for (const auto& path : files) {
    SegmentFile f{path, {}, {}};
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      ++row;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || (row == 1 && line.rfind("t,", 0) == 0)) continue;
      const auto comma = line.find(',');
      int t = 0, v = 0;
      const bool ok = comma != std::string::npos &&
                      std::from_chars(line.data(), line.data() + comma, t).ec == std::errc() &&
                      std::from_chars(line.data() + comma + 1, line.data() + line.size(), v).ec == std::errc();
      if (!ok) throw DataError("'" + path.string() + "': cannot parse row " + std::to_string(row));
      if (!f.times.empty() && t <= f.times.back())
        throw DataError("'" + path.string() + "': time stamps must increase (row " + std::to_string(row) + ")");
      f.times.push_back(t);
      f.symbols.push_back(v);
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace ccpd
