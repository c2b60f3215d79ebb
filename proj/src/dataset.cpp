#include "causal_cpd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "causal_cpd/error.hpp"
#include "causal_cpd/file_util.hpp"

namespace ccpd {

namespace fs = std::filesystem;

Domain::Domain(std::vector<int> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) throw std::invalid_argument("domain needs at least two symbols");
  for (std::size_t k = 1; k < symbols_.size(); ++k)
    if (symbols_[k] <= symbols_[k - 1])
      throw std::invalid_argument("domain symbols must be strictly increasing");
}

Domain Domain::infer(std::span<const int> values) {
  std::set<int> distinct(values.begin(), values.end());
  if (distinct.size() < 2)
    throw DataError("domain size " + std::to_string(distinct.size()) + " < 2: series carries no information");
  return Domain(std::vector<int>(distinct.begin(), distinct.end()));
}

std::optional<int> Domain::code_of(int symbol) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end() || *it != symbol) return std::nullopt;
  return static_cast<int>(it - symbols_.begin());
}

std::vector<std::string> default_component_names(int n) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) names.push_back("X" + std::to_string(j + 1));
  return names;
}

Dataset::Dataset(CodeMatrix codes, Domain domain, std::vector<std::string> component_names,
                 std::vector<std::string> time_labels)
    : codes_(std::move(codes)),
      domain_(std::move(domain)),
      names_(std::move(component_names)),
      time_labels_(std::move(time_labels)) {
  if (codes_.rows() < 1) throw std::invalid_argument("dataset needs at least one component");
  if (codes_.cols() < 2) throw std::invalid_argument("dataset needs at least two time steps");
  if (codes_.size() > 0 && (codes_.minCoeff() < 0 || codes_.maxCoeff() >= domain_.size()))
    throw std::invalid_argument("dataset code outside the domain");
  if (names_.empty()) names_ = default_component_names(components());
  if (static_cast<int>(names_.size()) != components())
    throw std::invalid_argument("component name count does not match the data");
  if (std::set<std::string>(names_.begin(), names_.end()).size() != names_.size())
    throw std::invalid_argument("component names must be unique");
  if (!time_labels_.empty() && static_cast<int>(time_labels_.size()) != length())
    throw std::invalid_argument("time label count does not match the data");
}

Dataset Dataset::from_symbols(const Eigen::Ref<const Eigen::MatrixXi>& symbols, Domain domain,
                              std::vector<std::string> component_names) {
  CodeMatrix codes(symbols.rows(), symbols.cols());
  for (Eigen::Index j = 0; j < symbols.rows(); ++j)
    for (Eigen::Index t = 0; t < symbols.cols(); ++t) {
      auto c = domain.code_of(symbols(j, t));
      if (!c) throw DataError("value " + std::to_string(symbols(j, t)) + " is outside the domain");
      codes(j, t) = *c;
    }
  return Dataset(std::move(codes), std::move(domain), std::move(component_names));
}

int Dataset::component_index(std::string_view name) const {
  for (std::size_t j = 0; j < names_.size(); ++j)
    if (names_[j] == name) return static_cast<int>(j);
  throw std::invalid_argument("unknown component '" + std::string(name) + "'");
}

bool Dataset::operator==(const Dataset& other) const {
  return domain_ == other.domain_ && names_ == other.names_ && time_labels_ == other.time_labels_ &&
         codes_.rows() == other.codes_.rows() && codes_.cols() == other.codes_.cols() && codes_ == other.codes_;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<int> parse_int(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return v;
}

std::string position(std::size_t line, std::size_t col) {
  return "row " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

fs::path sidecar_path_for(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".schema.json");
  return p;
}

ColumnSchema read_sidecar(const fs::path& path, ColumnSchema base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema sidecar '" + path.string() + "': " + e.what());
  }
  try {
    if (j.contains("domain")) base.domain = Domain(j.at("domain").get<std::vector<int>>());
    if (j.contains("components")) base.component_names = j.at("components").get<std::vector<std::string>>();
    if (j.contains("header")) base.header = j.at("header").get<bool>() ? HeaderMode::present : HeaderMode::absent;
    if (j.contains("time_labels")) base.time_labels = j.at("time_labels").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema sidecar '" + path.string() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError("schema sidecar '" + path.string() + "': " + e.what());
  }
  return base;
}

Dataset load_csv(const fs::path& path, const ColumnSchema& requested) {
  ColumnSchema schema = requested;
  if (schema.discover_sidecar) {
    const auto side = sidecar_path_for(path);
    std::error_code ec;
    if (fs::exists(side, ec)) {
      // Explicit settings in `requested` win over the sidecar.
      ColumnSchema from_file = read_sidecar(side, schema);
      if (requested.domain) from_file.domain = requested.domain;
      if (!requested.component_names.empty()) from_file.component_names = requested.component_names;
      if (requested.header != HeaderMode::automatic) from_file.header = requested.header;
      if (requested.time_labels) from_file.time_labels = true;
      schema = std::move(from_file);
    }
  }

  const std::string text = read_file(path);
  std::vector<std::string_view> lines;
  {
    std::string_view rest = text;
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      if (!trim(line).empty()) lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty()) throw DataError("'" + path.string() + "' is empty");
  // Strip a UTF-8 byte order mark.
  if (lines.front().size() >= 3 && lines.front().substr(0, 3) == "\xEF\xBB\xBF") lines.front().remove_prefix(3);

  const std::size_t label_cols = schema.time_labels ? 1 : 0;
  const auto first = split_row(lines.front());
  if (first.size() <= label_cols) throw DataError("'" + path.string() + "' has no component columns");
  const std::size_t width = first.size();

  bool has_header = schema.header == HeaderMode::present;
  if (schema.header == HeaderMode::automatic)
    has_header = std::any_of(first.begin() + static_cast<std::ptrdiff_t>(label_cols), first.end(),
                             [](std::string_view c) { return !parse_int(c); });

  std::vector<std::string> names = schema.component_names;
  if (has_header && names.empty())
    for (std::size_t c = label_cols; c < width; ++c) names.emplace_back(first[c]);
  const std::size_t n = width - label_cols;
  if (!names.empty() && names.size() != n)
    throw DataError("expected " + std::to_string(names.size()) + " component columns, found " + std::to_string(n));

  const std::size_t first_data = has_header ? 1 : 0;
  const std::size_t T = lines.size() - first_data;
  Eigen::MatrixXi symbols(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(T));
  std::vector<std::string> labels;
  if (label_cols) labels.reserve(T);
  for (std::size_t r = first_data; r < lines.size(); ++r) {
    const auto cells = split_row(lines[r]);
    if (cells.size() != width)
      throw DataError("ragged row " + std::to_string(r + 1) + ": expected " + std::to_string(width) + " cells, found " +
                      std::to_string(cells.size()));
    if (label_cols) labels.emplace_back(cells[0]);
    for (std::size_t c = label_cols; c < width; ++c) {
      auto v = parse_int(cells[c]);
      if (!v) throw DataError("cannot parse '" + std::string(cells[c]) + "' as an integer at " + position(r + 1, c + 1));
      if (schema.domain && !schema.domain->code_of(*v))
        throw DataError("value " + std::to_string(*v) + " at " + position(r + 1, c + 1) + " is outside the declared domain");
      symbols(static_cast<Eigen::Index>(c - label_cols), static_cast<Eigen::Index>(r - first_data)) = *v;
    }
  }
  if (T < 2) throw DataError("'" + path.string() + "' needs at least two time steps");

  Domain domain = schema.domain ? *schema.domain
                                : Domain::infer(std::span<const int>(symbols.data(), static_cast<std::size_t>(symbols.size())));
  CodeMatrix codes(symbols.rows(), symbols.cols());
  for (Eigen::Index j = 0; j < symbols.rows(); ++j)
    for (Eigen::Index t = 0; t < symbols.cols(); ++t) codes(j, t) = *domain.code_of(symbols(j, t));
  try {
    return Dataset(std::move(codes), std::move(domain), std::move(names), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw DataError("'" + path.string() + "': " + e.what());
  }
}

void save_csv(const Dataset& ds, const fs::path& path) {
  if (path.empty()) throw DataError("cannot write dataset: empty path");
  std::ostringstream out;
  if (ds.has_time_labels()) out << "time,";
  for (int j = 0; j < ds.components(); ++j) out << (j ? "," : "") << ds.name(j);
  out << '\n';
  for (int t = 0; t < ds.length(); ++t) {
    if (ds.has_time_labels()) out << ds.time_labels()[static_cast<std::size_t>(t)] << ',';
    for (int j = 0; j < ds.components(); ++j) out << (j ? "," : "") << ds.domain().symbol(ds.code(j, t));
    out << '\n';
  }
  write_file_atomic(path, out.str());

  nlohmann::json side = {{"domain", ds.domain().symbols()},
                         {"components", ds.component_names()},
                         {"header", true},
                         {"time_labels", ds.has_time_labels()}};
  write_file_atomic(sidecar_path_for(path), side.dump(2) + "\n");
}

}  // namespace ccpd
