#ifndef CAUSAL_CPD_DATASET_HPP
#define CAUSAL_CPD_DATASET_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ccpd {

/// Component-major matrix of symbol codes: row j is component j, column t is
/// time t. Row-major so each component series is contiguous.
using CodeMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Finite set of symbols shared by all components. Symbols are kept sorted;
/// the position of a symbol is its code.
class Domain {
 public:
  /// Throws std::invalid_argument unless there are at least two strictly
  /// increasing symbols.
  explicit Domain(std::vector<int> symbols);

  static Domain binary() { return Domain({0, 1}); }
  /// Sorted distinct values of `values`; throws DataError for fewer than 2.
  static Domain infer(std::span<const int> values);

  int size() const { return static_cast<int>(symbols_.size()); }
  int symbol(int code) const { return symbols_.at(static_cast<std::size_t>(code)); }
  std::optional<int> code_of(int symbol) const;
  const std::vector<int>& symbols() const { return symbols_; }

  bool operator==(const Domain&) const = default;

 private:
  std::vector<int> symbols_;
};

/// Immutable discrete multivariate time series.
class Dataset {
 public:
  /// `codes` must hold values in [0, domain.size()). Empty names default to
  /// X1..Xn; time_labels is either empty or has one entry per column.
  Dataset(CodeMatrix codes, Domain domain, std::vector<std::string> component_names = {},
          std::vector<std::string> time_labels = {});

  /// Builds a dataset from raw symbol values, mapping them through `domain`.
  static Dataset from_symbols(const Eigen::Ref<const Eigen::MatrixXi>& symbols, Domain domain,
                              std::vector<std::string> component_names = {});

  int components() const { return static_cast<int>(codes_.rows()); }
  int length() const { return static_cast<int>(codes_.cols()); }
  int domain_size() const { return domain_.size(); }

  const CodeMatrix& codes() const { return codes_; }
  int code(int component, int t) const { return codes_(component, t); }
  std::span<const int> series(int component) const {
    return {codes_.row(component).data(), static_cast<std::size_t>(codes_.cols())};
  }

  const Domain& domain() const { return domain_; }
  const std::vector<std::string>& component_names() const { return names_; }
  const std::string& name(int component) const { return names_.at(static_cast<std::size_t>(component)); }
  /// Throws std::invalid_argument for unknown names.
  int component_index(std::string_view name) const;
  const std::vector<std::string>& time_labels() const { return time_labels_; }
  bool has_time_labels() const { return !time_labels_.empty(); }

  bool operator==(const Dataset& other) const;

 private:
  CodeMatrix codes_;
  Domain domain_;
  std::vector<std::string> names_;
  std::vector<std::string> time_labels_;
};

std::vector<std::string> default_component_names(int n);

enum class HeaderMode { automatic, present, absent };

/// How a CSV file maps onto a Dataset. Layout: one row per time step, one
/// column per component, optional leading time-label column.
struct ColumnSchema {
  /// `automatic` treats the first row as a header when any of its component
  /// cells is not an integer.
  HeaderMode header = HeaderMode::automatic;
  bool time_labels = false;
  std::optional<Domain> domain;
  std::vector<std::string> component_names;
  /// Merge `<stem>.schema.json` next to the CSV when it exists.
  bool discover_sidecar = true;
};

/// `data.csv` -> `data.schema.json`.
std::filesystem::path sidecar_path_for(const std::filesystem::path& csv);

/// Reads a JSON sidecar ({"domain": [...], "components": [...]}, optional
/// "header" and "time_labels" booleans) on top of `base`.
ColumnSchema read_sidecar(const std::filesystem::path& path, ColumnSchema base = {});

/// Throws DataError with row/column positions on malformed input.
Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema = {});

/// Writes the CSV (header always, time labels as first column when present)
/// plus its schema sidecar, so load_csv(path) reproduces `ds` exactly.
void save_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace ccpd

#endif  // CAUSAL_CPD_DATASET_HPP
