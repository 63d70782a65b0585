#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctiv::features {

// Injective category -> code map. Codes start at 1 in first-appearance
// order; 0 is reserved for categories never seen during fitting.
class CategoryMap {
 public:
  static constexpr std::size_t kUnknown = 0;

  CategoryMap() = default;
  // Categories in code order (code = position + 1). Duplicates rejected.
  explicit CategoryMap(std::vector<std::string> categories);

  static CategoryMap fit(std::span<const std::string> values);

  std::size_t size() const { return categories_.size(); }
  const std::vector<std::string>& categories() const { return categories_; }

  std::size_t code(std::string_view value) const;
  // One 0/1 entry per category; all zero for unknown values.
  std::vector<double> one_hot(std::string_view value) const;

  friend bool operator==(const CategoryMap& a, const CategoryMap& b) {
    return a.categories_ == b.categories_;
  }

 private:
  std::vector<std::string> categories_;
  std::unordered_map<std::string, std::size_t> codes_;
};

enum class CategoricalMode { label, one_hot };

struct CategoricalBlock {
  CategoryMap map;
  std::vector<std::vector<double>> rows;  // width 1 (label) or map.size() (one-hot)
};

// Fits a category map over `column` and encodes it in the requested mode.
CategoricalBlock encode_categorical(std::span<const std::string> column, CategoricalMode mode);

// Population mean / standard deviation of a fitted numeric column. A zero
// deviation is stored as 1 so constant columns scale to zeros.
struct Scaler {
  double mean = 0.0;
  double stddev = 1.0;

  static Scaler fit(std::span<const double> column);
  double apply(double x) const { return (x - mean) / stddev; }
};

struct StandardizedColumn {
  std::vector<double> values;
  Scaler scaler;
};

// Throws ContractError on an empty column.
StandardizedColumn standardize(std::span<const double> column);

}  // namespace ctiv::features
