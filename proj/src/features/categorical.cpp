#include "ctiv/features/categorical.hpp"

#include <cmath>

#include "ctiv/errors.hpp"

namespace ctiv::features {

CategoryMap::CategoryMap(std::vector<std::string> categories) : categories_(std::move(categories)) {
  codes_.reserve(categories_.size());
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (!codes_.emplace(categories_[i], i + 1).second)
      throw ContractError("category '" + categories_[i] + "' repeated");
  }
}

CategoryMap CategoryMap::fit(std::span<const std::string> values) {
  std::vector<std::string> categories;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& v : values) {
    if (seen.emplace(v, categories.size()).second) categories.push_back(v);
  }
  return CategoryMap(std::move(categories));
}

std::size_t CategoryMap::code(std::string_view value) const {
  auto it = codes_.find(std::string(value));
  return it == codes_.end() ? kUnknown : it->second;
}

std::vector<double> CategoryMap::one_hot(std::string_view value) const {
  std::vector<double> row(categories_.size(), 0.0);
  if (auto c = code(value); c != kUnknown) row[c - 1] = 1.0;
  return row;
}

CategoricalBlock encode_categorical(std::span<const std::string> column, CategoricalMode mode) {
  CategoricalBlock block{CategoryMap::fit(column), {}};
  block.rows.reserve(column.size());
  for (const auto& v : column) {
    if (mode == CategoricalMode::label) {
      block.rows.push_back({static_cast<double>(block.map.code(v))});
    } else {
      block.rows.push_back(block.map.one_hot(v));
    }
  }
  return block;
}

Scaler Scaler::fit(std::span<const double> column) {
  if (column.empty()) throw ContractError("cannot standardize an empty column");
  double mean = 0.0;
  for (double x : column) mean += x;
  mean /= static_cast<double>(column.size());
  double var = 0.0;
  for (double x : column) var += (x - mean) * (x - mean);
  var /= static_cast<double>(column.size());
  const double sd = std::sqrt(var);
  return {mean, sd > 0.0 ? sd : 1.0};
}

StandardizedColumn standardize(std::span<const double> column) {
  StandardizedColumn out{{}, Scaler::fit(column)};
  out.values.reserve(column.size());
  for (double x : column) out.values.push_back(out.scaler.apply(x));
  return out;
}

}  // namespace ctiv::features
