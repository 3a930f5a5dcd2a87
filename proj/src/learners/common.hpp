#pragma once

#include "ads/error.hpp"
#include "ads/table.hpp"

namespace ads::detail {

inline void check_training(const Table& train, const Labels& labels) {
  if (train.n_rows() != labels.size()) throw Error("training rows and labels differ in length");
  if (train.n_rows() == 0) throw Error("cannot fit on an empty training set");
  for (const auto& r : train.rows) {
    if (r.size() != train.n_cols()) throw Error("ragged training table");
  }
  for (int y : labels) {
    if (y != kBelow && y != kAbove) throw Error("labels must be 0 (below) or 1 (above)");
  }
}

}  // namespace ads::detail
