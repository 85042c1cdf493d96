#include <algorithm>
#include <numeric>

#include "desgraph/assign.hpp"
#include "desgraph/error.hpp"

namespace desgraph {

std::vector<std::vector<std::size_t>> williams_square(std::size_t t) {
  if (t == 0) return {};
  std::vector<std::size_t> seq{0};
  for (std::size_t k = 1; seq.size() < t; ++k) {
    seq.push_back(k);
    if (seq.size() < t) seq.push_back(t - k);
  }
  const std::size_t width = t % 2 == 0 ? t : 2 * t;
  std::vector<std::vector<std::size_t>> square(t, std::vector<std::size_t>(width));
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t j = 0; j < t; ++j) {
      square[r][j] = (seq[r] + j) % t;
      if (width > t) square[r][t + j] = (seq[t - 1 - r] + j) % t;
    }
  }
  return square;
}

namespace {

/// Distinct levels of a units-table column in order of first appearance.
std::vector<LevelId> unique_levels(const std::vector<LevelId>& column) {
  std::vector<LevelId> out;
  for (LevelId l : column) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  return out;
}

std::size_t position(const std::vector<LevelId>& levels, LevelId l) {
  return static_cast<std::size_t>(std::find(levels.begin(), levels.end(), l) - levels.begin());
}

}  // namespace

std::vector<std::size_t> ordering_williams(const OrderingContext& ctx) {
  if (ctx.constraint.size() != 2) {
    throw DesignError(ErrorKind::BadConstraintArity,
                      "williams needs exactly two constraint factors, got " +
                          std::to_string(ctx.constraint.size()));
  }
  const auto first = ctx.units.column(ctx.constraint[0]);
  const auto second = ctx.units.column(ctx.constraint[1]);
  auto a = unique_levels(first), b = unique_levels(second);
  const bool swap = b.size() < a.size();
  const auto& row_col = swap ? second : first;
  const auto& col_col = swap ? first : second;
  const auto& rows = swap ? b : a;
  const auto& cols = swap ? a : b;

  const std::size_t t = ctx.trts.rows.size();
  if (rows.size() != t) {
    throw DesignError(ErrorKind::RowCountMismatch,
                      "williams needs the row factor to have " + std::to_string(t) +
                          " levels, it has " + std::to_string(rows.size()));
  }
  const auto square = williams_square(t);
  const std::size_t width = square.front().size();
  const std::size_t tiles = (cols.size() + width - 1) / width;
  std::vector<std::vector<std::size_t>> layout(t, std::vector<std::size_t>(tiles * width));
  for (std::size_t tile = 0; tile < tiles; ++tile) {
    std::vector<std::size_t> relabel(t);
    std::iota(relabel.begin(), relabel.end(), 0);
    ctx.rng.shuffle(std::span<std::size_t>(relabel));
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t j = 0; j < width; ++j) layout[r][tile * width + j] = relabel[square[r][j]];
    }
  }

  std::vector<std::size_t> out;
  out.reserve(row_col.size());
  for (std::size_t i = 0; i < row_col.size(); ++i) {
    out.push_back(layout[position(rows, row_col[i])][position(cols, col_col[i])]);
  }
  return out;
}

}  // namespace desgraph
