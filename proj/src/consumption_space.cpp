#include "sitcog/consumption_space.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace sitcog {

GridLocation step(GridLocation loc, Direction d) {
  switch (d) {
    case Direction::north: return {loc.x, loc.y - 1};
    case Direction::east: return {loc.x + 1, loc.y};
    case Direction::south: return {loc.x, loc.y + 1};
    case Direction::west: return {loc.x - 1, loc.y};
  }
  return loc;
}

ProximityField::ProximityField(int width, int height, int radius)
    : width_(width), height_(height), radius_(radius),
      values_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid dimensions must be positive");
  if (radius <= 0) throw std::invalid_argument("field radius must be positive");
}

double ProximityField::contribution(GridLocation cell, GridLocation product) const {
  return std::max(0.0, 1.0 - static_cast<double>(manhattan(cell, product)) / radius_);
}

void ProximityField::stamp(GridLocation product) {
  for (int dy = -radius_ + 1; dy < radius_; ++dy) {
    const int y = product.y + dy;
    if (y < 0 || y >= height_) continue;
    const int span = radius_ - 1 - std::abs(dy);
    for (int x = std::max(0, product.x - span); x <= std::min(width_ - 1, product.x + span); ++x) {
      auto& v = values_[index({x, y})];
      v = std::max(v, contribution({x, y}, product));
    }
  }
}

void ProximityField::refresh_near(GridLocation around, std::span<const GridLocation> products) {
  for (int dy = -radius_ + 1; dy < radius_; ++dy) {
    const int y = around.y + dy;
    if (y < 0 || y >= height_) continue;
    const int span = radius_ - 1 - std::abs(dy);
    for (int x = std::max(0, around.x - span); x <= std::min(width_ - 1, around.x + span); ++x) {
      double v = 0.0;
      for (const auto& p : products) v = std::max(v, contribution({x, y}, p));
      values_[index({x, y})] = v;
    }
  }
}

ProximityField rebuild_field(int width, int height, int radius, std::span<const GridLocation> products) {
  ProximityField field(width, height, radius);
  for (const auto& p : products) field.stamp(p);
  return field;
}

ConsumptionSpace::ConsumptionSpace(int width, int height, int field_radius)
    : width_(width), height_(height),
      consumer_cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), -1),
      product_cells_(consumer_cells_.size(), -1),
      field_(width, height, field_radius) {}

void ConsumptionSpace::require_in_bounds(GridLocation loc) const {
  if (!in_bounds(loc))
    throw std::out_of_range("cell (" + std::to_string(loc.x) + ", " + std::to_string(loc.y) +
                            ") outside the grid");
}

GridLocation ConsumptionSpace::clamp(GridLocation loc) const {
  return {std::clamp(loc.x, 0, width_ - 1), std::clamp(loc.y, 0, height_ - 1)};
}

std::vector<GridLocation> ConsumptionSpace::von_neumann_neighbors(GridLocation loc) const {
  require_in_bounds(loc);
  std::vector<GridLocation> out;
  out.reserve(4);
  for (auto d : kDirections) {
    const auto n = step(loc, d);
    if (in_bounds(n)) out.push_back(n);
  }
  return out;
}

int ConsumptionSpace::add_consumer(GridLocation loc) {
  require_in_bounds(loc);
  auto& cell = consumer_cells_[index(loc)];
  if (cell >= 0) throw std::logic_error("cell already holds a consumer");
  cell = static_cast<int>(consumers_.size());
  consumers_.push_back(loc);
  return cell;
}

int ConsumptionSpace::add_product(GridLocation loc) {
  require_in_bounds(loc);
  auto& cell = product_cells_[index(loc)];
  if (cell >= 0) throw std::logic_error("cell already holds a product");
  cell = static_cast<int>(products_.size());
  products_.push_back(loc);
  field_.stamp(loc);
  return cell;
}

std::optional<int> ConsumptionSpace::consumer_at(GridLocation loc) const {
  require_in_bounds(loc);
  const int id = consumer_cells_[index(loc)];
  return id >= 0 ? std::optional<int>(id) : std::nullopt;
}

std::optional<int> ConsumptionSpace::product_at(GridLocation loc) const {
  require_in_bounds(loc);
  const int id = product_cells_[index(loc)];
  return id >= 0 ? std::optional<int>(id) : std::nullopt;
}

MoveResult ConsumptionSpace::move_consumer(int id, GridLocation to) {
  const GridLocation from = consumer_location(id);
  if (manhattan(from, to) > 1 || !in_bounds(to))
    throw std::logic_error("consumer " + std::to_string(id) + " asked to move to a non-adjacent cell");
  if (to == from) return MoveResult::accepted;
  auto& target = consumer_cells_[index(to)];
  if (target >= 0) return MoveResult::rejected;
  target = id;
  consumer_cells_[index(from)] = -1;
  consumers_[static_cast<std::size_t>(id)] = to;
  return MoveResult::accepted;
}

void ConsumptionSpace::move_product(int id, GridLocation to) {
  require_in_bounds(to);
  const GridLocation from = product_location(id);
  if (to == from) return;
  if (product_cells_[index(to)] >= 0) throw std::logic_error("cell already holds a product");
  product_cells_[index(from)] = -1;
  product_cells_[index(to)] = id;
  products_[static_cast<std::size_t>(id)] = to;
  field_.refresh_near(from, products_);
  field_.stamp(to);
}

double ConsumptionSpace::field_without(GridLocation loc, int product) const {
  const double v = field_at(loc);
  if (product < 0 || field_.contribution(loc, product_location(product)) < v) return v;
  double best = 0.0;
  for (std::size_t p = 0; p < products_.size(); ++p)
    if (static_cast<int>(p) != product) best = std::max(best, field_.contribution(loc, products_[p]));
  return best;
}

GridLocation ConsumptionSpace::ascend(GridLocation loc, int ignore_product) const {
  GridLocation best = loc;
  double best_value = field_without(loc, ignore_product);
  for (const auto& n : von_neumann_neighbors(loc)) {
    const double v = field_without(n, ignore_product);
    if (v > best_value) {
      best = n;
      best_value = v;
    }
  }
  return best;
}

GridLocation ConsumptionSpace::descend(GridLocation loc) const {
  GridLocation best = loc;
  double best_value = field_at(loc);
  for (const auto& n : von_neumann_neighbors(loc)) {
    if (field_at(n) < best_value) {
      best = n;
      best_value = field_at(n);
    }
  }
  return best;
}

GridLocation ConsumptionSpace::nearest_product_free(GridLocation from, int ignore_product) const {
  auto free = [&](GridLocation c) {
    const int p = product_cells_[index(c)];
    return p < 0 || p == ignore_product;
  };
  if (free(from)) return from;
  const int max_ring = width_ + height_;
  for (int r = 1; r <= max_ring; ++r) {
    // Ring cells from north clockwise: (0,-r) -> (r,0) -> (0,r) -> (-r,0).
    for (int k = 0; k < 4 * r; ++k) {
      const int side = k / r, t = k % r;
      GridLocation c;
      switch (side) {
        case 0: c = {from.x + t, from.y - r + t}; break;
        case 1: c = {from.x + r - t, from.y + t}; break;
        case 2: c = {from.x - t, from.y + r - t}; break;
        default: c = {from.x - r + t, from.y - t}; break;
      }
      if (in_bounds(c) && free(c)) return c;
    }
  }
  throw std::logic_error("no product-free cell left on the grid");
}

RespawnResult ConsumptionSpace::respawn_product(int id, RandomStream& rng, double sigma) {
  const GridLocation old = product_location(id);
  RespawnResult result;
  GridLocation target = old;
  for (int attempt = 0; attempt < kRespawnRedraws; ++attempt) {
    result.dx = static_cast<int>(std::lround(rng.normal(0.0, sigma)));
    result.dy = static_cast<int>(std::lround(rng.normal(0.0, sigma)));
    result.redraws = attempt;
    target = clamp({old.x + result.dx, old.y + result.dy});
    const int occupant = product_cells_[index(target)];
    if (occupant < 0 || occupant == id) {
      move_product(id, target);
      result.location = target;
      return result;
    }
  }
  result.probed = true;
  result.location = nearest_product_free(target, id);
  move_product(id, result.location);
  return result;
}

bool ConsumptionSpace::audit() const {
  std::size_t consumers_seen = 0, products_seen = 0;
  for (std::size_t i = 0; i < consumer_cells_.size(); ++i) {
    const GridLocation loc{static_cast<int>(i % static_cast<std::size_t>(width_)),
                           static_cast<int>(i / static_cast<std::size_t>(width_))};
    if (const int c = consumer_cells_[i]; c >= 0) {
      ++consumers_seen;
      if (static_cast<std::size_t>(c) >= consumers_.size() || consumers_[static_cast<std::size_t>(c)] != loc) return false;
    }
    if (const int p = product_cells_[i]; p >= 0) {
      ++products_seen;
      if (static_cast<std::size_t>(p) >= products_.size() || products_[static_cast<std::size_t>(p)] != loc) return false;
    }
  }
  return consumers_seen == consumers_.size() && products_seen == products_.size();
}

}  // namespace sitcog
