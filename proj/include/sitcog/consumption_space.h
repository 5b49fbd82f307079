#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sitcog/rng.h"

namespace sitcog {

struct GridLocation {
  int x = 0;
  int y = 0;
  auto operator<=>(const GridLocation&) const = default;
};

inline int manhattan(GridLocation a, GridLocation b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

// North is y - 1. Neighbour lists and tie-breaks always follow N, E, S, W.
enum class Direction { north, east, south, west };

inline constexpr Direction kDirections[] = {Direction::north, Direction::east, Direction::south,
                                            Direction::west};

GridLocation step(GridLocation loc, Direction d);

// Product proximity gradient: 1 on a product cell, decaying linearly with
// Manhattan distance to 0 at `radius`, max-composed over products.
class ProximityField {
 public:
  ProximityField(int width, int height, int radius);

  int width() const { return width_; }
  int height() const { return height_; }
  int radius() const { return radius_; }
  double at(GridLocation loc) const { return values_[index(loc)]; }
  std::span<const double> values() const { return values_; }

  double contribution(GridLocation cell, GridLocation product) const;
  // Sets every cell within the radius of `product` to max(current, contribution).
  void stamp(GridLocation product);
  // Recomputes the cells near `around` from scratch over `products`.
  void refresh_near(GridLocation around, std::span<const GridLocation> products);

  bool operator==(const ProximityField&) const = default;

 private:
  std::size_t index(GridLocation loc) const {
    return static_cast<std::size_t>(loc.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(loc.x);
  }

  int width_;
  int height_;
  int radius_;
  std::vector<double> values_;
};

ProximityField rebuild_field(int width, int height, int radius, std::span<const GridLocation> products);

enum class MoveResult { accepted, rejected };

struct RespawnResult {
  GridLocation location;
  int dx = 0;  // last drawn offsets, before clamping
  int dy = 0;
  int redraws = 0;
  bool probed = false;
};

inline constexpr int kRespawnRedraws = 100;

// Bounded grid with single-consumer occupancy, single-product occupancy and a
// proximity field kept current as products move.
class ConsumptionSpace {
 public:
  ConsumptionSpace(int width, int height, int field_radius);

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(GridLocation loc) const {
    return loc.x >= 0 && loc.y >= 0 && loc.x < width_ && loc.y < height_;
  }
  GridLocation clamp(GridLocation loc) const;

  std::vector<GridLocation> von_neumann_neighbors(GridLocation loc) const;

  int add_consumer(GridLocation loc);  // returns the new consumer id
  int add_product(GridLocation loc);   // returns the new instance id

  std::optional<int> consumer_at(GridLocation loc) const;
  std::optional<int> product_at(GridLocation loc) const;
  GridLocation consumer_location(int id) const { return consumers_.at(static_cast<std::size_t>(id)); }
  GridLocation product_location(int id) const { return products_.at(static_cast<std::size_t>(id)); }
  std::span<const GridLocation> consumer_locations() const { return consumers_; }
  std::span<const GridLocation> product_locations() const { return products_; }
  int consumer_count() const { return static_cast<int>(consumers_.size()); }
  int product_count() const { return static_cast<int>(products_.size()); }

  // `to` must be the current cell or a von Neumann neighbour of it.
  MoveResult move_consumer(int id, GridLocation to);

  // Moves a product to a free cell and updates the field incrementally.
  void move_product(int id, GridLocation to);

  const ProximityField& field() const { return field_; }
  double field_at(GridLocation loc) const { return field_.at(loc); }
  // Field value as if `product` were absent.
  double field_without(GridLocation loc, int product) const;

  // Neighbour with the largest (smallest) field value, if strictly better
  // than the current cell; otherwise `loc`. `ignore_product` is left out of
  // the field for this query.
  GridLocation ascend(GridLocation loc, int ignore_product = -1) const;
  GridLocation descend(GridLocation loc) const;

  // Relocates a consumed product by a rounded Gaussian offset per axis,
  // clamped to the grid, avoiding cells that already hold a product.
  RespawnResult respawn_product(int id, RandomStream& rng, double sigma);

  // Nearest cell (Manhattan rings, N-E-S-W scan order) without a product.
  GridLocation nearest_product_free(GridLocation from, int ignore_product = -1) const;

  // Cross-checks the cell maps against the entity positions.
  bool audit() const;

 private:
  std::size_t index(GridLocation loc) const {
    return static_cast<std::size_t>(loc.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(loc.x);
  }
  void require_in_bounds(GridLocation loc) const;

  int width_;
  int height_;
  std::vector<int> consumer_cells_;  // -1 when empty
  std::vector<int> product_cells_;
  std::vector<GridLocation> consumers_;
  std::vector<GridLocation> products_;
  ProximityField field_;
};

}  // namespace sitcog
